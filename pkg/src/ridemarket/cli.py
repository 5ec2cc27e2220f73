"""Command-line entry point: run, generate, validate.

``run`` executes a scenario (or a run manifest) and writes plot-ready CSV
ledgers plus a manifest that reproduces the run; ``generate`` creates
synthetic network/population input files; ``validate`` checks a scenario
without running it and prints the resolved stage table.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from ridemarket import experiment, network, population, scenario
from ridemarket.experiment import LEDGER_COLUMNS

TRAJECTORY_COLUMNS = (
    "day",
    "side",
    "agent_id",
    "u_e",
    "u_wom",
    "u_m",
    "probability",
    "notified",
    "participated",
)


def _write_ledger(path, ledgers):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(LEDGER_COLUMNS)
        for row in ledgers:
            writer.writerow([getattr(row, c) for c in LEDGER_COLUMNS])


def _write_trajectories(path, result):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_COLUMNS)
        for day, r in result.trajectories:
            writer.writerow(
                [
                    day,
                    r.side,
                    r.agent_id,
                    r.u_experience,
                    r.u_wom,
                    r.u_marketing,
                    r.probability,
                    int(r.notified),
                    int(r.participated),
                ]
            )


def _write_summary(path, summary):
    columns = ["day", "stage"]
    for c in experiment._NUMERIC_COLUMNS:
        columns.extend([f"{c}_mean", f"{c}_std"])
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for d, day in enumerate(summary.days):
            row = [day, summary.stages[d]]
            for c in experiment._NUMERIC_COLUMNS:
                row.extend([summary.mean[c][d], summary.std[c][d]])
            writer.writerow(row)


def cmd_run(args) -> int:
    try:
        raw = scenario.load_raw(args.scenario)
        scenario.apply_overrides(raw, args.set or [])
        resolved = scenario.validate(raw)
        assembled = scenario.assemble(resolved, base_dir=Path(args.scenario).parent)
    except (
        scenario.ScenarioError,
        network.NetworkError,
        population.PopulationError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out or resolved["run"]["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    results, summary = experiment.run_replications(
        assembled.scenario, collect_trajectories=args.trajectories
    )

    outputs = []
    for result in results:
        name = f"ledger_{result.replication}.csv"
        _write_ledger(out_dir / name, result.ledgers)
        outputs.append(name)
        if args.trajectories:
            name = f"trajectories_{result.replication}.csv"
            _write_trajectories(out_dir / name, result)
            outputs.append(name)
    _write_summary(out_dir / "summary.csv", summary)
    outputs.append("summary.csv")
    scenario.write_manifest(out_dir / "manifest.json", assembled, outputs)
    outputs.append("manifest.json")

    last = results[-1].ledgers[-1]
    print(
        f"ran {assembled.scenario.horizon_days} days x "
        f"{assembled.scenario.replications} replication(s) "
        f"[{len(assembled.scenario.travelers)} travelers, "
        f"{len(assembled.scenario.drivers)} drivers, seed {assembled.scenario.seed}]"
    )
    print(
        f"final day: served share {last.served_share:.3f}, supply share "
        f"{last.supply_share:.3f}, cumulative net {last.cumulative_net:.2f}"
    )
    print(f"wrote {', '.join(outputs)} to {out_dir}")
    return 0


def cmd_generate(args) -> int:
    try:
        if args.kind == "grid":
            g = network.make_grid(args.n, args.spacing, args.speed)
            network.save_graph(g, args.out_nodes, args.out_edges)
            print(f"wrote {args.out_nodes} ({g.n_nodes} nodes), {args.out_edges} ({len(g.edges)} edges)")
        elif args.kind == "demand":
            g = network.load_graph(args.nodes, args.edges, args.speed)
            travelers = population.generate_demand(
                g,
                args.n,
                args.day_length,
                seed=scenario.rng_for_generation(args.seed, "demand"),
                pt_factor=args.pt_factor,
                pt_overhead_s=args.pt_overhead,
                min_trip_distance_m=args.min_distance,
            )
            population.save_population(travelers, [], args.out, os.devnull)
            print(f"wrote {args.out} ({len(travelers)} travelers)")
        else:
            g = network.load_graph(args.nodes, args.edges, args.speed)
            drivers = population.generate_supply(
                g,
                args.n,
                args.wage,
                args.cost,
                seed=scenario.rng_for_generation(args.seed, "supply"),
            )
            population.save_population([], drivers, os.devnull, args.out)
            print(f"wrote {args.out} ({len(drivers)} drivers)")
    except (network.NetworkError, population.PopulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_validate(args) -> int:
    try:
        raw = scenario.load_raw(args.scenario)
        resolved = scenario.validate(raw)
    except scenario.ScenarioError as exc:
        print("scenario is invalid:", file=sys.stderr)
        for error in exc.errors:
            print(f"  - {error}", file=sys.stderr)
        return 2
    print(f"{args.scenario}: valid")
    print(scenario.stage_table(resolved))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridemarket",
        description="Day-to-day microsimulation of a two-sided ride-sourcing market",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario or a run manifest")
    run.add_argument("scenario", help="scenario .toml or manifest .json")
    run.add_argument("--out", default=os.environ.get("RIDEMARKET_OUT"), help="output directory")
    run.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override a scenario key, e.g. --set run.seed=7",
    )
    run.add_argument(
        "--trajectories",
        action="store_true",
        help="also write per-agent daily trajectories (large)",
    )
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="generate synthetic input files")
    gen_sub = gen.add_subparsers(dest="kind", required=True)

    grid = gen_sub.add_parser("grid", help="square lattice network")
    grid.add_argument("-n", type=int, required=True, help="grid side length (nodes)")
    grid.add_argument("--spacing", type=float, default=500.0, help="edge length [m]")
    grid.add_argument("--speed", type=float, default=36.0, help="network speed [km/h]")
    grid.add_argument("--out-nodes", default="nodes.csv")
    grid.add_argument("--out-edges", default="edges.csv")

    demand = gen_sub.add_parser("demand", help="synthetic traveler pool")
    demand.add_argument("-n", type=int, required=True, help="number of travelers")
    demand.add_argument("--nodes", required=True)
    demand.add_argument("--edges", required=True)
    demand.add_argument("--speed", type=float, default=36.0)
    demand.add_argument("--day-length", type=float, default=14400.0)
    demand.add_argument("--min-distance", type=float, default=population.MIN_TRIP_DISTANCE_M)
    demand.add_argument("--pt-factor", type=float, default=population.PT_FACTOR)
    demand.add_argument("--pt-overhead", type=float, default=population.PT_OVERHEAD_S)
    demand.add_argument("--seed", type=int, default=42)
    demand.add_argument("--out", default="travelers.csv")

    supply = gen_sub.add_parser("supply", help="synthetic driver pool")
    supply.add_argument("-n", type=int, required=True, help="number of drivers")
    supply.add_argument("--nodes", required=True)
    supply.add_argument("--edges", required=True)
    supply.add_argument("--speed", type=float, default=36.0)
    supply.add_argument("--wage", type=float, default=10.63, help="reservation wage [eur/h]")
    supply.add_argument("--cost", type=float, default=0.25, help="operating cost [eur/km]")
    supply.add_argument("--seed", type=int, default=42)
    supply.add_argument("--out", default="drivers.csv")

    gen.set_defaults(func=cmd_generate)

    val = sub.add_parser("validate", help="validate a scenario without running")
    val.add_argument("scenario")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
