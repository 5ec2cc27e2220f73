"""Scenario files: parsing, strict validation, assembly, manifests.

A scenario is a TOML document with five sections (network, population,
adaptation, platform, run).  Validation is strict: unknown keys are
rejected and every failure is reported with its full key path.  A run
manifest is a JSON document embedding the fully resolved scenario plus
input hashes; running a manifest reproduces the run bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ridemarket import network, platform, population
from ridemarket.adaptation import ChoiceParams, CostPerception, LearningParams
from ridemarket.experiment import Scenario

MANIFEST_FORMAT = "ridemarket-manifest/1"


class ScenarioError(ValueError):
    """One or more scenario validation failures."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _spec(kind, default=None, required=False, check=None):
    return {"kind": kind, "default": default, "required": required, "check": check}


_STAGE_SCHEMA = {
    "name": _spec(str, required=True),
    "start_day": _spec(int, required=True),
    "end_day": _spec(int, required=True),
    "commission": _spec(float, default=0.10),
    "discount": _spec(float, default=0.0),
    "marketing": _spec(bool, default=False),
}

SCHEMA = {
    "network": {
        "grid_n": _spec(int),
        "grid_spacing_m": _spec(float, default=500.0),
        "nodes_file": _spec(str),
        "edges_file": _spec(str),
        "speed_kmh": _spec(float, default=36.0),
    },
    "population": {
        "travelers": _spec(int),
        "drivers": _spec(int),
        "travelers_file": _spec(str),
        "drivers_file": _spec(str),
        "reservation_wage_eur_h": _spec(float, default=10.63),
        "operating_cost_eur_km": _spec(float, default=0.25),
        "min_trip_distance_m": _spec(float, default=population.MIN_TRIP_DISTANCE_M),
        "pt_factor": _spec(float, default=population.PT_FACTOR),
        "pt_overhead_s": _spec(float, default=population.PT_OVERHEAD_S),
        "initially_notified": _spec(float, default=0.0),
    },
    "adaptation": {
        "alpha": _spec(list, default=[1.0, 1.0, 1.0]),
        "beta": _spec(list, default=[1.0, 1.0, 1.0]),
        "u_e_init": _spec(float, default=0.02),
        "weights": _spec(list, default=[0.80, 0.18, 0.02]),
        "mu": _spec(float, default=5.0),
        "asc": _spec(float, default=0.0),
        "alternative_utility": _spec(float, default=0.5),
        "p_marketing": _spec(float, default=0.1),
        "p_wom": _spec(float, default=0.1),
        "waiting_weight": _spec(float, default=1.5),
        "time_value_scale": _spec(float, default=1.0),
        "value_of_time_eur_h": _spec(float, default=10.63),
    },
    "platform": {
        "per_km_fare": _spec(float, default=1.2),
        "min_fare": _spec(float, default=2.0),
        "marketing_cost_per_agent": _spec(float, default=5.0),
        "stages": _spec(list, required=True),
    },
    "run": {
        "horizon_days": _spec(int, required=True),
        "day_length_s": _spec(float, default=14400.0),
        "patience_s": _spec(float, default=600.0),
        "seed": _spec(int, required=True),
        "replications": _spec(int, default=1),
        "output_dir": _spec(str, default="out"),
    },
}


def load_raw(path) -> dict:
    """Read a scenario TOML or a run manifest JSON; returns the raw mapping."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError([f"scenario file not found: {path}"])
    if path.suffix.lower() == ".json":
        with open(path, "rb") as f:
            doc = json.load(f)
        if isinstance(doc, dict) and doc.get("format") == MANIFEST_FORMAT:
            return doc["scenario"]
        return doc
    with open(path, "rb") as f:
        return tomllib.load(f)


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply dotted ``section.key=value`` overrides; values parse as TOML/JSON scalars."""
    for item in overrides:
        if "=" not in item:
            raise ScenarioError([f"override {item!r} is not of the form key=value"])
        key, _, text = item.partition("=")
        parts = key.strip().split(".")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ScenarioError([f"override {key}: {part} is not a section"])
        node[parts[-1]] = value
    return raw


def _coerce(value, kind):
    if kind is float and _is_number(value):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, kind) and not (kind is not bool and isinstance(value, bool)):
        return value
    return None


def _validate_table(raw_section, schema, prefix, errors, resolved):
    for key, value in raw_section.items():
        if key not in schema:
            errors.append(f"{prefix}.{key}: unknown key")
    for key, spec in schema.items():
        # explicit null (as in a re-read manifest) behaves like an absent key
        if raw_section.get(key) is not None:
            coerced = _coerce(raw_section[key], spec["kind"])
            if coerced is None:
                errors.append(
                    f"{prefix}.{key}: expected {spec['kind'].__name__}, "
                    f"got {type(raw_section[key]).__name__}"
                )
            else:
                resolved[key] = coerced
        elif spec["required"]:
            errors.append(f"{prefix}.{key}: missing required key")
        else:
            resolved[key] = spec["default"]


def validate(raw: dict) -> dict:
    """Resolve the full configuration or raise with every failure listed."""
    errors = []
    resolved = {}
    if not isinstance(raw, dict):
        raise ScenarioError(["scenario document is not a table"])
    for section in raw:
        if section not in SCHEMA:
            errors.append(f"{section}: unknown section")
    for section, schema in SCHEMA.items():
        raw_section = raw.get(section, {})
        if not isinstance(raw_section, dict):
            errors.append(f"{section}: expected a table")
            raw_section = {}
        resolved[section] = {}
        _validate_table(raw_section, schema, section, errors, resolved[section])

    net = resolved.get("network", {})
    if not net.get("grid_n") and not (net.get("nodes_file") and net.get("edges_file")):
        errors.append("network: need either grid_n or nodes_file+edges_file")
    pop = resolved.get("population", {})
    if not pop.get("travelers") and not pop.get("travelers_file"):
        errors.append("population: need either travelers (count) or travelers_file")
    if not pop.get("drivers") and not pop.get("drivers_file"):
        errors.append("population: need either drivers (count) or drivers_file")
    if (pop.get("travelers_file") is None) != (pop.get("drivers_file") is None):
        errors.append("population: travelers_file and drivers_file must be given together")

    stages_raw = raw.get("platform", {}).get("stages") if isinstance(raw.get("platform"), dict) else None
    stages = []
    if isinstance(stages_raw, list) and stages_raw:
        for i, stage_raw in enumerate(stages_raw):
            prefix = f"platform.stages[{i}]"
            if not isinstance(stage_raw, dict):
                errors.append(f"{prefix}: expected a table")
                continue
            stage = {}
            _validate_table(stage_raw, _STAGE_SCHEMA, prefix, errors, stage)
            stages.append(stage)
    elif "platform.stages: missing required key" not in errors:
        errors.append("platform.stages: must be a non-empty list of stage tables")
    resolved["platform"]["stages"] = stages

    if not errors:
        try:
            _build_schedule(resolved)
        except (platform.ScheduleError, ValueError) as exc:
            errors.append(f"platform.stages: {exc}")
        try:
            _learning_params(resolved)
        except ValueError as exc:
            errors.append(f"adaptation: {exc}")
        try:
            _choice_params(resolved)
        except ValueError as exc:
            errors.append(f"adaptation: {exc}")
        run = resolved["run"]
        if run["horizon_days"] < 1:
            errors.append("run.horizon_days: must be at least 1")
        if stages and stages[-1]["end_day"] < run["horizon_days"]:
            errors.append(
                f"platform.stages: cover days [0, {stages[-1]['end_day']}) but "
                f"run.horizon_days is {run['horizon_days']}"
            )
    if errors:
        raise ScenarioError(errors)
    return resolved


def _build_schedule(resolved: dict) -> platform.StageSchedule:
    plat = resolved["platform"]
    return platform.StageSchedule(
        stages=tuple(
            platform.Stage(
                start_day=s["start_day"],
                end_day=s["end_day"],
                name=s["name"],
                levers=platform.PlatformLevers(
                    commission=s["commission"],
                    discount_rate=s["discount"],
                    marketing_active=s["marketing"],
                    marketing_cost_per_agent=plat["marketing_cost_per_agent"],
                    per_km_fare=plat["per_km_fare"],
                    min_fare=plat["min_fare"],
                ),
            )
            for s in plat["stages"]
        )
    )


def _learning_params(resolved: dict) -> LearningParams:
    a = resolved["adaptation"]
    return LearningParams(
        alpha=tuple(float(x) for x in a["alpha"]),
        beta=tuple(float(x) for x in a["beta"]),
        u_e_init=a["u_e_init"],
    )


def _choice_params(resolved: dict) -> ChoiceParams:
    a = resolved["adaptation"]
    return ChoiceParams(
        mu=a["mu"],
        weights=tuple(float(x) for x in a["weights"]),
        asc=a["asc"],
        alternative_utility=a["alternative_utility"],
    )


@dataclass
class AssembledScenario:
    scenario: Scenario
    resolved: dict
    input_hashes: dict


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def assemble(resolved: dict, base_dir=None) -> AssembledScenario:
    """Build graph and populations and return a runnable scenario."""
    base = Path(base_dir) if base_dir else Path.cwd()
    net = resolved["network"]
    pop = resolved["population"]
    ada = resolved["adaptation"]
    run = resolved["run"]
    hashes = {}

    if net.get("nodes_file"):
        nodes_path = base / net["nodes_file"]
        edges_path = base / net["edges_file"]
        g = network.load_graph(nodes_path, edges_path, net["speed_kmh"])
        hashes[net["nodes_file"]] = _sha256(nodes_path)
        hashes[net["edges_file"]] = _sha256(edges_path)
    else:
        g = network.make_grid(net["grid_n"], net["grid_spacing_m"], net["speed_kmh"])

    learning = _learning_params(resolved)
    if pop.get("travelers_file"):
        trav_path = base / pop["travelers_file"]
        drv_path = base / pop["drivers_file"]
        travelers, drivers = population.load_population(trav_path, drv_path, learning)
        hashes[pop["travelers_file"]] = _sha256(trav_path)
        hashes[pop["drivers_file"]] = _sha256(drv_path)
    else:
        travelers = population.generate_demand(
            g,
            pop["travelers"],
            run["day_length_s"],
            seed=rng_for_generation(run["seed"], "demand"),
            pt_factor=pop["pt_factor"],
            pt_overhead_s=pop["pt_overhead_s"],
            min_trip_distance_m=pop["min_trip_distance_m"],
            learning=learning,
        )
        drivers = population.generate_supply(
            g,
            pop["drivers"],
            pop["reservation_wage_eur_h"],
            pop["operating_cost_eur_km"],
            seed=rng_for_generation(run["seed"], "supply"),
            learning=learning,
        )

    scenario = Scenario(
        graph=g,
        travelers=travelers,
        drivers=drivers,
        schedule=_build_schedule(resolved),
        learning=learning,
        choice=_choice_params(resolved),
        costs=CostPerception(
            waiting_weight=ada["waiting_weight"],
            time_value_scale=ada["time_value_scale"],
            value_of_time_eur_h=ada["value_of_time_eur_h"],
        ),
        p_marketing=ada["p_marketing"],
        p_wom=ada["p_wom"],
        horizon_days=run["horizon_days"],
        day_length_s=run["day_length_s"],
        patience_s=run["patience_s"],
        seed=run["seed"],
        replications=run["replications"],
        initially_notified=pop["initially_notified"],
    )
    return AssembledScenario(scenario=scenario, resolved=resolved, input_hashes=hashes)


def rng_for_generation(seed: int, purpose: str):
    from ridemarket.experiment import rng_substream

    return rng_substream(seed, 0, purpose)


def write_manifest(path, assembled: AssembledScenario, outputs) -> None:
    from ridemarket import __version__
    from ridemarket.kernels import BACKEND

    doc = {
        "format": MANIFEST_FORMAT,
        "package_version": __version__,
        "kernel_backend": BACKEND,
        "seed": assembled.scenario.seed,
        "inputs": assembled.input_hashes,
        "outputs": sorted(outputs),
        "scenario": assembled.resolved,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def stage_table(resolved: dict) -> str:
    """Human-readable stage table of the resolved schedule."""
    plat = resolved["platform"]
    lines = [
        f"{'Day':<12}{'Stage':<8}{'Name':<12}{'Marketing':<22}{'Commission':<12}{'Discount'}"
    ]
    for i, s in enumerate(plat["stages"], start=1):
        marketing = (
            f"{plat['marketing_cost_per_agent']:g} eur/agent/day" if s["marketing"] else "-"
        )
        discount = f"{s['discount']:.0%}" if s["discount"] else "-"
        day_range = f"{s['start_day']} - {s['end_day']}"
        commission = f"{s['commission']:.0%}"
        lines.append(
            f"{day_range:<12}{_roman(i):<8}{s['name']:<12}{marketing:<22}"
            f"{commission:<12}{discount}"
        )
    return "\n".join(lines)


def _roman(n: int) -> str:
    numerals = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"]
    return numerals[n - 1] if 1 <= n <= len(numerals) else str(n)
