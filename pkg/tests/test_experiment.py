import numpy as np
import pytest

from ridemarket import experiment, population
from ridemarket.experiment import (
    Scenario,
    rng_substream,
    run_experiment,
    run_replications,
    summarize,
)
from ridemarket.network import make_grid
from ridemarket.platform import PlatformLevers, Stage, StageSchedule


def _schedule(horizon, marketing_days=None, commission=0.10):
    marketing_days = marketing_days or (-1, -1)
    stages = []
    bounds = sorted({0, max(marketing_days[0], 0), max(marketing_days[1], 0), horizon})
    for start, end in zip(bounds, bounds[1:]):
        active = marketing_days[0] <= start < marketing_days[1]
        stages.append(
            Stage(
                start,
                end,
                "campaign" if active else "quiet",
                PlatformLevers(commission=commission, marketing_active=active),
            )
        )
    return StageSchedule(stages=tuple(stages))


def _scenario(horizon=10, seed=42, marketing_days=None, replications=1, **kwargs):
    g = make_grid(6, 600.0, 36.0)
    travelers = population.generate_demand(g, 30, 14400.0, seed=1)
    drivers = population.generate_supply(g, 6, 10.63, 0.25, seed=1)
    return Scenario(
        graph=g,
        travelers=travelers,
        drivers=drivers,
        schedule=_schedule(horizon, marketing_days),
        horizon_days=horizon,
        seed=seed,
        replications=replications,
        **kwargs,
    )


# ---------------------------------------------------------------------------
# rng substreams


def test_substream_is_stable():
    a = rng_substream(42, 0, "participation").random(8)
    b = rng_substream(42, 0, "participation").random(8)
    assert np.array_equal(a, b)


def test_substream_purposes_are_independent():
    a = rng_substream(42, 0, "participation").random(8)
    b = rng_substream(42, 0, "wom-pairing").random(8)
    assert not np.array_equal(a, b)


def test_substream_days_and_seeds_differ():
    assert not np.array_equal(
        rng_substream(42, 1, "participation").random(8),
        rng_substream(42, 2, "participation").random(8),
    )
    assert not np.array_equal(
        rng_substream(42, 1, "participation").random(8),
        rng_substream(43, 1, "participation").random(8),
    )


def test_substream_rejects_unknown_purpose():
    with pytest.raises(ValueError, match="unknown stream purpose"):
        rng_substream(42, 0, "nope")


# ---------------------------------------------------------------------------
# the daily loop


def test_single_quiet_day():
    scenario = _scenario(horizon=1)
    result = run_experiment(scenario)
    assert len(result.ledgers) == 1
    row = result.ledgers[0]
    assert row.demand_share == 0.0
    assert row.served_share == 0.0
    assert row.supply_share == 0.0
    assert row.net == 0.0
    assert row.cumulative_net == 0.0


def test_runs_are_bit_identical():
    scenario = _scenario(horizon=25, marketing_days=(0, 10))
    a = run_experiment(scenario)
    b = run_experiment(scenario)
    assert a.ledgers == b.ledgers


def test_awareness_gate_without_marketing():
    scenario = _scenario(horizon=30)
    result = run_experiment(scenario)
    assert all(r.demand_share == 0.0 and r.supply_share == 0.0 for r in result.ledgers)


def test_awareness_is_absorbing():
    scenario = _scenario(horizon=40, marketing_days=(0, 10))
    result = run_experiment(scenario, collect_trajectories=True)
    seen = {}
    for day, record in result.trajectories:
        key = (record.side, record.agent_id)
        if seen.get(key) and not record.notified:
            pytest.fail(f"{key} lost notification on day {day}")
        if record.notified:
            seen[key] = True
    assert any(seen.values())


def test_ledger_identities_every_day():
    scenario = _scenario(horizon=30, marketing_days=(0, 15))
    result = run_experiment(scenario)
    cumulative = 0.0
    for row in result.ledgers:
        assert row.net == row.commission_income - row.discount_spend - row.marketing_spend
        cumulative += row.net
        assert row.cumulative_net == cumulative
        assert 0.0 <= row.demand_share <= 1.0
        assert 0.0 <= row.served_share <= row.demand_share
        assert 0.0 <= row.supply_share <= 1.0
        assert row.veh_km >= row.pax_km
        assert row.mean_wait_s == row.mean_matching_s + row.mean_pickup_s


def test_zero_lever_run_nets_zero_with_activity():
    scenario = _scenario(
        horizon=20,
        marketing_days=None,
        initially_notified=1.0,
    )
    schedule = StageSchedule(
        stages=(Stage(0, 20, "free", PlatformLevers(commission=0.0, discount_rate=0.0)),)
    )
    scenario = Scenario(
        graph=scenario.graph,
        travelers=scenario.travelers,
        drivers=scenario.drivers,
        schedule=schedule,
        horizon_days=20,
        seed=3,
        initially_notified=1.0,
    )
    result = run_experiment(scenario)
    assert any(r.served_share > 0 for r in result.ledgers), "expected market activity"
    for row in result.ledgers:
        assert row.net == 0.0
        assert row.cumulative_net == 0.0


def test_replications_differ_but_summary_matches_single():
    scenario = _scenario(horizon=15, marketing_days=(0, 5), replications=2)
    results, summary = run_replications(scenario)
    assert results[0].ledgers != results[1].ledgers
    single = summarize(results[:1])
    assert single.mean["served_share"] == [r.served_share for r in results[0].ledgers]
    assert all(v == 0.0 for v in single.std["served_share"])


def test_forced_identical_replications_have_zero_std():
    scenario = _scenario(horizon=10, marketing_days=(0, 5))
    a = run_experiment(scenario, rep=1)
    b = run_experiment(scenario, rep=1)
    summary = summarize(
        [
            experiment.RunResult(replication=0, ledgers=a.ledgers),
            experiment.RunResult(replication=1, ledgers=b.ledgers),
        ]
    )
    assert all(v == 0.0 for column in summary.std.values() for v in column)


def test_scenario_validation():
    g = make_grid(6, 600.0, 36.0)
    travelers = population.generate_demand(g, 5, 14400.0, seed=1)
    drivers = population.generate_supply(g, 2, 10.63, 0.25, seed=1)
    with pytest.raises(ValueError, match="horizon"):
        Scenario(
            graph=g, travelers=travelers, drivers=drivers,
            schedule=_schedule(5), horizon_days=0,
        )
    with pytest.raises(ValueError, match="at least one"):
        Scenario(
            graph=g, travelers=[], drivers=[], schedule=_schedule(5), horizon_days=5,
        )


def test_schedule_must_cover_horizon():
    g = make_grid(6, 600.0, 36.0)
    travelers = population.generate_demand(g, 5, 14400.0, seed=1)
    drivers = population.generate_supply(g, 2, 10.63, 0.25, seed=1)
    with pytest.raises(ValueError, match="covers"):
        Scenario(
            graph=g, travelers=travelers, drivers=drivers,
            schedule=_schedule(10), horizon_days=999,
        )
