"""Acceptance suite: one test per release criterion, printed pass/fail.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criteria 5-8 share a
single 5-replication desk run (session fixture).
"""

import statistics
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

from bruteforce import inverse_sigmoid_hp, logit_hp, rel_err, sigmoid_hp
from ridemarket import cli, experiment, kernels, scenario
from ridemarket.adaptation import (
    EXPERIENCE,
    MARKETING,
    WOM,
    LearningParams,
    driver_experience_delta,
    marketing_delta,
    sigmoid_utility,
    traveler_experience_delta,
    update_component,
    wom_delta,
)
from test_withinday import assert_matches_oracle, random_instance

RW_DAY = 10.63 * 4.0  # daily reservation-wage equivalent of the desk drivers


def _report(number, text):
    print(f"\nACCEPTANCE {number} PASS: {text}")


@pytest.fixture(scope="session")
def desk_resolved():
    path = Path(__file__).parent.parent / "src" / "ridemarket" / "scenarios" / "desk.toml"
    return scenario.validate(scenario.load_raw(path))


@pytest.fixture(scope="session")
def desk_run(desk_resolved):
    """Mean over 5 replications of the desk scenario (criteria 5-8)."""
    resolved = {k: dict(v) for k, v in desk_resolved.items()}
    resolved["platform"] = dict(desk_resolved["platform"])
    resolved["run"] = dict(desk_resolved["run"], replications=5)
    assembled = scenario.assemble(resolved)
    t0 = time.time()
    results, summary = experiment.run_replications(assembled.scenario)
    elapsed = time.time() - t0
    return results, summary, elapsed


def test_criterion_1_fixed_point_exactness():
    t0 = time.time()
    params = LearningParams(alpha=(1.3, 0.7, 2.0), beta=(2.0, 1.0, 0.5))
    rng = np.random.default_rng(12345)
    for _ in range(10_000):
        component = int(rng.integers(0, 3))
        cu = float(rng.uniform(-params.cu_max[component], params.cu_max[component]))
        new_cu = update_component(cu, 0.0, params, component)
        assert new_cu == cu  # tolerance 0
        assert sigmoid_utility(new_cu, params.beta[component]) == sigmoid_utility(
            cu, params.beta[component]
        )
    elapsed = time.time() - t0
    assert elapsed < 1.0
    _report(1, f"zero delta left 10,000 randomized states bit-identical ({elapsed:.2f}s)")


def test_criterion_2_s_shape_profile():
    t0 = time.time()
    params = LearningParams()
    delta = 0.5
    cus = np.linspace(-8.0, 8.0, 3201)
    changes = np.array(
        [
            abs(
                sigmoid_utility(update_component(float(cu), delta, params, WOM), 1.0)
                - sigmoid_utility(float(cu), 1.0)
            )
            for cu in cus
        ]
    )
    peak_pos = int(np.argmax(changes))
    assert -1.0 <= cus[peak_pos] <= 1.0
    # unimodal: non-decreasing up to the peak, non-increasing after
    assert np.all(np.diff(changes[: peak_pos + 1]) >= -1e-15)
    assert np.all(np.diff(changes[peak_pos:]) <= 1e-15)
    peak = changes[peak_pos]
    tails = changes[np.abs(cus) >= 7.0]
    assert np.all(tails < 0.01 * peak)
    elapsed = time.time() - t0
    assert elapsed < 1.0
    _report(
        2,
        f"per-step change unimodal, peak at cu={cus[peak_pos]:+.3f}, "
        f"tail/peak < {float(tails.max() / peak):.4%} ({elapsed:.2f}s)",
    )


def test_criterion_3_matching_oracle_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(777)
    for _ in range(100):
        assert_matches_oracle(*random_instance(rng))
    elapsed = time.time() - t0
    assert elapsed < 30.0
    _report(3, f"100 random instances identical to the brute-force simulator ({elapsed:.1f}s)")


def test_criterion_4_awareness_gate(desk_resolved):
    t0 = time.time()
    resolved = {k: dict(v) for k, v in desk_resolved.items()}
    resolved["platform"] = dict(desk_resolved["platform"])
    resolved["platform"]["stages"] = [
        dict(stage, marketing=False) for stage in desk_resolved["platform"]["stages"]
    ]
    assembled = scenario.assemble(resolved)
    result = experiment.run_experiment(assembled.scenario)
    assert len(result.ledgers) == 400
    for row in result.ledgers:
        assert row.demand_share == 0.0
        assert row.served_share == 0.0
        assert row.supply_share == 0.0
    elapsed = time.time() - t0
    assert elapsed < 60.0
    _report(4, f"no campaign -> zero demand and supply share on all 400 days ({elapsed:.1f}s)")


def test_criterion_5_rise_and_fall(desk_run):
    results, summary, elapsed = desk_run
    assert len(results) == 5
    share = summary.mean["served_share"]

    # (a) pre-campaign: essentially no market
    assert max(share[:50]) < 0.02
    # (b) campaign effect
    assert share[100] > share[49]
    # (c) keeps growing after the campaign ends
    early_growth = statistics.mean(share[100:110])
    late_growth = statistics.mean(share[190:200])
    assert late_growth > early_growth
    # (d) ending discounts only slightly affects the share
    maturity_mean = statistics.mean(share[200:300])
    assert maturity_mean >= 0.9 * late_growth
    # (e) greed collapse
    final = statistics.mean(share[390:400])
    assert final <= 0.5 * maturity_mean
    assert elapsed < 300.0
    _report(
        5,
        "rise and fall reproduced: "
        f"day0-49 max {max(share[:50]):.3f}, day100 {share[100]:.3f}, "
        f"late growth {late_growth:.3f}, maturity {maturity_mean:.3f}, "
        f"final {final:.3f} ({elapsed:.1f}s for 5 replications)",
    )


def test_criterion_6_accounting_identities(desk_run, desk_resolved):
    results, _, _ = desk_run
    for result in results:
        cumulative = 0.0
        for row in result.ledgers:
            assert row.net == row.commission_income - row.discount_spend - row.marketing_spend
            cumulative += row.net
            assert row.cumulative_net == cumulative

    # a free platform nets exactly zero despite market activity
    t0 = time.time()
    resolved = {k: dict(v) for k, v in desk_resolved.items()}
    resolved["population"] = dict(desk_resolved["population"], initially_notified=1.0)
    resolved["platform"] = dict(desk_resolved["platform"])
    resolved["platform"]["stages"] = [
        dict(stage, marketing=False, commission=0.0, discount=0.0)
        for stage in desk_resolved["platform"]["stages"]
    ]
    resolved["run"] = dict(desk_resolved["run"], horizon_days=100)
    resolved["platform"]["stages"] = [
        s for s in resolved["platform"]["stages"] if s["start_day"] < 100
    ]
    resolved["platform"]["stages"][-1]["end_day"] = 100
    assembled = scenario.assemble(resolved)
    result = experiment.run_experiment(assembled.scenario)
    assert any(row.served_share > 0 for row in result.ledgers), "expected activity"
    for row in result.ledgers:
        assert row.net == 0.0
        assert row.cumulative_net == 0.0
    elapsed = time.time() - t0
    assert elapsed < 60.0
    _report(6, f"ledger identities exact; zero-lever run nets 0 with activity ({elapsed:.1f}s)")


def test_criterion_7_kpi_structure(desk_run):
    results, _, _ = desk_run
    for result in results:
        for row in result.ledgers:
            assert row.mean_wait_s == row.mean_matching_s + row.mean_pickup_s
            assert row.veh_km >= row.pax_km
    _report(7, "mean wait decomposes exactly and veh-km >= pax-km on every day of every run")


def test_criterion_8_greed_mechanism(desk_run):
    _, summary, _ = desk_run
    profits = summary.mean["mean_driver_profit"]
    below = [d for d in range(300, 320) if profits[d] < RW_DAY]
    assert below, f"profit never fell below {RW_DAY} in days 300-319"
    _report(
        8,
        f"driver profit fell below the reservation-wage equivalent ({RW_DAY:.2f}) "
        f"on day {below[0]}, {below[0] - 300} day(s) after the commission hike",
    )


def test_criterion_9_determinism_and_manifest(tmp_path, desk_path):
    t0 = time.time()
    out_a, out_b, out_c = (str(tmp_path / x) for x in "abc")
    assert cli.main(["run", str(desk_path), "--out", out_a]) == 0
    assert cli.main(["run", str(desk_path), "--out", out_b]) == 0
    ledger_a = (tmp_path / "a" / "ledger_0.csv").read_bytes()
    assert ledger_a == (tmp_path / "b" / "ledger_0.csv").read_bytes()
    assert cli.main(["run", str(tmp_path / "a" / "manifest.json"), "--out", out_c]) == 0
    assert ledger_a == (tmp_path / "c" / "ledger_0.csv").read_bytes()
    elapsed = time.time() - t0
    assert elapsed < 120.0
    _report(9, f"re-run and manifest-run ledger CSVs byte-identical ({elapsed:.1f}s)")


def test_criterion_10_closed_form_kernels():
    rng = np.random.default_rng(424242)
    worst = 0.0
    for _ in range(1000):
        cu = float(rng.uniform(-8, 8))
        beta = float(rng.uniform(0.2, 3.0))
        worst = max(worst, rel_err(sigmoid_utility(cu, beta), sigmoid_hp(cu, beta)))
        u = float(rng.uniform(0.001, 0.999))
        worst = max(worst, rel_err(kernels.inverse_sigmoid(u, beta), inverse_sigmoid_hp(u, beta)))
        own, alt = (float(x) for x in rng.uniform(0, 1, size=2))
        mu = float(rng.uniform(0, 8))
        worst = max(worst, rel_err(kernels.logit(own, alt, mu), logit_hp(own, alt, mu)))

        wage = float(rng.uniform(5, 40))
        hours = float(rng.uniform(1, 10))
        income = float(rng.uniform(0, 200))
        hp = Decimal(wage) * Decimal(hours)
        hp = (hp - Decimal(income)) / hp
        worst = max(worst, rel_err(driver_experience_delta(wage, hours, income), hp))

        pt = float(rng.uniform(100, 5000))
        rs = float(rng.uniform(0, 8000))
        hp = (Decimal(rs) - Decimal(pt)) / Decimal(pt)
        worst = max(worst, rel_err(traveler_experience_delta(pt, rs), hp))

        own_w, peer, p = (float(x) for x in rng.uniform(0.01, 0.99, size=3))
        hp = Decimal(p) * (Decimal(own_w) - Decimal(peer))
        worst = max(worst, rel_err(wom_delta(own_w, peer, p), hp))
        hp = Decimal(p) * (Decimal(own_w) - 1)
        worst = max(worst, rel_err(marketing_delta(own_w, p), hp))
    assert worst <= 1e-12
    _report(10, f"1000-point check vs 50-digit reference, worst relative error {worst:.2e}")
