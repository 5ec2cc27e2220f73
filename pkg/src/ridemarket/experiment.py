"""Full-horizon orchestration: daily loop, RNG streams, ledgers, replications.

Each day resolves the platform levers, draws participation from the
previous evening's probabilities, runs the within-day engine, settles the
platform cash, runs the adaptation pass and appends a ledger row.  The
whole run is a pure function of (scenario, master seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ridemarket import adaptation, platform, population, withinday
from ridemarket.adaptation import ChoiceParams, CostPerception, LearningParams
from ridemarket.network import NetworkGraph

# stable stream identifiers: (master, replication, day, purpose) -> stream
_PURPOSES = {
    "demand": 1,
    "supply": 2,
    "init-notify": 3,
    "participation": 4,
    "awareness": 5,
    "wom-pairing": 6,
}


def rng_substream(master_seed: int, day: int, purpose: str, rep: int = 0) -> np.random.Generator:
    """Independent, reproducible stream keyed by (master, rep, day, purpose)."""
    try:
        code = _PURPOSES[purpose]
    except KeyError:
        raise ValueError(f"unknown stream purpose {purpose!r}") from None
    return np.random.default_rng(np.random.SeedSequence((master_seed, rep, day, code)))


@dataclass(frozen=True)
class Scenario:
    """Fully assembled inputs of one experiment."""

    graph: NetworkGraph
    travelers: list[population.TravelerAgent]
    drivers: list[population.DriverAgent]
    schedule: platform.StageSchedule
    learning: LearningParams = LearningParams()
    choice: ChoiceParams = ChoiceParams()
    costs: CostPerception = CostPerception()
    p_marketing: float = 0.1
    p_wom: float = 0.1
    horizon_days: int = 400
    day_length_s: float = 14400.0
    patience_s: float = 600.0
    seed: int = 42
    replications: int = 1
    initially_notified: float = 0.0

    def __post_init__(self):
        if self.horizon_days < 1:
            raise ValueError(f"horizon must be at least 1 day, got {self.horizon_days}")
        for name, p in (
            ("p_marketing", self.p_marketing),
            ("p_wom", self.p_wom),
            ("initially_notified", self.initially_notified),
        ):
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.replications < 1:
            raise ValueError(f"replications must be at least 1, got {self.replications}")
        if self.schedule.horizon < self.horizon_days:
            raise ValueError(
                f"stage schedule covers [0, {self.schedule.horizon}) but the "
                f"horizon is {self.horizon_days} days"
            )
        if not self.travelers or not self.drivers:
            raise ValueError("scenario needs at least one traveler and one driver")
        population.validate_against_graph(self.travelers, self.drivers, self.graph)

    @property
    def target_pool(self) -> int:
        return len(self.travelers) + len(self.drivers)


@dataclass(frozen=True)
class DayLedger:
    """System KPIs of one simulated day."""

    day: int
    stage: str
    demand_share: float
    served_share: float
    supply_share: float
    mean_wait_s: float
    mean_matching_s: float
    mean_pickup_s: float
    mean_driver_profit: float
    mean_idle_s: float
    pax_km: float
    veh_km: float
    commission_income: float
    discount_spend: float
    marketing_spend: float
    net: float
    cumulative_net: float
    traveler_u_experience: float
    traveler_u_wom: float
    traveler_u_marketing: float
    driver_u_experience: float
    driver_u_wom: float
    driver_u_marketing: float


LEDGER_COLUMNS = tuple(DayLedger.__dataclass_fields__)


@dataclass
class RunResult:
    replication: int
    ledgers: list[DayLedger]
    trajectories: list[tuple[int, adaptation.AgentDayRecord]] = field(default_factory=list)


def _mean(total: float, count: int) -> float:
    return total / count if count else 0.0


def run_experiment(
    scenario: Scenario, rep: int = 0, collect_trajectories: bool = False
) -> RunResult:
    """Run one replication over the full horizon.

    Resets every agent's adaptive state, then iterates days: levers ->
    discount eligibility -> participation draws -> within-day -> settlement
    -> adaptation.  Appends one :class:`DayLedger` per day.
    """
    travelers = scenario.travelers
    drivers = scenario.drivers
    learning = scenario.learning
    choice = scenario.choice
    shift_hours = scenario.day_length_s / 3600.0

    for agent in (*travelers, *drivers):
        agent.adaptive = adaptation.initial_state(learning)
    if scenario.initially_notified > 0:
        rng = rng_substream(scenario.seed, 0, "init-notify", rep=rep)
        for agent in (*travelers, *drivers):
            if rng.random() < scenario.initially_notified:
                agent.adaptive.notified = True

    def probability(agent):
        return adaptation.participation_probability(
            adaptation.perceived_utility(agent.adaptive, learning, choice),
            choice.alternative_utility,
            choice.mu,
            agent.adaptive.notified,
        )

    probabilities = {
        ("traveler", t.id): probability(t) for t in travelers
    }
    probabilities.update({("driver", d.id): probability(d) for d in drivers})

    ledgers = []
    trajectories = []
    cumulative_net = 0.0

    for day in range(scenario.horizon_days):
        levers, stage_name = platform.levers_for_day(scenario.schedule, day)

        rng_part = rng_substream(scenario.seed, day, "participation", rep=rep)
        active_travelers = [
            t for t in travelers if rng_part.random() < probabilities[("traveler", t.id)]
        ]
        active_drivers = [
            d for d in drivers if rng_part.random() < probabilities[("driver", d.id)]
        ]
        loyalty = {t.id: probabilities[("traveler", t.id)] for t in active_travelers}

        outcomes, results, totals = withinday.run_day(
            scenario.graph,
            active_travelers,
            active_drivers,
            levers,
            loyalty,
            scenario.day_length_s,
            scenario.patience_s,
        )
        cash = platform.settle_day(outcomes, levers, scenario.target_pool, scenario.p_marketing)
        cumulative_net += cash.net

        records = adaptation.daily_adaptation_pass(
            travelers,
            drivers,
            {o.traveler_id: o for o in outcomes},
            {r.driver_id: r for r in results},
            levers.marketing_active,
            scenario.p_marketing,
            scenario.p_wom,
            learning,
            choice,
            scenario.costs,
            shift_hours,
            scenario.patience_s,
            rng_substream(scenario.seed, day, "awareness", rep=rep),
            rng_substream(scenario.seed, day, "wom-pairing", rep=rep),
        )

        u_sums = {("traveler", c): 0.0 for c in range(3)}
        u_sums.update({("driver", c): 0.0 for c in range(3)})
        for record in records:
            probabilities[(record.side, record.agent_id)] = record.probability
            u_sums[(record.side, 0)] += record.u_experience
            u_sums[(record.side, 1)] += record.u_wom
            u_sums[(record.side, 2)] += record.u_marketing
        if collect_trajectories:
            trajectories.extend((day, r) for r in records)

        n_trav, n_drv = len(travelers), len(drivers)
        mean_matching = _mean(totals.sum_matching_s, totals.served)
        mean_pickup = _mean(totals.sum_pickup_s, totals.served)
        ledgers.append(
            DayLedger(
                day=day,
                stage=stage_name,
                demand_share=len(active_travelers) / n_trav,
                served_share=totals.served / n_trav,
                supply_share=len(active_drivers) / n_drv,
                mean_wait_s=mean_matching + mean_pickup,
                mean_matching_s=mean_matching,
                mean_pickup_s=mean_pickup,
                mean_driver_profit=_mean(sum(r.profit for r in results), len(results)),
                mean_idle_s=_mean(sum(r.idle_s for r in results), len(results)),
                pax_km=totals.pax_km,
                veh_km=totals.veh_km,
                commission_income=cash.commission_income,
                discount_spend=cash.discount_spend,
                marketing_spend=cash.marketing_spend,
                net=cash.net,
                cumulative_net=cumulative_net,
                traveler_u_experience=u_sums[("traveler", 0)] / n_trav,
                traveler_u_wom=u_sums[("traveler", 1)] / n_trav,
                traveler_u_marketing=u_sums[("traveler", 2)] / n_trav,
                driver_u_experience=u_sums[("driver", 0)] / n_drv,
                driver_u_wom=u_sums[("driver", 1)] / n_drv,
                driver_u_marketing=u_sums[("driver", 2)] / n_drv,
            )
        )

    return RunResult(replication=rep, ledgers=ledgers, trajectories=trajectories)


@dataclass
class ReplicationSummary:
    """Across-replication mean and population std per ledger column per day."""

    days: list[int]
    stages: list[str]
    mean: dict[str, list[float]]
    std: dict[str, list[float]]


_NUMERIC_COLUMNS = tuple(c for c in LEDGER_COLUMNS if c not in ("day", "stage"))


def summarize(results: list[RunResult]) -> ReplicationSummary:
    """Exact sample statistics over replications, day by day."""
    horizon = len(results[0].ledgers)
    days = [row.day for row in results[0].ledgers]
    stages = [row.stage for row in results[0].ledgers]
    mean = {}
    std = {}
    for column in _NUMERIC_COLUMNS:
        values = np.array(
            [[getattr(r.ledgers[d], column) for r in results] for d in range(horizon)]
        )
        mean[column] = values.mean(axis=1).tolist()
        std[column] = values.std(axis=1).tolist()
    return ReplicationSummary(days=days, stages=stages, mean=mean, std=std)


def run_replications(
    scenario: Scenario, collect_trajectories: bool = False
) -> tuple[list[RunResult], ReplicationSummary]:
    """All replications plus the across-replication summary."""
    results = [
        run_experiment(scenario, rep=rep, collect_trajectories=collect_trajectories)
        for rep in range(scenario.replications)
    ]
    return results, summarize(results)
