"""Behavioral core: S-shaped utility learning and logit participation.

Each agent carries three cumulative-utility scalars (experience, word of
mouth, marketing).  Utilities are the decreasing sigmoid image of those
scalars, so an update is a clamped step in cumulative-utility space: large
steps move the utility a lot near the neutral point and barely at the
saturated tails.  Participation is an awareness-gated binary logit over the
composite perceived utility versus a fixed alternative.

Sign conventions:
  * positive delta  -> cumulative utility rises -> utility falls,
  * experience deltas are relative shortfalls (worse than the benchmark is
    positive), word-of-mouth deltas pull toward the peer's view, marketing
    deltas are never positive.
"""

from __future__ import annotations

from dataclasses import dataclass

from ridemarket import kernels

# component order used everywhere a per-component triple appears
EXPERIENCE, WOM, MARKETING = 0, 1, 2

# clamp bound in sigmoid-argument units: utilities stay within about
# [0.00034, 0.99966] and the inverse sigmoid stays well-conditioned
CU_SPAN = 8.0


@dataclass(frozen=True)
class LearningParams:
    """Step sizes and curve shapes of the three learning components."""

    alpha: tuple[float, float, float] = (1.0, 1.0, 1.0)
    beta: tuple[float, float, float] = (1.0, 1.0, 1.0)
    cu_max: tuple[float, float, float] = None  # default CU_SPAN / beta
    u_e_init: float = 0.02

    def __post_init__(self):
        if len(self.alpha) != 3 or any(a <= 0 for a in self.alpha):
            raise ValueError(f"alpha must be three positive values, got {self.alpha}")
        if len(self.beta) != 3 or any(b <= 0 for b in self.beta):
            raise ValueError(f"beta must be three positive values, got {self.beta}")
        if self.cu_max is None:
            object.__setattr__(
                self, "cu_max", tuple(CU_SPAN / b for b in self.beta)
            )
        if len(self.cu_max) != 3 or any(
            not (0 < m < float("inf")) for m in self.cu_max
        ):
            raise ValueError(f"cu_max must be three positive finite values, got {self.cu_max}")
        if not 0 < self.u_e_init < 0.5:
            raise ValueError(f"u_e_init must lie in (0, 0.5), got {self.u_e_init}")


@dataclass(frozen=True)
class ChoiceParams:
    """Logit scale, component weights and constants of the daily choice."""

    mu: float = 5.0
    weights: tuple[float, float, float] = (0.80, 0.18, 0.02)
    asc: float = 0.0
    alternative_utility: float = 0.5

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if len(self.weights) != 3 or any(w <= 0 for w in self.weights):
            raise ValueError(f"weights must be three positive values, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.weights} (sum {sum(self.weights)})")


@dataclass(frozen=True)
class CostPerception:
    """How a traveler folds a trip into one generalized cost (time-equivalent seconds)."""

    waiting_weight: float = 1.5
    time_value_scale: float = 1.0
    value_of_time_eur_h: float = 10.63

    def fare_seconds(self, fare_eur: float) -> float:
        return fare_eur / self.value_of_time_eur_h * 3600.0


@dataclass
class AdaptiveState:
    """Awareness flag plus the three cumulative-utility scalars of one agent."""

    notified: bool = False
    cu_experience: float = 0.0
    cu_wom: float = 0.0
    cu_marketing: float = 0.0


def initial_state(params: LearningParams) -> AdaptiveState:
    """Fresh agent: unaware, neutral WOM/marketing, near-zero experience utility.

    Experience starts from the lower tail of the curve; the exact zero of a
    null experience is a singularity of the inverse sigmoid, so it is seeded
    at ``u_e_init`` instead.
    """
    cu_e = kernels.inverse_sigmoid(params.u_e_init, params.beta[EXPERIENCE])
    return AdaptiveState(notified=False, cu_experience=cu_e, cu_wom=0.0, cu_marketing=0.0)


def sigmoid_utility(cu: float, beta: float) -> float:
    """Utility in (0,1) of a cumulative-utility scalar; decreasing, 0.5 at 0."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return kernels.sigmoid(cu, beta)


def update_component(
    cu: float, delta: float, params: LearningParams, component: int
) -> float:
    """Clamped step in cumulative-utility space; delta 0 leaves cu unchanged."""
    return kernels.step_cu(
        cu, params.alpha[component], delta, params.cu_max[component]
    )


def utilities(state: AdaptiveState, params: LearningParams) -> tuple[float, float, float]:
    """(u_experience, u_wom, u_marketing) of a state."""
    return (
        kernels.sigmoid(state.cu_experience, params.beta[EXPERIENCE]),
        kernels.sigmoid(state.cu_wom, params.beta[WOM]),
        kernels.sigmoid(state.cu_marketing, params.beta[MARKETING]),
    )


def driver_experience_delta(
    reservation_wage: float, shift_hours: float, income: float
) -> float:
    """Relative shortfall of a day's income against the reservation wage."""
    if reservation_wage <= 0:
        raise ValueError(f"reservation wage must be positive, got {reservation_wage}")
    if shift_hours <= 0:
        raise ValueError(f"shift hours must be positive, got {shift_hours}")
    rw_day = reservation_wage * shift_hours
    return (rw_day - income) / rw_day


def traveler_experience_delta(pt_cost: float, rs_cost: float) -> float:
    """Relative generalized-cost excess of the ride over the fixed alternative."""
    if pt_cost <= 0:
        raise ValueError(f"pt cost must be positive, got {pt_cost}")
    return (rs_cost - pt_cost) / pt_cost


def ride_generalized_cost(
    served: bool,
    waiting_s: float,
    in_vehicle_s: float,
    fare_paid: float,
    pt_cost: float,
    patience_s: float,
    costs: CostPerception,
) -> float:
    """Time-equivalent generalized cost of one day's ride-sourcing attempt.

    A served trip costs weighted waiting plus in-vehicle time plus the fare
    converted at the value of time; an unserved request is strictly worse
    than the alternative by the full weighted patience.
    """
    if served:
        time_part = costs.waiting_weight * waiting_s + in_vehicle_s
        return costs.time_value_scale * time_part + costs.fare_seconds(fare_paid)
    return pt_cost + costs.time_value_scale * costs.waiting_weight * patience_s


def wom_delta(own_wom_utility: float, peer_perceived_utility: float, p_wom: float) -> float:
    """Pairwise exchange: pulls the WOM component toward the peer's view."""
    return p_wom * (own_wom_utility - peer_perceived_utility)


def marketing_delta(own_marketing_utility: float, p_m: float) -> float:
    """Exposure effect; never positive, so marketing never lowers the utility."""
    return p_m * (own_marketing_utility - 1.0)


def perceived_utility(state: AdaptiveState, learning: LearningParams, choice: ChoiceParams) -> float:
    """Deterministic composite utility: weighted components plus the constant."""
    u_e, u_w, u_m = utilities(state, learning)
    w = choice.weights
    return w[EXPERIENCE] * u_e + w[WOM] * u_w + w[MARKETING] * u_m + choice.asc


def participation_probability(
    perceived: float, alternative: float, mu: float, notified: bool
) -> float:
    """Awareness-gated binary logit; exactly 0 for agents never notified."""
    if not notified:
        return 0.0
    return kernels.logit(perceived, alternative, mu)


@dataclass(frozen=True)
class AgentDayRecord:
    """End-of-day snapshot of one agent, the raw data behind trajectory plots."""

    side: str
    agent_id: int
    u_experience: float
    u_wom: float
    u_marketing: float
    probability: float
    notified: bool
    participated: bool


def daily_adaptation_pass(
    travelers,
    drivers,
    traveler_outcomes: dict,
    driver_results: dict,
    campaign_active: bool,
    p_marketing: float,
    p_wom: float,
    learning: LearningParams,
    choice: ChoiceParams,
    costs: CostPerception,
    shift_hours: float,
    patience_s: float,
    rng_awareness,
    rng_wom,
) -> list[AgentDayRecord]:
    """End-of-day learning for every agent; mutates states, returns snapshots.

    Phases, all reading the previous day's values (double-buffered):
      1. awareness/marketing: on campaign days every agent draws one
         Bernoulli(p_marketing) exposure; exposure notifies and applies the
         marketing delta,
      2. word of mouth: a share p_wom of each side is sampled, paired within
         the side, and each partner pulls the other's WOM component toward
         their previous-day perceived utility,
      3. experience: yesterday's participants fold their outcome in
         (non-participants have a zero delta, hence unchanged utility),
      4. recompute utilities and tomorrow's participation probabilities.

    The two RNG streams are consumed in a fixed order (travelers by list
    order, then drivers), which anchors run determinism.
    """
    sides = (("traveler", travelers), ("driver", drivers))

    # the view shared in a WOM exchange is the weighted component sum without
    # the alternative-specific constant (a constant is not an opinion)
    w = choice.weights
    prev_u = {}
    prev_shared = {}
    for side, agents in sides:
        for agent in agents:
            u = utilities(agent.adaptive, learning)
            prev_u[(side, agent.id)] = u
            prev_shared[(side, agent.id)] = (
                w[EXPERIENCE] * u[EXPERIENCE] + w[WOM] * u[WOM] + w[MARKETING] * u[MARKETING]
            )

    # 1. marketing exposure: one draw per agent per campaign day governs both
    # first notification and the repeated-exposure effect
    if campaign_active:
        for side, agents in sides:
            for agent in agents:
                exposed = rng_awareness.random() < p_marketing
                if exposed:
                    agent.adaptive.notified = True
                    u_m = prev_u[(side, agent.id)][MARKETING]
                    agent.adaptive.cu_marketing = update_component(
                        agent.adaptive.cu_marketing,
                        marketing_delta(u_m, p_marketing),
                        learning,
                        MARKETING,
                    )

    # 2. word of mouth, paired within each side
    for side, agents in sides:
        k = int(p_wom * len(agents))
        if k >= 2:
            order = rng_wom.permutation(len(agents))[:k]
            for a, b in zip(order[0::2], order[1::2]):
                agent_a, agent_b = agents[a], agents[b]
                u_w_a = prev_u[(side, agent_a.id)][WOM]
                u_w_b = prev_u[(side, agent_b.id)][WOM]
                agent_a.adaptive.cu_wom = update_component(
                    agent_a.adaptive.cu_wom,
                    wom_delta(u_w_a, prev_shared[(side, agent_b.id)], p_wom),
                    learning,
                    WOM,
                )
                agent_b.adaptive.cu_wom = update_component(
                    agent_b.adaptive.cu_wom,
                    wom_delta(u_w_b, prev_shared[(side, agent_a.id)], p_wom),
                    learning,
                    WOM,
                )

    # 3. experience of yesterday's participants
    for traveler in travelers:
        outcome = traveler_outcomes.get(traveler.id)
        if outcome is None:
            continue
        rs_cost = ride_generalized_cost(
            outcome.served,
            outcome.matching_time + outcome.pickup_time,
            outcome.in_vehicle_time,
            outcome.fare_paid,
            traveler.pt_cost,
            patience_s,
            costs,
        )
        delta = traveler_experience_delta(traveler.pt_cost, rs_cost)
        traveler.adaptive.cu_experience = update_component(
            traveler.adaptive.cu_experience, delta, learning, EXPERIENCE
        )
    for driver in drivers:
        result = driver_results.get(driver.id)
        if result is None:
            continue
        delta = driver_experience_delta(
            driver.reservation_wage, shift_hours, result.profit
        )
        driver.adaptive.cu_experience = update_component(
            driver.adaptive.cu_experience, delta, learning, EXPERIENCE
        )

    # 4. snapshots with tomorrow's probabilities
    records = []
    for side, agents in sides:
        participated = traveler_outcomes if side == "traveler" else driver_results
        for agent in agents:
            u_e, u_w, u_m = utilities(agent.adaptive, learning)
            perceived = (
                w[EXPERIENCE] * u_e + w[WOM] * u_w + w[MARKETING] * u_m + choice.asc
            )
            prob = participation_probability(
                perceived, choice.alternative_utility, choice.mu, agent.adaptive.notified
            )
            records.append(
                AgentDayRecord(
                    side=side,
                    agent_id=agent.id,
                    u_experience=u_e,
                    u_wom=u_w,
                    u_marketing=u_m,
                    probability=prob,
                    notified=agent.adaptive.notified,
                    participated=agent.id in participated,
                )
            )
    return records
