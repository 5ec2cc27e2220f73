"""Staged market-entry strategy and the platform money ledger.

The platform tunes four levers (commission, traveler discount, marketing,
fares) on a day-indexed stage schedule, grants discounts only to not-yet
loyal travelers, and keeps a cash ledger of commission income against
discount and marketing spending.
"""

from __future__ import annotations

from dataclasses import dataclass


class ScheduleError(ValueError):
    """Invalid stage schedule."""


@dataclass(frozen=True)
class PlatformLevers:
    commission: float = 0.10
    discount_rate: float = 0.0
    marketing_active: bool = False
    marketing_cost_per_agent: float = 5.0
    per_km_fare: float = 1.2
    min_fare: float = 2.0

    def __post_init__(self):
        if not 0 <= self.commission < 1:
            raise ScheduleError(f"commission must lie in [0, 1), got {self.commission}")
        if not 0 <= self.discount_rate < 1:
            raise ScheduleError(f"discount rate must lie in [0, 1), got {self.discount_rate}")
        if self.per_km_fare <= 0 or self.min_fare <= 0:
            raise ScheduleError("fares must be positive")
        if self.marketing_cost_per_agent < 0:
            raise ScheduleError("marketing cost must be non-negative")


@dataclass(frozen=True)
class Stage:
    start_day: int
    end_day: int  # exclusive
    name: str
    levers: PlatformLevers


@dataclass(frozen=True)
class StageSchedule:
    """Contiguous, non-overlapping stages covering [0, horizon)."""

    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ScheduleError("schedule has no stages")
        expected_start = self.stages[0].start_day
        if expected_start != 0:
            raise ScheduleError(f"first stage must start at day 0, starts at {expected_start}")
        for stage in self.stages:
            if stage.end_day <= stage.start_day:
                raise ScheduleError(
                    f"stage '{stage.name}' is empty or reversed "
                    f"({stage.start_day} - {stage.end_day})"
                )
            if stage.start_day != expected_start:
                raise ScheduleError(
                    f"stage '{stage.name}' starts at day {stage.start_day}, "
                    f"expected {expected_start} (stages must be contiguous)"
                )
            expected_start = stage.end_day

    @property
    def horizon(self) -> int:
        return self.stages[-1].end_day


def levers_for_day(schedule: StageSchedule, day: int) -> tuple[PlatformLevers, str]:
    """The unique stage covering ``day``."""
    if day < 0 or day >= schedule.horizon:
        raise ScheduleError(f"day {day} outside schedule horizon [0, {schedule.horizon})")
    for stage in schedule.stages:
        if stage.start_day <= day < stage.end_day:
            return stage.levers, stage.name
    raise ScheduleError(f"no stage covers day {day}")  # unreachable given contiguity


def discount_eligible(traveler_probability: float, discount_rate: float) -> bool:
    """Discounts target travelers not yet loyal (participation below 50%)."""
    return discount_rate > 0 and traveler_probability < 0.5


@dataclass(frozen=True)
class CashRow:
    commission_income: float
    discount_spend: float
    marketing_spend: float

    @property
    def net(self) -> float:
        return self.commission_income - self.discount_spend - self.marketing_spend


def settle_day(
    outcomes, levers: PlatformLevers, target_pool: int, p_marketing: float
) -> CashRow:
    """Platform cash flows of one day.

    Marketing is paid per agent actually reached, and the campaign reaches a
    share ``p_marketing`` of the target pool per day, so the deterministic
    daily charge is cost x pool x p_marketing.
    """
    commission_income = 0.0
    discount_spend = 0.0
    for outcome in outcomes:
        if not outcome.served:
            continue
        gross = outcome.fare_paid + outcome.discount_granted
        commission_income += gross * levers.commission
        discount_spend += outcome.discount_granted
    marketing_spend = (
        levers.marketing_cost_per_agent * target_pool * p_marketing
        if levers.marketing_active
        else 0.0
    )
    return CashRow(
        commission_income=commission_income,
        discount_spend=discount_spend,
        marketing_spend=marketing_spend,
    )


def standard_entry_schedule(
    per_km_fare: float = 1.2,
    min_fare: float = 2.0,
    marketing_cost_per_agent: float = 5.0,
) -> StageSchedule:
    """The six-stage 400-day entry strategy used by the bundled scenarios."""

    def levers(commission, discount, marketing):
        return PlatformLevers(
            commission=commission,
            discount_rate=discount,
            marketing_active=marketing,
            marketing_cost_per_agent=marketing_cost_per_agent,
            per_km_fare=per_km_fare,
            min_fare=min_fare,
        )

    return StageSchedule(
        stages=(
            Stage(0, 25, "kickoff", levers(0.10, 0.0, False)),
            Stage(25, 50, "discount", levers(0.10, 0.40, False)),
            Stage(50, 100, "launch", levers(0.10, 0.40, True)),
            Stage(100, 200, "growth", levers(0.10, 0.40, False)),
            Stage(200, 300, "maturity", levers(0.10, 0.0, False)),
            Stage(300, 400, "greed", levers(0.50, 0.0, False)),
        )
    )
