"""One operating day: requests, first-dispatch matching, money and kilometers.

Event-driven engine.  Matching instants are request arrivals and
driver-becomes-idle transitions; at each instant pending requests are
scanned in request-time order and each is paired with the idle driver of
minimum pickup travel time (ties broken by lower driver id).  A request
unmatched for its full patience leaves unserved.  Drivers accept new
assignments only before the shift end (``day_length``); a trip already
under way completes even if it overruns the day.
"""

from __future__ import annotations

import heapq
from bisect import insort
from dataclasses import dataclass

from ridemarket import kernels, platform
from ridemarket.network import NetworkGraph

PATIENCE_S = 600.0

_ARRIVAL, _IDLE, _EXPIRY = 0, 1, 2


@dataclass(frozen=True)
class TripRequest:
    traveler_id: int
    origin: int
    destination: int
    request_time: float
    patience: float = PATIENCE_S

    def __post_init__(self):
        if self.patience <= 0:
            raise ValueError(f"patience must be positive, got {self.patience}")


@dataclass(frozen=True)
class TripOutcome:
    traveler_id: int
    served: bool
    matching_time: float
    pickup_time: float
    in_vehicle_time: float
    fare_paid: float
    discount_granted: float

    @property
    def waiting_time(self) -> float:
        return self.matching_time + self.pickup_time

    @property
    def gross_fare(self) -> float:
        return self.fare_paid + self.discount_granted


@dataclass(frozen=True)
class DriverDayResult:
    driver_id: int
    worked: bool
    revenue: float
    distance_km: float
    profit: float
    idle_s: float
    trips_served: int


@dataclass(frozen=True)
class DayTotals:
    """Raw per-day aggregates handed to the ledger."""

    requests: int
    served: int
    sum_matching_s: float
    sum_pickup_s: float
    pax_km: float
    veh_km: float


def compute_fare(
    distance_km: float,
    per_km_fare: float,
    min_fare: float,
    discount_rate: float,
    discounted: bool,
) -> tuple[float, float]:
    """(traveler_pays, gross_fare).

    The discount cuts only what the traveler pays; the gross fare (the
    drivers' basis) is unchanged.
    """
    if distance_km < 0:
        raise ValueError(f"distance must be non-negative, got {distance_km}")
    if not 0 <= discount_rate < 1:
        raise ValueError(f"discount rate must lie in [0, 1), got {discount_rate}")
    gross = max(min_fare, per_km_fare * distance_km)
    pays = gross * (1.0 - discount_rate) if discounted else gross
    return pays, gross


def driver_settlement(
    driver_id: int,
    gross_fares,
    commission: float,
    operating_cost_km: float,
    distance_km: float,
    idle_s: float,
) -> DriverDayResult:
    """Net a working driver's day: fares minus commission, minus km costs."""
    if not 0 <= commission < 1:
        raise ValueError(f"commission must lie in [0, 1), got {commission}")
    revenue = sum(g * (1.0 - commission) for g in gross_fares)
    return DriverDayResult(
        driver_id=driver_id,
        worked=True,
        revenue=revenue,
        distance_km=distance_km,
        profit=revenue - operating_cost_km * distance_km,
        idle_s=idle_s,
        trips_served=len(gross_fares),
    )


class _DriverDay:
    __slots__ = ("driver", "node_idx", "busy_s", "meters", "gross_fares")

    def __init__(self, driver, node_idx):
        self.driver = driver
        self.node_idx = node_idx
        self.busy_s = 0.0
        self.meters = 0.0
        self.gross_fares = []


def run_day(
    g: NetworkGraph,
    active_travelers,
    active_drivers,
    levers: platform.PlatformLevers,
    loyalty: dict,
    day_length_s: float,
    patience_s: float = PATIENCE_S,
) -> tuple[list[TripOutcome], list[DriverDayResult], DayTotals]:
    """Simulate one day for the participating agents.

    ``loyalty`` maps traveler id to the start-of-day participation
    probability; it decides discount eligibility.  Empty agent lists are
    valid (all requests unserved / all drivers fully idle).
    """
    speed = g.speed_ms
    node_index = g.node_index

    days = {}  # driver id -> _DriverDay
    idle_ids: list[int] = []  # sorted; parallel lookup through `days`
    for driver in active_drivers:
        days[driver.id] = _DriverDay(driver, node_index(driver.start_node))
        insort(idle_ids, driver.id)

    requests = sorted(
        (
            TripRequest(
                traveler_id=t.id,
                origin=t.origin,
                destination=t.destination,
                request_time=t.departure_s,
                patience=patience_s,
            )
            for t in active_travelers
        ),
        key=lambda r: (r.request_time, r.traveler_id),
    )

    events = []  # (time, priority, seq)
    payloads = {}
    seq = 0
    for req in requests:
        heapq.heappush(events, (req.request_time, _ARRIVAL, seq))
        payloads[seq] = req
        seq += 1

    pending: list[TripRequest] = []  # FIFO by (request_time, traveler_id)
    unresolved = {r.traveler_id for r in requests}
    outcomes = []
    totals_matching = 0.0
    totals_pickup = 0.0
    # pax/veh meters accrue term-by-term in the same order so the
    # veh_km >= pax_km ordering holds exactly, not just approximately
    pax_m = 0.0
    veh_m = 0.0
    served = 0

    def match_at(t: float):
        nonlocal seq, served, totals_matching, totals_pickup, pax_m, veh_m
        if t >= day_length_s:
            return  # shift over: no new assignments
        while pending and idle_ids:
            req = pending.pop(0)
            to_origin = g.meters_to(req.origin)
            if len(idle_ids) == 1:
                pos = 0
            else:
                pos = kernels.nearest_of(to_origin, [days[i].node_idx for i in idle_ids])
            driver_id = idle_ids.pop(pos)
            day = days[driver_id]

            pickup_m = float(to_origin[day.node_idx])
            pickup_s = pickup_m / speed
            service_s, service_m = g.travel_time(req.origin, req.destination)
            trip_km = service_m / 1000.0

            discounted = platform.discount_eligible(
                loyalty.get(req.traveler_id, 1.0), levers.discount_rate
            )
            paid, gross = compute_fare(
                trip_km, levers.per_km_fare, levers.min_fare, levers.discount_rate, discounted
            )

            outcomes.append(
                TripOutcome(
                    traveler_id=req.traveler_id,
                    served=True,
                    matching_time=t - req.request_time,
                    pickup_time=pickup_s,
                    in_vehicle_time=service_s,
                    fare_paid=paid,
                    discount_granted=gross - paid,
                )
            )
            unresolved.discard(req.traveler_id)
            served += 1
            totals_matching += t - req.request_time
            totals_pickup += pickup_s
            pax_m += service_m
            veh_m += pickup_m + service_m

            day.busy_s += pickup_s + service_s
            day.meters += pickup_m + service_m
            day.gross_fares.append(gross)
            day.node_idx = node_index(req.destination)
            heapq.heappush(events, (t + pickup_s + service_s, _IDLE, seq))
            payloads[seq] = driver_id
            seq += 1

    while events and unresolved:
        t = events[0][0]
        batch = []
        while events and events[0][0] == t:
            batch.append(heapq.heappop(events))
        expiries = []
        state_changed = False
        for _, priority, s in batch:
            payload = payloads.pop(s)
            if priority == _ARRIVAL:
                pending.append(payload)
                heapq.heappush(events, (t + payload.patience, _EXPIRY, seq))
                payloads[seq] = payload
                seq += 1
                state_changed = True
            elif priority == _IDLE:
                insort(idle_ids, payload)
                state_changed = True
            else:
                expiries.append(payload)
        if state_changed:
            match_at(t)
        for req in expiries:
            if req.traveler_id in unresolved:
                pending.remove(req)
                unresolved.discard(req.traveler_id)
                outcomes.append(
                    TripOutcome(
                        traveler_id=req.traveler_id,
                        served=False,
                        matching_time=req.patience,
                        pickup_time=0.0,
                        in_vehicle_time=0.0,
                        fare_paid=0.0,
                        discount_granted=0.0,
                    )
                )

    results = []
    for driver in active_drivers:
        day = days[driver.id]
        idle_s = max(0.0, day_length_s - day.busy_s)
        results.append(
            driver_settlement(
                driver.id,
                day.gross_fares,
                levers.commission,
                driver.operating_cost_km,
                day.meters / 1000.0,
                idle_s,
            )
        )

    totals = DayTotals(
        requests=len(requests),
        served=served,
        sum_matching_s=totals_matching,
        sum_pickup_s=totals_pickup,
        pax_km=pax_m / 1000.0,
        veh_km=veh_m / 1000.0,
    )
    return outcomes, results, totals
