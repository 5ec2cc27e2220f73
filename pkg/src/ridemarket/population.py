"""Traveler and driver pools with their static attributes.

Populations are generated once per experiment (trip requests and driver
start positions are fixed across days) or loaded from CSV files.  Each
agent owns an :class:`~ridemarket.adaptation.AdaptiveState`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ridemarket import adaptation
from ridemarket.adaptation import AdaptiveState, LearningParams
from ridemarket.network import NetworkGraph

MIN_TRIP_DISTANCE_M = 2000.0
PT_FACTOR = 1.8
PT_OVERHEAD_S = 600.0

# attempts per traveler before declaring the distance filter infeasible
_MAX_OD_ATTEMPTS = 1000


class PopulationError(ValueError):
    """Invalid population input or infeasible generation parameters."""


@dataclass
class TravelerAgent:
    id: int
    origin: int
    destination: int
    departure_s: float
    pt_cost: float
    adaptive: AdaptiveState = field(default_factory=AdaptiveState)

    def __post_init__(self):
        if self.origin == self.destination:
            raise PopulationError(f"traveler {self.id}: origin equals destination")
        if self.pt_cost <= 0:
            raise PopulationError(f"traveler {self.id}: pt_cost must be positive, got {self.pt_cost}")
        if self.departure_s < 0:
            raise PopulationError(f"traveler {self.id}: negative departure {self.departure_s}")


@dataclass
class DriverAgent:
    id: int
    start_node: int
    reservation_wage: float
    operating_cost_km: float
    adaptive: AdaptiveState = field(default_factory=AdaptiveState)

    def __post_init__(self):
        if self.reservation_wage <= 0:
            raise PopulationError(f"driver {self.id}: reservation wage must be positive")
        if self.operating_cost_km < 0:
            raise PopulationError(f"driver {self.id}: negative operating cost")


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def pt_generalized_cost(
    distance_m: float, speed_ms: float, pt_factor: float, pt_overhead_s: float
) -> float:
    """Fixed-alternative cost proxy: scaled in-vehicle time plus an overhead.

    Stands in for a full door-to-door transit itinerary (access, waiting,
    transfers, fares); both knobs are scenario-configurable.
    """
    return pt_factor * (distance_m / speed_ms) + pt_overhead_s


def generate_demand(
    g: NetworkGraph,
    n: int,
    day_length_s: float,
    seed,
    pt_factor: float = PT_FACTOR,
    pt_overhead_s: float = PT_OVERHEAD_S,
    min_trip_distance_m: float = MIN_TRIP_DISTANCE_M,
    learning: LearningParams | None = None,
) -> list[TravelerAgent]:
    """Travelers with uniform O/D pairs at least ``min_trip_distance_m`` apart."""
    if n < 1:
        raise PopulationError(f"need at least one traveler, got {n}")
    rng = _as_rng(seed)
    node_ids = g.node_ids()
    learning = learning or LearningParams()
    travelers = []
    for i in range(n):
        for _ in range(_MAX_OD_ATTEMPTS):
            o, d = rng.choice(len(node_ids), size=2, replace=False)
            origin, destination = node_ids[int(o)], node_ids[int(d)]
            distance = g.distance_m(origin, destination)
            if distance >= min_trip_distance_m:
                break
        else:
            raise PopulationError(
                f"could not draw an O/D pair at least {min_trip_distance_m} m apart "
                f"after {_MAX_OD_ATTEMPTS} attempts; the graph is too small for the filter"
            )
        departure = float(rng.integers(0, int(day_length_s)))
        pt_cost = pt_generalized_cost(distance, g.speed_ms, pt_factor, pt_overhead_s)
        travelers.append(
            TravelerAgent(
                id=i,
                origin=origin,
                destination=destination,
                departure_s=departure,
                pt_cost=pt_cost,
                adaptive=adaptation.initial_state(learning),
            )
        )
    return travelers


def generate_supply(
    g: NetworkGraph,
    n: int,
    reservation_wage: float,
    operating_cost_km: float,
    seed,
    learning: LearningParams | None = None,
) -> list[DriverAgent]:
    """Drivers with start nodes drawn uniformly once (fixed across days)."""
    if n < 1:
        raise PopulationError(f"need at least one driver, got {n}")
    rng = _as_rng(seed)
    node_ids = g.node_ids()
    learning = learning or LearningParams()
    return [
        DriverAgent(
            id=i,
            start_node=node_ids[int(rng.integers(0, len(node_ids)))],
            reservation_wage=reservation_wage,
            operating_cost_km=operating_cost_km,
            adaptive=adaptation.initial_state(learning),
        )
        for i in range(n)
    ]


TRAVELER_COLUMNS = ("id", "origin", "destination", "departure_s", "pt_cost")
DRIVER_COLUMNS = ("id", "start_node", "reservation_wage", "operating_cost_km")


def save_population(travelers, drivers, travelers_file, drivers_file) -> None:
    with open(travelers_file, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRAVELER_COLUMNS)
        for t in travelers:
            writer.writerow([t.id, t.origin, t.destination, t.departure_s, t.pt_cost])
    with open(drivers_file, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(DRIVER_COLUMNS)
        for d in drivers:
            writer.writerow([d.id, d.start_node, d.reservation_wage, d.operating_cost_km])


def load_population(
    travelers_file, drivers_file, learning: LearningParams | None = None
) -> tuple[list[TravelerAgent], list[DriverAgent]]:
    """Read traveler/driver CSVs; adaptive states start at the defaults.

    Node ids are validated against the graph when the scenario is assembled,
    not here.
    """
    learning = learning or LearningParams()
    travelers = []
    with open(travelers_file, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        _require_columns(reader.fieldnames, TRAVELER_COLUMNS, travelers_file)
        for line_no, row in enumerate(reader, start=2):
            try:
                travelers.append(
                    TravelerAgent(
                        id=int(row["id"]),
                        origin=int(row["origin"]),
                        destination=int(row["destination"]),
                        departure_s=float(row["departure_s"]),
                        pt_cost=float(row["pt_cost"]),
                        adaptive=adaptation.initial_state(learning),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise PopulationError(f"{travelers_file}:{line_no}: {exc}") from None
    drivers = []
    with open(drivers_file, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        _require_columns(reader.fieldnames, DRIVER_COLUMNS, drivers_file)
        for line_no, row in enumerate(reader, start=2):
            try:
                drivers.append(
                    DriverAgent(
                        id=int(row["id"]),
                        start_node=int(row["start_node"]),
                        reservation_wage=float(row["reservation_wage"]),
                        operating_cost_km=float(row["operating_cost_km"]),
                        adaptive=adaptation.initial_state(learning),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise PopulationError(f"{drivers_file}:{line_no}: {exc}") from None
    return travelers, drivers


def validate_against_graph(travelers, drivers, g: NetworkGraph) -> None:
    """Every node an agent references must exist in the graph."""
    known = set(g.node_ids())
    for t in travelers:
        for label, node in (("origin", t.origin), ("destination", t.destination)):
            if node not in known:
                raise PopulationError(f"traveler {t.id}: {label} node {node} not in graph")
    for d in drivers:
        if d.start_node not in known:
            raise PopulationError(f"driver {d.id}: start node {d.start_node} not in graph")


def _require_columns(fieldnames, expected, path):
    if fieldnames is None or list(fieldnames) != list(expected):
        raise PopulationError(
            f"{path}: expected header {','.join(expected)}, got "
            f"{','.join(fieldnames) if fieldnames else '<empty>'}"
        )
