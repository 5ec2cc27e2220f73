"""Road graph with cached shortest-path travel-time queries.

The graph is a directed network with metric edge lengths in meters and a
single flat vehicle speed.  It is immutable after construction; shortest
paths are computed with Dijkstra and cached per source (forward) and per
target (reverse), so repeated queries for the same O/D pairs are array
lookups.
"""

from __future__ import annotations

import csv
import heapq
import math
import threading
from collections import deque
from dataclasses import dataclass, field

import numpy as np


class NetworkError(ValueError):
    """Malformed or unusable graph input."""


@dataclass
class NetworkGraph:
    """Directed road graph with flat-speed travel times.

    ``nodes`` is a list of (node_id, x_m, y_m); ``edges`` a list of
    (from_id, to_id, length_m).  All scenario queries go through
    :meth:`travel_time`; distances are shortest-path meters and times are
    meters divided by the flat speed.
    """

    nodes: list[tuple[int, float, float]]
    edges: list[tuple[int, int, float]]
    speed_kmh: float

    _index: dict[int, int] = field(init=False, repr=False)
    _adj: list[list[tuple[int, float]]] = field(init=False, repr=False)
    _radj: list[list[tuple[int, float]]] = field(init=False, repr=False)
    _from_cache: dict[int, np.ndarray] = field(init=False, repr=False)
    _to_cache: dict[int, np.ndarray] = field(init=False, repr=False)
    _lock: threading.Lock = field(init=False, repr=False)

    def __post_init__(self):
        if self.speed_kmh <= 0:
            raise NetworkError(f"speed must be positive, got {self.speed_kmh}")
        if not self.nodes:
            raise NetworkError("graph has no nodes")
        self._index = {}
        for nid, _, _ in self.nodes:
            if nid in self._index:
                raise NetworkError(f"duplicate node id {nid}")
            self._index[nid] = len(self._index)
        n = len(self.nodes)
        self._adj = [[] for _ in range(n)]
        self._radj = [[] for _ in range(n)]
        for a, b, length in self.edges:
            if a not in self._index:
                raise NetworkError(f"edge ({a}, {b}) references unknown node {a}")
            if b not in self._index:
                raise NetworkError(f"edge ({a}, {b}) references unknown node {b}")
            if length <= 0:
                raise NetworkError(f"edge ({a}, {b}) has non-positive length {length}")
            i, j = self._index[a], self._index[b]
            self._adj[i].append((j, float(length)))
            self._radj[j].append((i, float(length)))
        self._check_strongly_connected()
        self._from_cache = {}
        self._to_cache = {}
        self._lock = threading.Lock()

    # -- validation ------------------------------------------------------

    def _check_strongly_connected(self):
        n = len(self.nodes)
        for adj, label in ((self._adj, "forward"), (self._radj, "reverse")):
            seen = [False] * n
            seen[0] = True
            queue = deque([0])
            while queue:
                i = queue.popleft()
                for j, _ in adj[i]:
                    if not seen[j]:
                        seen[j] = True
                        queue.append(j)
            if not all(seen):
                missing = self.nodes[seen.index(False)][0]
                raise NetworkError(
                    f"graph is not strongly connected ({label} search cannot "
                    f"reach node {missing})"
                )

    # -- queries ---------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def speed_ms(self) -> float:
        return self.speed_kmh / 3.6

    def node_index(self, node_id: int) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise NetworkError(f"unknown node id {node_id}") from None

    def node_ids(self) -> list[int]:
        return [nid for nid, _, _ in self.nodes]

    def _dijkstra(self, source_idx: int, adj) -> np.ndarray:
        dist = np.full(len(self.nodes), math.inf)
        dist[source_idx] = 0.0
        heap = [(0.0, source_idx)]
        while heap:
            d, i = heapq.heappop(heap)
            if d > dist[i]:
                continue
            for j, w in adj[i]:
                nd = d + w
                if nd < dist[j]:
                    dist[j] = nd
                    heapq.heappush(heap, (nd, j))
        return dist

    def meters_from(self, source_id: int) -> np.ndarray:
        """Shortest-path meters from ``source_id`` to every node (by index)."""
        idx = self.node_index(source_id)
        row = self._from_cache.get(idx)
        if row is None:
            with self._lock:
                row = self._from_cache.get(idx)
                if row is None:
                    row = self._dijkstra(idx, self._adj)
                    row.flags.writeable = False
                    self._from_cache[idx] = row
        return row

    def meters_to(self, target_id: int) -> np.ndarray:
        """Shortest-path meters from every node (by index) to ``target_id``."""
        idx = self.node_index(target_id)
        row = self._to_cache.get(idx)
        if row is None:
            with self._lock:
                row = self._to_cache.get(idx)
                if row is None:
                    row = self._dijkstra(idx, self._radj)
                    row.flags.writeable = False
                    self._to_cache[idx] = row
        return row

    def distance_m(self, from_id: int, to_id: int) -> float:
        return float(self.meters_from(from_id)[self.node_index(to_id)])

    def travel_time(self, from_id: int, to_id: int) -> tuple[float, float]:
        """(seconds, meters) along the shortest path at the flat speed."""
        meters = self.distance_m(from_id, to_id)
        return meters / self.speed_ms, meters


def make_grid(n: int, spacing_m: float, speed_kmh: float) -> NetworkGraph:
    """n-by-n lattice with bidirectional edges of length ``spacing_m``."""
    if n < 2:
        raise NetworkError(f"grid size must be at least 2, got {n}")
    if spacing_m <= 0:
        raise NetworkError(f"grid spacing must be positive, got {spacing_m}")
    nodes = []
    edges = []
    for r in range(n):
        for c in range(n):
            nodes.append((r * n + c, c * spacing_m, r * spacing_m))
    for r in range(n):
        for c in range(n):
            i = r * n + c
            if c + 1 < n:
                edges.append((i, i + 1, spacing_m))
                edges.append((i + 1, i, spacing_m))
            if r + 1 < n:
                edges.append((i, i + n, spacing_m))
                edges.append((i + n, i, spacing_m))
    return NetworkGraph(nodes=nodes, edges=edges, speed_kmh=speed_kmh)


def load_graph(nodes_file, edges_file, speed_kmh: float) -> NetworkGraph:
    """Load a graph from the `node_id,x,y` and `from,to,length_m` CSV files."""
    nodes = []
    with open(nodes_file, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        _require_columns(reader.fieldnames, ("node_id", "x", "y"), nodes_file)
        for line_no, row in enumerate(reader, start=2):
            try:
                nodes.append((int(row["node_id"]), float(row["x"]), float(row["y"])))
            except (TypeError, ValueError) as exc:
                raise NetworkError(f"{nodes_file}:{line_no}: malformed node row: {exc}")
    edges = []
    with open(edges_file, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        _require_columns(reader.fieldnames, ("from", "to", "length_m"), edges_file)
        for line_no, row in enumerate(reader, start=2):
            try:
                edges.append((int(row["from"]), int(row["to"]), float(row["length_m"])))
            except (TypeError, ValueError) as exc:
                raise NetworkError(f"{edges_file}:{line_no}: malformed edge row: {exc}")
    return NetworkGraph(nodes=nodes, edges=edges, speed_kmh=speed_kmh)


def save_graph(g: NetworkGraph, nodes_file, edges_file) -> None:
    """Write the graph in the format read back by :func:`load_graph`."""
    with open(nodes_file, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["node_id", "x", "y"])
        for nid, x, y in g.nodes:
            writer.writerow([nid, x, y])
    with open(edges_file, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["from", "to", "length_m"])
        for a, b, length in g.edges:
            writer.writerow([a, b, length])


def _require_columns(fieldnames, expected, path):
    if fieldnames is None or list(fieldnames) != list(expected):
        raise NetworkError(
            f"{path}: expected header {','.join(expected)}, got "
            f"{','.join(fieldnames) if fieldnames else '<empty>'}"
        )
