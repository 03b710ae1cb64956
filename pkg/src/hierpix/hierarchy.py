"""Two-phase agglomerative merging over a region adjacency graph.

Phase 1 merges only region pairs assigned to the same prior object
(cross-object pairs cost +inf) under an appearance cost plus a spatial
cost whose weight decays with the square root of the remaining region
count. Once no same-object adjacent pair remains, phase 2 merges the
surviving regions under a size-weighted appearance cost (variance-minimizing
linkage) with the spatial channels dropped. Both phases add an optional
attention surcharge w_att * max(a_u, a_v) that delays merges of salient
regions.

Selection is deterministic: the cheapest edge wins, ties broken by
(cost, min id, max id). Because the phase-1 spatial weight changes with
every merge, the engine re-evaluates all live edge costs from cached
per-edge components at each step (vectorized) instead of trusting a heap
of stale keys; cached components only depend on the two endpoint regions,
so they are exact until an endpoint merges.

The merge sequence is the whole hierarchy: replaying its first n_f - K
records yields the K-region partition, perfectly nested across scales.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import SPATIAL_SLICE, appearance_indices
from .imgio import validate_label_map
from .rag import ATTENTION_MODES, RegionGraph


@dataclass(frozen=True)
class HierarchyParams:
    """Merge-engine parameters.

    w_pos scales the phase-1 spatial cost (regularity control); w_att
    scales the attention surcharge (0 disables); n_f is the starting
    region count the spatial weight is normalized by; attention_mode
    records how per-region attention was aggregated.
    """

    n_f: int
    w_pos: float = 5.0
    w_att: float = 0.0
    attention_mode: str = "off"

    def __post_init__(self):
        if self.n_f < 1:
            raise ValueError(f"n_f must be >= 1, got {self.n_f}")
        if not (math.isfinite(self.w_pos) and self.w_pos >= 0):
            raise ValueError(f"w_pos must be finite and >= 0, got {self.w_pos}")
        if not (math.isfinite(self.w_att) and self.w_att >= 0):
            raise ValueError(f"w_att must be finite and >= 0, got {self.w_att}")
        if self.attention_mode not in ATTENTION_MODES:
            raise ValueError(f"unknown attention mode {self.attention_mode!r}")


@dataclass(frozen=True)
class MergeRecord:
    u: int
    v: int
    w: int
    cost: float
    phase: int
    level_after: int


@dataclass(frozen=True)
class MergeSequence:
    """Ordered merges (u, v) -> w covering the whole hierarchy.

    Exactly n_f - 1 records; record i creates region n_f + i and leaves
    n_f - i - 1 regions alive.
    """

    n_f: int
    params: HierarchyParams
    records: tuple[MergeRecord, ...]

    def __post_init__(self):
        if len(self.records) != self.n_f - 1:
            raise ValueError(
                f"expected {self.n_f - 1} merge records, got {len(self.records)}"
            )

    def phase_counts(self) -> tuple[int, int]:
        p1 = sum(1 for r in self.records if r.phase == 1)
        return p1, len(self.records) - p1

    def to_json(self) -> str:
        """Serialize with 17-significant-digit costs for exact replay."""
        p = self.params
        lines = [
            "{",
            f'  "n_f": {self.n_f},',
            '  "params": {'
            f'"w_pos": {format(p.w_pos, ".17g")}, '
            f'"w_att": {format(p.w_att, ".17g")}, '
            f'"attention_mode": "{p.attention_mode}"'
            "},",
            '  "merges": [',
        ]
        body = [
            f'    {{"u": {r.u}, "v": {r.v}, "w": {r.w}, '
            f'"cost": {format(r.cost, ".17g")}, "phase": {r.phase}}}'
            for r in self.records
        ]
        lines.append(",\n".join(body))
        lines.append("  ]")
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MergeSequence":
        raw = json.loads(text)
        n_f = int(raw["n_f"])
        pr = raw["params"]
        params = HierarchyParams(
            n_f=n_f,
            w_pos=float(pr["w_pos"]),
            w_att=float(pr["w_att"]),
            attention_mode=str(pr["attention_mode"]),
        )
        records = []
        merged = set()
        for i, m in enumerate(raw["merges"]):
            u, v, w = int(m["u"]), int(m["v"]), int(m["w"])
            if w != n_f + i or u == v or u >= w or v >= w:
                raise ValueError(f"merge record {i} is inconsistent: {m}")
            if u in merged or v in merged:
                raise ValueError(f"region merged twice at record {i}")
            merged.update((u, v))
            records.append(
                MergeRecord(
                    u=u,
                    v=v,
                    w=w,
                    cost=float(m["cost"]),
                    phase=int(m["phase"]),
                    level_after=n_f - i - 1,
                )
            )
        return cls(n_f=n_f, params=params, records=tuple(records))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "MergeSequence":
        return cls.from_json(Path(path).read_text())


def spatial_weight(s: int, n_f: int, w_pos: float) -> float:
    """Scale-adaptive spatial weight w_pos * sqrt(s / n_f) for s regions left."""
    return w_pos * math.sqrt(s / n_f)


def attention_term(a_u: float, a_v: float, w_att: float) -> float:
    """Attention surcharge w_att * max(a_u, a_v)."""
    return w_att * max(a_u, a_v)


def _sqdist(a: np.ndarray, b: np.ndarray) -> float:
    # shared kernel so scalar costs and the engine's cached components
    # agree bit for bit
    d = a - b
    return float(np.sum(d * d))


def phase1_cost(
    graph: RegionGraph, u: int, v: int, s: int, params: HierarchyParams
) -> float:
    """Intra-object merge cost at scale s; +inf across object boundaries."""
    if graph.object_id[u] != graph.object_id[v]:
        return math.inf
    app_idx = appearance_indices(graph.n_features)
    app = _sqdist(graph.mu[u, app_idx], graph.mu[v, app_idx])
    pos = _sqdist(graph.mu[u, SPATIAL_SLICE], graph.mu[v, SPATIAL_SLICE])
    return (
        app
        + spatial_weight(s, params.n_f, params.w_pos) * pos
        + attention_term(graph.attention[u], graph.attention[v], params.w_att)
    )


def phase2_cost(graph: RegionGraph, u: int, v: int, params: HierarchyParams) -> float:
    """Size-weighted appearance cost; spatial channels excluded."""
    app_idx = appearance_indices(graph.n_features)
    app = _sqdist(graph.mu[u, app_idx], graph.mu[v, app_idx])
    su = int(graph.size[u])
    sv = int(graph.size[v])
    return (su * sv) / (su + sv) * app + attention_term(
        graph.attention[u], graph.attention[v], params.w_att
    )


def merge_regions(graph: RegionGraph, u: int, v: int) -> int:
    """Merge adjacent alive regions u and v into a new region.

    The new region's mean feature and attention are size-weighted means,
    its size the sum, and its object id the larger operand's (ties keep
    u's). Edges of u and v are rewired to the new region with duplicates
    collapsed. Returns the new region id.
    """
    key = (u, v) if u < v else (v, u)
    if key not in graph.edges:
        raise ValueError(f"regions {u} and {v} are not adjacent alive regions")
    su = int(graph.size[u])
    sv = int(graph.size[v])
    w = graph.next_id
    if w >= len(graph.size):
        raise RuntimeError("region capacity exhausted")
    graph.next_id = w + 1

    graph.mu[w] = (su * graph.mu[u] + sv * graph.mu[v]) / (su + sv)
    graph.size[w] = su + sv
    graph.attention[w] = (su * graph.attention[u] + sv * graph.attention[v]) / (su + sv)
    if sv > su:
        graph.object_id[w] = graph.object_id[v]
    else:
        graph.object_id[w] = graph.object_id[u]
    graph.alive[u] = False
    graph.alive[v] = False
    graph.alive[w] = True

    neighbors = (graph.adjacency[u] | graph.adjacency[v]) - {u, v}
    for x in (u, v):
        for y in graph.adjacency[x]:
            graph.adjacency[y].discard(x)
            graph.edges.discard((x, y) if x < y else (y, x))
        graph.adjacency[x] = set()
    for x in neighbors:
        graph.adjacency[w].add(x)
        graph.adjacency[x].add(w)
        graph.edges.add((w, x) if w < x else (x, w))
    return w


class _EdgeTable:
    """Flat per-edge component cache for the merge loop.

    Stores, per edge, the squared appearance and spatial distances, the
    attention max, and a same-object flag. Dead edges stay in place with
    live=False; per-iteration cost vectors mask them to +inf.
    """

    def __init__(self, capacity: int):
        self.eu = np.zeros(capacity, dtype=np.int64)
        self.ev = np.zeros(capacity, dtype=np.int64)
        self.app = np.zeros(capacity, dtype=np.float64)
        self.pos = np.zeros(capacity, dtype=np.float64)
        self.amax = np.zeros(capacity, dtype=np.float64)
        self.sobj = np.zeros(capacity, dtype=bool)
        self.live = np.zeros(capacity, dtype=bool)
        self.count = 0
        self.incident: dict[int, list[int]] = {}

    def _grow(self) -> None:
        for name in ("eu", "ev", "app", "pos", "amax", "sobj", "live"):
            arr = getattr(self, name)
            bigger = np.zeros(2 * len(arr), dtype=arr.dtype)
            bigger[: len(arr)] = arr
            setattr(self, name, bigger)

    def add(self, graph: RegionGraph, app_idx: np.ndarray, u: int, v: int) -> int:
        if self.count == len(self.eu):
            self._grow()
        i = self.count
        self.count = i + 1
        if u > v:
            u, v = v, u
        self.eu[i] = u
        self.ev[i] = v
        self.app[i] = _sqdist(graph.mu[u, app_idx], graph.mu[v, app_idx])
        self.pos[i] = _sqdist(graph.mu[u, SPATIAL_SLICE], graph.mu[v, SPATIAL_SLICE])
        self.amax[i] = max(graph.attention[u], graph.attention[v])
        self.sobj[i] = graph.object_id[u] == graph.object_id[v]
        self.live[i] = True
        self.incident.setdefault(u, []).append(i)
        self.incident.setdefault(v, []).append(i)
        return i

    def kill_incident(self, region: int) -> int:
        """Mark all live edges touching `region` dead; return same-object kills."""
        sobj_killed = 0
        for i in self.incident.pop(region, ()):
            if self.live[i]:
                self.live[i] = False
                if self.sobj[i]:
                    sobj_killed += 1
        return sobj_killed


def build_hierarchy(graph: RegionGraph, params: HierarchyParams) -> MergeSequence:
    """Run the full two-phase agglomeration down to a single region.

    The graph is consumed: regions are merged in place. Identical inputs
    produce identical sequences (ties broken by (cost, min id, max id)).
    """
    n_f = graph.n_alive
    if params.n_f != n_f:
        raise ValueError(f"params.n_f = {params.n_f} but graph has {n_f} regions")
    if not graph.is_connected():
        raise ValueError("region graph is disconnected")

    app_idx = appearance_indices(graph.n_features)
    table = _EdgeTable(capacity=max(4 * len(graph.edges), 16))
    sobj_live = 0
    for u, v in sorted(graph.edges):
        i = table.add(graph, app_idx, u, v)
        if table.sobj[i]:
            sobj_live += 1

    w_att = params.w_att
    records: list[MergeRecord] = []
    s = n_f
    phase = 1
    inf = math.inf
    for _ in range(n_f - 1):
        if phase == 1 and sobj_live == 0:
            phase = 2
        m = table.count
        live = table.live[:m]
        if phase == 1:
            w_s = spatial_weight(s, n_f, params.w_pos)
            base = table.app[:m] + w_s * table.pos[:m] + w_att * table.amax[:m]
            costs = np.where(live & table.sobj[:m], base, inf)
        else:
            su = graph.size[table.eu[:m]]
            sv = graph.size[table.ev[:m]]
            base = (su * sv) / (su + sv) * table.app[:m] + w_att * table.amax[:m]
            costs = np.where(live, base, inf)

        best_cost = costs.min()
        candidates = np.flatnonzero(costs == best_cost)
        best = min(candidates, key=lambda i: (table.eu[i], table.ev[i]))
        u = int(table.eu[best])
        v = int(table.ev[best])

        w = merge_regions(graph, u, v)
        sobj_live -= table.kill_incident(u)
        sobj_live -= table.kill_incident(v)
        for x in sorted(graph.adjacency[w]):
            i = table.add(graph, app_idx, w, x)
            if table.sobj[i]:
                sobj_live += 1

        s -= 1
        records.append(
            MergeRecord(
                u=u,
                v=v,
                w=w,
                cost=float(best_cost),
                phase=phase,
                level_after=s,
            )
        )
    return MergeSequence(n_f=n_f, params=params, records=tuple(records))


def extract_partition(seq: MergeSequence, fine: np.ndarray, k: int) -> np.ndarray:
    """Partition with exactly k regions by replaying the first n_f - k merges.

    Labels in the output are contiguous from 0 in order of first pixel
    occurrence (row-major).
    """
    fine = np.asarray(fine)
    n_f = seq.n_f
    if not 1 <= k <= n_f:
        raise ValueError(f"k = {k} outside [1, {n_f}]")
    count = validate_label_map(fine)
    if count != n_f:
        raise ValueError(f"fine partition has {count} regions, sequence expects {n_f}")

    n_applied = n_f - k
    total = n_f + n_applied
    parent = np.arange(total, dtype=np.int64)
    for rec in seq.records[:n_applied]:
        parent[rec.u] = rec.w
        parent[rec.v] = rec.w
    # parents always point to later ids, so one descending pass resolves roots
    root = np.arange(total, dtype=np.int64)
    for x in range(total - 1, -1, -1):
        root[x] = root[parent[x]]

    mapped = root[:n_f][fine]
    flat = mapped.ravel()
    uniq, first_idx, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first_idx, kind="stable")] = np.arange(len(uniq))
    out = rank[inverse].reshape(fine.shape).astype(np.int32)
    assert len(uniq) == k
    return out
