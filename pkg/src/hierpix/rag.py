"""Object-annotated region adjacency graph.

Nodes are the regions of a fine partition; edges join regions whose pixel
sets touch under 4-connectivity. Each node carries its mean feature vector,
pixel count, object id from a prior object map, and a scalar attention
value. Region statistics are numpy arrays preallocated with merge headroom
(2n - 1 rows) so agglomeration can append merged regions in place.
"""

from __future__ import annotations

import numpy as np

from .imgio import validate_label_map

ATTENTION_MODES = ("off", "superpixel", "object")


class RegionGraph:
    """Region table plus adjacency structure.

    Attributes
    ----------
    mu : (capacity, d) float64
        Mean feature vector per region.
    size : (capacity,) int64
        Pixel count per region.
    object_id : (capacity,) int64
        Prior-object assignment per region.
    attention : (capacity,) float64
        Scalar attention per region, in [0, 1].
    alive : (capacity,) bool
        False once a region has been merged away.
    adjacency : list[set[int]]
        Neighbor sets; kept symmetric.
    edges : set[tuple[int, int]]
        Unordered pairs stored as (min, max); always joins two alive regions.
    """

    def __init__(
        self,
        mu: np.ndarray,
        size: np.ndarray,
        object_id: np.ndarray,
        attention: np.ndarray,
    ):
        n = len(size)
        if n < 1:
            raise ValueError("graph needs at least one region")
        d = mu.shape[1]
        cap = 2 * n - 1
        self.n_initial = n
        self.next_id = n
        self.mu = np.zeros((cap, d), dtype=np.float64)
        self.mu[:n] = mu
        self.size = np.zeros(cap, dtype=np.int64)
        self.size[:n] = size
        self.object_id = np.zeros(cap, dtype=np.int64)
        self.object_id[:n] = object_id
        self.attention = np.zeros(cap, dtype=np.float64)
        self.attention[:n] = attention
        self.alive = np.zeros(cap, dtype=bool)
        self.alive[:n] = True
        self.adjacency: list[set[int]] = [set() for _ in range(cap)]
        self.edges: set[tuple[int, int]] = set()

    @property
    def n_features(self) -> int:
        return self.mu.shape[1]

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-edge on region {u}")
        if not (self.alive[u] and self.alive[v]):
            raise ValueError(f"edge ({u}, {v}) touches a dead region")
        self.adjacency[u].add(v)
        self.adjacency[v].add(u)
        self.edges.add((u, v) if u < v else (v, u))

    def neighbors(self, u: int) -> set[int]:
        return self.adjacency[u]

    def same_object(self, u: int, v: int) -> bool:
        return bool(self.object_id[u] == self.object_id[v])

    def is_connected(self) -> bool:
        """True when every alive region is reachable over the edge set."""
        ids = self.alive_ids()
        if len(ids) <= 1:
            return True
        seen = {int(ids[0])}
        stack = [int(ids[0])]
        while stack:
            u = stack.pop()
            for x in self.adjacency[u]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return len(seen) == len(ids)


def adjacent_pairs(labels: np.ndarray) -> np.ndarray:
    """Unique 4-adjacent label pairs as an (m, 2) array with pair[0] < pair[1]."""
    lab = np.asarray(labels)
    horiz = np.stack([lab[:, :-1].ravel(), lab[:, 1:].ravel()], axis=1)
    vert = np.stack([lab[:-1, :].ravel(), lab[1:, :].ravel()], axis=1)
    pairs = np.concatenate([horiz, vert], axis=0)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return np.unique(np.stack([lo, hi], axis=1), axis=0).astype(np.int64)


def region_stats(labels: np.ndarray, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean feature vector and pixel count per region.

    Returns (mu, size) with mu of shape (n, d) and size of shape (n,).
    """
    lab = np.asarray(labels)
    feats = np.asarray(features, dtype=np.float64)
    if feats.shape[:2] != lab.shape:
        raise ValueError(f"features {feats.shape} do not match labels {lab.shape}")
    n = validate_label_map(lab)
    flat = lab.ravel()
    size = np.bincount(flat, minlength=n)
    d = feats.shape[2]
    sums = np.empty((n, d), dtype=np.float64)
    for c in range(d):
        sums[:, c] = np.bincount(flat, weights=feats[..., c].ravel(), minlength=n)
    mu = sums / size[:, np.newaxis]
    return mu, size.astype(np.int64)


def assign_objects(labels: np.ndarray, objects: np.ndarray) -> np.ndarray:
    """Majority-vote object id per region; ties go to the smaller object id."""
    lab = np.asarray(labels)
    obj = np.asarray(objects)
    if obj.shape != lab.shape:
        raise ValueError(f"object map {obj.shape} does not match labels {lab.shape}")
    n = validate_label_map(lab)
    pairs = np.stack([lab.ravel(), obj.ravel()], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    # primary: region asc, secondary: count desc, tertiary: object asc
    order = np.lexsort((uniq[:, 1], -counts, uniq[:, 0]))
    uniq = uniq[order]
    _, first = np.unique(uniq[:, 0], return_index=True)
    theta = np.zeros(n, dtype=np.int64)
    theta[uniq[first, 0]] = uniq[first, 1]
    return theta


def region_attention(
    labels: np.ndarray,
    objects: np.ndarray,
    att: np.ndarray,
    mode: str = "superpixel",
) -> np.ndarray:
    """Scalar attention per region.

    mode "superpixel": mean attention over the region's own pixels.
    mode "object": mean attention over all pixels of the region's object,
    shared by every region assigned to that object.
    """
    lab = np.asarray(labels)
    att = np.asarray(att, dtype=np.float64)
    if att.shape != lab.shape:
        raise ValueError(f"attention {att.shape} does not match labels {lab.shape}")
    if att.min() < 0.0 or att.max() > 1.0:
        raise ValueError("attention values outside [0, 1]")
    n = validate_label_map(lab)
    if mode == "superpixel":
        flat = lab.ravel()
        sums = np.bincount(flat, weights=att.ravel(), minlength=n)
        counts = np.bincount(flat, minlength=n)
        return sums / counts
    if mode == "object":
        obj = np.asarray(objects)
        m = validate_label_map(obj)
        flat = obj.ravel()
        sums = np.bincount(flat, weights=att.ravel(), minlength=m)
        counts = np.bincount(flat, minlength=m)
        theta = assign_objects(lab, obj)
        return (sums / counts)[theta]
    raise ValueError(f"unknown attention mode {mode!r}")


def build_rag(
    labels: np.ndarray,
    objects: np.ndarray,
    features: np.ndarray,
    att: np.ndarray | None = None,
    attention_mode: str = "off",
) -> RegionGraph:
    """Assemble the full region graph from per-pixel inputs.

    `att` may be omitted (or mode set to "off"), in which case per-region
    attention is zero and the merge costs reduce to their feature terms.
    """
    if attention_mode not in ATTENTION_MODES:
        raise ValueError(f"unknown attention mode {attention_mode!r}")
    mu, size = region_stats(labels, features)
    theta = assign_objects(labels, objects)
    n = len(size)
    if att is not None and attention_mode != "off":
        a = region_attention(labels, objects, att, mode=attention_mode)
    else:
        a = np.zeros(n, dtype=np.float64)
    graph = RegionGraph(mu, size, theta, a)
    for u, v in adjacent_pairs(labels):
        graph.add_edge(int(u), int(v))
    return graph
