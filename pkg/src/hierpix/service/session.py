"""Single-image interactive session.

Holds the immutable pipeline inputs and a rebuildable snapshot (attention,
params, merge sequence). Click and parameter updates trigger a full
hierarchy rebuild under a lock; readers grab the current snapshot once and
work against it, so every response is internally consistent with one
generation even while a rebuild is in flight.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from ..features import clicks_to_attention
from ..hierarchy import HierarchyParams, MergeSequence, build_hierarchy, extract_partition
from ..imgio import Click
from ..rag import build_rag


@dataclass(frozen=True)
class SessionInputs:
    """Per-image inputs fixed for the session lifetime."""

    image: np.ndarray
    features: np.ndarray
    fine: np.ndarray
    objects: np.ndarray
    base_attention: np.ndarray | None = None
    ground_truths: tuple[np.ndarray, ...] = ()

    @property
    def width(self) -> int:
        return self.image.shape[1]

    @property
    def height(self) -> int:
        return self.image.shape[0]


@dataclass(frozen=True)
class Snapshot:
    """One consistent rebuild result."""

    generation: int
    params: HierarchyParams
    attention: np.ndarray | None
    seq: MergeSequence


@dataclass
class _Settings:
    w_pos: float
    w_att: float
    attention_mode: str
    clicks: list[Click] = field(default_factory=list)


class Session:
    def __init__(
        self,
        inputs: SessionInputs,
        w_pos: float = 5.0,
        w_att: float = 0.0,
        attention_mode: str = "off",
    ):
        self.inputs = inputs
        self._lock = threading.Lock()
        self._settings = _Settings(w_pos, w_att, attention_mode)
        self._snapshot = self._rebuild(generation=0)
        self._partition_cache: dict[tuple[int, int], np.ndarray] = {}

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    @property
    def n_f(self) -> int:
        return self._snapshot.seq.n_f

    def _rebuild(self, generation: int) -> Snapshot:
        cfg = self._settings
        inp = self.inputs
        if cfg.clicks:
            attention = clicks_to_attention(
                cfg.clicks, inp.base_attention, inp.width, inp.height
            )
        else:
            attention = inp.base_attention
        params = HierarchyParams(
            n_f=len(np.unique(inp.fine)),
            w_pos=cfg.w_pos,
            w_att=cfg.w_att,
            attention_mode=cfg.attention_mode,
        )
        graph = build_rag(
            inp.fine, inp.objects, inp.features, attention, cfg.attention_mode
        )
        seq = build_hierarchy(graph, params)
        return Snapshot(
            generation=generation, params=params, attention=attention, seq=seq
        )

    def _commit(self) -> int:
        snap = self._rebuild(generation=self._snapshot.generation + 1)
        self._snapshot = snap
        self._partition_cache.clear()
        return snap.generation

    def add_clicks(self, clicks: list[Click]) -> int:
        """Append clicks and rebuild; returns the new generation."""
        with self._lock:
            for c in clicks:
                if not (0 <= c.x < self.inputs.width and 0 <= c.y < self.inputs.height):
                    raise ValueError(f"click ({c.x}, {c.y}) out of bounds")
            self._settings.clicks.extend(clicks)
            return self._commit()

    def clear_clicks(self) -> int:
        with self._lock:
            self._settings.clicks.clear()
            return self._commit()

    def set_params(
        self,
        w_pos: float | None = None,
        w_att: float | None = None,
        attention_mode: str | None = None,
    ) -> int:
        with self._lock:
            if w_pos is not None:
                self._settings.w_pos = w_pos
            if w_att is not None:
                self._settings.w_att = w_att
            if attention_mode is not None:
                self._settings.attention_mode = attention_mode
            return self._commit()

    def partition(self, k: int, snap: Snapshot | None = None) -> np.ndarray:
        """Label map at scale k for the given (default: current) snapshot."""
        snap = snap or self._snapshot
        key = (snap.generation, k)
        cached = self._partition_cache.get(key)
        if cached is not None:
            return cached
        labels = extract_partition(snap.seq, self.inputs.fine, k)
        if len(self._partition_cache) > 16:
            self._partition_cache.clear()
        self._partition_cache[key] = labels
        return labels
