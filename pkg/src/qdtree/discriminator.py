"""Classical vs. quantum source discrimination from 3-way coincidences.

A coincidence is "same" when all three bits agree (000 or 111).  For a
classical source P_s/P_n = 1/2, for the maximally entangled source 1/3;
the decision threshold is their midpoint 5/12.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .sampler import make_rng

CLASSICAL_RATIO = 1 / 2
QUANTUM_RATIO = 1 / 3
THRESHOLD = 5 / 12
R_BOUND = 5.83

SAME_TRIPLES = np.array([[0, 0, 0], [1, 1, 1]], dtype=np.uint8)
MIXED_TRIPLES = np.array(
    [[0, 0, 1], [0, 1, 0], [0, 1, 1], [1, 0, 0], [1, 0, 1], [1, 1, 0]], dtype=np.uint8
)


class Label(enum.Enum):
    CLASSICAL = "Classical"
    QUANTUM = "Quantum"


class TripleStream:
    """Sequence of 3-bit coincidence outcomes, stored as an (n, 3) uint8 array."""

    __slots__ = ("_triples",)

    def __init__(self, triples):
        arr = np.asarray(triples)
        if arr.size == 0:
            arr = arr.reshape(0, 3)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"triples must have shape (n, 3), got {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("each element of a triple must be a bit")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self._triples = arr

    @property
    def triples(self) -> np.ndarray:
        return self._triples

    def __len__(self):
        return self._triples.shape[0]

    @classmethod
    def from_strings(cls, items: Iterable[str]) -> TripleStream:
        rows = []
        for s in items:
            if not isinstance(s, str) or len(s) != 3 or set(s) - {"0", "1"}:
                raise ValueError(f"not a 3-bit string: {s!r}")
            rows.append([int(ch) for ch in s])
        return cls(rows)

    def to_strings(self) -> list[str]:
        return ["".join(map(str, row)) for row in self._triples.tolist()]

    def to_json(self) -> str:
        return json.dumps(self.to_strings())


@dataclass(frozen=True)
class RatioEstimate:
    n: int
    count_same: int
    p_s: float
    p_n: float
    ratio: float
    stderr_ratio: float


@dataclass(frozen=True)
class Verdict:
    label: Label
    ratio: float
    threshold: float
    margin: float


def ratio_from_counts(count_same: int, n: int) -> RatioEstimate:
    if n < 1:
        raise ValueError("cannot estimate a ratio from an empty stream")
    if not 0 <= count_same <= n:
        raise ValueError(f"count_same must lie in [0, {n}], got {count_same}")
    p_s = count_same / n
    p_n = 1.0 - p_s
    if p_n == 0.0:
        return RatioEstimate(n, count_same, p_s, p_n, math.inf, math.inf)
    # delta method: d/dp [p / (1 - p)] = 1 / (1 - p)^2
    stderr = math.sqrt(p_s * p_n / n) / (p_n * p_n)
    return RatioEstimate(n, count_same, p_s, p_n, p_s / p_n, stderr)


def estimate_ratio(s: TripleStream) -> RatioEstimate:
    t = s.triples
    same = int(np.count_nonzero((t[:, 0] == t[:, 1]) & (t[:, 1] == t[:, 2])))
    return ratio_from_counts(same, len(s))


def classify(e: RatioEstimate | float) -> Verdict:
    """Classical when the ratio is at or above 5/12 (ties go to Classical)."""
    ratio = e.ratio if isinstance(e, RatioEstimate) else float(e)
    label = Label.CLASSICAL if ratio >= THRESHOLD else Label.QUANTUM
    return Verdict(label, ratio, THRESHOLD, ratio - THRESHOLD)


def gen_triples(p_s_target: float, n: int, seed: int) -> TripleStream:
    """Synthetic i.i.d. source with P(all bits equal) = ``p_s_target``."""
    if not 0.0 <= p_s_target <= 1.0:
        raise ValueError(f"p_s_target must lie in [0, 1], got {p_s_target!r}")
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed)
    same = rng.random(n) < p_s_target
    pick_same = rng.integers(0, 2, size=n)
    pick_mixed = rng.integers(0, 6, size=n)
    triples = np.where(same[:, None], SAME_TRIPLES[pick_same], MIXED_TRIPLES[pick_mixed])
    return TripleStream(triples)


def r_separable_threshold(r: float) -> bool:
    """Whether the state (r|00> + |11>)/sqrt(1+r^2) is still distinguishable
    from a classical source by the coincidence-ratio test."""
    if math.isnan(r) or r <= 0:
        raise ValueError(f"r must be positive, got {r!r}")
    return r < R_BOUND
