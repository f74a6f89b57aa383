"""Seeded Monte Carlo sampling of decision trees and of the three-colour urn.

All randomness comes from numpy's PCG64 bit generator seeded with the
caller's 64-bit seed, so a (input, n, seed) triple always reproduces the
same report.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dtree import DecisionTree

GENERATOR = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def _check_n(n: int):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class SampleReport:
    counts: dict[str, int]
    total: int
    seed: int
    num_levels: int
    generator: str = GENERATOR

    def frequency(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.total

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "total": self.total,
            "seed": self.seed,
            "levels": self.num_levels,
            "generator": self.generator,
        }


def _level_tables(t: DecisionTree) -> list[np.ndarray]:
    # tables[d][k]: p0 of the node reached by prefix k (d bits); unreachable -> nan
    tables = [np.full(2**d, np.nan) for d in range(t.num_levels)]
    for prefix, node in t.nodes():
        tables[len(prefix)][int(prefix, 2) if prefix else 0] = node.p0
    return tables


def sample_tree(t: DecisionTree, n: int, seed: int) -> SampleReport:
    """Run ``n`` independent root-to-leaf walks through ``t``."""
    _check_n(n)
    rng = make_rng(seed)
    index = np.zeros(n, dtype=np.int64)
    for table in _level_tables(t):
        p0 = table[index]
        # a zero-probability branch is never taken: u < 1 always, u < 0 never
        bit = (rng.random(n) >= p0).astype(np.int64)
        index = (index << 1) | bit
    values, counts = np.unique(index, return_counts=True)
    width = t.num_levels
    table = {format(int(v), f"0{width}b"): int(c) for v, c in zip(values, counts)}
    return SampleReport(dict(sorted(table.items())), n, int(seed), width)


@dataclass(frozen=True)
class UrnSpec:
    """Urn of black, white and half-black/half-white balls, drawn with replacement."""

    black: int
    white: int
    mixed: int

    def __post_init__(self):
        for name in ("black", "white", "mixed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.total <= 0:
            raise ValueError("urn must contain at least one ball")

    @property
    def total(self) -> int:
        return self.black + self.white + self.mixed


@dataclass(frozen=True)
class UrnProbs:
    """Event probabilities for one urn.

    ``p_both`` is the chance a single ball shows both colours; the
    ``p_seq_*`` fields are for two consecutive draws (black then white,
    white then black).
    """

    p_black: float
    p_white: float
    p_both: float
    p_seq_bw: float
    p_seq_wb: float
    n: int | None = field(default=None)
    seed: int | None = field(default=None)

    def as_dict(self) -> dict:
        return {
            "p_black": self.p_black,
            "p_white": self.p_white,
            "p_both": self.p_both,
            "p_seq_bw": self.p_seq_bw,
            "p_seq_wb": self.p_seq_wb,
        }


def urn_event_probs(u: UrnSpec) -> UrnProbs:
    p_black = (u.black + u.mixed) / u.total
    p_white = (u.white + u.mixed) / u.total
    p_seq = p_black * p_white
    return UrnProbs(p_black, p_white, u.mixed / u.total, p_seq, p_seq)


def sample_urn(u: UrnSpec, n: int, seed: int) -> UrnProbs:
    """Estimate the urn probabilities from ``n`` pairs of draws.

    Single-ball estimates use the first draw of each pair.
    """
    _check_n(n)
    rng = make_rng(seed)
    draws = rng.integers(0, u.total, size=(n, 2))
    # ball ids: [0, black) black, [black, black+white) white, rest mixed
    shows_black = (draws < u.black) | (draws >= u.black + u.white)
    shows_white = draws >= u.black
    first_b, second_b = shows_black[:, 0], shows_black[:, 1]
    first_w, second_w = shows_white[:, 0], shows_white[:, 1]
    return UrnProbs(
        p_black=float(first_b.mean()),
        p_white=float(first_w.mean()),
        p_both=float((first_b & first_w).mean()),
        p_seq_bw=float((first_b & second_w).mean()),
        p_seq_wb=float((first_w & second_b).mean()),
        n=int(n),
        seed=int(seed),
    )
