"""Finite unions of intervals on the extended real line.

Decision regions at the fusion center of the interactive process are not
half-lines, so they are kept as sorted disjoint ``(lo, hi)`` pairs. Endpoints
are measure-zero under continuous laws, so open/closed is not tracked.
"""

from __future__ import annotations

import math

import numpy as np

from ..gaussmath import Gaussian1D, interval_prob

INF = math.inf


class IntervalSet:
    __slots__ = ("pieces",)

    def __init__(self, pieces=()):
        clean = sorted((float(a), float(b)) for a, b in pieces if a < b)
        merged = []
        for a, b in clean:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.pieces = tuple(merged)

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def full(cls):
        return cls([(-INF, INF)])

    @classmethod
    def above(cls, c: float):
        return cls([(c, INF)])

    @classmethod
    def below(cls, c: float):
        return cls([(-INF, c)])

    def complement(self) -> "IntervalSet":
        out = []
        prev = -INF
        for a, b in self.pieces:
            if a > prev:
                out.append((prev, a))
            prev = b
        if prev < INF:
            out.append((prev, INF))
        return IntervalSet(out)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        p, q = self.pieces, other.pieces
        while i < len(p) and j < len(q):
            lo = max(p[i][0], q[j][0])
            hi = min(p[i][1], q[j][1])
            if lo < hi:
                out.append((lo, hi))
            if p[i][1] < q[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.pieces + other.pieces)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self & other.complement()

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __bool__(self):
        return bool(self.pieces)

    def __repr__(self):
        return f"IntervalSet({list(self.pieces)})"

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.pieces:
            out |= (x > a) & (x < b)
        return out

    def prob(self, g: Gaussian1D) -> float:
        return float(sum(interval_prob(a, b, g) for a, b in self.pieces))

    def endpoints(self) -> np.ndarray:
        return np.array([v for ab in self.pieces for v in ab], dtype=float)
