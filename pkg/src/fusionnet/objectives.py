"""Performance of threshold rules on a sensor network.

Region probabilities per (node, parent message, hypothesis), Bayes risk and
(P_f, P_d) by enumeration of decision vectors, noisy-channel risk, the
Neyman-Pearson Lagrangian, and the binary KL helpers used by the
tandem/interactive fusion analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ShapeMismatchError
from .gaussmath import lrt_cut_point, q_ext
from .netgraph import Dag

MAX_ENUMERATION_NODES = 20


@dataclass(frozen=True)
class CostMatrix:
    """``c[i][j]``: cost of final decision ``i`` when hypothesis ``j`` holds."""

    c00: float = 0.0
    c01: float = 1.0
    c10: float = 1.0
    c11: float = 0.0

    def __post_init__(self):
        vals = (self.c00, self.c01, self.c10, self.c11)
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise DomainError("costs must be finite and nonnegative")
        if not (self.c10 > self.c00 and self.c01 > self.c11):
            raise DomainError("wrong decisions must cost strictly more than right ones")

    @classmethod
    def zero_one(cls) -> "CostMatrix":
        return cls(0.0, 1.0, 1.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.c00, self.c01], [self.c10, self.c11]])

    def weights(self, prior: float) -> np.ndarray:
        """``w[u, h] = pi_h * C[u, h]`` with ``pi_1 = prior``."""
        check_prior(prior)
        return self.as_array() * np.array([1.0 - prior, prior])[None, :]

    def base_threshold(self, prior: float) -> float:
        """Single-sensor Bayes LRT threshold."""
        check_prior(prior)
        return (self.c10 - self.c00) * (1.0 - prior) / ((self.c01 - self.c11) * prior)


def check_prior(prior: float) -> None:
    if not 0.0 < prior < 1.0:
        raise DomainError(f"prior P(H1) must lie in (0,1), got {prior}")


class _Tables:
    """Per-node 1-D tables with 1-based node access and a packed view."""

    def __init__(self, tables):
        self._tables = tuple(tables)

    def __len__(self):
        return len(self._tables)

    def __iter__(self):
        return iter(self._tables)

    def __getitem__(self, k):
        if not 1 <= k <= len(self._tables):
            raise IndexError(f"node {k} out of range")
        return self._tables[k - 1]

    def check_dag(self, d: Dag) -> None:
        if len(self._tables) != d.n:
            raise ShapeMismatchError(f"{len(self._tables)} tables for a {d.n}-node network")
        for k in d.nodes:
            got = self._tables[k - 1].shape[-1]
            if got != d.table_size(k):
                raise ShapeMismatchError(
                    f"node {k}: table has {got} entries, network needs {d.table_size(k)}"
                )


class ThresholdRuleSet(_Tables):
    """LRT thresholds: node ``k`` says 1 iff ``p1(x_k)/p0(x_k) > table[k][c]``.

    ``c`` is the parent-message index. Entries live in ``[0, inf]``: ``inf``
    makes the region empty, ``0`` makes it everything.
    """

    def __init__(self, tables):
        arrs = []
        for t in tables:
            a = np.array(t, dtype=float).reshape(-1)
            if np.any(np.isnan(a)) or np.any(a < 0):
                raise DomainError("thresholds must be nonnegative (inf allowed)")
            a.setflags(write=False)
            arrs.append(a)
        super().__init__(arrs)

    @classmethod
    def uniform(cls, d: Dag, value: float) -> "ThresholdRuleSet":
        return cls([np.full(d.table_size(k), value) for k in d.nodes])

    def flat(self) -> np.ndarray:
        return np.concatenate(self._tables)

    def __eq__(self, other):
        return isinstance(other, ThresholdRuleSet) and len(self) == len(other) and all(
            np.array_equal(a, b) for a, b in zip(self, other)
        )

    def __repr__(self):
        return f"ThresholdRuleSet({[list(t) for t in self._tables]})"


class RegionProbs(_Tables):
    """``table[k][h, c] = P_h(node k says 1 | parent message c)``."""

    def __init__(self, tables):
        arrs = []
        for t in tables:
            a = np.array(t, dtype=float)
            if a.ndim != 2 or a.shape[0] != 2:
                raise ShapeMismatchError("each region-probability table must have shape (2, size)")
            if np.any(a < 0) or np.any(a > 1):
                raise DomainError("region probabilities must lie in [0, 1]")
            a.setflags(write=False)
            arrs.append(a)
        super().__init__(arrs)

    def prob(self, k: int, h: int, c: int, u: int = 1) -> float:
        p = float(self[k][h, c])
        return p if u == 1 else 1.0 - p

    def packed(self) -> np.ndarray:
        return np.concatenate(self._tables, axis=1)


@dataclass(frozen=True)
class _Packed:
    n: int
    par_ptr: np.ndarray
    par_idx: np.ndarray
    off: np.ndarray


def _pack_cache():
    cache = {}

    def get(d: Dag) -> _Packed:
        hit = cache.get(d)
        if hit is None:
            if d.n > MAX_ENUMERATION_NODES:
                raise ShapeMismatchError(
                    f"enumeration over 2^{d.n} decision vectors exceeds the {MAX_ENUMERATION_NODES}-node guard"
                )
            ptr = [0]
            idx = []
            for k in d.nodes:
                idx.extend(p - 1 for p in d.parents(k))
                ptr.append(len(idx))
            sizes = [d.table_size(k) for k in d.nodes]
            off = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int32)
            hit = _Packed(d.n, np.array(ptr, np.int32), np.array(idx, np.int32), off)
            if len(cache) > 256:
                cache.clear()
            cache[d] = hit
        return hit

    return get


packed_layout = _pack_cache()


def region_probs(model, d: Dag, rules: ThresholdRuleSet) -> RegionProbs:
    """Region probabilities of LRT rules under a conditionally independent model."""
    rules.check_dag(d)
    if model.n_sensors != d.n:
        raise ShapeMismatchError(f"model has {model.n_sensors} sensors, network has {d.n} nodes")
    out = []
    for k in d.nodes:
        g0, g1 = model.gaussians(k)
        cuts = np.array([lrt_cut_point(g0, g1, lam) for lam in rules[k]])
        row = [q_ext((cuts - g.mean) / g.sd) for g in (g0, g1)]
        out.append(np.vstack(row))
    return RegionProbs(out)


def decision_vector_probs(d: Dag, rp: RegionProbs) -> np.ndarray:
    """``P_h(u_1..u_n)`` for every decision vector, shape ``(2, 2**n)``."""
    rp.check_dag(d)
    pk = packed_layout(d)
    return kernels.joint_probs(pk.n, pk.par_ptr, pk.par_idx, pk.off, np.ascontiguousarray(rp.packed()))


def final_decision_probs(d: Dag, rp: RegionProbs) -> np.ndarray:
    """``[P_0(u_1=1), P_1(u_1=1)]``."""
    joint = decision_vector_probs(d, rp)
    return joint[:, 1::2].sum(axis=1)


def message_probs(d: Dag, rp: RegionProbs, k: int) -> np.ndarray:
    """Joint law of node ``k``'s parent message, ``out[h, c] = P_h(message = c)``."""
    joint = decision_vector_probs(d, rp)
    codes = np.arange(1 << d.n)
    ctx = np.zeros_like(codes)
    for j, p in enumerate(d.parents(k)):
        ctx |= ((codes >> (p - 1)) & 1) << j
    size = d.table_size(k)
    return np.vstack([np.bincount(ctx, weights=joint[h], minlength=size) for h in range(2)])


def _risk_from_final(final: np.ndarray, weights: np.ndarray) -> float:
    return float(sum(weights[0, h] + (weights[1, h] - weights[0, h]) * final[h] for h in range(2)))


def bayes_risk(d: Dag, rp: RegionProbs, cost: CostMatrix, prior: float) -> float:
    """Expected cost of the fusion center's decision."""
    return _risk_from_final(final_decision_probs(d, rp), cost.weights(prior))


class ChannelSet(_Tables):
    """Per-node transition matrices ``m[k][c, c'] = p(received c' | sent c)``."""

    def __init__(self, tables):
        arrs = []
        for t in tables:
            a = np.array(t, dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ShapeMismatchError("channel matrices must be square")
            if np.any(a < 0) or np.any(a > 1):
                raise DomainError("channel entries must lie in [0, 1]")
            if np.any(np.abs(a.sum(axis=1) - 1.0) > 1e-12):
                raise DomainError("channel rows must sum to 1")
            a.setflags(write=False)
            arrs.append(a)
        super().__init__(arrs)

    @classmethod
    def identity(cls, d: Dag) -> "ChannelSet":
        return cls([np.eye(d.table_size(k)) for k in d.nodes])

    @classmethod
    def symmetric_flips(cls, d: Dag, eps: float) -> "ChannelSet":
        """Every arrow is an independent binary symmetric channel with flip ``eps``."""
        if not 0.0 <= eps <= 1.0:
            raise DomainError("flip probability must lie in [0, 1]")
        bsc = np.array([[1.0 - eps, eps], [eps, 1.0 - eps]])
        out = []
        for k in d.nodes:
            m = np.ones((1, 1))
            for _ in d.parents(k):
                m = np.kron(bsc, m)
            out.append(m)
        return cls(out)


def effective_region_probs(rp: RegionProbs, ch: ChannelSet) -> RegionProbs:
    """Fold channels into the rules: ``sum_c' P_h(R | c') p(c' | c)``."""
    if len(ch) != len(rp):
        raise ShapeMismatchError("one channel matrix per node required")
    return RegionProbs([t @ m.T for t, m in zip(rp, ch)])


def bayes_risk_with_channels(d: Dag, rp: RegionProbs, ch: ChannelSet, cost: CostMatrix, prior: float) -> float:
    ch.check_dag(d)
    return bayes_risk(d, effective_region_probs(rp, ch), cost, prior)


def np_metrics(d: Dag, rp: RegionProbs) -> tuple[float, float]:
    """``(P_f, P_d)`` of the fusion center's decision."""
    p0, p1 = final_decision_probs(d, rp)
    return float(p0), float(p1)


def np_lagrangian(pd: float, pf: float, mult: float, alpha: float) -> float:
    if mult < 0:
        raise DomainError("multiplier must be nonnegative")
    return pd + mult * (alpha - pf)


def f_kl(alpha: float, beta: float) -> float:
    """KL divergence between Bernoulli(alpha) and Bernoulli(beta), in nats."""
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise DomainError(f"f_kl needs alpha, beta in (0,1), got ({alpha}, {beta})")
    return alpha * math.log(alpha / beta) + (1.0 - alpha) * math.log((1.0 - alpha) / (1.0 - beta))


def kl_yx(base: float, alpha: float, beta: float) -> float:
    return base + f_kl(alpha, beta)


def kl_xyx(base: float, a1: float, pairs) -> float:
    """``base + a1 f(alpha_1, beta_1) + (1 - a1) f(alpha_0, beta_0)``.

    ``pairs[u] = (alpha_u, beta_u)``.
    """
    if not 0.0 <= a1 <= 1.0:
        raise DomainError("a1 must lie in [0, 1]")
    (al0, be0), (al1, be1) = pairs
    return base + a1 * f_kl(al1, be1) + (1.0 - a1) * f_kl(al0, be0)
