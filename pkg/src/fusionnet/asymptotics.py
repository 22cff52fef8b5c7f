"""Large-sample information measures for sensors inside a network.

A node ``k`` sees its own observation ``x_k`` and its parents' message
``c``; under each hypothesis the pair has law ``p_h(x_k) P_h(c)``. KL and
Chernoff information of that *augmented* distribution measure how well the
node could decide if it were the fusion center. Divergences are in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError, GraphValidationError
from .gaussmath import (
    Gaussian1D, chernoff_from_log_affinity, kl_divergence_gauss, log_affinity_gauss, q_ext,
)
from .models import WgnModel
from .netgraph import Dag, dag_from_edges
from .objectives import CostMatrix, ThresholdRuleSet, f_kl, message_probs, region_probs
from .optimizer.config import OptConfig
from .optimizer.pbpo import pbpo_bayes
from .optimizer.search import coordinate_search

MAX_FAMILY = 10_000
CUT_SPAN_SD = 8.0


@dataclass(frozen=True)
class AugmentedDistribution:
    """``p_h(x, c) = N(x; g_h) * msg[h, c]``."""

    g0: Gaussian1D
    g1: Gaussian1D
    msg: np.ndarray

    def __post_init__(self):
        msg = np.asarray(self.msg, dtype=float)
        if msg.ndim != 2 or msg.shape[0] != 2:
            raise DomainError("message law must have shape (2, size)")
        if np.any(msg < 0) or np.any(np.abs(msg.sum(axis=1) - 1.0) > 1e-9):
            raise DomainError("message probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "msg", msg)

    def kl(self, reverse: bool = False) -> float:
        """``D(p0 || p1)`` (or ``D(p1 || p0)``); ``inf`` when not absolutely continuous."""
        a, b = (self.msg[1], self.msg[0]) if reverse else (self.msg[0], self.msg[1])
        ga, gb = (self.g1, self.g0) if reverse else (self.g0, self.g1)
        cont = kl_divergence_gauss(ga, gb)
        live = a > 0
        if np.any(b[live] == 0):
            return math.inf
        return cont + float(np.sum(a[live] * np.log(a[live] / b[live])))

    def log_affinity(self, s: float) -> float:
        """``log sum_c int p0^(1-s) p1^s``."""
        with np.errstate(divide="ignore"):
            disc = float(np.sum(self.msg[0] ** (1.0 - s) * self.msg[1] ** s))
        if disc <= 0:
            return -math.inf
        return math.log(disc) + log_affinity_gauss(self.g0, self.g1, s)

    def chernoff(self) -> float:
        c, _ = chernoff_from_log_affinity(self.log_affinity)
        return max(c, 0.0)


def augmented_distribution(model, d: Dag, rules: ThresholdRuleSet, k: int) -> AugmentedDistribution:
    """Law of ``(x_k, parent message)`` under the given rules.

    The message law is the exact joint over the parents' decisions, so
    parents that share ancestors are handled correctly.
    """
    rp = region_probs(model, d, rules)
    g0, g1 = model.gaussians(k)
    return AugmentedDistribution(g0, g1, message_probs(d, rp, k))


def kl_at_node(model, d: Dag, rules: ThresholdRuleSet, k: int) -> float:
    """``D(p0(x_k, c) || p1(x_k, c))``; ``inf`` flags a message impossible under H1."""
    return augmented_distribution(model, d, rules, k).kl()


def chernoff_at_node(model, d: Dag, rules: ThresholdRuleSet, k: int) -> float:
    """Chernoff information of node ``k``'s augmented observation."""
    return augmented_distribution(model, d, rules, k).chernoff()


def global_fusion_center(model, d: Dag, rules: ThresholdRuleSet) -> tuple[int, float]:
    """Node with the largest Chernoff information; near-ties (1e-12
    relative) go to the lowest index. Returns ``(node, value)``."""
    best_k, best_c = 1, -math.inf
    for k in d.nodes:
        c = chernoff_at_node(model, d, rules, k)
        if c > best_c * (1.0 + 1e-12) + 1e-300:
            best_k, best_c = k, c
    return best_k, best_c


def rules_for_information(model, d: Dag, cfg: OptConfig = OptConfig()) -> ThresholdRuleSet:
    """Surrogate rules: 0-1 Bayes risk at equal priors."""
    return pbpo_bayes(model, d, CostMatrix.zero_one(), 0.5, cfg).rules


# two-sensor KL objectives: sensor 1 is X (final decision), sensor 2 is Y


@dataclass(frozen=True)
class KlOptimum:
    value: float
    alpha: tuple
    beta: tuple
    thresholds: tuple
    converged: bool
    first_stage_prob: float = 1.0


def swap_roles(model: WgnModel) -> WgnModel:
    """Exchange X and Y (final decision moves to the other sensor)."""
    return WgnModel(tuple(reversed(model.sigmas)))


def _cut_box(g0, g1):
    return g0.mean - CUT_SPAN_SD * g0.sd, g1.mean + CUT_SPAN_SD * g1.sd


def _lam_from_cut(g0, g1, c):
    return math.exp((g1.mean - g0.mean) * (c - 0.5 * (g0.mean + g1.mean)) / g0.variance)


def _tails(g0, g1, c):
    return float(q_ext((c - g0.mean) / g0.sd)), float(q_ext((c - g1.mean) / g1.sd))


def _safe_f(a, b):
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        return 0.0
    return f_kl(a, b)


def yx_threshold_residual(lam: float, alpha: float, beta: float) -> float:
    """Stationarity residual of the Y threshold for the YX KL objective."""
    target = math.log(beta * (1 - alpha) / (alpha * (1 - beta))) / ((beta - alpha) / (beta * (1 - beta)))
    return abs(lam - target)


def maximize_kl_yx(model: WgnModel, cfg: OptConfig = OptConfig()) -> KlOptimum:
    """Maximize ``K[x] + f(alpha, beta)`` over Y's LRT threshold.

    The search runs over the cut point ``y*`` (LRT threshold
    ``exp((y* - 1/2) / sigma_y**2)``) since the objective is flat in the
    threshold's tails.
    """
    gx0, gx1 = model.gaussians(1)
    gy0, gy1 = model.gaussians(2)
    base = kl_divergence_gauss(gx0, gx1)
    lo, hi = _cut_box(gy0, gy1)

    def obj(v):
        return _safe_f(*_tails(gy0, gy1, v[0]))

    res = coordinate_search(obj, [lo], [hi], "max", cfg, starts=[[0.5 * (gy0.mean + gy1.mean)]])
    c = float(res.rules[0])
    a, b = _tails(gy0, gy1, c)
    return KlOptimum(base + res.objective_value, (a,), (b,), (_lam_from_cut(gy0, gy1, c),), res.converged)


def maximize_kl_xyx(model: WgnModel, cfg: OptConfig = OptConfig(), first_threshold: float = 1.0) -> KlOptimum:
    """Maximize ``K[x] + a1 f(alpha_1, beta_1) + (1 - a1) f(alpha_0, beta_0)``.

    X's first stage is the LRT at ``first_threshold`` (1 by default) so that
    ``a1 = P_0(u = 1)`` lies strictly inside (0, 1) and both of Y's per-``u``
    thresholds carry weight; they are searched jointly.
    """
    gx0, gx1 = model.gaussians(1)
    gy0, gy1 = model.gaussians(2)
    base = kl_divergence_gauss(gx0, gx1)
    cut_u = (gx0.variance * math.log(first_threshold) / (gx1.mean - gx0.mean) + 0.5 * (gx0.mean + gx1.mean))
    a1 = float(q_ext((cut_u - gx0.mean) / gx0.sd))
    lo, hi = _cut_box(gy0, gy1)

    def obj(v):
        return a1 * _safe_f(*_tails(gy0, gy1, v[1])) + (1.0 - a1) * _safe_f(*_tails(gy0, gy1, v[0]))

    mid = 0.5 * (gy0.mean + gy1.mean)
    starts = [[mid, mid], [mid - gy0.sd, mid + gy0.sd]]
    res = coordinate_search(obj, [lo, lo], [hi, hi], "max", cfg, starts=starts)
    pairs = [_tails(gy0, gy1, float(c)) for c in res.rules]
    lams = tuple(_lam_from_cut(gy0, gy1, float(c)) for c in res.rules)
    return KlOptimum(
        base + res.objective_value,
        tuple(p[0] for p in pairs),
        tuple(p[1] for p in pairs),
        lams,
        res.converged,
        a1,
    )


def maximize_kl_xy(model: WgnModel, cfg: OptConfig = OptConfig()) -> KlOptimum:
    """One-way fusion with the final decision at Y."""
    return maximize_kl_yx(swap_roles(model), cfg)


def maximize_kl_yxy(model: WgnModel, cfg: OptConfig = OptConfig()) -> KlOptimum:
    """Interactive fusion with the final decision at Y."""
    return maximize_kl_xyx(swap_roles(model), cfg)


# pattern search


@dataclass(frozen=True)
class PatternFamily:
    """Connected acyclic patterns on ``n`` nodes with at most ``max_edges``
    arrows and node 1 as a sink."""

    n: int
    max_edges: int

    def __post_init__(self):
        if self.n < 1 or self.max_edges < 0:
            raise DomainError("need n >= 1 and max_edges >= 0")
        arrows = (self.n - 1) ** 2
        size = sum(math.comb(arrows, r) for r in range(min(self.max_edges, arrows) + 1))
        if size > MAX_FAMILY:
            raise BudgetError(f"pattern family may hold {size} candidates (> {MAX_FAMILY})")

    def candidate_arrows(self):
        return [(i, j) for i in range(2, self.n + 1) for j in range(1, self.n + 1) if i != j]

    def members(self) -> list[Dag]:
        out = []
        arrows = self.candidate_arrows()
        for r in range(min(self.max_edges, len(arrows)) + 1):
            for combo in itertools.combinations(arrows, r):
                try:
                    out.append(dag_from_edges(self.n, combo))
                except GraphValidationError:
                    continue
        return out


def optimal_pattern(family: PatternFamily, model, cfg: OptConfig = OptConfig()):
    """Pattern whose global fusion center has the largest Chernoff information.

    Returns ``(dag, node, value)``; ties go to the earliest pattern in
    enumeration order.
    """
    members = family.members()
    if not members:
        raise DomainError(f"pattern family (n={family.n}, L={family.max_edges}) is empty")
    best = None
    for d in members:
        rules = rules_for_information(model, d, cfg)
        node, value = global_fusion_center(model, d, rules)
        if best is None or value > best[2] * (1.0 + 1e-12):
            best = (d, node, value)
    return best
