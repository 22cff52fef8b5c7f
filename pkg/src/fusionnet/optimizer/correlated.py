"""Error-probability minimization for the correlated two-sensor model.

The six interval endpoints are searched as three *unordered* pairs: each
coordinate moves one endpoint and the pair is sorted before evaluation, so
the ordering constraint never binds and half-line regions (one endpoint at
the edge of the box) stay reachable one coordinate at a time.
"""

from __future__ import annotations

import math

import numpy as np

from ..gaussmath import Gaussian1D
from ..models import CorrelatedModel, CorrelatedThresholds, WgnModel, correlated_bayes_risk
from ..netgraph import tandem
from ..objectives import CostMatrix
from .config import OptConfig, OptResult
from .pbpo import pbpo_bayes
from .search import coordinate_search

BOX_SD = 8.0


def _box(m: CorrelatedModel):
    gx0, gx1, gy0, gy1 = m.marginals()

    def span(g0, g1):
        return (min(g0.mean - BOX_SD * g0.sd, g1.mean - BOX_SD * g1.sd),
                max(g0.mean + BOX_SD * g0.sd, g1.mean + BOX_SD * g1.sd))

    ylo, yhi = span(gy0, gy1)
    xlo, xhi = span(gx0, gx1)
    return np.array([ylo, ylo, xlo, xlo, xlo, xlo]), np.array([yhi, yhi, xhi, xhi, xhi, xhi])


def thresholds_from_vector(x) -> CorrelatedThresholds:
    v = [float(a) for a in x]
    for i in (0, 2, 4):
        if v[i] == v[i + 1]:
            v[i + 1] = math.nextafter(v[i + 1], math.inf)
    return CorrelatedThresholds.from_pairs(v)


def lrt_outside_roots(g0: Gaussian1D, g1: Gaussian1D, lam: float):
    """Endpoints of ``{z : p1(z)/p0(z) <= lam}`` when ``g1`` is wider than ``g0``.

    Returns ``None`` when the likelihood ratio exceeds ``lam`` everywhere.
    """
    a = 0.5 * (1.0 / g0.variance - 1.0 / g1.variance)
    b = g1.mean / g1.variance - g0.mean / g0.variance
    c = (0.5 * (g0.mean**2 / g0.variance - g1.mean**2 / g1.variance)
         + 0.5 * math.log(g0.variance / g1.variance) - math.log(lam))
    if a <= 0:
        return None
    disc = b * b - 4 * a * c
    if disc <= 0:
        return None
    r = math.sqrt(disc)
    return (-b - r) / (2 * a), (-b + r) / (2 * a)


def correlated_starts(m: CorrelatedModel, prior: float, cost: CostMatrix, cfg: OptConfig):
    lower, upper = _box(m)
    starts = []
    lam0 = cost.base_threshold(prior)
    # independent-observation tandem solution with the same noise variances
    if m.mu > 0:
        wgn = WgnModel((math.sqrt(m.tau) / m.mu, math.sqrt(m.lam) / m.mu))
        res = pbpo_bayes(wgn, tandem(), cost, prior, OptConfig(tol=1e-10, restarts=2, rng_seed=cfg.rng_seed))
        cuts = []
        for k, idx in ((2, 0), (1, 0), (1, 1)):
            g0, g1 = wgn.gaussians(k)
            lam = float(res.rules[k][idx])
            cut = (g0.variance * math.log(lam) / (g1.mean - g0.mean) + 0.5) * m.mu if 0 < lam < math.inf else None
            cuts.append(cut)
        v = [lower[0], cuts[0], lower[2], cuts[1], lower[4], cuts[2]]
        starts.append(np.array([lower[i] if c is None else c for i, c in enumerate(v)]))
    # single-sensor quadratic LRT regions
    gx0, gx1, gy0, gy1 = m.marginals()
    if m.sigma_s2 > 0:
        pair_y = lrt_outside_roots(gy0, gy1, lam0)
        pair_x0 = lrt_outside_roots(gx0, gx1, lam0 * math.e)
        pair_x1 = lrt_outside_roots(gx0, gx1, lam0 / math.e)
        if pair_y and pair_x0 and pair_x1:
            starts.append(np.array([*pair_y, *pair_x0, *pair_x1]))
    for r in range(1, cfg.restarts - len(starts) + 1):
        starts.append(cfg.rng(r).uniform(lower, upper))
    return [np.clip(s, lower, upper) for s in starts]


def optimize_correlated(m: CorrelatedModel, prior: float, cfg: OptConfig = OptConfig(),
                        cost: CostMatrix | None = None) -> OptResult:
    """Minimize the Bayes risk (error probability by default) of the YX
    direction over the six interval endpoints. Use ``m.swapped()`` for XY."""
    cost = cost or CostMatrix.zero_one()
    lower, upper = _box(m)

    def risk(x):
        return correlated_bayes_risk(m, thresholds_from_vector(x), prior, cost)

    res = coordinate_search(risk, lower, upper, "min", cfg, starts=correlated_starts(m, prior, cost, cfg))
    res.rules = thresholds_from_vector(res.rules)
    return res
