"""Person-by-person optimization of LRT thresholds on an acyclic network.

Each node's rule is re-derived with every other rule frozen: node ``k``
decides 1 on ``{x : G_0 p_0(x) + G_1 p_1(x) < 0}`` where ``G_h`` is the
sensitivity of the weighted cost to ``P_h(u_k = 1 | message)``. For an
informative node ``G_1 < 0`` and this is the LRT with threshold
``-G_0 / G_1``. Nodes are swept in topological order (Gauss-Seidel) until
the thresholds stop moving.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .. import kernels
from ..errors import ShapeMismatchError, UnsupportedShapeError
from ..netgraph import Dag, topological_order
from ..objectives import (
    ChannelSet, CostMatrix, RegionProbs, ThresholdRuleSet, check_prior, packed_layout,
)
from .config import OptConfig, OptResult, rel_change

DEGENERATE_EPS = 1e-14


def threshold_from_gradient(g0, g1, current=None):
    """Vectorized LRT threshold for the region ``{G_0 p_0 + G_1 p_1 < 0}``.

    Returns ``(lam, degenerate)`` where ``degenerate`` marks entries whose
    denominator vanished or whose optimal region is not an upper LR set; those
    fall back to ``inf`` (never decide 1) or ``0`` (always decide 1). A node
    whose gradient vanishes entirely is indifferent to its rule; it keeps
    ``current`` when given, so that a start where the fusion center ignores
    its inputs does not silence every peripheral sensor for good.
    """
    g0 = np.asarray(g0, dtype=float)
    g1 = np.asarray(g1, dtype=float)
    lam = np.empty_like(g0)
    regular = g1 < -DEGENERATE_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        lam[regular] = np.maximum(-g0[regular] / g1[regular], 0.0)
    flat = np.abs(g1) <= DEGENERATE_EPS
    lam[flat] = np.where(g0[flat] < 0, 0.0, math.inf)
    if current is not None:
        idle = flat & (np.abs(g0) <= DEGENERATE_EPS)
        lam[idle] = np.asarray(current, dtype=float)[idle]
    # G_1 > 0: the better of "always 1" (cost G_0 + G_1) and "never 1" (cost 0)
    anti = g1 > DEGENERATE_EPS
    lam[anti] = np.where(g0[anti] + g1[anti] < 0, 0.0, math.inf)
    return lam, flat | (anti & (g0 < 0))


class _Engine:
    """Mutable PBPO state for one run; owns its arrays."""

    def __init__(self, model, d: Dag, weights, channels: ChannelSet | None):
        if model.n_sensors != d.n:
            raise ShapeMismatchError(f"model has {model.n_sensors} sensors, network has {d.n} nodes")
        self.d = d
        self.pk = packed_layout(d)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        self.order = topological_order(d)
        self.channels = channels
        if channels is not None:
            channels.check_dag(d)
        g = [model.gaussians(k) for k in d.nodes]
        for g0, g1 in g:
            if g0.variance != g1.variance or g1.mean <= g0.mean:
                raise UnsupportedShapeError("PBPO needs equal-variance Gaussians with mu1 > mu0")
        self.mean = np.array([[a.mean for a, _ in g], [b.mean for _, b in g]])
        self.sd = np.array([a.sd for a, _ in g])
        self.var = self.sd**2
        self.gap = self.mean[1] - self.mean[0]
        self.mid = 0.5 * (self.mean[0] + self.mean[1])
        off = self.pk.off
        self.slices = [slice(int(off[i]), int(off[i + 1])) for i in range(d.n)]
        self.lam = np.zeros(int(off[-1]))
        self.p1 = np.zeros((2, int(off[-1])))
        self.p_eff = np.zeros_like(self.p1)

    def set_thresholds(self, flat):
        self.lam[:] = flat
        for i in range(self.d.n):
            self._refresh(i)

    def _refresh(self, i):
        sl = self.slices[i]
        with np.errstate(divide="ignore"):
            cut = self.var[i] * np.log(self.lam[sl]) / self.gap[i] + self.mid[i]
        for h in range(2):
            self.p1[h, sl] = ndtr(-(cut - self.mean[h, i]) / self.sd[i])
        if self.channels is None:
            self.p_eff[:, sl] = self.p1[:, sl]
        else:
            self.p_eff[:, sl] = self.p1[:, sl] @ self.channels[i + 1].T

    def gradient(self, i):
        pk = self.pk
        g = kernels.node_gradient(i, pk.n, pk.par_ptr, pk.par_idx, pk.off, self.p_eff, self.weights)
        if self.channels is not None:
            g = g @ self.channels[i + 1]
        return g

    def risk(self) -> float:
        pk = self.pk
        joint = kernels.joint_probs(pk.n, pk.par_ptr, pk.par_idx, pk.off, self.p_eff)
        final = joint[:, 1::2].sum(axis=1)
        w = self.weights
        return float(sum(w[0, h] + (w[1, h] - w[0, h]) * final[h] for h in range(2)))

    def sweep(self) -> tuple[float, int]:
        old = self.lam.copy()
        degenerate = 0
        for k in self.order:
            i = k - 1
            g = self.gradient(i)
            lam, deg = threshold_from_gradient(g[0], g[1], self.lam[self.slices[i]])
            degenerate += int(deg.sum())
            self.lam[self.slices[i]] = lam
            self._refresh(i)
        return rel_change(old, self.lam), degenerate

    def residual(self) -> float:
        """Jacobi re-evaluation of every threshold formula at the current state."""
        fresh = np.empty_like(self.lam)
        for i in range(self.d.n):
            g = self.gradient(i)
            fresh[self.slices[i]] = threshold_from_gradient(g[0], g[1], self.lam[self.slices[i]])[0]
        return rel_change(fresh, self.lam)

    def rules(self) -> ThresholdRuleSet:
        return ThresholdRuleSet([self.lam[s].copy() for s in self.slices])

    def region_probs(self) -> RegionProbs:
        return RegionProbs([self.p1[:, s].copy() for s in self.slices])


def _run(engine: _Engine, start, cfg: OptConfig):
    engine.set_thresholds(start)
    best = (engine.risk(), engine.lam.copy())
    degenerate = 0
    converged = False
    residual = math.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        change, deg = engine.sweep()
        degenerate += deg
        r = engine.risk()
        if r < best[0]:
            best = (r, engine.lam.copy())
        if change <= cfg.tol:
            residual = engine.residual()
            if residual <= cfg.tol:
                converged = True
                break
    if converged:
        return engine.risk(), engine.lam.copy(), True, it, residual, degenerate
    engine.set_thresholds(best[1])
    return best[0], best[1], False, it, engine.residual(), degenerate


def pbpo_weighted(model, d: Dag, weights, cfg: OptConfig = OptConfig(), channels: ChannelSet | None = None,
                  base: float = 1.0, starts=()) -> OptResult:
    """Minimize ``sum_h sum_u weights[u, h] P_h(u_1 = u)`` by PBPO with restarts.

    Restart 0 starts every threshold at ``base``; later restarts perturb
    ``log(base)`` by independent U[-1, 1] noise. ``starts`` are extra flat
    threshold vectors tried before the random restarts.
    """
    engine = _Engine(model, d, weights, channels)
    size = engine.lam.size
    inits = [np.full(size, base)]
    inits += [np.asarray(s, dtype=float).reshape(size) for s in starts]
    for r in range(1, cfg.restarts):
        noise = cfg.rng(r).uniform(-1.0, 1.0, size)
        inits.append(base * np.exp(noise))
    best = None
    total_deg = 0
    runs = []
    for idx, start in enumerate(inits):
        risk, lam, conv, it, res, deg = _run(engine, start, cfg)
        total_deg += deg
        runs.append(risk)
        if best is None or risk < best[0]:
            best = (risk, lam, conv, it, res, idx)
    risk, lam, conv, it, res, idx = best
    engine.set_thresholds(lam)
    return OptResult(
        rules=engine.rules(),
        objective_value=risk,
        region_probs=engine.region_probs(),
        converged=conv,
        iterations=it,
        fixed_point_residual=res,
        degenerate_updates=total_deg,
        restart_index=idx,
        details={"restart_objectives": runs},
    )


def pbpo_bayes(model, d: Dag, cost: CostMatrix, prior: float, cfg: OptConfig = OptConfig(),
               channels: ChannelSet | None = None) -> OptResult:
    """Bayes-optimal thresholds (a person-by-person fixed point) for network ``d``.

    Parameters
    ----------
    model : WgnModel
        Conditionally independent equal-variance Gaussian sensors.
    d : Dag
        Network; node 1 is the fusion center.
    cost, prior
        Cost matrix and ``P(H1)``.
    cfg : OptConfig
    channels : ChannelSet, optional
        Noisy links; thresholds then index the *received* message.

    Returns
    -------
    OptResult
        ``objective_value`` is the Bayes risk.
    """
    check_prior(prior)
    return pbpo_weighted(model, d, cost.weights(prior), cfg, channels, base=cost.base_threshold(prior))
