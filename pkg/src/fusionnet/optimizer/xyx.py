"""Person-by-person optimization of the interactive X -> Y -> X process.

X observes ``x`` and sends ``u`` to Y; Y observes ``y`` and replies ``v``
depending on ``u``; X makes the final decision ``w`` from ``x`` and ``v``.
Because X acts twice, this is not an acyclic network and the final region
``R_{w=1|v}`` is in general a union of intervals in ``x``. All X-side regions
are therefore held as :class:`IntervalSet`; Y's regions are half-lines.

The objective is a weighted detection cost ``sum_h b_h P_h(w = 1)`` plus a
constant. For the Neyman-Pearson Lagrangian at multiplier ``m``,
``b = (m, -1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from ..gaussmath import Gaussian1D, lrt_cut_point
from .config import OptConfig, OptResult, rel_change
from .intervals import IntervalSet
from .pbpo import DEGENERATE_EPS

X_SENSOR = 1
Y_SENSOR = 2


@dataclass(frozen=True)
class XyxRules:
    """``first``: X says ``u = 1`` on this set. ``reply[u]``: Y says ``v = 1``
    on this set of ``y``. ``final[v]``: X says ``w = 1`` on this set of ``x``."""

    first: IntervalSet
    reply: tuple
    final: tuple

    def endpoints(self) -> np.ndarray:
        parts = [self.first.endpoints()] + [s.endpoints() for s in self.reply] + [s.endpoints() for s in self.final]
        return np.concatenate(parts)

    def signature(self) -> tuple:
        return (len(self.first.pieces),) + tuple(len(s.pieces) for s in self.reply + self.final)


def lr_region(d0: float, d1: float, g0: Gaussian1D, g1: Gaussian1D) -> IntervalSet:
    """``{z : d0 p0(z) + d1 p1(z) < 0}`` for equal-variance Gaussians."""
    if abs(d1) <= DEGENERATE_EPS:
        return IntervalSet.full() if d0 < 0 else IntervalSet.empty()
    lam = -d0 / d1
    if d1 < 0:
        return IntervalSet.full() if lam <= 0 else IntervalSet.above(lrt_cut_point(g0, g1, lam))
    return IntervalSet.empty() if lam <= 0 else IntervalSet.below(lrt_cut_point(g0, g1, lam))


class XyxEvaluator:
    """Region probabilities and the weighted cost for a two-sensor WGN model."""

    def __init__(self, model, b, const: float = 0.0):
        if model.n_sensors != 2:
            raise ShapeMismatchError("the interactive process needs exactly two sensors")
        self.gx = model.gaussians(X_SENSOR)
        self.gy = model.gaussians(Y_SENSOR)
        self.b = (float(b[0]), float(b[1]))
        self.const = const

    def reply_probs(self, rules: XyxRules) -> np.ndarray:
        """``out[h, u] = P_h(v = 1 | u)``."""
        return np.array([[rules.reply[u].prob(self.gy[h]) for u in range(2)] for h in range(2)])

    def final_probs(self, rules: XyxRules) -> np.ndarray:
        """``[P_0(w=1), P_1(w=1)]``."""
        beta = self.reply_probs(rules)
        parts = (rules.first.complement(), rules.first)
        out = np.zeros(2)
        for h in range(2):
            for u in range(2):
                for v in range(2):
                    pv = beta[h, u] if v else 1.0 - beta[h, u]
                    out[h] += pv * (rules.final[v] & parts[u]).prob(self.gx[h])
        return out

    def cost(self, rules: XyxRules) -> float:
        f = self.final_probs(rules)
        return self.const + self.b[0] * f[0] + self.b[1] * f[1]

    # one-node updates; each returns the new region and the threshold its optimality condition gives

    def update_final(self, rules: XyxRules):
        beta = self.reply_probs(rules)
        parts = (rules.first.complement(), rules.first)
        final = []
        lam3 = np.full((2, 2), math.nan)
        for v in range(2):
            region = IntervalSet.empty()
            for u in range(2):
                pv = beta[:, u] if v else 1.0 - beta[:, u]
                d0, d1 = self.b[0] * pv[0], self.b[1] * pv[1]
                if abs(d1) > DEGENERATE_EPS:
                    lam3[v, u] = -d0 / d1
                region = region | (parts[u] & lr_region(d0, d1, *self.gx))
            final.append(region)
        return XyxRules(rules.first, rules.reply, tuple(final)), lam3

    def update_reply(self, rules: XyxRules):
        parts = (rules.first.complement(), rules.first)
        reply = []
        lam2 = np.full(2, math.nan)
        for u in range(2):
            g = [self.b[h] * ((rules.final[1] & parts[u]).prob(self.gx[h])
                              - (rules.final[0] & parts[u]).prob(self.gx[h])) for h in range(2)]
            if abs(g[1]) > DEGENERATE_EPS:
                lam2[u] = -g[0] / g[1]
            reply.append(lr_region(g[0], g[1], *self.gy))
        return XyxRules(rules.first, tuple(reply), rules.final), lam2

    def update_first(self, rules: XyxRules):
        beta = self.reply_probs(rules)
        d = [self.b[h] * (beta[h, 1] - beta[h, 0]) for h in range(2)]
        lam1 = -d[0] / d[1] if abs(d[1]) > DEGENERATE_EPS else math.nan
        s = lr_region(d[0], d[1], *self.gx)
        q_pos = rules.final[1] - rules.final[0]
        q_neg = rules.final[0] - rules.final[1]
        first = (q_pos & s) | (q_neg - s)
        return XyxRules(first, rules.reply, rules.final), lam1

    def sweep(self, rules: XyxRules):
        rules, lam3 = self.update_final(rules)
        rules, lam2 = self.update_reply(rules)
        rules, lam1 = self.update_first(rules)
        return rules, {"lam1": lam1, "lam2": lam2, "lam3": lam3}

    def residual(self, rules: XyxRules) -> float:
        """Largest relative endpoint move when every stage is re-derived in place."""
        worst = 0.0
        for step in (self.update_final, self.update_reply, self.update_first):
            fresh, _ = step(rules)
            if fresh.signature() != rules.signature():
                return math.inf
            worst = max(worst, rel_change(fresh.endpoints(), rules.endpoints()))
        return worst


def _run(ev: XyxEvaluator, start: XyxRules, cfg: OptConfig):
    rules = start
    best = (ev.cost(rules), rules)
    it = 0
    info = {}
    converged = False
    for it in range(1, cfg.max_iter + 1):
        new, info = ev.sweep(rules)
        same_shape = new.signature() == rules.signature()
        change = rel_change(new.endpoints(), rules.endpoints()) if same_shape else math.inf
        rules = new
        c = ev.cost(rules)
        if c < best[0]:
            best = (c, rules)
        if change <= cfg.tol and ev.residual(rules) <= cfg.tol:
            converged = True
            break
    if converged:
        return ev.cost(rules), rules, True, it, ev.residual(rules), info
    return best[0], best[1], False, it, ev.residual(best[1]), info


def embed_tandem(cut_y: float, cut_x) -> XyxRules:
    """A one-way tandem rule written as an interactive rule that ignores ``u``."""
    reply = IntervalSet.above(cut_y)
    return XyxRules(IntervalSet.empty(), (reply, reply), tuple(IntervalSet.above(c) for c in cut_x))


def xyx_starts(tandem: XyxRules, cfg: OptConfig):
    """Initial rules: the tandem embedding, band-shaped first stages around its
    final cut points with asymmetric replies, and seeded random bands."""
    starts = [tandem]
    f0 = tandem.final[0].pieces[0][0] if tandem.final[0].pieces else 1.0
    f1 = tandem.final[1].pieces[0][0] if tandem.final[1].pieces else 0.0
    lo, hi = sorted((f0, f1))
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi - lo < 1e-6:
        lo, hi = -0.5, 1.5
    y_cut = tandem.reply[0].pieces[0][0] if tandem.reply[0].pieces else 0.5
    if not math.isfinite(y_cut):
        y_cut = 0.5
    band = IntervalSet([(lo, hi)])
    for first in (band, band.complement(), IntervalSet.above(0.5 * (lo + hi))):
        for shift in (-1.0, 1.0):
            reply = (IntervalSet.above(y_cut - shift), IntervalSet.above(y_cut + shift))
            starts.append(XyxRules(first, reply, tandem.final))
    for r in range(1, cfg.restarts):
        rng = cfg.rng(1000 + r)
        a, b = np.sort(rng.uniform(lo - 1.0, hi + 1.0, 2))
        s = rng.uniform(-1.5, 1.5, 2)
        reply = (IntervalSet.above(y_cut + s[0]), IntervalSet.above(y_cut + s[1]))
        starts.append(XyxRules(IntervalSet([(a, b)]), reply, tandem.final))
    return starts


def pbpo_xyx(model, b, tandem: XyxRules, cfg: OptConfig = OptConfig(), const: float = 0.0) -> OptResult:
    """Best person-by-person fixed point of the interactive process over the
    starts of :func:`xyx_starts`. The tandem embedding itself is always a
    candidate, so the result is never worse than the one-way tandem."""
    ev = XyxEvaluator(model, b, const)
    best = None
    runs = []
    for idx, start in enumerate(xyx_starts(tandem, cfg)):
        cost, rules, conv, it, res, info = _run(ev, start, cfg)
        runs.append(cost)
        if best is None or cost < best[0]:
            best = (cost, rules, conv, it, res, info, idx)
    cost, rules, conv, it, res, info, idx = best
    final = ev.final_probs(rules)
    return OptResult(
        rules=rules,
        objective_value=cost,
        region_probs=None,
        converged=conv,
        iterations=it,
        fixed_point_residual=res,
        restart_index=idx,
        details={"pf": float(final[0]), "pd": float(final[1]), "thresholds": info, "restart_objectives": runs},
    )
