"""Neyman-Pearson design: fixed-multiplier Lagrangian solves and the outer
multiplier search that meets a false-alarm ceiling."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import DomainError, InfeasibleConstraintError
from ..gaussmath import lrt_cut_point
from ..netgraph import Dag, tandem
from ..objectives import final_decision_probs
from .config import OptConfig, OptResult
from .pbpo import pbpo_weighted
from .xyx import embed_tandem, pbpo_xyx

log = logging.getLogger(__name__)

XYX = "xyx"
MULT_MAX = 1e6
BRACKET_WIDTH = 1e-10
DEFAULT_PF_TOL = 1e-4
FALLBACK_GRID = 64


def np_weights(mult: float) -> np.ndarray:
    """Weights making the weighted cost ``mult * P_f - P_d``."""
    return np.array([[0.0, 0.0], [mult, -1.0]])


def _dag_np(model, d: Dag, mult: float, cfg: OptConfig) -> OptResult:
    base = mult if mult > 0 else 1.0
    res = pbpo_weighted(model, d, np_weights(mult), cfg, base=base)
    pf, pd = final_decision_probs(d, res.region_probs)
    res.objective_value = -res.objective_value
    res.details.update(pf=float(pf), pd=float(pd), multiplier=mult)
    return res


def pbpo_np_fixed_multiplier(model, topology, mult: float, cfg: OptConfig = OptConfig()) -> OptResult:
    """Maximize the Lagrangian ``P_d - mult * P_f`` at a fixed multiplier.

    Parameters
    ----------
    model : WgnModel
    topology : Dag or "xyx"
        Any acyclic network (the YX tandem is ``2 -> 1``), or ``"xyx"`` for
        the interactive process with sensor 1 as X and sensor 2 as Y.
    mult : float
        Nonnegative multiplier.

    Returns
    -------
    OptResult
        ``objective_value`` is ``P_d - mult * P_f``; ``details`` carries
        ``pf`` and ``pd``.
    """
    if not mult >= 0 or not math.isfinite(mult):
        raise DomainError(f"multiplier must be finite and nonnegative, got {mult}")
    if isinstance(topology, str):
        if topology.lower() != XYX:
            raise DomainError(f"unknown topology {topology!r}")
        yx = _dag_np(model, tandem(), mult, cfg)
        gx0, gx1 = model.gaussians(1)
        gy0, gy1 = model.gaussians(2)
        cut_y = lrt_cut_point(gy0, gy1, float(yx.rules[2][0]))
        cut_x = [lrt_cut_point(gx0, gx1, float(v)) for v in yx.rules[1]]
        res = pbpo_xyx(model, (mult, -1.0), embed_tandem(cut_y, cut_x), cfg)
        res.objective_value = -res.objective_value
        res.details.update(multiplier=mult, tandem=yx)
        return res
    return _dag_np(model, topology, mult, cfg)


def np_solve(model, topology, alpha: float, cfg: OptConfig = OptConfig(), pf_tol: float = DEFAULT_PF_TOL) -> OptResult:
    """Best detection probability subject to ``P_f <= alpha``.

    Bisection on the multiplier over ``[0, 1e6]`` stops once ``|P_f - alpha|
    <= pf_tol`` or the bracket is narrower than 1e-10; the returned rules have
    ``P_f <= alpha + pf_tol``. If ``P_f`` is seen to increase with the
    multiplier, a 64-point multiplier grid over the bracket is searched instead.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    cache = {}

    def solve(m):
        if m not in cache:
            cache[m] = pbpo_np_fixed_multiplier(model, topology, m, cfg)
        return cache[m]

    def pf(r):
        return r.details["pf"]

    lo, r_lo = 0.0, solve(0.0)
    if pf(r_lo) <= alpha + pf_tol:
        return _finish(r_lo, alpha, "multiplier 0 already feasible")
    hi = 1.0
    r_hi = solve(hi)
    while pf(r_hi) > alpha:
        if hi >= MULT_MAX:
            raise InfeasibleConstraintError(
                f"false-alarm ceiling {alpha} unreachable: P_f = {pf(r_hi):.6g} at multiplier {MULT_MAX:g}"
            )
        lo, r_lo = hi, r_hi
        hi = min(4.0 * hi, MULT_MAX)
        r_hi = solve(hi)
    steps = 0
    while hi - lo > BRACKET_WIDTH:
        steps += 1
        mid = 0.5 * (lo + hi)
        r = solve(mid)
        if pf(r) > pf(r_lo) + 1e-12 or pf(r) < pf(r_hi) - 1e-12:
            log.info("P_f not monotone in the multiplier near %.6g; grid fallback", mid)
            return _grid_fallback(solve, lo, hi, alpha, pf_tol)
        if abs(pf(r) - alpha) <= pf_tol:
            return _finish(r, alpha, f"bisection, {steps} steps")
        if pf(r) > alpha:
            lo, r_lo = mid, r
        else:
            hi, r_hi = mid, r
    return _finish(r_hi, alpha, f"bracket closed after {steps} steps")


def _grid_fallback(solve, lo, hi, alpha, pf_tol):
    best = None
    for m in np.linspace(lo, hi, FALLBACK_GRID):
        r = solve(float(m))
        if r.details["pf"] <= alpha + pf_tol and (best is None or r.details["pd"] > best.details["pd"]):
            best = r
    if best is None:
        best = solve(hi)
    return _finish(best, alpha, "multiplier grid fallback")


def _finish(r: OptResult, alpha: float, how: str) -> OptResult:
    r.details.update(alpha=alpha, np_search=how)
    return r
