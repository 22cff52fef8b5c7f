"""Exhaustive search over deterministic rules of a quantized problem.

Each sensor's observation is reduced to one of ``m`` cells (``m - 1`` cut
points spread uniformly over ``[mu0 - 2 sd, mu1 + 2 sd]``). A deterministic
rule is a 0/1 labeling of the cells per parent message, so the quantized
Bayes problem is finite and can be solved exactly by enumeration. Among
equal-cost labelings the one with the fewest 1s wins (ties go to decision 0),
then the lowest labeling code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ..errors import BudgetError, ShapeMismatchError
from ..netgraph import Dag
from ..objectives import CostMatrix, check_prior

MAX_LABELINGS = 1 << 21
MAX_CELLS = 12


@dataclass(frozen=True)
class OracleResult:
    """``labelings[k-1][c]`` is node ``k``'s 0/1 cell labeling for message ``c``."""

    labelings: tuple
    value: float
    cell_probs: tuple
    threshold_value: float

    def is_monotone(self) -> bool:
        """Every labeling is a step function of the cell index (up or down).

        Cell likelihood ratios increase with the index, so this is
        monotonicity in the likelihood ratio.
        """
        for node in self.labelings:
            for lab in node:
                d = np.diff(np.asarray(lab))
                if not (np.all(d >= 0) or np.all(d <= 0)):
                    return False
        return True


def quantize(model, k: int, m: int) -> np.ndarray:
    """``out[h, j] = P_h(cell j)`` for sensor ``k``."""
    g0, g1 = model.gaussians(k)
    sd = max(g0.sd, g1.sd)
    cuts = np.linspace(g0.mean - 2 * sd, g1.mean + 2 * sd, m - 1)
    edges = np.concatenate([[-np.inf], cuts, [np.inf]])
    out = np.vstack([np.diff(ndtr((edges - g.mean) / g.sd)) for g in (g0, g1)])
    return out


def _all_labelings(m: int) -> np.ndarray:
    codes = np.arange(1 << m)
    return ((codes[:, None] >> np.arange(m)) & 1).astype(float)


def _threshold_labelings(m: int) -> np.ndarray:
    """Upper sets of the cell order: ``0...0 1...1`` including all-0/all-1."""
    return np.array([[1.0 if j >= s else 0.0 for j in range(m)] for s in range(m, -1, -1)])


def _pick(values, ones):
    """Index of the minimum value; ties broken by fewer ones, then lower index."""
    best = np.min(values)
    cand = np.flatnonzero(values == best)
    return int(cand[np.lexsort((cand, ones[cand]))[0]])


def _mass(labs, cells):
    """``out[l, h] = P_h(labeled cells)``; a plain row sum so that the same
    labeling gives the same bits whatever batch it is evaluated in."""
    return (labs[:, :, None] * cells.T[None, :, :]).sum(axis=1)


def _single(cells, w, labs):
    p = _mass(labs, cells)
    vals = sum(w[0, h] + (w[1, h] - w[0, h]) * p[:, h] for h in range(2))
    return vals


def _tandem(cells1, cells2, w, labs1, labs2):
    """Risk for every (node-2 labeling, node-1 labeling for v=0, for v=1)."""
    a = _mass(labs1, cells1)
    q = _mass(labs2, cells2)  # P_h(u_2 = 1)
    vals = np.zeros((labs2.shape[0], labs1.shape[0], labs1.shape[0]))
    for h in range(2):
        p1 = (1.0 - q[:, h])[:, None, None] * a[None, :, None, h] + q[:, h][:, None, None] * a[None, None, :, h]
        vals += w[0, h] + (w[1, h] - w[0, h]) * p1
    return vals


def brute_force_oracle(model, d: Dag, m: int, cost: CostMatrix | None = None, prior: float = 0.5) -> OracleResult:
    """Exact quantized Bayes optimum over all deterministic cell labelings.

    Supports one sensor or a two-node tandem ``2 -> 1``. Also reports the
    optimum restricted to threshold (monotone) labelings, computed with the
    same arithmetic so that equal labelings give bit-identical values.
    """
    cost = cost or CostMatrix.zero_one()
    check_prior(prior)
    if model.n_sensors != d.n:
        raise ShapeMismatchError("model and network sizes differ")
    if not 2 <= m <= MAX_CELLS:
        raise BudgetError(f"cell count {m} outside 2..{MAX_CELLS}")
    w = cost.weights(prior)
    if d.n == 1:
        cells = quantize(model, 1, m)
        labs = _all_labelings(m)
        vals = _single(cells, w, labs)
        i = _pick(vals, labs.sum(axis=1))
        thr = _threshold_labelings(m)
        tval = np.min(_single(cells, w, thr))
        return OracleResult(((labs[i].astype(int).tolist(),),), float(vals[i]), (cells,), float(tval))
    if d.n == 2 and d.edges == ((2, 1),):
        total = (1 << m) ** 3
        if total > MAX_LABELINGS:
            raise BudgetError(f"{total} labelings exceed the enumeration budget {MAX_LABELINGS} (m={m})")
        c1, c2 = quantize(model, 1, m), quantize(model, 2, m)
        labs = _all_labelings(m)
        vals = _tandem(c1, c2, w, labs, labs)
        ones = labs.sum(axis=1)
        flat = vals.reshape(-1)
        n = labs.shape[0]
        idx = np.arange(flat.size)
        count = ones[idx // (n * n)] + ones[(idx // n) % n] + ones[idx % n]
        i = _pick(flat, count)
        j2, j0, j1 = i // (n * n), (i // n) % n, i % n
        thr = _threshold_labelings(m)
        # the peripheral message may encode either side of its threshold
        thr2 = np.vstack([thr, thr[:, ::-1]])
        tval = np.min(_tandem(c1, c2, w, thr, thr2))
        labelings = (
            (labs[j0].astype(int).tolist(), labs[j1].astype(int).tolist()),
            (labs[j2].astype(int).tolist(),),
        )
        return OracleResult(labelings, float(flat[i]), (c1, c2), float(tval))
    raise ShapeMismatchError("the oracle handles a single sensor or the tandem 2 -> 1 only")
