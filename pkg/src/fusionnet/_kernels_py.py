"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is not built or ``FUSIONNET_PURE_PYTHON`` is set.

Table layout shared with the extension: node ``i`` (0-based) has parents
``par_idx[par_ptr[i]:par_ptr[i+1]]`` in ascending order and its threshold
table occupies columns ``off[i] : off[i] + 2**in_degree`` of ``p1``, where
``p1[h, off[i] + c] = P_h(u_i = 1 | parent message c)``.
"""

import numpy as np
from scipy.special import ndtr

_layout_cache = {}


def _layout(n, par_ptr, par_idx):
    key = (n, bytes(np.asarray(par_ptr, dtype=np.int32)), bytes(np.asarray(par_idx, dtype=np.int32)))
    hit = _layout_cache.get(key)
    if hit is not None:
        return hit
    codes = np.arange(1 << n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int64)
    ctx = np.zeros((1 << n, n), dtype=np.int64)
    for i in range(n):
        for j, p in enumerate(par_idx[par_ptr[i]:par_ptr[i + 1]]):
            ctx[:, i] |= bits[:, p] << j
    if len(_layout_cache) > 64:
        _layout_cache.clear()
    _layout_cache[key] = (bits, ctx)
    return bits, ctx


def _factors(n, par_ptr, par_idx, off, p1):
    bits, ctx = _layout(n, par_ptr, par_idx)
    cols = ctx + np.asarray(off[:n], dtype=np.int64)
    q = p1[:, cols]  # (2, 2^n, n)
    return bits, ctx, np.where(bits[None, :, :] == 1, q, 1.0 - q)


def joint_probs(n, par_ptr, par_idx, off, p1):
    """P_h(decision vector) for every vector; shape ``(2, 2**n)``.

    Vector code ``c`` has ``u_i = (c >> i) & 1``.
    """
    _, _, f = _factors(n, par_ptr, par_idx, off, np.asarray(p1, dtype=float))
    return np.prod(f, axis=2)


def node_gradient(k, n, par_ptr, par_idx, off, p1, weights):
    """Sensitivity of the expected weighted cost to node ``k``'s rule.

    ``out[h, c] = sum over vectors with parent message c at node k of
    (2 u_k - 1) * weights[u_1, h] * prod_{i != k} P_h(u_i | message_i)``.
    """
    p1 = np.asarray(p1, dtype=float)
    bits, ctx, f = _factors(n, par_ptr, par_idx, off, p1)
    rest = np.prod(np.delete(f, k, axis=2), axis=2)
    w = np.asarray(weights, dtype=float)[bits[:, 0]].T  # (2, 2^n)
    sign = 2.0 * bits[:, k] - 1.0
    size = 1 << (par_ptr[k + 1] - par_ptr[k])
    out = np.empty((2, size))
    for h in range(2):
        out[h] = np.bincount(ctx[:, k], weights=sign * w[h] * rest[h], minlength=size)
    return out


def corr_final_prob_h1(mu, sd_x, slope, intercept, sd_cond, t_lo, t_hi,
                       T0_lo, T0_hi, T1_lo, T1_hi, brk, nodes, wts):
    """P_1(w = 1) for the correlated two-sensor model.

    ``x ~ N(mu, sd_x**2)``; given ``x`` the first-stage observation is
    ``N(intercept + slope * x, sd_cond**2)``. The first stage says 1 outside
    ``[t_lo, t_hi]``; the final stage says 1 outside ``[Tv_lo, Tv_hi]``.
    Composite Gauss-Legendre over the sorted breakpoints ``brk``.
    """
    brk = np.asarray(brk, dtype=float)
    a = brk[:-1, None]
    b = brk[1:, None]
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * np.asarray(nodes)[None, :]
    w = half * np.asarray(wts)[None, :]
    z = (x - mu) / sd_x
    dens = np.exp(-0.5 * z * z) / (sd_x * np.sqrt(2.0 * np.pi))
    m = intercept + slope * x
    p_inside = ndtr((t_hi - m) / sd_cond) - ndtr((t_lo - m) / sd_cond)
    w1_v1 = (x < T1_lo) | (x > T1_hi)
    w1_v0 = (x < T0_lo) | (x > T0_hi)
    integrand = dens * (w1_v1 * (1.0 - p_inside) + w1_v0 * p_inside)
    return float(np.sum(w * integrand))
