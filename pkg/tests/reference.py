"""Slow, independent reference computations used as test oracles.

Nothing here calls the package kernels: decision vectors are enumerated
with itertools and Gaussian tails come from mpmath.
"""

import itertools

import mpmath as mp

mp.mp.dps = 30


def mp_q(x):
    return float(mp.ncdf(-mp.mpf(x)))


def mp_tail(cut, mean, sd):
    return float(mp.ncdf(-(mp.mpf(cut) - mean) / sd))


def parent_message(edges, k, bits):
    """Index of node ``k``'s parent message; lowest parent is bit 0."""
    pars = sorted(i for i, j in edges if j == k)
    return sum(bits[p - 1] << s for s, p in enumerate(pars))


def vector_prob(tables, edges, h, bits):
    """``P_h(u)`` with ``tables[k-1][h][c] = P_h(u_k = 1 | c)``."""
    p = 1.0
    for k in range(1, len(bits) + 1):
        q = tables[k - 1][h][parent_message(edges, k, bits)]
        p *= q if bits[k - 1] else 1.0 - q
    return p


def risk(tables, edges, n, cost, prior):
    """Bayes risk ``sum_h pi_h sum_i C[i,h] P_h(u_1 = i)``."""
    pri = (1.0 - prior, prior)
    total = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        for h in (0, 1):
            total += pri[h] * cost[bits[0]][h] * vector_prob(tables, edges, h, bits)
    return total


def risk_slopes(tables, edges, n, cost, prior, k, c):
    """Slopes ``(B_0, B_1)`` of the risk in node ``k``'s region probabilities.

    The risk is affine in ``P_h(u_k = 1 | c)`` with slopes ``B_h``; the
    optimal region is ``{p1/p0 > -B_0/B_1}`` when ``B_1 < 0``.
    """
    pri = (1.0 - prior, prior)
    slope = [0.0, 0.0]
    for bits in itertools.product((0, 1), repeat=n):
        if parent_message(edges, k, bits) != c:
            continue
        sign = 1.0 if bits[k - 1] else -1.0
        for h in (0, 1):
            rest = 1.0
            for i in range(1, n + 1):
                if i == k:
                    continue
                q = tables[i - 1][h][parent_message(edges, i, bits)]
                rest *= q if bits[i - 1] else 1.0 - q
            slope[h] += sign * pri[h] * cost[bits[0]][h] * rest
    return slope


def tables_of(rp, n):
    return [[list(rp[k][h]) for h in (0, 1)] for k in range(1, n + 1)]


def lrt_from_slopes(slope):
    """Threshold of the region minimizing ``B_0 P_0 + B_1 P_1``; ``None`` if flat."""
    b0, b1 = slope
    if b1 < 0:
        return max(-b0 / b1, 0.0)
    return None
