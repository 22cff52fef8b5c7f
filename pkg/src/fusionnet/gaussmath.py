"""Scalar Gaussian primitives.

Tail function, densities, likelihood-ratio cut points, adaptive quadrature,
and the KL / Chernoff divergences between two normal laws. Everything here is
a pure function of its arguments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _spi
from scipy import special as _sps

from .errors import ConvergenceError, DegenerateModelError, DomainError, UnsupportedShapeError

SQRT2 = math.sqrt(2.0)
LOG_2PI = math.log(2.0 * math.pi)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Gaussian1D:
    mean: float
    variance: float

    def __post_init__(self):
        if not (self.variance > 0.0 and math.isfinite(self.variance)):
            raise DomainError(f"variance must be positive and finite, got {self.variance}")
        if not math.isfinite(self.mean):
            raise DomainError(f"mean must be finite, got {self.mean}")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    max_subdivisions: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()


def q_function(x):
    """Upper tail probability of the standard normal, ``Q(x) = P(Z > x)``.

    Accepts a float or an array. Non-finite input raises :class:`DomainError`;
    use :func:`q_ext` when +-inf thresholds are meaningful.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"q_function needs a finite argument, got {x}")
        return 0.5 * math.erfc(x / SQRT2)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("q_function needs finite arguments")
    return 0.5 * _sps.erfc(arr / SQRT2)


def q_ext(x):
    """Tail function on the extended real line: ``Q(-inf)=1``, ``Q(inf)=0``."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / SQRT2)
    return 0.5 * _sps.erfc(np.asarray(x, dtype=float) / SQRT2)


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"q_inverse needs p in (0,1), got {p}")
    # -ndtri(p) keeps full relative accuracy for small p
    return float(-_sps.ndtri(p))


def normal_pdf(x, g: Gaussian1D):
    z = (np.asarray(x, dtype=float) - g.mean) / g.sd
    out = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * g.variance)
    return float(out) if np.ndim(out) == 0 else out


def normal_logpdf(x, g: Gaussian1D):
    z = (np.asarray(x, dtype=float) - g.mean) / g.sd
    out = -0.5 * z * z - 0.5 * (LOG_2PI + math.log(g.variance))
    return float(out) if np.ndim(out) == 0 else out


def interval_prob(lo: float, hi: float, g: Gaussian1D) -> float:
    """P(lo < X <= hi) for X ~ g, extended limits allowed."""
    if hi <= lo:
        return 0.0
    # difference of tails on the side that avoids cancellation
    a = (lo - g.mean) / g.sd
    b = (hi - g.mean) / g.sd
    if a > 0:
        return q_ext(a) - q_ext(b)
    return q_ext(-b) - q_ext(-a)


def lrt_cut_point(g0: Gaussian1D, g1: Gaussian1D, lam: float) -> float:
    """Cut point ``c`` with ``{x : p1(x)/p0(x) > lam} == {x > c}``.

    Only equal-variance pairs with ``g1.mean > g0.mean`` give a half-line.
    ``lam`` may be 0 (region is everything, ``c=-inf``) or ``inf`` (region
    empty, ``c=+inf``).
    """
    if g0.variance != g1.variance:
        raise UnsupportedShapeError(
            "likelihood-ratio region is a half-line only for equal variances"
        )
    delta = g1.mean - g0.mean
    if delta == 0.0:
        raise DegenerateModelError("hypothesis means coincide; no likelihood-ratio test exists")
    if delta < 0.0:
        raise UnsupportedShapeError("expected g1.mean > g0.mean")
    if lam < 0 or math.isnan(lam):
        raise DomainError(f"threshold must be nonnegative, got {lam}")
    if lam == 0.0:
        return -math.inf
    if math.isinf(lam):
        return math.inf
    return g0.variance * math.log(lam) / delta + 0.5 * (g0.mean + g1.mean)


def kl_divergence_gauss(g0: Gaussian1D, g1: Gaussian1D) -> float:
    """D(g0 || g1) in nats."""
    d = g0.mean - g1.mean
    r = g0.variance / g1.variance
    return 0.5 * (r - 1.0 - math.log(r) + d * d / g1.variance)


def log_affinity_gauss(g0: Gaussian1D, g1: Gaussian1D, a: float) -> float:
    """``log  integral p0^(1-a) p1^a dx`` in closed form."""
    if a == 0.0 or a == 1.0:
        return 0.0
    w0 = (1.0 - a) / g0.variance
    w1 = a / g1.variance
    prec = w0 + w1
    d = g0.mean - g1.mean
    return (
        -0.5 * (1.0 - a) * math.log(g0.variance)
        - 0.5 * a * math.log(g1.variance)
        - 0.5 * math.log(prec)
        - 0.5 * w0 * w1 * d * d / prec
    )


def golden_section_min(f, lo: float, hi: float, width: float = 1e-8, max_iter: int = 200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point seen, endpoints included.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise DomainError(f"need a finite bracket lo <= hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best = min((fc, c), (fd, d))
    for _ in range(max_iter):
        if b - a <= width:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
            if fc < best[0]:
                best = (fc, c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
            if fd < best[0]:
                best = (fd, d)
    for x in (lo, hi):
        fx = f(x)
        if fx < best[0]:
            best = (fx, x)
    return best[1], best[0]


def chernoff_from_log_affinity(log_aff, width: float = 1e-8):
    """Chernoff information ``-min_{a in [0,1]} log_aff(a)`` and the minimizer.

    ``log_aff`` is convex in ``a`` for any pair of laws, so a golden-section
    line search is enough.
    """
    a, val = golden_section_min(log_aff, 0.0, 1.0, width=width)
    return max(0.0, -val), a


def chernoff_info(g0: Gaussian1D, g1: Gaussian1D) -> float:
    c, _ = chernoff_from_log_affinity(lambda a: log_affinity_gauss(g0, g1, a))
    return c


def integrate(f, lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUAD, points=()):
    """Adaptive integral of ``f`` over ``[lo, hi]``; limits may be infinite.

    ``points`` lists interior jump locations; the range is split there and
    each piece integrated separately. Raises :class:`ConvergenceError` with
    the best estimate attached when the subdivision budget runs out.
    """
    if hi < lo:
        return -integrate(f, hi, lo, spec, points)
    cuts = sorted(p for p in points if lo < p < hi and math.isfinite(p))
    edges = [lo, *cuts, hi]
    total = 0.0
    failed = None
    tol = spec.abs_tol / max(1, len(edges) - 1)
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", _spi.IntegrationWarning)
            try:
                val, _ = _spi.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=spec.max_subdivisions)
            except _spi.IntegrationWarning as exc:
                warnings.simplefilter("ignore", _spi.IntegrationWarning)
                val, _ = _spi.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=spec.max_subdivisions)
                failed = str(exc)
        total += val
    if failed is not None:
        raise ConvergenceError(f"quadrature did not converge: {failed}", best=total)
    return total
