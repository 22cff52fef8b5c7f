"""Observation models.

``WgnModel``: constant signal (0 or 1) in independent white Gaussian noise,
one noise level per sensor.

``CorrelatedModel``: random signal ``s ~ N(mu, sigma_s2)`` under H1 seen by
two sensors with noise variances ``tau`` (sensor X) and ``lam`` (sensor Y);
under H0 both sensors see pure noise. Signal sharing makes the observations
dependent under H1, so decision regions are complements of intervals rather
than half-lines. The evaluator treats the *YX* direction: Y decides first
(``v`` from ``y``), X makes the final decision (``w`` from ``x`` and ``v``).
The XY direction is the same computation on :meth:`CorrelatedModel.swapped`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ShapeMismatchError
from .gaussmath import (
    DEFAULT_QUAD, Gaussian1D, QuadratureSpec, integrate, interval_prob, normal_logpdf, q_function, q_inverse,
)

H0_MEAN = 0.0
H1_MEAN = 1.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_SPAN_SD = 12.0
_MAX_SEGMENTS = 4000


@dataclass(frozen=True)
class WgnModel:
    """Sensor ``k`` observes ``s + b_k`` with ``b_k ~ N(0, sigmas[k-1]**2)``."""

    sigmas: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.sigmas)
        if not s:
            raise DomainError("at least one sensor required")
        if any(not (v > 0 and math.isfinite(v)) for v in s):
            raise DomainError(f"noise standard deviations must be positive and finite, got {s}")
        object.__setattr__(self, "sigmas", s)

    @property
    def n_sensors(self) -> int:
        return len(self.sigmas)

    def gaussians(self, k: int) -> tuple[Gaussian1D, Gaussian1D]:
        if not 1 <= k <= self.n_sensors:
            raise DomainError(f"sensor {k} out of range 1..{self.n_sensors}")
        var = self.sigmas[k - 1] ** 2
        return Gaussian1D(H0_MEAN, var), Gaussian1D(H1_MEAN, var)

    def bind(self, d) -> "WgnModel":
        if d.n != self.n_sensors:
            raise ShapeMismatchError(f"{self.n_sensors} noise levels for a {d.n}-node network")
        return self


def n_sensor_wgn(sigmas) -> WgnModel:
    return WgnModel(tuple(sigmas))


def two_sensor_wgn(sigma_x: float, sigma_y: float) -> WgnModel:
    """Sensor 1 is X (the tandem fusion center), sensor 2 is Y."""
    return WgnModel((sigma_x, sigma_y))


def _alpha_integrand_factory(sx, sy, shift):
    gx = Gaussian1D(shift, sx * sx)
    # z = x/sx^2 + y/sy^2; given x the y part is N(shift/sy^2, 1/sy^2)

    def tail(t):
        def f(x):
            c = t - x / (sx * sx)
            return math.exp(normal_logpdf(x, gx)) * float(q_function((c - shift / (sy * sy)) * sy))

        return f

    return gx, tail


def centralized_np(sx: float, sy: float, alpha: float, spec: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """Detection probability of the optimal centralized test at false-alarm ``alpha``.

    The test rejects H0 when ``x/sx**2 + y/sy**2 > t``. ``t`` is found by
    bisection on the false-alarm integral and ``P_d`` by quadrature over ``x``.

    Returns
    -------
    (P_d, t)
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    if not (sx > 0 and sy > 0):
        raise DomainError("noise standard deviations must be positive")
    g0, tail0 = _alpha_integrand_factory(sx, sy, H0_MEAN)
    g1, tail1 = _alpha_integrand_factory(sx, sy, H1_MEAN)
    spread = math.sqrt(1.0 / sx**2 + 1.0 / sy**2)

    def pf(t):
        return integrate(tail0(t), g0.mean - 14 * g0.sd, g0.mean + 14 * g0.sd, spec, points=(t * sx * sx,))

    lo = spread * q_inverse(alpha) - 1.0
    hi = lo + 2.0
    while pf(lo) < alpha:
        lo -= 1.0
    while pf(hi) > alpha:
        hi += 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if pf(mid) > alpha:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    pd = integrate(tail1(t), g1.mean - 14 * g1.sd, g1.mean + 14 * g1.sd, spec, points=(t * sx * sx,))
    return min(1.0, pd), t


def centralized_np_closed_form(sx: float, sy: float, alpha: float) -> float:
    spread = math.sqrt(1.0 / sx**2 + 1.0 / sy**2)
    return float(q_function(q_inverse(alpha) - spread))


@dataclass(frozen=True)
class CorrelatedModel:
    mu: float = 1.0
    sigma_s2: float = 0.0
    tau: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if not (self.tau > 0 and self.lam > 0):
            raise DomainError("noise variances tau and lam must be positive")
        if not self.sigma_s2 >= 0:
            raise DomainError("signal variance must be nonnegative")
        if not all(math.isfinite(v) for v in (self.mu, self.sigma_s2, self.tau, self.lam)):
            raise DomainError("model parameters must be finite")

    def swapped(self) -> "CorrelatedModel":
        """Exchange the sensors' roles (``tau <-> lam``)."""
        return CorrelatedModel(self.mu, self.sigma_s2, self.lam, self.tau)

    def h1_covariance(self) -> np.ndarray:
        s = self.sigma_s2
        return np.array([[s + self.tau, s], [s, s + self.lam]])

    def marginals(self):
        """``(x|H0, x|H1, y|H0, y|H1)``."""
        s = self.sigma_s2
        return (
            Gaussian1D(0.0, self.tau),
            Gaussian1D(self.mu, s + self.tau),
            Gaussian1D(0.0, self.lam),
            Gaussian1D(self.mu, s + self.lam),
        )


def cond_mean_var_x_given_y(m: CorrelatedModel, y: float) -> tuple[float, float]:
    """Law of ``x`` given ``y`` under H1."""
    if m.sigma_s2 == 0.0:
        return m.mu, m.tau
    r = m.lam / m.sigma_s2
    return (y + m.mu * r) / (1.0 + r), m.tau + m.lam / (1.0 + r)


def cond_mean_var_y_given_x(m: CorrelatedModel, x: float) -> tuple[float, float]:
    """Law of ``y`` given ``x`` under H1."""
    if m.sigma_s2 == 0.0:
        return m.mu, m.lam
    r = m.tau / m.sigma_s2
    return (x + m.mu * r) / (1.0 + r), m.lam + m.tau / (1.0 + r)


@dataclass(frozen=True)
class CorrelatedThresholds:
    """Interval endpoints: Y says 1 outside ``[t_minus, t_plus]``; given ``v``,
    X says 1 outside ``[Tv_minus, Tv_plus]``. Infinite endpoints are allowed."""

    t_minus: float
    t_plus: float
    T0_minus: float
    T0_plus: float
    T1_minus: float
    T1_plus: float

    def __post_init__(self):
        ends = ((self.t_minus, self.t_plus, "t"), (self.T0_minus, self.T0_plus, "T0"),
                (self.T1_minus, self.T1_plus, "T1"))
        for lo, hi, name in ends:
            if math.isnan(lo) or math.isnan(hi) or not lo < hi:
                raise DomainError(f"{name}: need {name}- < {name}+, got ({lo}, {hi})")

    def as_tuple(self) -> tuple:
        return (self.t_minus, self.t_plus, self.T0_minus, self.T0_plus, self.T1_minus, self.T1_plus)

    @classmethod
    def from_tuple(cls, v) -> "CorrelatedThresholds":
        return cls(*(float(a) for a in v))

    @classmethod
    def from_pairs(cls, v) -> "CorrelatedThresholds":
        """From three unordered endpoint pairs."""
        a = [float(x) for x in v]
        return cls(*sorted(a[0:2]), *sorted(a[2:4]), *sorted(a[4:6]))

    def final(self, v: int) -> tuple[float, float]:
        return (self.T1_minus, self.T1_plus) if v else (self.T0_minus, self.T0_plus)


def _breakpoints(m: CorrelatedModel, th: CorrelatedThresholds):
    sd_x = math.sqrt(m.sigma_s2 + m.tau)
    slope = m.sigma_s2 / (m.sigma_s2 + m.tau)
    _, var_c = cond_mean_var_y_given_x(m, 0.0)
    scale = sd_x
    if slope > 0:
        scale = min(scale, math.sqrt(var_c) / slope)
    lo = m.mu - _SPAN_SD * sd_x
    hi = m.mu + _SPAN_SD * sd_x
    nseg = int(min(_MAX_SEGMENTS, max(8, math.ceil((hi - lo) / (0.5 * scale)))))
    pts = [np.linspace(lo, hi, nseg + 1)]
    extra = [v for v in (th.T0_minus, th.T0_plus, th.T1_minus, th.T1_plus) if lo < v < hi]
    if slope > 0:
        icpt = m.mu * m.tau / (m.sigma_s2 + m.tau)
        extra += [(t - icpt) / slope for t in (th.t_minus, th.t_plus) if math.isfinite(t)]
        extra = [v for v in extra if lo < v < hi]
    if extra:
        pts.append(np.array(extra))
    return np.unique(np.concatenate(pts)), sd_x, slope, math.sqrt(var_c)


def _outside(lo, hi, g):
    return 1.0 - interval_prob(lo, hi, g)


def correlated_final_probs(m: CorrelatedModel, th: CorrelatedThresholds) -> tuple[float, float]:
    """``(P_0(w=1), P_1(w=1))`` for the YX direction."""
    gx0, _, gy0, _ = m.marginals()
    pv1 = _outside(th.t_minus, th.t_plus, gy0)
    p0 = pv1 * _outside(th.T1_minus, th.T1_plus, gx0) + (1.0 - pv1) * _outside(th.T0_minus, th.T0_plus, gx0)
    brk, sd_x, slope, sd_c = _breakpoints(m, th)
    icpt = m.mu * m.tau / (m.sigma_s2 + m.tau)
    p1 = kernels.corr_final_prob_h1(
        m.mu, sd_x, slope, icpt, sd_c, th.t_minus, th.t_plus,
        th.T0_minus, th.T0_plus, th.T1_minus, th.T1_plus, brk, _GL_NODES, _GL_WEIGHTS,
    )
    return float(min(max(p0, 0.0), 1.0)), float(min(max(p1, 0.0), 1.0))


def correlated_bayes_risk(m: CorrelatedModel, th: CorrelatedThresholds, prior: float, cost=None) -> float:
    from .objectives import CostMatrix

    cost = cost or CostMatrix.zero_one()
    w = cost.weights(prior)
    final = correlated_final_probs(m, th)
    return float(sum(w[0, h] + (w[1, h] - w[0, h]) * final[h] for h in range(2)))


def correlated_error_prob(m: CorrelatedModel, th: CorrelatedThresholds, prior: float) -> float:
    """Probability of error of the final decision (0-1 cost)."""
    return correlated_bayes_risk(m, th, prior)


def region_membership_functions(m: CorrelatedModel, th: CorrelatedThresholds):
    """Log-ratio functions whose superlevel sets are the decision regions.

    ``f(y)``: Y says 1 where ``f(y)`` exceeds a constant.
    ``g(v, x)``: X says 1 (given ``v``) where ``g(v, x)`` exceeds a constant.
    Both are convex, which forces interval-complement regions. ``f`` needs
    ``P_1(R_{w=1|1} | y) > P_1(R_{w=1|0} | y)``; the nested case
    ``[T1-, T1+]`` inside ``[T0-, T0+]`` is evaluated without cancellation.
    """
    gx0, gx1, gy0, gy1 = m.marginals()
    nested = th.T0_minus <= th.T1_minus and th.T1_plus <= th.T0_plus

    def base(val, g0, g1):
        return normal_logpdf(val, g1) - normal_logpdf(val, g0)

    def f(y):
        mean, var = cond_mean_var_x_given_y(m, y)
        g = Gaussian1D(mean, var)
        if nested:
            diff = interval_prob(th.T0_minus, th.T1_minus, g) + interval_prob(th.T1_plus, th.T0_plus, g)
        else:
            diff = interval_prob(th.T0_minus, th.T0_plus, g) - interval_prob(th.T1_minus, th.T1_plus, g)
        if diff <= 0:
            raise DomainError("f(y) needs the v=1 final region to dominate the v=0 one")
        return float(base(y, gy0, gy1)) + math.log(diff)

    def g(v, x):
        mean, var = cond_mean_var_y_given_x(m, x)
        gc = Gaussian1D(mean, var)
        inside = interval_prob(th.t_minus, th.t_plus, gc)
        pv = 1.0 - inside if v else inside
        return float(base(x, gx0, gx1)) + math.log(max(pv, 1e-300))

    return f, g


def tandem_wgn_equivalent(m: CorrelatedModel) -> WgnModel:
    """The conditionally independent tandem matching ``m`` at ``sigma_s2 = 0``.

    Only meaningful for ``mu = 1``: sensor 1 is X, sensor 2 is Y.
    """
    if m.sigma_s2 != 0.0 or m.mu != H1_MEAN:
        raise DomainError("WGN equivalent exists only for sigma_s2 = 0 and mu = 1")
    return WgnModel((math.sqrt(m.tau), math.sqrt(m.lam)))


__all__ = [
    "WgnModel", "n_sensor_wgn", "two_sensor_wgn", "centralized_np", "centralized_np_closed_form",
    "CorrelatedModel", "CorrelatedThresholds", "cond_mean_var_x_given_y", "cond_mean_var_y_given_x",
    "correlated_final_probs", "correlated_bayes_risk", "correlated_error_prob",
    "region_membership_functions", "tandem_wgn_equivalent"
]
