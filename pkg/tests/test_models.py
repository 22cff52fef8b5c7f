import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as spi
from scipy import stats

from fusionnet.errors import DomainError, ShapeMismatchError
from fusionnet.models import (
    CorrelatedModel, CorrelatedThresholds, WgnModel, centralized_np, centralized_np_closed_form,
    cond_mean_var_x_given_y, cond_mean_var_y_given_x, correlated_bayes_risk, correlated_error_prob,
    correlated_final_probs, region_membership_functions, tandem_wgn_equivalent, two_sensor_wgn,
)
from fusionnet.netgraph import tandem

variances = st.floats(0.1, 10.0)


def dblquad_p1(m, th):
    """P_1(final says 1) by 2-D quadrature over the H1 bivariate density."""
    rv = stats.multivariate_normal([m.mu, m.mu], m.h1_covariance())

    def out(z, lo, hi):
        return 0.0 if lo <= z <= hi else 1.0

    def dens(x, y):
        v = out(y, th.t_minus, th.t_plus)
        lo, hi = th.final(int(v))
        return rv.pdf([x, y]) * out(x, lo, hi)

    sx = math.sqrt(m.sigma_s2 + m.tau)
    sy = math.sqrt(m.sigma_s2 + m.lam)
    total = 0.0
    ys = sorted({m.mu - 10 * sy, m.mu + 10 * sy, *[t for t in (th.t_minus, th.t_plus) if abs(t) < 50]})
    xs = sorted({m.mu - 10 * sx, m.mu + 10 * sx, *[t for t in th.as_tuple()[2:] if abs(t) < 50]})
    for y0, y1 in zip(ys[:-1], ys[1:]):
        for x0, x1 in zip(xs[:-1], xs[1:]):
            val, _ = spi.dblquad(dens, y0, y1, x0, x1, epsabs=1e-11, epsrel=1e-11)
            total += val
    return total


class TestWgn:
    def test_gaussians(self):
        m = two_sensor_wgn(0.5, 2.0)
        g0, g1 = m.gaussians(1)
        assert (g0.mean, g1.mean, g0.variance) == (0.0, 1.0, 0.25)
        assert m.gaussians(2)[0].variance == 4.0
        with pytest.raises(DomainError):
            m.gaussians(3)

    @pytest.mark.parametrize("sig", [(), (0.0,), (-1.0,), (math.inf,)])
    def test_invalid(self, sig):
        with pytest.raises(DomainError):
            WgnModel(sig)

    def test_bind(self):
        assert WgnModel((1.0, 1.0)).bind(tandem()).n_sensors == 2
        with pytest.raises(ShapeMismatchError):
            WgnModel((1.0,)).bind(tandem())


class TestCentralizedNp:
    def test_known_value(self):
        pd, _ = centralized_np(1.0, 1.0, 0.2)
        assert pd == pytest.approx(0.7165396225066982, abs=1e-9)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.01, 0.9))
    def test_against_sufficient_statistic(self, sx, sy, alpha):
        # x/sx^2 + y/sy^2 is Gaussian with mean 0 or d^2 and variance d^2
        d = math.sqrt(1 / sx**2 + 1 / sy**2)
        ref = stats.norm.sf(stats.norm.isf(alpha) - d)
        pd, t = centralized_np(sx, sy, alpha)
        assert pd == pytest.approx(ref, abs=1e-7)
        assert t == pytest.approx(d * stats.norm.isf(alpha), abs=1e-6)
        assert centralized_np_closed_form(sx, sy, alpha) == pytest.approx(ref, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            centralized_np(1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            centralized_np(0.0, 1.0, 0.2)


class TestCorrelatedModel:
    def test_validation(self):
        with pytest.raises(DomainError):
            CorrelatedModel(1.0, -1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            CorrelatedModel(1.0, 0.0, 0.0, 1.0)

    def test_swapped(self):
        m = CorrelatedModel(1.0, 2.0, 0.5, 3.0)
        assert m.swapped() == CorrelatedModel(1.0, 2.0, 3.0, 0.5)
        assert m.swapped().swapped() == m

    @given(st.floats(0.01, 10.0), variances, variances, st.floats(-5, 5))
    def test_conditionals_match_schur_complement(self, s2, tau, lam, z):
        m = CorrelatedModel(1.0, s2, tau, lam)
        c = m.h1_covariance()
        mean, var = cond_mean_var_x_given_y(m, z)
        assert mean == pytest.approx(m.mu + c[0, 1] / c[1, 1] * (z - m.mu), rel=1e-12, abs=1e-12)
        assert var == pytest.approx(c[0, 0] - c[0, 1] ** 2 / c[1, 1], rel=1e-12)
        mean, var = cond_mean_var_y_given_x(m, z)
        assert mean == pytest.approx(m.mu + c[0, 1] / c[0, 0] * (z - m.mu), rel=1e-12, abs=1e-12)
        assert var == pytest.approx(c[1, 1] - c[0, 1] ** 2 / c[0, 0], rel=1e-12)

    def test_independent_conditionals(self):
        m = CorrelatedModel(1.0, 0.0, 0.5, 2.0)
        assert cond_mean_var_x_given_y(m, 3.0) == (1.0, 0.5)
        assert cond_mean_var_y_given_x(m, -3.0) == (1.0, 2.0)


class TestThresholds:
    def test_ordering(self):
        with pytest.raises(DomainError):
            CorrelatedThresholds(1, 0, 0, 1, 0, 1)
        with pytest.raises(DomainError):
            CorrelatedThresholds(0, 1, 0, 1, math.nan, 1)

    def test_pairs_sorted(self):
        th = CorrelatedThresholds.from_pairs([2, 1, 4, 3, -1, -2])
        assert th.as_tuple() == (1, 2, 3, 4, -2, -1)
        assert CorrelatedThresholds.from_tuple(th.as_tuple()) == th
        assert th.final(1) == (-2, -1)


ends = st.floats(-4.0, 5.0)


class TestCorrelatedProbabilities:
    @pytest.mark.parametrize("m", [
        CorrelatedModel(1.0, 0.0, 1.0, 1.0),
        CorrelatedModel(1.0, 1.0, 0.25, 1.0),
        CorrelatedModel(1.0, 9.0, 2.0, 1.0),
        CorrelatedModel(0.5, 49.0, 1.0, 4.0),
    ])
    def test_p1_against_dblquad(self, m):
        th = CorrelatedThresholds(-1.0, 0.7, -0.4, 1.3, -2.0, 0.2)
        _, p1 = correlated_final_probs(m, th)
        assert p1 == pytest.approx(dblquad_p1(m, th), abs=1e-9)

    @settings(max_examples=6, deadline=None)
    @given(ends, ends, ends, ends, ends, ends, st.floats(0.0, 10.0))
    def test_p1_random_regions(self, a, b, c, d, e, f, s2):
        if a == b or c == d or e == f:
            return
        th = CorrelatedThresholds.from_pairs([a, b, c, d, e, f])
        m = CorrelatedModel(1.0, s2, 0.7, 1.3)
        assert correlated_final_probs(m, th)[1] == pytest.approx(dblquad_p1(m, th), abs=1e-8)

    def test_p0_is_product_form(self):
        m = CorrelatedModel(1.0, 3.0, 0.5, 2.0)
        th = CorrelatedThresholds(-1.0, 0.5, -0.5, 1.0, -1.5, 0.0)
        nx = stats.norm(0, math.sqrt(m.tau))
        ny = stats.norm(0, math.sqrt(m.lam))
        pv1 = 1 - (ny.cdf(0.5) - ny.cdf(-1.0))
        ref = pv1 * (1 - (nx.cdf(0.0) - nx.cdf(-1.5))) + (1 - pv1) * (1 - (nx.cdf(1.0) - nx.cdf(-0.5)))
        assert correlated_final_probs(m, th)[0] == pytest.approx(ref, abs=1e-14)

    def test_half_lines_match_wgn_tandem(self):
        # independent case with half-line regions is the ordinary tandem
        m = CorrelatedModel(1.0, 0.0, 0.49, 1.69)
        th = CorrelatedThresholds(-math.inf, 0.4, -math.inf, 0.9, -math.inf, 0.1)
        nx0, nx1 = stats.norm(0, 0.7), stats.norm(1, 0.7)
        ny0, ny1 = stats.norm(0, 1.3), stats.norm(1, 1.3)
        for h, (nx, ny) in enumerate(((nx0, ny0), (nx1, ny1))):
            ref = ny.sf(0.4) * nx.sf(0.1) + ny.cdf(0.4) * nx.sf(0.9)
            assert correlated_final_probs(m, th)[h] == pytest.approx(ref, abs=1e-12)

    def test_risk_and_error(self):
        m = CorrelatedModel(1.0, 1.0, 1.0, 1.0)
        th = CorrelatedThresholds(-1.0, 1.0, -1.0, 1.0, -0.5, 0.5)
        p0, p1 = correlated_final_probs(m, th)
        assert correlated_error_prob(m, th, 0.3) == pytest.approx(0.7 * p0 + 0.3 * (1 - p1), abs=1e-15)
        assert correlated_bayes_risk(m, th, 0.3) == correlated_error_prob(m, th, 0.3)

    def test_wgn_equivalent(self):
        assert tandem_wgn_equivalent(CorrelatedModel(1.0, 0.0, 0.25, 4.0)) == WgnModel((0.5, 2.0))
        with pytest.raises(DomainError):
            tandem_wgn_equivalent(CorrelatedModel(1.0, 1.0, 1.0, 1.0))


class TestRegionShape:
    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.5, 20.0), variances, variances)
    def test_membership_functions_convex(self, s2, tau, lam):
        m = CorrelatedModel(1.0, s2, tau, lam)
        th = CorrelatedThresholds(-1.0, 1.5, -1.5, 2.0, -0.5, 0.8)
        f, g = region_membership_functions(m, th)
        grid = np.linspace(-4, 5, 61)
        h = grid[1] - grid[0]
        for fn in (f, lambda x: g(0, x), lambda x: g(1, x)):
            vals = np.array([fn(x) for x in grid])
            second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
            assert np.all(second >= -1e-7 * h), "membership function is not convex"

    def test_f_requires_dominance(self):
        m = CorrelatedModel(1.0, 1.0, 1.0, 1.0)
        th = CorrelatedThresholds(-1.0, 1.0, -0.5, 0.5, -2.0, 2.0)
        f, _ = region_membership_functions(m, th)
        with pytest.raises(DomainError):
            f(0.0)
