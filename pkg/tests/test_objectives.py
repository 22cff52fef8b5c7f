import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionnet.errors import DomainError, ShapeMismatchError
from fusionnet.models import WgnModel, n_sensor_wgn
from fusionnet.netgraph import acyclic_graph_11, dag_from_edges, tandem
from fusionnet.objectives import (
    ChannelSet, CostMatrix, RegionProbs, ThresholdRuleSet, bayes_risk, bayes_risk_with_channels,
    decision_vector_probs, effective_region_probs, f_kl, final_decision_probs, kl_xyx, kl_yx, message_probs,
    np_lagrangian, np_metrics, region_probs,
)
from reference import mp_tail, risk, tables_of, vector_prob
from test_netgraph import dags

probs = st.floats(0.0, 1.0)
open_probs = st.floats(1e-6, 1 - 1e-6)


@st.composite
def dag_with_tables(draw, max_n=6):
    d = draw(dags(max_n=max_n))
    tables = [[draw(probs) for _ in range(d.table_size(k))] for k in d.nodes]
    tables1 = [[draw(probs) for _ in range(d.table_size(k))] for k in d.nodes]
    rp = RegionProbs([np.vstack([a, b]) for a, b in zip(tables, tables1)])
    return d, rp


class TestCostMatrix:
    def test_zero_one(self):
        c = CostMatrix.zero_one()
        np.testing.assert_array_equal(c.as_array(), [[0, 1], [1, 0]])
        assert c.base_threshold(0.5) == 1.0

    def test_weights(self):
        w = CostMatrix(0.0, 2.0, 1.0, 0.5).weights(0.25)
        np.testing.assert_allclose(w, [[0.0, 0.5], [0.75, 0.125]])

    def test_base_threshold(self):
        # (C10 - C00) pi0 / ((C01 - C11) pi1)
        assert CostMatrix(0, 2, 1, 0).base_threshold(0.25) == pytest.approx(1.5)

    @pytest.mark.parametrize("vals", [(1, 1, 1, 0), (0, 1, 1, 1), (-1, 1, 1, 0), (0, math.inf, 1, 0)])
    def test_invalid(self, vals):
        with pytest.raises(DomainError):
            CostMatrix(*vals)

    @pytest.mark.parametrize("prior", [0.0, 1.0, -0.2])
    def test_prior(self, prior):
        with pytest.raises(DomainError):
            CostMatrix.zero_one().weights(prior)


class TestTables:
    def test_rules_validated(self):
        with pytest.raises(DomainError):
            ThresholdRuleSet([[-1.0]])
        with pytest.raises(DomainError):
            ThresholdRuleSet([[math.nan]])
        ThresholdRuleSet([[0.0, math.inf]])

    def test_shape_mismatch(self):
        rules = ThresholdRuleSet([[1.0], [1.0]])
        with pytest.raises(ShapeMismatchError):
            region_probs(WgnModel((1.0, 1.0)), tandem(), rules)
        with pytest.raises(ShapeMismatchError):
            region_probs(WgnModel((1.0,)), tandem(), ThresholdRuleSet.uniform(tandem(), 1.0))

    def test_immutable(self):
        rules = ThresholdRuleSet.uniform(tandem(), 1.0)
        with pytest.raises(ValueError):
            rules[1][0] = 2.0

    def test_one_based(self):
        rules = ThresholdRuleSet([[1.0, 2.0], [3.0]])
        assert list(rules[2]) == [3.0]
        with pytest.raises(IndexError):
            rules[0]


class TestRegionProbs:
    @given(st.floats(0.2, 5.0), st.floats(1e-3, 1e3))
    def test_single_sensor_tails(self, sigma, lam):
        rp = region_probs(WgnModel((sigma,)), dag_from_edges(1, []), ThresholdRuleSet([[lam]]))
        cut = sigma**2 * math.log(lam) + 0.5
        assert rp[1][0, 0] == pytest.approx(mp_tail(cut, 0.0, sigma), rel=1e-11, abs=1e-300)
        assert rp[1][1, 0] == pytest.approx(mp_tail(cut, 1.0, sigma), rel=1e-11, abs=1e-300)

    def test_extreme_thresholds(self):
        rp = region_probs(WgnModel((1.0,)), dag_from_edges(1, []), ThresholdRuleSet([[0.0]]))
        np.testing.assert_array_equal(rp[1], [[1.0], [1.0]])
        rp = region_probs(WgnModel((1.0,)), dag_from_edges(1, []), ThresholdRuleSet([[math.inf]]))
        np.testing.assert_array_equal(rp[1], [[0.0], [0.0]])

    def test_single_sensor_error_probability(self):
        rp = region_probs(WgnModel((1.0,)), dag_from_edges(1, []), ThresholdRuleSet([[1.0]]))
        pe = bayes_risk(dag_from_edges(1, []), rp, CostMatrix.zero_one(), 0.5)
        assert pe == pytest.approx(mp_tail(0.5, 0.0, 1.0), rel=1e-13)


class TestEnumeration:
    @settings(max_examples=40, deadline=None)
    @given(dag_with_tables())
    def test_joint_matches_reference(self, dt):
        d, rp = dt
        joint = decision_vector_probs(d, rp)
        tabs = tables_of(rp, d.n)
        edges = list(d.edges)
        for code in range(1 << d.n):
            bits = [(code >> i) & 1 for i in range(d.n)]
            for h in (0, 1):
                assert joint[h, code] == pytest.approx(vector_prob(tabs, edges, h, bits), abs=1e-14)
        np.testing.assert_allclose(joint.sum(axis=1), [1.0, 1.0], atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(dag_with_tables(), st.floats(0.05, 0.95))
    def test_risk_matches_reference(self, dt, prior):
        d, rp = dt
        cost = CostMatrix(0.1, 2.0, 1.5, 0.0)
        ref = risk(tables_of(rp, d.n), list(d.edges), d.n, cost.as_array(), prior)
        assert bayes_risk(d, rp, cost, prior) == pytest.approx(ref, abs=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(dag_with_tables(), st.data())
    def test_message_law_is_marginal(self, dt, data):
        d, rp = dt
        k = data.draw(st.sampled_from(list(d.nodes)))
        msg = message_probs(d, rp, k)
        assert msg.shape == (2, d.table_size(k))
        np.testing.assert_allclose(msg.sum(axis=1), [1.0, 1.0], atol=1e-12)

    def test_shared_ancestor_correlation(self):
        # 3 -> 2, 3 -> 1, 2 -> 1: node 1's parent bits are dependent
        d = dag_from_edges(3, [(2, 1), (3, 1), (3, 2)])
        rp = RegionProbs([np.full((2, 4), 0.5), np.array([[0.0, 1.0], [0.0, 1.0]]), np.array([[0.3], [0.7]])])
        msg = message_probs(d, rp, 1)
        # node 2 copies node 3, so only messages 00 and 11 occur
        np.testing.assert_allclose(msg, [[0.7, 0.0, 0.0, 0.3], [0.3, 0.0, 0.0, 0.7]], atol=1e-15)

    def test_final_decision_and_np(self):
        d = tandem()
        rp = RegionProbs([np.array([[0.1, 0.6], [0.4, 0.9]]), np.array([[0.2], [0.7]])])
        p0 = 0.8 * 0.1 + 0.2 * 0.6
        p1 = 0.3 * 0.4 + 0.7 * 0.9
        np.testing.assert_allclose(final_decision_probs(d, rp), [p0, p1], rtol=1e-15)
        assert np_metrics(d, rp) == pytest.approx((p0, p1), rel=1e-15)


class TestChannels:
    def test_identity_reproduces_risk_exactly(self):
        d = acyclic_graph_11()
        model = n_sensor_wgn([1.0] * 11)
        rng = np.random.default_rng(5)
        rules = ThresholdRuleSet([rng.uniform(0.2, 5.0, d.table_size(k)) for k in d.nodes])
        rp = region_probs(model, d, rules)
        cost = CostMatrix.zero_one()
        assert bayes_risk_with_channels(d, rp, ChannelSet.identity(d), cost, 0.5) == bayes_risk(d, rp, cost, 0.5)

    @given(st.floats(0.0, 1.0), probs, probs, probs, probs, probs, probs)
    def test_tandem_flip_by_hand(self, eps, a0, a1, b0, b1, q0, q1):
        d = tandem()
        rp = RegionProbs([np.array([[a0, a1], [b0, b1]]), np.array([[q0], [q1]])])
        eff = effective_region_probs(rp, ChannelSet.symmetric_flips(d, eps))
        for h, (lo, hi) in enumerate(((a0, a1), (b0, b1))):
            assert eff[1][h, 0] == pytest.approx((1 - eps) * lo + eps * hi, abs=1e-15)
            assert eff[1][h, 1] == pytest.approx(eps * lo + (1 - eps) * hi, abs=1e-15)

    def test_kronecker_layout(self):
        d = dag_from_edges(3, [(2, 1), (3, 1)])
        ch = ChannelSet.symmetric_flips(d, 0.1)
        m = ch[1]
        assert m.shape == (4, 4)
        # flipping both bits of message 00 gives 11
        assert m[0, 3] == pytest.approx(0.01)
        assert m[1, 2] == pytest.approx(0.01)
        np.testing.assert_allclose(m.sum(axis=1), 1.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            ChannelSet([[[0.5, 0.6], [0.5, 0.5]]])
        with pytest.raises(ShapeMismatchError):
            ChannelSet([[[1.0, 0.0]]])
        with pytest.raises(DomainError):
            ChannelSet.symmetric_flips(tandem(), 1.5)


class TestKlHelpers:
    def test_f_kl_values(self):
        assert f_kl(0.5, 0.5) == 0.0
        assert f_kl(0.2, 0.6) == pytest.approx(0.2 * math.log(1 / 3) + 0.8 * math.log(2.0))

    @given(open_probs, open_probs)
    def test_f_kl_nonnegative(self, a, b):
        assert f_kl(a, b) >= -1e-15

    def test_f_kl_domain(self):
        with pytest.raises(DomainError):
            f_kl(0.0, 0.5)

    def test_combinations(self):
        assert kl_yx(0.5, 0.2, 0.6) == pytest.approx(0.5 + f_kl(0.2, 0.6))
        pairs = ((0.1, 0.3), (0.4, 0.8))
        assert kl_xyx(1.0, 0.25, pairs) == pytest.approx(1.0 + 0.25 * f_kl(0.4, 0.8) + 0.75 * f_kl(0.1, 0.3))
        with pytest.raises(DomainError):
            kl_xyx(1.0, 1.5, pairs)

    def test_lagrangian(self):
        assert np_lagrangian(0.8, 0.25, 2.0, 0.2) == pytest.approx(0.7)
        with pytest.raises(DomainError):
            np_lagrangian(0.8, 0.2, -1.0, 0.2)
