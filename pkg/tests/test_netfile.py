from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionnet.errors import CyclicGraphError, ParseError
from fusionnet.models import CorrelatedModel, WgnModel
from fusionnet.netfile import NetworkSpec, load_network, parse_network, serialize_network
from fusionnet.netgraph import acyclic_graph_11, binary_tree_11, dag_from_edges, threshold_count
from fusionnet.objectives import CostMatrix

DATA = Path(__file__).resolve().parents[1] / "data"


class TestParse:
    def test_minimal(self):
        spec = parse_network("n 2\nedge 2 1\n")
        assert spec.dag.edges == ((2, 1),)
        assert spec.model is None and spec.prior is None and spec.cost is None

    def test_comments_and_blank_lines(self):
        text = "# header\n\nn 2   # two nodes\n  edge 2 1\n"
        assert parse_network(text).dag.n == 2

    def test_full(self):
        spec = parse_network("n 2\nedge 2 1\nmodel wgn sigma 0.5 2\nprior 0.3\ncost 0 2 1 0\n")
        assert spec.model == WgnModel((0.5, 2.0))
        assert spec.prior == 0.3
        assert spec.cost == CostMatrix(0, 2, 1, 0)

    def test_correlated(self):
        spec = parse_network("n 2\nedge 2 1\nmodel corr mu 1 sigs2 4 tau 0.5 lam 2\n")
        assert spec.model == CorrelatedModel(1.0, 4.0, 0.5, 2.0)

    @pytest.mark.parametrize("text, line", [
        ("n 2\nedge 2 x\n", 2),
        ("n 2\nedge 1 2\n", 2),
        ("n 2\nedge 2 1\nbogus 3\n", 3),
        ("n 2\nn 3\n", 2),
        ("n 2\nedge 2 5\n", 2),
        ("n 2\nedge 2 1\nmodel wgn sigma 1\n", 3),
        ("n 2\nedge 2 1\nmodel wgn sigma 1 -1\n", 3),
        ("n 2\nedge 2 1\nprior 1.5\n", 3),
        ("n 2\nedge 2 1\ncost 1 0 0 1\n", 3),
        ("n 2\nedge 2 1\nmodel corr mu 1 sigs2 0 tau 1\n", 3),
        ("n 3\nedge 2 1\nedge 3 1\nmodel corr mu 1 sigs2 0 tau 1 lam 1\n", 4),
        ("n 2\nedge 2 1\nmodel gamma 1\n", 3),
    ])
    def test_error_carries_line(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_network(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")

    def test_missing_count(self):
        with pytest.raises(ParseError) as info:
            parse_network("edge 2 1\n")
        assert info.value.line is None

    def test_cycle_rejected(self):
        with pytest.raises(CyclicGraphError):
            parse_network("n 3\nedge 2 3\nedge 3 2\nedge 2 1\n")


class TestDataFiles:
    def test_acyclic(self):
        spec = load_network(DATA / "acyclic11.net")
        assert spec.dag == acyclic_graph_11()
        assert threshold_count(spec.dag) == 36

    def test_tree(self):
        assert load_network(DATA / "tree11.net").dag == binary_tree_11()

    def test_tandem(self):
        assert threshold_count(load_network(DATA / "tandem.net").dag) == 3


sigmas = st.floats(0.01, 100.0, allow_nan=False)


class TestRoundTrip:
    @given(st.lists(sigmas, min_size=2, max_size=2), st.floats(0.001, 0.999), st.floats(0.0, 5.0))
    def test_wgn(self, sig, prior, c00):
        spec = NetworkSpec(dag_from_edges(2, [(2, 1)]), WgnModel(tuple(sig)), prior, CostMatrix(c00, 9.0, 10.0, 0.0))
        text = serialize_network(spec)
        assert parse_network(text) == spec
        assert serialize_network(parse_network(text)) == text

    @given(st.floats(-5, 5), st.floats(0, 50), sigmas, sigmas)
    def test_correlated(self, mu, s2, tau, lam):
        spec = NetworkSpec(dag_from_edges(2, [(2, 1)]), CorrelatedModel(mu, s2, tau, lam))
        assert parse_network(serialize_network(spec)) == spec

    def test_data_files_idempotent(self):
        for path in sorted(DATA.glob("*.net")):
            spec = load_network(path)
            assert parse_network(serialize_network(spec)) == spec
