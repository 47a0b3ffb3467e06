import gzip

import numpy as np
import pytest
from hypothesis import given, settings

from lacentrality.errors import ConditioningError, EmptyGraph, ParseError
from lacentrality.exact import CentralityParams, pagerank_exact
from lacentrality.graph import (
    ConditioningMode,
    DegreeConditioning,
    DirectedGraph,
    condition_degrees,
    format_edge_list,
    max_degrees,
    parse_edge_list,
    read_edge_list,
    transpose,
)

from conftest import digraphs, erdos_renyi


def test_parse_two_cycle(two_cycle):
    assert two_cycle.node_count == 2
    assert set(two_cycle.edges()) == {(0, 1), (1, 0)}
    assert two_cycle.d_in.tolist() == [1, 1]
    assert two_cycle.d_out.tolist() == [1, 1]
    assert two_cycle.labels == ("a", "b")


def test_self_loop_dropped_then_solver_rejects():
    g = parse_edge_list("a\ta")
    assert g.node_count == 1 and g.edge_count == 0
    with pytest.raises(EmptyGraph):
        pagerank_exact(g, CentralityParams(alpha=0.5))


def test_comments_blank_lines_and_duplicates():
    g = parse_edge_list("# header\n\na\tb\na\tb\n  \nb\tc\n")
    assert g.edge_count == 2
    assert g.labels == ("a", "b", "c")


def test_malformed_line_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_edge_list("a\tb\nonly-one-field\n")
    assert info.value.lineno == 2


def test_numeric_labels_sort_numerically():
    g = parse_edge_list("10\t2\n2\t1\n")
    assert g.labels == ("1", "2", "10")


def test_id_base_and_whitespace():
    g = parse_edge_list("0 3\n1  2\n", sep=None, id_base=0)
    assert g.node_count == 4
    assert set(g.edges()) == {(0, 3), (1, 2)}
    g1 = parse_edge_list("1\t2\n", id_base=1)
    assert g1.node_count == 2 and set(g1.edges()) == {(0, 1)}
    with pytest.raises(ParseError):
        parse_edge_list("x\t1\n", id_base=0)


def test_undirected_expansion():
    g = parse_edge_list("a\tb\n", undirected=True)
    assert set(g.edges()) == {(0, 1), (1, 0)}


def test_read_gzip(tmp_path):
    path = tmp_path / "g.txt.gz"
    with gzip.open(path, "wt") as fh:
        fh.write("a\tb\nb\tc\n")
    assert read_edge_list(path).edge_count == 2


def test_transpose_examples(two_cycle):
    assert transpose(two_cycle) == two_cycle
    g = DirectedGraph.from_edges(2, [(0, 1)])
    assert set(transpose(g).edges()) == {(1, 0)}


def test_transpose_swaps_degrees_against_reversal_oracle():
    g = erdos_renyi(50, 4, seed=3)
    t = transpose(g)
    oracle = DirectedGraph.from_edges(50, [(v, u) for u, v in g.edges()])
    assert t == oracle
    np.testing.assert_array_equal(t.d_out, g.d_in)
    np.testing.assert_array_equal(t.d_in, g.d_out)


def test_conditioning_examples(two_cycle):
    d = condition_degrees(two_cycle, DegreeConditioning(0.01))
    np.testing.assert_allclose(d.d_in_c, [1.01, 1.01])
    g = DirectedGraph.from_edges(3, [(1, 2), (0, 2)])
    zero = condition_degrees(g, DegreeConditioning(0.01, ConditioningMode.ZERO_ONLY))
    assert zero.d_in_c.tolist() == [0.01, 0.01, 2.0]
    with pytest.raises(ConditioningError):
        condition_degrees(g, DegreeConditioning(0.0, ConditioningMode.ALL))


def test_conditioning_leaves_adjacency_alone(two_cycle):
    before = two_cycle.adjacency.toarray().copy()
    condition_degrees(two_cycle)
    np.testing.assert_array_equal(two_cycle.adjacency.toarray(), before)


def test_max_degrees(two_cycle):
    assert max_degrees(two_cycle) == (1, 1)
    star = DirectedGraph.from_edges(6, [(0, k) for k in range(1, 6)])
    assert max_degrees(star) == (5, 1)
    with pytest.raises(EmptyGraph):
        max_degrees(DirectedGraph.from_edges(3, []))


def test_max_degrees_linear_scan_oracle():
    g = erdos_renyi(80, 6, seed=11)
    out_counts = [0] * 80
    in_counts = [0] * 80
    for u, v in g.edges():
        out_counts[u] += 1
        in_counts[v] += 1
    assert max_degrees(g) == (max(out_counts), max(in_counts))


@settings(max_examples=60, deadline=None)
@given(digraphs(min_edges=0))
def test_round_trip(g):
    text = format_edge_list(g)
    back = parse_edge_list(text)
    assert back.node_count == g.node_count
    assert sorted(back.edges()) == sorted(g.edges())
    assert format_edge_list(back) == text


@settings(max_examples=60, deadline=None)
@given(digraphs(min_edges=0))
def test_in_out_lists_agree(g):
    from_out = sorted((u, v) for u in range(g.node_count) for v in g.out_neighbors[u])
    from_in = sorted((u, v) for v in range(g.node_count) for u in g.in_neighbors[v])
    assert from_out == from_in


@settings(max_examples=60, deadline=None)
@given(digraphs())
def test_transpose_involution_and_conditioning_bounds(g):
    assert transpose(transpose(g)) == g
    for mode in ConditioningMode:
        d = condition_degrees(g, DegreeConditioning(0.01, mode))
        assert (d.d_out_c >= g.d_out).all() and (d.d_in_c >= g.d_in).all()
        assert (d.d_out_c > 0).all() and (d.d_in_c > 0).all()
