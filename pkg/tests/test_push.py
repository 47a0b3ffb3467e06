import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacentrality.errors import DivergenceError, EmptyGraph, ParamError
from lacentrality.exact import CentralityParams, Measure, dense_solve, spectral_radius, starting_vector
from lacentrality.graph import DirectedGraph
from lacentrality.push import (
    approx_alpha_centrality,
    approx_la_alpha_centrality,
    approx_la_pagerank,
    approximate_push,
    record_snapshots,
    verify_lemma1,
)

from conftest import RAW, digraphs, erdos_renyi

PUSH_MEASURES = [Measure.LAPR, Measure.LAAC, Measure.AC]


def _alpha_for(g, measure, frac=0.85):
    if measure is Measure.AC:
        return frac / spectral_radius(g, "A").value
    return frac


def _check_guarantee(approx, exact, delta):
    slack = 1e-9 * np.abs(exact)
    assert (approx <= exact + slack).all()
    assert (approx >= (1 - delta) * exact - slack).all()


def test_lapr_golden(two_cycle):
    sv, st_ = approx_la_pagerank(two_cycle, 0.5, 0.5, np.array([0.5, 0.5]), conditioning=RAW)
    assert sv.scores.tolist() == [0.4375, 0.375]
    assert st_.pushes == 3
    assert st_.epsilon == 0.25
    assert st_.theoretical_bound == 8.0


def test_laac_golden(two_cycle):
    sv, st_ = approx_la_alpha_centrality(two_cycle, 0.5, 0.5, np.array([1.0, 1.0]), conditioning=RAW)
    assert sv.scores.tolist() == [1.75, 1.5]
    assert st_.pushes == 3
    assert st_.epsilon == 0.5
    assert (sv.scores >= 0.5 * 2).all()


def test_laac_single_edge_is_exact():
    g = DirectedGraph.from_edges(2, [(0, 1)])
    for delta in (1.0, 0.3, 0.01):
        sv, _ = approx_la_alpha_centrality(g, 0.5, delta, conditioning=RAW)
        assert sv.scores.tolist() == [1.0, 0.0]


def test_ac_small_delta_approaches_exact(two_cycle):
    sv, _ = approx_alpha_centrality(two_cycle, 0.5, 1e-9, np.ones(2))
    np.testing.assert_allclose(sv.scores, [2, 2], atol=1e-8)


def test_ac_alpha_zero_returns_s():
    g = erdos_renyi(30, 3, seed=0)
    s = starting_vector(g, Measure.AC, CentralityParams(alpha=0.0))
    sv, _ = approx_alpha_centrality(g, 0.0, 0.5)
    # nodes below the threshold never get popped; the rest bank exactly s
    popped = sv.scores > 0
    np.testing.assert_array_equal(sv.scores[popped], s[popped])
    sv, _ = approx_alpha_centrality(g, 0.0, 1e-12)
    np.testing.assert_array_equal(sv.scores, s)


@pytest.mark.parametrize("measure", [Measure.LAPR, Measure.LAAC])
def test_delta_one_degenerate_guarantee(measure):
    g = erdos_renyi(60, 4, seed=2)
    sv, _ = approximate_push(g, measure, 0.85, 1.0)
    s = starting_vector(g, measure, CentralityParams(alpha=0.85))
    exact = dense_solve(g, measure, 0.85, s)
    assert (sv.scores >= 0).all()
    assert (sv.scores <= exact * (1 + 1e-9)).all()


@pytest.mark.parametrize("measure", PUSH_MEASURES)
def test_guarantee_uniform_start_er100(measure):
    for seed in range(20):
        g = erdos_renyi(100, 5, seed=seed)
        alpha = _alpha_for(g, measure)
        s = np.full(g.node_count, 1.0 / g.node_count)
        sv, stats = approximate_push(g, measure, alpha, 0.1, s, debug=True)
        exact = dense_solve(g, measure, alpha, s)
        _check_guarantee(sv.scores, exact, 0.1)
        assert stats.pushes < stats.theoretical_bound


def test_default_start_counterexample():
    # ten sources feed node 10; 11 -> 12 is a separate pair. The sources'
    # own la-out-degree mass sits below the threshold, so they are never
    # popped and end at zero although their exact score is positive.
    g = DirectedGraph.from_edges(13, [(k, 10) for k in range(10)] + [(11, 12)])
    sv, _ = approx_la_alpha_centrality(g, 0.5, 0.9, conditioning=RAW)
    s = starting_vector(g, Measure.LAAC, CentralityParams(alpha=0.5, conditioning=RAW))
    exact = dense_solve(g, Measure.LAAC, 0.5, s, RAW)
    assert exact[0] > 0 and sv.scores[0] == 0.0
    assert sv.scores[0] < (1 - 0.9) * exact[0]
    # the same graph with uniform s keeps the guarantee
    u = np.full(13, 1 / 13)
    sv_u, _ = approx_la_alpha_centrality(g, 0.5, 0.9, u, conditioning=RAW)
    _check_guarantee(sv_u.scores, dense_solve(g, Measure.LAAC, 0.5, u, RAW), 0.9)


@pytest.mark.parametrize("measure", PUSH_MEASURES)
def test_residual_identity_init_midrun_and_end(measure):
    g = erdos_renyi(50, 4, seed=21)
    alpha = _alpha_for(g, measure, 0.5)
    snaps, _, stats = record_snapshots(g, measure, alpha, 0.01, at={0, 1, 2, 3, 4, 5})
    assert [s.pushes for s in snaps][:6] == [0, 1, 2, 3, 4, 5]
    assert snaps[-1].pushes == stats.pushes
    assert verify_lemma1(snaps[0], g).defect == 0.0
    for snap in snaps:
        rep = verify_lemma1(snap, g)
        assert rep.passed, (snap.pushes, rep)


def test_residual_identity_two_cycle_trace(two_cycle):
    snaps, _, _ = record_snapshots(two_cycle, Measure.LAPR, 0.5, 0.5, np.array([0.5, 0.5]), conditioning=RAW)
    assert len(snaps) == 4
    assert verify_lemma1(snaps[-1], two_cycle).defect <= 1e-10


def test_residual_identity_rejects_mismatch(two_cycle):
    snaps, _, _ = record_snapshots(two_cycle, Measure.LAPR, 0.5, 0.5, conditioning=RAW)
    with pytest.raises(ParamError):
        verify_lemma1(snaps[0], two_cycle, measure="laac")
    with pytest.raises(ParamError):
        verify_lemma1(snaps[0], two_cycle, alpha=0.4)


def test_random_order_keeps_guarantee():
    g = erdos_renyi(100, 5, seed=8)
    s = np.full(100, 0.01)
    exact = dense_solve(g, Measure.LAPR, 0.85, s)
    fifo, _ = approx_la_pagerank(g, 0.85, 0.1, s)
    results = [approx_la_pagerank(g, 0.85, 0.1, s, order="random", seed=k)[0].scores for k in range(5)]
    for r in results:
        _check_guarantee(r, exact, 0.1)
    assert any(not np.array_equal(r, fifo.scores) for r in results)
    again = approx_la_pagerank(g, 0.85, 0.1, s, order="random", seed=0)[0].scores
    np.testing.assert_array_equal(again, results[0])


@pytest.mark.parametrize("measure", PUSH_MEASURES)
def test_termination_condition_and_residual_sum(measure):
    g = erdos_renyi(80, 4, seed=13)
    alpha = _alpha_for(g, measure, 0.6)
    snaps, _, stats = record_snapshots(g, measure, alpha, 0.05, at=set())
    final = snaps[-1]
    dmax = int(g.d_out.max() if measure is Measure.LAPR else g.d_in.max())
    assert (final.residual <= stats.epsilon * dmax).all()
    assert stats.residual_l1_final == pytest.approx(final.residual.sum(), rel=1e-9)


def test_residual_strictly_decreases_each_push():
    g = erdos_renyi(60, 4, seed=3)
    sums = []

    def watch(state):
        sums.append(math.fsum(state.residual))
        assert set(state.queue) == {i for i, f in enumerate(state.queued) if f}
        assert state.residual_l1 == pytest.approx(sums[-1], rel=1e-9)

    for measure in (Measure.LAPR, Measure.LAAC):
        sums.clear()
        approximate_push(g, measure, 0.7, 0.05, observer=watch, debug=True)
        assert all(b < a for a, b in zip(sums, sums[1:]))


@settings(max_examples=30, deadline=None)
@given(digraphs(min_nodes=3, max_nodes=25), st.integers(0, 2**31 - 1), st.sampled_from(PUSH_MEASURES))
def test_sum_of_sources(g, seed, measure):
    # split a uniform vector at random; the guarantee is stated for uniform s
    rng = np.random.default_rng(seed)
    s1 = rng.random(g.node_count)
    s2 = 1.0 - s1
    alpha = 0.6 if measure is not Measure.AC else 0.5 / max(spectral_radius(g).value, 1.0)
    sv, stats = approximate_push(g, measure, alpha, 0.2, s1 + s2)
    exact = dense_solve(g, measure, alpha, s1) + dense_solve(g, measure, alpha, s2)
    _check_guarantee(sv.scores, exact, 0.2)
    assert stats.pushes < stats.theoretical_bound


def test_parameter_errors(two_cycle):
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, 0.5, 0.0)
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, 0.5, 1.5)
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, 1.0, 0.5)
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, -0.1, 0.5)
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, 0.5, 0.5, np.array([-1.0, 1.0]))
    with pytest.raises(ParamError):
        approx_la_pagerank(two_cycle, 0.5, 0.5, np.zeros(2))
    with pytest.raises(ParamError):
        approximate_push(two_cycle, Measure.PR, 0.5, 0.5)
    with pytest.raises(DivergenceError):
        approx_alpha_centrality(two_cycle, 1.0, 0.5)
    with pytest.raises(EmptyGraph):
        approx_la_pagerank(DirectedGraph.from_edges(2, []), 0.5, 0.5)


def test_stats_json(two_cycle):
    _, stats = approx_la_alpha_centrality(two_cycle, 0.5, 0.5, conditioning=RAW)
    doc = json.loads(stats.to_json())
    assert doc["bound_label"] == "Theorem 2 with c:=alpha"
    assert {"pushes", "theoretical_bound", "residual_l1_final", "wall_time_ms", "epsilon"} <= set(doc)
    _, ac = approx_alpha_centrality(DirectedGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)]), 0.9, 0.5)
    # alpha * dmax_in >= 1 leaves the reconstructed bound infinite
    assert json.loads(ac.to_json())["theoretical_bound"] is None
