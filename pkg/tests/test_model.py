"""Model layer: containers, completion detection, compensators, likelihood."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import hyperhawkes as hh
from hyperhawkes.model import DomainError


def seq_of(pairs, num_nodes, horizon):
    return hh.as_event_sequence(pairs, num_nodes=num_nodes, horizon=horizon)


# ---------------------------------------------------------------------------
# containers

def test_event_sequence_validates_and_sorts():
    s = seq_of([(0.5, 1), (0.2, 0)], 2, 1.0)
    assert s.times.tolist() == [0.2, 0.5]
    assert s.nodes.tolist() == [0, 1]
    with pytest.raises(DomainError):
        seq_of([(-0.1, 0)], 1, 1.0)
    with pytest.raises(DomainError):
        seq_of([(1.5, 0)], 1, 1.0)
    with pytest.raises(DomainError):
        seq_of([(0.5, 3)], 2, 1.0)
    with pytest.raises(DomainError):
        hh.EventSequence(np.array([0.1]), np.array([0]), 1, -1.0)


def test_event_sequence_ties_are_ordered_by_node():
    s = seq_of([(0.5, 1), (0.5, 0)], 2, 1.0)
    assert s.nodes.tolist() == [0, 1]
    assert len(s) == 2
    assert s.events[0].node == 0


def test_as_event_sequence_requires_metadata():
    with pytest.raises(DomainError):
        hh.as_event_sequence([(0.1, 0)])


def test_hyperedge_normalizes_members():
    e = hh.Hyperedge((2, 0))
    assert e.members == (0, 2)
    assert e.size == 2
    assert 0 in e and 1 not in e
    with pytest.raises(DomainError):
        hh.Hyperedge((1,))
    with pytest.raises(DomainError):
        hh.Hyperedge((1, 1))
    with pytest.raises(DomainError):
        hh.Hyperedge((-1, 2))


def test_model_params_validation():
    ok = hh.ModelParams(np.array([0.1, 0.2]), np.zeros((2, 2)),
                        ((hh.Hyperedge((0, 1)), 0.3),), 1.0, 0.5)
    assert ok.num_nodes == 2
    assert ok.edge_weights().tolist() == [0.3]
    assert ok.edge_list() == [hh.Hyperedge((0, 1))]
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([-0.1]), np.zeros((1, 1)), (), 1.0, 0.5)
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([0.1]), np.zeros((2, 2)), (), 1.0, 0.5)
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([0.1, 0.1]), np.zeros((2, 2)),
                       ((hh.Hyperedge((0, 1)), -0.2),), 1.0, 0.5)
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([0.1, 0.1]), np.zeros((2, 2)),
                       ((hh.Hyperedge((0, 2)), 0.2),), 1.0, 0.5)
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([0.1]), np.zeros((1, 1)), (), 0.0, 0.5)
    with pytest.raises(DomainError):
        hh.ModelParams(np.array([0.1]), np.zeros((1, 1)), (), 1.0, 0.0)


def test_replace_weights_swaps_blocks_only():
    p = hh.ModelParams(np.array([0.1, 0.2]), np.full((2, 2), 0.05),
                       ((hh.Hyperedge((0, 1)), 0.3),), 1.0, 0.5)
    q = p.replace_weights(edge_weights=np.array([0.0]))
    assert q.edge_weights().tolist() == [0.0]
    assert np.array_equal(q.mu, p.mu)
    assert q.edge_list() == p.edge_list()


# ---------------------------------------------------------------------------
# kernel and completions

def test_kernel_values():
    assert hh.kernel(1.2, 1.0) == pytest.approx(0.3011942119122021, abs=1e-15)
    assert hh.kernel(0.0, 2.0) == 1.0
    out = hh.kernel(np.array([0.0, 0.5]), 2.0)
    assert out.tolist() == pytest.approx([1.0, math.exp(-1.0)])
    with pytest.raises(DomainError):
        hh.kernel(-0.1, 1.0)
    with pytest.raises(DomainError):
        hh.kernel(0.1, 0.0)


def test_completions_worked_example():
    s = seq_of([(0.1, 0), (0.3, 1), (1.0, 0), (1.2, 1), (1.3, 0)], 2, 2.0)
    c = hh.compute_completions(s, hh.Hyperedge((0, 1)), 0.5)
    assert c.tolist() == [0.3, 1.2, 1.3]


def test_completions_window_is_closed():
    # the second member fires exactly delta after the first: still a completion
    s = seq_of([(0.2, 0), (0.7, 1)], 2, 2.0)
    assert hh.compute_completions(s, hh.Hyperedge((0, 1)), 0.5).tolist() == [0.7]
    s2 = seq_of([(0.2, 0), (0.7001, 1)], 2, 2.0)
    assert hh.compute_completions(s2, hh.Hyperedge((0, 1)), 0.5).size == 0


def test_completions_simultaneous_events_complete():
    s = seq_of([(1.0, 0), (1.0, 1)], 2, 2.0)
    assert hh.compute_completions(s, hh.Hyperedge((0, 1)), 0.5).tolist() == [1.0]


def test_completions_brute_force_cross_check(short_seq):
    edge = hh.Hyperedge((0, 1))
    delta = 0.5
    got = hh.compute_completions(short_seq, edge, delta)
    expect = []
    t = short_seq.times
    nd = short_seq.nodes
    for i in range(len(short_seq)):
        if nd[i] not in edge.members:
            continue
        ok = all(np.any((nd[: i + 1] == m) & (t[: i + 1] >= t[i] - delta))
                 for m in edge.members)
        if ok and (not expect or expect[-1] < t[i]):
            expect.append(float(t[i]))
    assert got.tolist() == pytest.approx(expect)


def test_completion_errors():
    s = seq_of([(0.1, 0)], 2, 1.0)
    with pytest.raises(DomainError):
        hh.compute_completions(s, hh.Hyperedge((0, 5)), 0.5)
    with pytest.raises(DomainError):
        hh.compute_completions(s, hh.Hyperedge((0, 1)), 0.0)


def test_anchor_at_is_strictly_before():
    s = seq_of([(0.1, 0), (0.3, 1)], 2, 2.0)
    tl = hh.build_timeline(s, [hh.Hyperedge((0, 1))], 0.5)
    e = hh.Hyperedge((0, 1))
    assert hh.anchor_at(tl, e, 0.3) is None
    assert hh.anchor_at(tl, e, 0.3000001) == pytest.approx(0.3)
    assert hh.anchor_at(tl, e, 0.1) is None


# ---------------------------------------------------------------------------
# compensators

def test_piecewise_compensator_worked_example():
    c = [1.0, 2.5]
    assert hh.piecewise_compensator(c, 2.0, 4.0) == pytest.approx(
        0.950212931632136, rel=1e-13)
    assert hh.naive_compensator(c, 2.0, 4.0) == pytest.approx(
        0.9738670897277348, rel=1e-13)


def test_compensator_empty_and_single():
    assert hh.piecewise_compensator([], 1.0, 5.0) == 0.0
    assert hh.naive_compensator([], 1.0, 5.0) == 0.0
    one = [2.0]
    assert hh.piecewise_compensator(one, 1.5, 5.0) == pytest.approx(
        hh.naive_compensator(one, 1.5, 5.0), rel=1e-15)


def test_compensator_domain_errors():
    with pytest.raises(DomainError):
        hh.piecewise_compensator([5.0], 1.0, 5.0)  # not strictly before horizon
    with pytest.raises(DomainError):
        hh.piecewise_compensator([2.0, 2.0], 1.0, 5.0)
    with pytest.raises(DomainError):
        hh.piecewise_compensator([-0.5], 1.0, 5.0)
    with pytest.raises(DomainError):
        hh.piecewise_compensator([1.0], 0.0, 5.0)
    with pytest.raises(DomainError):
        hh.naive_compensator([1.0], 1.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.0, 9.5), max_size=8),
       st.floats(0.1, 1.2))
def test_naive_dominates_piecewise(raw, beta):
    # beta * horizon <= 12 keeps the overlap mass above float resolution, so
    # the dominance stays strict in double precision, not just in exact arithmetic
    c = np.unique(np.asarray(raw))
    pw = hh.piecewise_compensator(c, beta, 10.0)
    nv = hh.naive_compensator(c, beta, 10.0)
    if c.size <= 1:
        assert nv == pytest.approx(pw, rel=1e-14)
    else:
        assert nv > pw  # strict: overlapping tails are double counted


def anchored_kernel_integral(completions, beta, horizon):
    """Quadrature oracle: integrate exp(-beta (t - anchor(t))) over [0, T]."""
    c = np.asarray(completions, dtype=float)

    def f(t):
        i = np.searchsorted(c, t, side="left")
        return math.exp(-beta * (t - c[i - 1])) if i > 0 else 0.0

    total = 0.0
    knots = [0.0] + [float(x) for x in c] + [horizon]
    for a, b in zip(knots[:-1], knots[1:]):
        if b > a:
            total += quad(f, a, b, limit=200)[0]
    return total


def test_piecewise_compensator_matches_quadrature_randomized():
    rng = np.random.default_rng(0)
    for _ in range(100):
        horizon = rng.uniform(5.0, 20.0)
        m = int(rng.integers(0, 8))
        c = np.unique(rng.uniform(0.0, horizon * 0.95, size=m))
        beta = rng.uniform(0.2, 4.0)
        got = hh.piecewise_compensator(c, beta, horizon)
        want = anchored_kernel_integral(c, beta, horizon)
        assert got == pytest.approx(want, rel=1e-6, abs=1e-9)


# ---------------------------------------------------------------------------
# intensity

def test_intensity_matches_hand_formula():
    p = hh.ModelParams(np.array([0.1, 0.2]),
                       np.array([[0.0, 0.0], [0.3, 0.0]]),
                       ((hh.Hyperedge((0, 1)), 0.4),), 2.0, 0.5)
    s = seq_of([(0.1, 0), (0.3, 1), (0.9, 0)], 2, 2.0)
    tl = hh.build_timeline(s, p.edge_list(), p.delta)
    assert tl.for_edge(hh.Hyperedge((0, 1))).tolist() == [0.3]
    t = 1.0
    want = 0.2 + 0.3 * (math.exp(-2 * 0.9) + math.exp(-2 * 0.1)) \
        + 0.4 * math.exp(-2 * 0.7)
    assert hh.intensity(p, s, tl, 1, t) == pytest.approx(want, rel=1e-12)
    # node 0 receives no pairwise input and the same anchored boost
    want0 = 0.1 + 0.4 * math.exp(-2 * 0.7)
    assert hh.intensity(p, s, tl, 0, t) == pytest.approx(want0, rel=1e-12)


def test_intensity_excludes_cotemporal_events():
    p = hh.ModelParams(np.array([0.5, 0.5]), np.full((2, 2), 0.3), (), 1.0, 0.5)
    s = seq_of([(1.0, 0), (1.0, 1)], 2, 2.0)
    tl = hh.build_timeline(s, [], 0.5)
    # at t exactly 1.0 nothing is strictly before it
    assert hh.intensity(p, s, tl, 0, 1.0) == pytest.approx(0.5)


def test_intensity_anchor_refreshes_not_stacks():
    # two completions close together must boost by at most one weight
    p = hh.ModelParams(np.array([0.1, 0.1]), np.zeros((2, 2)),
                       ((hh.Hyperedge((0, 1)), 0.4),), 1.0, 0.5)
    s = seq_of([(1.0, 0), (1.1, 1), (1.2, 0)], 2, 3.0)
    tl = hh.build_timeline(s, p.edge_list(), p.delta)
    assert tl.for_edge(hh.Hyperedge((0, 1))).tolist() == [1.1, 1.2]
    t = 1.25
    want = 0.1 + 0.4 * math.exp(-1.0 * (t - 1.2))  # latest anchor only
    assert hh.intensity(p, s, tl, 0, t) == pytest.approx(want, rel=1e-12)
    assert hh.intensity(p, s, tl, 0, t) < 0.1 + 0.4


def test_intensity_domain_errors(canon_params, short_seq):
    tl = hh.build_timeline(short_seq, canon_params.edge_list(), canon_params.delta)
    with pytest.raises(DomainError):
        hh.intensity(canon_params, short_seq, tl, 7, 1.0)


# ---------------------------------------------------------------------------
# likelihood and cumulative compensator

def test_log_likelihood_poisson_closed_form():
    p = hh.ModelParams(np.array([1.0]), np.zeros((1, 1)), (), 1.0, 0.5)
    empty = hh.EventSequence(np.array([]), np.array([], dtype=np.int64), 1, 10.0)
    tl = hh.build_timeline(empty, [], 0.5)
    assert hh.log_likelihood(p, empty, tl) == pytest.approx(-10.0)

    p2 = hh.ModelParams(np.array([0.5]), np.zeros((1, 1)), (), 1.0, 0.5)
    s = seq_of([(1.0, 0), (3.0, 0)], 1, 10.0)
    tl2 = hh.build_timeline(s, [], 0.5)
    assert hh.log_likelihood(p2, s, tl2) == pytest.approx(2 * math.log(0.5) - 5.0)


def brute_force_loglik(params, seq, timeline):
    """Independent likelihood: public intensity at events, quadrature between."""
    point = sum(math.log(hh.intensity(params, seq, timeline, int(n), float(t)))
                for t, n in zip(seq.times, seq.nodes))
    knots = np.unique(np.concatenate(
        [[0.0, seq.horizon], seq.times]
        + [timeline.for_edge(e) for e in timeline.edges()]))

    def total(t):
        return sum(hh.intensity(params, seq, timeline, n, t)
                   for n in range(params.num_nodes))

    integral = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b > a:
            integral += quad(total, a, b, limit=200)[0]
    return point - integral


def test_log_likelihood_matches_quadrature(canon_params, short_seq):
    tl = hh.build_timeline(short_seq, canon_params.edge_list(), canon_params.delta)
    want = brute_force_loglik(canon_params, short_seq, tl)
    got = hh.log_likelihood(canon_params, short_seq, tl)
    assert got == pytest.approx(want, rel=1e-8, abs=1e-6)


def test_log_likelihood_rejects_zero_intensity():
    p = hh.ModelParams(np.array([0.0]), np.zeros((1, 1)), (), 1.0, 0.5)
    s = seq_of([(1.0, 0)], 1, 2.0)
    tl = hh.build_timeline(s, [], 0.5)
    with pytest.raises(hh.EvaluationError):
        hh.log_likelihood(p, s, tl)


def test_cumulative_compensator_consistency(canon_params, short_seq):
    tl = hh.build_timeline(short_seq, canon_params.edge_list(), canon_params.delta)
    T = short_seq.horizon
    at_T = hh.cumulative_compensator(canon_params, short_seq, tl, [T])[0]
    point = sum(math.log(hh.intensity(canon_params, short_seq, tl, int(n), float(t)))
                for t, n in zip(short_seq.times, short_seq.nodes))
    # the likelihood's integral term is exactly the compensator at the horizon
    assert point - at_T == pytest.approx(
        hh.log_likelihood(canon_params, short_seq, tl), rel=1e-10)

    ts = np.array([0.0, 7.3, 7.3, 21.0, T])
    vals = hh.cumulative_compensator(canon_params, short_seq, tl, ts)
    assert vals[0] == 0.0
    assert vals[1] == vals[2]
    assert np.all(np.diff(vals) >= 0)

    def total(t):
        return sum(hh.intensity(canon_params, short_seq, tl, n, t)
                   for n in range(canon_params.num_nodes))

    knots = np.unique(np.concatenate(
        [[0.0, 21.0], short_seq.times[short_seq.times < 21.0],
         tl.for_edge(hh.Hyperedge((0, 1)))[
             tl.for_edge(hh.Hyperedge((0, 1))) < 21.0]]))
    want = sum(quad(total, a, b, limit=200)[0]
               for a, b in zip(knots[:-1], knots[1:]))
    assert vals[3] == pytest.approx(want, rel=1e-7)


def test_cumulative_compensator_rejects_bad_queries(canon_params, short_seq):
    tl = hh.build_timeline(short_seq, canon_params.edge_list(), canon_params.delta)
    with pytest.raises(DomainError):
        hh.cumulative_compensator(canon_params, short_seq, tl, [3.0, 1.0])
    with pytest.raises(DomainError):
        hh.cumulative_compensator(canon_params, short_seq, tl, [-1.0])
    with pytest.raises(DomainError):
        hh.cumulative_compensator(canon_params, short_seq, tl,
                                  [short_seq.horizon + 1.0])
