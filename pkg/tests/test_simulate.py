"""Simulator: determinism, marginal rates, completion tracking, rescaling."""
import numpy as np
import pytest
from scipy import stats as sstats

import hyperhawkes as hh
from hyperhawkes.model import DomainError


def test_sim_config_validation(canon_params):
    with pytest.raises(DomainError):
        hh.SimConfig(params=canon_params, horizon=0.0, seed=1)
    with pytest.raises(DomainError):
        hh.SimConfig(params=canon_params, horizon=10.0, seed=1, event_cap=0)


def test_determinism(canon_params):
    a = hh.simulate(hh.SimConfig(params=canon_params, horizon=200.0, seed=9))
    b = hh.simulate(hh.SimConfig(params=canon_params, horizon=200.0, seed=9))
    c = hh.simulate(hh.SimConfig(params=canon_params, horizon=200.0, seed=10))
    assert np.array_equal(a.seq.times, b.seq.times)
    assert np.array_equal(a.seq.nodes, b.seq.nodes)
    assert not np.array_equal(a.seq.times, c.seq.times)


def test_poisson_nodes_have_poisson_counts():
    p = hh.ModelParams(np.array([2.0]), np.zeros((1, 1)), (), 1.0, 0.5)
    res = hh.simulate(hh.SimConfig(params=p, horizon=2000.0, seed=4))
    n = len(res.seq)
    expected = 2.0 * 2000.0
    assert abs(n - expected) < 3 * np.sqrt(expected)
    gaps = np.diff(np.concatenate([[0.0], res.seq.times]))
    ks = sstats.kstest(gaps, "expon", args=(0.0, 0.5))
    assert ks.pvalue > 0.01


def test_self_exciting_mean_count_matches_branching_theory():
    # stationary rate mu / (1 - alpha/beta); alpha/beta = 0.5 doubles the rate
    p = hh.ModelParams(np.array([1.0]), np.array([[0.5]]), (), 1.0, 0.5)
    counts = [len(hh.simulate(hh.SimConfig(params=p, horizon=500.0, seed=s)).seq)
              for s in range(8)]
    mean = np.mean(counts)
    se = np.std(counts, ddof=1) / np.sqrt(len(counts))
    assert abs(mean - 1000.0) < 4 * se + 10


def test_event_cap_truncates(canon_params):
    res = hh.simulate(hh.SimConfig(params=canon_params, horizon=1e6, seed=0,
                                   event_cap=50))
    assert res.cap_hit
    assert len(res.seq) == 50
    # the sequence's window closes just after the last event, keeping it valid
    assert res.seq.horizon > res.seq.times[-1]
    assert res.seq.horizon < res.seq.times[-1] + 1e-6


def test_simulate_batch_order_and_parity(canon_params):
    cfgs = [hh.SimConfig(params=canon_params, horizon=100.0, seed=s)
            for s in (3, 1, 4, 1_5)]
    seq_serial = hh.simulate_batch(cfgs, workers=1)
    seq_pool = hh.simulate_batch(cfgs, workers=3)
    for a, b in zip(seq_serial, seq_pool):
        assert np.array_equal(a.seq.times, b.seq.times)
        assert np.array_equal(a.seq.nodes, b.seq.nodes)
    assert np.array_equal(seq_serial[0].seq.times,
                          hh.simulate(cfgs[0]).seq.times)


def test_simulate_batch_reports_failing_run(canon_params, monkeypatch):
    import importlib
    sim_mod = importlib.import_module("hyperhawkes.simulate")
    real = hh.simulate

    def flaky(cfg):
        if cfg.seed == 7:
            raise ValueError("boom")
        return real(cfg)

    monkeypatch.setattr(sim_mod, "simulate", flaky)
    cfgs = [hh.SimConfig(params=canon_params, horizon=10.0, seed=s)
            for s in (1, 7, 2)]
    with pytest.raises(RuntimeError, match="run 1 failed"):
        hh.simulate_batch(cfgs, workers=2)


def test_anchor_tracker_matches_offline_completions(canon_params):
    seq = hh.simulate(hh.SimConfig(params=canon_params, horizon=150.0, seed=12)).seq
    edges = [hh.Hyperedge((0, 1)), hh.Hyperedge((1, 2)), hh.Hyperedge((0, 1, 2))]
    tracker = hh.AnchorTracker(edges, 0.5, seq.num_nodes)
    for t, n in zip(seq.times, seq.nodes):
        tracker.observe(float(t), int(n))
    for k, e in enumerate(edges):
        want = hh.compute_completions(seq, e, 0.5)
        assert np.asarray(tracker.completions[k]).tolist() == pytest.approx(
            want.tolist())


def test_simulated_sequence_respects_horizon(canon_params):
    res = hh.simulate(hh.SimConfig(params=canon_params, horizon=77.0, seed=2))
    assert not res.cap_hit
    assert res.seq.horizon == 77.0
    assert res.seq.times[-1] <= 77.0


def test_time_rescaling_smoke(canon_params):
    # full acceptance runs 3 fixtures at 5000+ events; this is the cheap guard
    seq = hh.simulate(hh.SimConfig(params=canon_params, horizon=400.0, seed=21)).seq
    tl = hh.build_timeline(seq, canon_params.edge_list(), canon_params.delta)
    lam = hh.cumulative_compensator(canon_params, seq, tl, seq.times)
    gaps = np.diff(np.concatenate([[0.0], lam]))
    ks = sstats.kstest(gaps, "expon")
    assert ks.pvalue > 0.005
