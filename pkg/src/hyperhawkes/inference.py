"""Closed-form EM for the model, with optional L1 shrinkage on hyperedge weights.

The E-step attributes each event softly to its possible causes (background,
each prior event through the pairwise kernel, each containing hyperedge
through its anchor); the M-step divides attributed mass by the matching
integral of the kernel.  Anchors depend only on the data and ``delta``, so the
completion timelines and the per-event anchor kernels are precomputed once per
fit and shared across iterations.

Two implementations coexist on purpose: :func:`e_step`/:func:`m_step` are the
plain, materialized reference used by tests and small-scale inspection, and
``_em_pass`` is the compiled streaming pass used by :func:`fit`.  Tests pin
them to each other.
"""
from __future__ import annotations

import math
import time as _time
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numba import njit

from .model import (
    AnchorTimeline,
    DomainError,
    EvaluationError,
    EventSequence,
    Hyperedge,
    ModelParams,
    _edge_multiplicity,
    build_timeline,
    naive_compensator,
    piecewise_compensator,
)

__all__ = [
    "FitConfig",
    "FitResult",
    "Responsibilities",
    "e_step",
    "m_step",
    "fit",
    "em_update",
]


@dataclass(frozen=True)
class FitConfig:
    """EM controls.

    ``compensator_mode`` switches the hyperedge M-step denominator between the
    exact piecewise integral and the biased naive one (kept to demonstrate the
    downward bias).  ``compensator_multiplicity`` scales that denominator by
    the edge size (``per_member``, the default and the convention consistent
    with the likelihood) or not at all (``single``).  Initial weights are
    ``init_alpha_pw``/``init_alpha_he`` everywhere and baselines start at the
    per-node empirical rate; ``init_jitter`` multiplies every initial value by
    ``1 + U(-j, +j)`` drawn from ``init_seed``.
    """

    max_iters: int = 80
    tol: float = 1e-6
    l1_penalty: float = 0.0
    compensator_mode: str = "piecewise"
    compensator_multiplicity: str = "per_member"
    init_seed: int = 0
    init_jitter: float = 0.0
    init_alpha_pw: float = 0.1
    init_alpha_he: float = 0.1

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if self.tol < 0:
            raise DomainError("tol must be >= 0")
        if self.l1_penalty < 0:
            raise DomainError("l1_penalty must be >= 0")
        if self.compensator_mode not in ("piecewise", "naive"):
            raise DomainError(f"unknown compensator_mode {self.compensator_mode!r}")
        if self.compensator_multiplicity not in ("per_member", "single"):
            raise DomainError(
                f"unknown compensator_multiplicity {self.compensator_multiplicity!r}")
        if not (0.0 <= self.init_jitter < 1.0):
            raise DomainError("init_jitter must lie in [0, 1)")


@dataclass(frozen=True)
class Responsibilities:
    """Per-event soft attributions.

    ``p_pw[i]`` maps prior-event index -> probability (entries with zero
    pairwise weight are omitted); ``p_he[i]`` maps hyperedge index (position in
    the fitted candidate list) -> probability.  For every event the stored
    entries sum to 1 with ``p_bg[i]``.
    """

    p_bg: np.ndarray
    p_pw: tuple[dict[int, float], ...]
    p_he: tuple[dict[int, float], ...]


def _event_cause_rates(params, seq, timeline, i):
    """Raw cause rates for event i: (background, {j: pairwise}, {e: hyperedge})."""
    ti = float(seq.times[i])
    ni = int(seq.nodes[i])
    beta = params.beta
    bg = float(params.mu[ni])
    pw = {}
    prior = np.flatnonzero(seq.times < ti)
    if prior.size:
        vals = params.alpha_pw[ni, seq.nodes[prior]] * np.exp(-beta * (ti - seq.times[prior]))
        for j, v in zip(prior, vals):
            if v > 0.0:
                pw[int(j)] = float(v)
    he = {}
    for k, (e, w) in enumerate(params.hyperedges):
        if w == 0.0 or ni not in e:
            continue
        c = timeline.completions[e]
        idx = int(np.searchsorted(c, ti, side="left"))
        if idx > 0:
            he[k] = float(w * math.exp(-beta * (ti - c[idx - 1])))
    return bg, pw, he


def e_step(params: ModelParams, seq: EventSequence, timeline: AnchorTimeline) -> Responsibilities:
    """Materialized responsibilities for every event (reference implementation).

    Memory grows with events squared; intended for inspection and tests, not
    for the fit loop (which streams the same quantities).
    """
    p_bg = np.empty(len(seq))
    p_pw = []
    p_he = []
    for i in range(len(seq)):
        bg, pw, he = _event_cause_rates(params, seq, timeline, i)
        lam = bg + sum(pw.values()) + sum(he.values())
        if lam <= 0.0 or not math.isfinite(lam):
            raise EvaluationError(
                f"nonpositive intensity {lam!r} at event {i} "
                f"(t={seq.times[i]!r}, node {int(seq.nodes[i])})")
        p_bg[i] = bg / lam
        p_pw.append({j: v / lam for j, v in pw.items()})
        p_he.append({k: v / lam for k, v in he.items()})
    return Responsibilities(p_bg, tuple(p_pw), tuple(p_he))


def _pairwise_denominators(seq: EventSequence, beta: float) -> np.ndarray:
    """den[j] = sum over events on node j of (1 - exp(-beta (T - t_k))) / beta."""
    den = np.zeros(seq.num_nodes)
    if len(seq):
        g = -np.expm1(-beta * (seq.horizon - seq.times)) / beta
        np.add.at(den, seq.nodes, g)
    return den


def _edge_denominators(edges, timeline, beta, horizon, cfg) -> np.ndarray:
    comp_fn = piecewise_compensator if cfg.compensator_mode == "piecewise" else naive_compensator
    den = np.empty(len(edges))
    for k, e in enumerate(edges):
        mult = _edge_multiplicity(e, cfg.compensator_multiplicity)
        den[k] = mult * comp_fn(timeline.completions[e], beta, horizon)
    return den


def m_step(resp: Responsibilities, seq: EventSequence, timeline: AnchorTimeline,
           beta: float, cfg: FitConfig = FitConfig()) -> ModelParams:
    """Closed-form maximizers given responsibilities.

    Baselines: attributed background mass over the horizon.  Pairwise weights:
    attributed mass from source j to target n over the summed kernel integral
    of j's events.  Hyperedge weights: attributed mass over the (possibly
    naive, possibly per-member-scaled) compensator plus the L1 penalty.
    Sources with no events get zero outgoing weight (with a warning); edges
    with an empty compensator get weight zero.
    """
    n_nodes = seq.num_nodes
    T = seq.horizon
    edges = timeline.edges()

    bg = np.zeros(n_nodes)
    np.add.at(bg, seq.nodes, resp.p_bg)
    mu = bg / T

    num_pw = np.zeros((n_nodes, n_nodes))
    for i, pw in enumerate(resp.p_pw):
        ni = int(seq.nodes[i])
        for j, pval in pw.items():
            num_pw[ni, seq.nodes[j]] += pval
    den_pw = _pairwise_denominators(seq, beta)
    empty = den_pw == 0.0
    if np.any(empty & (num_pw.sum(axis=0) > 0)):
        warnings.warn("source node with no events: outgoing pairwise weights set to 0")
    alpha = np.divide(num_pw, den_pw[None, :], out=np.zeros_like(num_pw),
                      where=den_pw[None, :] > 0.0)

    num_he = np.zeros(len(edges))
    for he in resp.p_he:
        for k, pval in he.items():
            num_he[k] += pval
    den_he = _edge_denominators(edges, timeline, beta, T, cfg)
    w_he = np.divide(num_he, den_he + cfg.l1_penalty,
                     out=np.zeros_like(num_he), where=den_he > 0.0)

    return ModelParams(mu, alpha, tuple(zip(edges, w_he)), beta, timeline.delta)


# ---------------------------------------------------------------------------
# streaming pass (compiled)

@njit(cache=True, nogil=True)
def _em_pass(times, nodes, gap_decay, mu, alpha, he_w,
             he_act):  # pragma: no cover - exercised via fit
    n = times.shape[0]
    n_nodes = mu.shape[0]
    n_edges = he_w.shape[0]
    dcount = np.zeros(n_nodes)
    bg = np.zeros(n_nodes)
    num_pw = np.zeros((n_nodes, n_nodes))
    num_he = np.zeros(n_edges)
    he_row = np.empty(n_edges)
    sum_log = 0.0
    prod = 1.0
    n_prod = 0
    bad = -1
    p_len = 0
    for i in range(n):
        if i > 0:
            # events sharing a timestamp enter the decayed counts only once
            # time strictly advances: nothing excites its cotemporal peers
            p_len += 1
            if times[i] > times[i - 1]:
                for q in range(i - p_len, i):
                    dcount[nodes[q]] += 1.0
                p_len = 0
                w = gap_decay[i]
                for j in range(n_nodes):
                    dcount[j] *= w
        ni = nodes[i]
        li = mu[ni]
        for j in range(n_nodes):
            li += alpha[ni, j] * dcount[j]
        for e in range(n_edges):
            v = he_w[e] * he_act[i, e]
            he_row[e] = v
            li += v
        if not (li > 0.0 and np.isfinite(li)):
            bad = i
            break
        # log taken per block of factors: same sum, far fewer libm calls
        prod *= li
        n_prod += 1
        if n_prod == 16 or prod < 1e-260 or prod > 1e260:
            sum_log += np.log(prod)
            prod = 1.0
            n_prod = 0
        inv = 1.0 / li
        bg[ni] += mu[ni] * inv
        for j in range(n_nodes):
            num_pw[ni, j] += alpha[ni, j] * dcount[j] * inv
        for e in range(n_edges):
            num_he[e] += he_row[e] * inv
    if n_prod > 0:
        sum_log += np.log(prod)
    return bg, num_pw, num_he, sum_log, bad


class _FitContext:
    """Everything that is fixed across EM iterations for one (seq, candidates, beta, delta)."""

    def __init__(self, seq: EventSequence, candidates: Sequence[Hyperedge],
                 beta: float, delta: float, cfg: FitConfig):
        if not (math.isfinite(beta) and beta > 0):
            raise DomainError("beta must be finite and > 0")
        edges = []
        seen = set()
        for e in candidates:
            e = e if isinstance(e, Hyperedge) else Hyperedge(e)
            if e.members in seen:
                raise DomainError(f"duplicate candidate hyperedge {e.members}")
            if e.members[-1] >= seq.num_nodes:
                raise DomainError(f"candidate {e.members} references node >= {seq.num_nodes}")
            seen.add(e.members)
            edges.append(e)
        self.seq = seq
        self.cfg = cfg
        self.beta = float(beta)
        self.edges = edges
        self.timeline = build_timeline(seq, edges, delta)

        times = seq.times
        self.gap_decay = np.ones(len(seq))
        if len(seq) > 1:
            self.gap_decay[1:] = np.exp(-beta * np.diff(times))
        self.den_pw = _pairwise_denominators(seq, beta)
        self.den_he = _edge_denominators(edges, self.timeline, beta, seq.horizon, cfg)
        # exact piecewise integrals scaled per member: the likelihood's own
        # integral term, regardless of the (possibly naive) M-step denominator
        exact_cfg = replace(cfg, compensator_mode="piecewise")
        self.int_he_exact = _edge_denominators(edges, self.timeline, beta, seq.horizon,
                                               exact_cfg)

        # active anchor kernel per (event, edge): exp(-beta (t_i - anchor)) when
        # the edge is anchored and the event's node is a member, else 0
        self.he_act = np.zeros((len(seq), len(edges)))
        for k, e in enumerate(edges):
            c = self.timeline.completions[e]
            if c.size == 0:
                continue
            idx = np.searchsorted(c, times, side="left")
            sel = (idx > 0) & np.isin(seq.nodes, e.members)
            self.he_act[sel, k] = np.exp(-beta * (times[sel] - c[idx[sel] - 1]))

    def initial_params(self) -> ModelParams:
        cfg = self.cfg
        seq = self.seq
        counts = np.bincount(seq.nodes, minlength=seq.num_nodes).astype(float)
        mu0 = counts / seq.horizon
        alpha0 = np.full((seq.num_nodes, seq.num_nodes), cfg.init_alpha_pw)
        w0 = np.full(len(self.edges), cfg.init_alpha_he)
        if cfg.init_jitter > 0.0:
            rng = np.random.default_rng(cfg.init_seed)
            j = cfg.init_jitter
            mu0 = mu0 * (1.0 + rng.uniform(-j, j, mu0.shape))
            alpha0 = alpha0 * (1.0 + rng.uniform(-j, j, alpha0.shape))
            w0 = w0 * (1.0 + rng.uniform(-j, j, w0.shape))
        return ModelParams(mu0, alpha0, tuple(zip(self.edges, w0)),
                           self.beta, self.timeline.delta)

    def sweep(self, params: ModelParams):
        """One streamed E-pass: sufficient statistics plus the log-likelihood at params."""
        he_w = params.edge_weights()
        bg, num_pw, num_he, sum_log, bad = _em_pass(
            self.seq.times, self.seq.nodes, self.gap_decay,
            params.mu, params.alpha_pw, he_w, self.he_act)
        if bad >= 0:
            raise EvaluationError(
                f"nonpositive intensity at event {bad} (t={self.seq.times[bad]!r}, "
                f"node {int(self.seq.nodes[bad])})")
        integral = float(params.mu.sum()) * self.seq.horizon
        integral += float(params.alpha_pw.sum(axis=0) @ self.den_pw)
        integral += float(he_w @ self.int_he_exact)
        return (bg, num_pw, num_he), sum_log - integral

    def update(self, stats) -> ModelParams:
        bg, num_pw, num_he = stats
        mu = bg / self.seq.horizon
        alpha = np.divide(num_pw, self.den_pw[None, :], out=np.zeros_like(num_pw),
                          where=self.den_pw[None, :] > 0.0)
        w_he = np.divide(num_he, self.den_he + self.cfg.l1_penalty,
                         out=np.zeros_like(num_he), where=self.den_he > 0.0)
        return ModelParams(mu, alpha, tuple(zip(self.edges, w_he)),
                           self.beta, self.timeline.delta)


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters plus the trace of the run that produced them.

    ``loglik_trace[k]`` is the exact log-likelihood at the parameters entering
    iteration ``k``; the last entry is evaluated at the returned parameters.
    ``penalized_trace`` subtracts the L1 term and is what EM ascends.
    """

    params: ModelParams
    loglik: float
    loglik_trace: np.ndarray
    penalized_trace: np.ndarray
    n_iter: int
    converged: bool
    iter_seconds: np.ndarray
    config: FitConfig
    n_events: int
    horizon: float
    num_nodes: int

    def fingerprint(self) -> tuple:
        return (self.n_events, self.horizon, self.num_nodes,
                self.params.beta, self.params.delta)


def fit(seq: EventSequence, candidates: Sequence[Hyperedge], beta: float,
        delta: float, cfg: FitConfig = FitConfig(),
        init_params: ModelParams | None = None) -> FitResult:
    """Run EM to convergence or the iteration budget.

    Anchors are computed once and reused across iterations.  Stops when the
    absolute log-likelihood change falls below ``cfg.tol``.  ``init_params``
    (e.g. a warm start along a penalty path) overrides the default seeded
    initialization; its beta/delta must match.
    """
    ctx = _FitContext(seq, candidates, beta, delta, cfg)
    if init_params is not None:
        if init_params.beta != ctx.beta or init_params.delta != ctx.timeline.delta:
            raise DomainError("init_params beta/delta differ from the fit's")
        if [e.members for e in init_params.edge_list()] != [e.members for e in ctx.edges]:
            raise DomainError("init_params hyperedges differ from the candidates")
        params = init_params
    else:
        params = ctx.initial_params()

    trace: list[float] = []
    pen_trace: list[float] = []
    secs: list[float] = []
    converged = False
    n_iter = 0
    prev_ll = None
    for k in range(cfg.max_iters + 1):
        t0 = _time.perf_counter()
        stats, ll = ctx.sweep(params)
        if not math.isfinite(ll):
            raise EvaluationError(f"non-finite log-likelihood at iteration {k}")
        trace.append(ll)
        pen_trace.append(ll - cfg.l1_penalty * float(params.edge_weights().sum()))
        if prev_ll is not None and abs(ll - prev_ll) < cfg.tol:
            converged = True
            secs.append(_time.perf_counter() - t0)
            break
        prev_ll = ll
        if k == cfg.max_iters:  # budget exhausted; final entry evaluates the result
            secs.append(_time.perf_counter() - t0)
            break
        params = ctx.update(stats)
        n_iter += 1
        secs.append(_time.perf_counter() - t0)

    return FitResult(
        params=params, loglik=trace[-1],
        loglik_trace=np.asarray(trace), penalized_trace=np.asarray(pen_trace),
        n_iter=n_iter, converged=converged, iter_seconds=np.asarray(secs),
        config=cfg, n_events=len(seq), horizon=seq.horizon, num_nodes=seq.num_nodes,
    )


def em_update(params: ModelParams, seq: EventSequence, timeline: AnchorTimeline,
              cfg: FitConfig = FitConfig()):
    """One (E, M) update from ``params``; returns (new params, log-likelihood at params)."""
    ctx = _FitContext(seq, timeline.edges(), params.beta, timeline.delta, cfg)
    stats, ll = ctx.sweep(params)
    return ctx.update(stats), ll
