"""Core types and intensity machinery for hyperedge-triggered Hawkes processes.

A process on ``N`` nodes where each node's conditional intensity is the sum of
a constant baseline, pairwise exponential excitation from every past event,
and one group term per hyperedge the node belongs to.  A hyperedge's group
term is anchored at its latest *pattern completion*: the most recent instant
at which every member of the hyperedge fired within a trailing window of
length ``delta``.  New completions supersede old anchors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "EvaluationError",
    "Event",
    "EventSequence",
    "Hyperedge",
    "ModelParams",
    "AnchorTimeline",
    "as_event_sequence",
    "kernel",
    "compute_completions",
    "build_timeline",
    "anchor_at",
    "intensity",
    "piecewise_compensator",
    "naive_compensator",
    "log_likelihood",
    "cumulative_compensator",
]


class DomainError(ValueError):
    """An argument lies outside an operation's domain."""


class EvaluationError(RuntimeError):
    """A numerical evaluation failed (e.g. zero intensity at an observed event)."""


@dataclass(frozen=True)
class Event:
    """A single event: a timestamp and the node it occurred on."""

    time: float
    node: int


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EventSequence:
    """An ordered record of events on ``[0, horizon]`` over ``num_nodes`` nodes.

    Events are kept columnar (``times``, ``nodes``) and sorted by
    ``(time, node, insertion index)`` so that simultaneous events have a
    deterministic order.
    """

    times: np.ndarray
    nodes: np.ndarray
    num_nodes: int
    horizon: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64).ravel()
        nodes = np.asarray(self.nodes, dtype=np.int64).ravel()
        if times.shape != nodes.shape:
            raise DomainError("times and nodes must have equal length")
        if not (isinstance(self.num_nodes, (int, np.integer)) and self.num_nodes >= 1):
            raise DomainError("num_nodes must be a positive integer")
        horizon = float(self.horizon)
        if not (math.isfinite(horizon) and horizon > 0):
            raise DomainError("horizon must be finite and > 0")
        if times.size:
            if not np.all(np.isfinite(times)):
                raise DomainError("event times must be finite")
            if times.min() < 0.0 or times.max() > horizon:
                bad = int(np.argmax((times < 0.0) | (times > horizon)))
                raise DomainError(
                    f"event {bad} at t={times[bad]!r} outside [0, {horizon!r}]"
                )
            if nodes.min() < 0 or nodes.max() >= self.num_nodes:
                bad = int(np.argmax((nodes < 0) | (nodes >= self.num_nodes)))
                raise DomainError(
                    f"event {bad} has node {nodes[bad]} outside [0, {self.num_nodes})"
                )
            # stable deterministic order: time, then node, then insertion index
            order = np.lexsort((np.arange(times.size), nodes, times))
            times = times[order]
            nodes = nodes[order]
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "nodes", _readonly(nodes))
        object.__setattr__(self, "num_nodes", int(self.num_nodes))
        object.__setattr__(self, "horizon", horizon)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def events(self) -> list[Event]:
        return [Event(float(t), int(n)) for t, n in zip(self.times, self.nodes)]


def as_event_sequence(data, num_nodes=None, horizon=None) -> EventSequence:
    """Coerce supported inputs to an :class:`EventSequence`.

    Accepts an existing sequence (returned as-is), a ``(times, nodes)`` pair of
    arrays, or an iterable of ``Event`` / ``(time, node)`` pairs.  ``num_nodes``
    and ``horizon`` are required unless ``data`` already carries them.
    """
    if isinstance(data, EventSequence):
        return data
    if isinstance(data, tuple) and len(data) == 2 and np.ndim(data[0]) == 1:
        times, nodes = data
    else:
        items = list(data)
        times = [e.time if isinstance(e, Event) else e[0] for e in items]
        nodes = [e.node if isinstance(e, Event) else e[1] for e in items]
    if num_nodes is None or horizon is None:
        raise DomainError("num_nodes and horizon are required for raw event data")
    return EventSequence(np.asarray(times, dtype=float),
                         np.asarray(nodes, dtype=np.int64),
                         int(num_nodes), float(horizon))


@dataclass(frozen=True)
class Hyperedge:
    """A set of K >= 2 nodes whose joint firing pattern can trigger excitation."""

    members: tuple[int, ...]

    def __init__(self, members: Iterable[int]):
        mem = tuple(int(m) for m in members)
        if len(set(mem)) != len(mem):
            raise DomainError(f"hyperedge members contain duplicates: {mem}")
        if len(mem) < 2:
            raise DomainError(f"hyperedge needs at least 2 members, got {mem}")
        if any(m < 0 for m in mem):
            raise DomainError(f"hyperedge members must be nonnegative: {mem}")
        object.__setattr__(self, "members", tuple(sorted(mem)))

    @property
    def size(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, node: int) -> bool:
        return node in self.members


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the process.

    ``alpha_pw[n, j]`` is the pairwise excitation an event on node ``j`` exerts
    on node ``n``.  ``hyperedges`` is a sequence of ``(Hyperedge, weight)``
    pairs.  A single decay rate ``beta`` is shared by all kernels and ``delta``
    is the completion window length.
    """

    mu: np.ndarray
    alpha_pw: np.ndarray
    hyperedges: tuple[tuple[Hyperedge, float], ...]
    beta: float
    delta: float

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64).ravel()
        n = mu.size
        alpha = np.asarray(self.alpha_pw, dtype=np.float64)
        if alpha.shape != (n, n):
            raise DomainError(f"alpha_pw must be ({n}, {n}), got {alpha.shape}")
        if n == 0:
            raise DomainError("at least one node is required")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise DomainError("baseline rates must be finite and >= 0")
        if np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
            raise DomainError("pairwise weights must be finite and >= 0")
        edges = []
        seen = set()
        for item in self.hyperedges:
            e, w = item
            if not isinstance(e, Hyperedge):
                e = Hyperedge(e)
            w = float(w)
            if w < 0 or not math.isfinite(w):
                raise DomainError(f"hyperedge weight must be finite and >= 0, got {w}")
            if e.members[-1] >= n:
                raise DomainError(f"hyperedge {e.members} references node >= {n}")
            if e.members in seen:
                raise DomainError(f"duplicate hyperedge {e.members}")
            seen.add(e.members)
            edges.append((e, w))
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError("beta must be finite and > 0")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DomainError("delta must be finite and > 0")
        object.__setattr__(self, "mu", _readonly(mu))
        object.__setattr__(self, "alpha_pw", _readonly(alpha))
        object.__setattr__(self, "hyperedges", tuple(edges))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def num_nodes(self) -> int:
        return int(self.mu.size)

    def edge_list(self) -> list[Hyperedge]:
        return [e for e, _ in self.hyperedges]

    def edge_weights(self) -> np.ndarray:
        return np.array([w for _, w in self.hyperedges], dtype=float)

    def replace_weights(self, mu=None, alpha_pw=None, edge_weights=None) -> "ModelParams":
        """New params with some weight blocks swapped out; structure unchanged."""
        w = self.edge_weights() if edge_weights is None else np.asarray(edge_weights, float)
        edges = tuple((e, float(wk)) for (e, _), wk in zip(self.hyperedges, w))
        return ModelParams(
            self.mu if mu is None else mu,
            self.alpha_pw if alpha_pw is None else alpha_pw,
            edges, self.beta, self.delta,
        )


@dataclass(frozen=True)
class AnchorTimeline:
    """Per-hyperedge completion times, strictly increasing, for a fixed delta."""

    delta: float
    completions: Mapping[Hyperedge, np.ndarray]

    def __post_init__(self):
        comp = {}
        for e, c in dict(self.completions).items():
            c = np.asarray(c, dtype=np.float64)
            if c.size > 1 and np.any(np.diff(c) <= 0):
                raise DomainError(f"completions for {e.members} not strictly increasing")
            comp[e] = _readonly(c)
        object.__setattr__(self, "completions", comp)
        object.__setattr__(self, "delta", float(self.delta))

    def edges(self) -> list[Hyperedge]:
        return list(self.completions)

    def for_edge(self, edge: Hyperedge) -> np.ndarray:
        return self.completions[edge]


# ---------------------------------------------------------------------------
# kernels and completions

def kernel(tau, beta: float):
    """Exponential decay kernel ``exp(-beta * tau)`` for elapsed time tau >= 0."""
    tau = np.asarray(tau, dtype=np.float64)
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError("beta must be finite and > 0")
    if np.any(tau < 0):
        raise DomainError("kernel requires tau >= 0")
    out = np.exp(-beta * tau)
    return float(out) if out.ndim == 0 else out


def compute_completions(seq: EventSequence, edge: Hyperedge, delta: float) -> np.ndarray:
    """All pattern-completion times of ``edge`` within the sequence.

    A completion occurs at a member event time ``t`` when every member of the
    hyperedge has fired at least once in the closed window ``[t - delta, t]``
    (the event at ``t`` itself counts).  Repeat completions while the pattern
    keeps holding are recorded; duplicates at one timestamp are collapsed.
    Events sharing a timestamp are processed in sequence order, so an
    earlier-ordered simultaneous event is visible to a later one.
    """
    if not isinstance(edge, Hyperedge):
        edge = Hyperedge(edge)
    if not (math.isfinite(delta) and delta > 0):
        raise DomainError("delta must be finite and > 0")
    if edge.members[-1] >= seq.num_nodes:
        raise DomainError(f"hyperedge {edge.members} references node >= {seq.num_nodes}")
    mask = np.isin(seq.nodes, edge.members)
    times = seq.times[mask]
    nodes = seq.nodes[mask]
    last = {m: -math.inf for m in edge.members}
    out: list[float] = []
    for t, nd in zip(times, nodes):
        last[int(nd)] = float(t)
        if min(last.values()) >= t - delta:
            if not out or out[-1] < t:
                out.append(float(t))
    return np.asarray(out, dtype=np.float64)


def build_timeline(seq: EventSequence, edges: Sequence[Hyperedge], delta: float) -> AnchorTimeline:
    """Completion timelines for every hyperedge, computed once per (seq, delta)."""
    comp = {}
    for e in edges:
        if not isinstance(e, Hyperedge):
            e = Hyperedge(e)
        comp[e] = compute_completions(seq, e, delta)
    return AnchorTimeline(delta, comp)


def anchor_at(timeline: AnchorTimeline, edge: Hyperedge, t: float):
    """Latest completion of ``edge`` strictly before ``t``; None when there is none."""
    c = timeline.completions[edge]
    i = int(np.searchsorted(c, t, side="left"))
    return float(c[i - 1]) if i > 0 else None


# ---------------------------------------------------------------------------
# intensity and compensators

def _edge_contribution(params, timeline, node, t):
    total = 0.0
    for e, w in params.hyperedges:
        if w == 0.0 or node not in e:
            continue
        a = anchor_at(timeline, e, t)
        if a is not None:
            total += w * math.exp(-params.beta * (t - a))
    return total


def intensity(params: ModelParams, seq: EventSequence, timeline: AnchorTimeline,
              node: int, t: float) -> float:
    """Conditional intensity of ``node`` at time ``t`` given the history in ``seq``.

    Only events strictly before ``t`` excite; a hyperedge contributes through
    its latest completion strictly before ``t``.
    """
    if not (0 <= node < params.num_nodes):
        raise DomainError(f"node {node} outside [0, {params.num_nodes})")
    if params.num_nodes < seq.num_nodes:
        raise DomainError("params cover fewer nodes than the sequence")
    prior = seq.times < t
    val = float(params.mu[node])
    if np.any(prior):
        tau = t - seq.times[prior]
        val += float(np.sum(params.alpha_pw[node, seq.nodes[prior]] * np.exp(-params.beta * tau)))
    val += _edge_contribution(params, timeline, node, t)
    return val


def _check_completions(completions, beta, horizon) -> np.ndarray:
    c = np.asarray(completions, dtype=np.float64).ravel()
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError("beta must be finite and > 0")
    if not (math.isfinite(horizon) and horizon > 0):
        raise DomainError("horizon must be finite and > 0")
    if c.size:
        if np.any(np.diff(c) <= 0):
            raise DomainError("completion times must be strictly increasing")
        if c[-1] >= horizon:
            raise DomainError(f"completion at t={c[-1]!r} not strictly before horizon {horizon!r}")
        if c[0] < 0:
            raise DomainError("completion times must be >= 0")
    return c


def piecewise_compensator(completions, beta: float, horizon: float) -> float:
    """Integral of the anchored kernel over ``[0, horizon]`` with supersession.

    Each completion's kernel integrates only up to the next completion (or the
    horizon for the last one): sum over k of ``(1 - exp(-beta * g_k)) / beta``
    where ``g_k`` is the gap to the next anchor.  Zero when there are no
    completions.
    """
    c = _check_completions(completions, beta, horizon)
    if c.size == 0:
        return 0.0
    gaps = np.diff(np.append(c, horizon))
    return float(np.sum(-np.expm1(-beta * gaps)) / beta)


def naive_compensator(completions, beta: float, horizon: float) -> float:
    """Biased variant: every completion's kernel integrates to the horizon.

    Double-counts overlap whenever two or more completions exist, so it is
    always >= the piecewise value (equality iff fewer than two completions).
    Retained only to demonstrate the downward weight bias it induces.
    """
    c = _check_completions(completions, beta, horizon)
    if c.size == 0:
        return 0.0
    return float(np.sum(-np.expm1(-beta * (horizon - c))) / beta)


def _edge_multiplicity(edge: Hyperedge, multiplicity: str) -> int:
    if multiplicity == "per_member":
        return edge.size
    if multiplicity == "single":
        return 1
    raise DomainError(f"multiplicity must be 'per_member' or 'single', got {multiplicity!r}")


class _AnchorCursor:
    """Walks a completion list in event order, exposing the anchor strictly before t."""

    __slots__ = ("c", "i")

    def __init__(self, completions: np.ndarray):
        self.c = completions
        self.i = 0

    def anchor_before(self, t: float):
        c = self.c
        i = self.i
        while i < c.size and c[i] < t:
            i += 1
        self.i = i
        return c[i - 1] if i > 0 else None


def _iter_event_intensities(params, seq, timeline):
    """Yield lambda_{n_i}(t_i) for every event, in order, via O(n*N) recursion.

    Maintains per-source decayed counts D[j] = sum over events k with t_k < t
    of exp(-beta (t - t_k)), with simultaneous events held out until time
    strictly advances (an event never excites itself or its cotemporal peers).
    """
    if params.num_nodes < seq.num_nodes:
        raise DomainError("params cover fewer nodes than the sequence")
    beta = params.beta
    times = seq.times
    nodes = seq.nodes
    n = times.size
    dcount = np.zeros(params.num_nodes)
    cursors = [(_AnchorCursor(timeline.completions[e]), e, w)
               for e, w in params.hyperedges]
    member_sets = [set(e.members) for e, _ in params.hyperedges]
    plateau: list[int] = []
    for i in range(n):
        if i > 0:
            plateau.append(i - 1)
            if times[i] > times[i - 1]:
                for q in plateau:
                    dcount[nodes[q]] += 1.0
                plateau.clear()
                dcount *= math.exp(-beta * (times[i] - times[i - 1]))
        ni = int(nodes[i])
        ti = float(times[i])
        lam = float(params.mu[ni]) + float(params.alpha_pw[ni, :] @ dcount)
        for (cur, _, w), mem in zip(cursors, member_sets):
            if w == 0.0 or ni not in mem:
                # cursor still has to advance so later events see fresh anchors
                cur.anchor_before(ti)
                continue
            a = cur.anchor_before(ti)
            if a is not None:
                lam += w * math.exp(-beta * (ti - a))
        yield i, ti, ni, lam


def log_likelihood(params: ModelParams, seq: EventSequence, timeline: AnchorTimeline,
                   multiplicity: str = "per_member") -> float:
    """Exact log-likelihood of the sequence under the model.

    Sum of log intensities at the events minus the integral of the total
    intensity over ``[0, horizon]``.  The hyperedge part of the integral uses
    the piecewise compensator, counted once per member under ``per_member``
    (the default, matching the fact that the group term enters every member's
    intensity) or once in total under ``single``.
    """
    point = 0.0
    for i, ti, ni, lam in _iter_event_intensities(params, seq, timeline):
        if lam <= 0.0 or not math.isfinite(lam):
            raise EvaluationError(
                f"nonpositive intensity {lam!r} at event {i} (t={ti!r}, node {ni})")
        point += math.log(lam)
    T = seq.horizon
    integral = float(params.mu.sum()) * T
    if len(seq):
        colsum = params.alpha_pw.sum(axis=0)
        integral += float(np.sum(colsum[seq.nodes] * -np.expm1(-params.beta * (T - seq.times)))) / params.beta
    for e, w in params.hyperedges:
        m = _edge_multiplicity(e, multiplicity)
        integral += m * w * piecewise_compensator(timeline.completions[e], params.beta, T)
    return point - integral


def cumulative_compensator(params: ModelParams, seq: EventSequence, timeline: AnchorTimeline,
                           query_times, multiplicity: str = "per_member") -> np.ndarray:
    """Total compensator ``integral of sum_n lambda_n over [0, t]`` at sorted query times.

    Shares the likelihood's integral decomposition; evaluating at the horizon
    reproduces the likelihood's integral term exactly.  Query times must be
    ascending and within ``[0, horizon]``.
    """
    ts = np.asarray(query_times, dtype=np.float64).ravel()
    if ts.size and (np.any(np.diff(ts) < 0)):
        raise DomainError("query times must be ascending")
    if ts.size and (ts[0] < 0 or ts[-1] > seq.horizon):
        raise DomainError("query times must lie within [0, horizon]")
    beta = params.beta
    out = float(params.mu.sum()) * ts

    if len(seq):
        colsum = params.alpha_pw.sum(axis=0)
        w = colsum[seq.nodes]
        # prefix sums of weights of events strictly before each query
        idx = np.searchsorted(seq.times, ts, side="left")
        wcum = np.concatenate([[0.0], np.cumsum(w)])
        total_before = wcum[idx]
        # decayed sum R(t) = sum_{t_j < t} w_j exp(-beta (t - t_j)) via merged walk
        R = np.empty(ts.size)
        r = 0.0
        t_r = 0.0
        j = 0
        for q in range(ts.size):
            tq = ts[q]
            while j < seq.times.size and seq.times[j] < tq:
                r *= math.exp(-beta * (seq.times[j] - t_r))
                r += w[j]
                t_r = seq.times[j]
                j += 1
            R[q] = r * math.exp(-beta * (tq - t_r))
        out = out + (total_before - R) / beta

    for e, wgt in params.hyperedges:
        m = _edge_multiplicity(e, multiplicity)
        if wgt == 0.0:
            continue
        c = timeline.completions[e]
        if c.size == 0:
            continue
        # prefix integrals over fully elapsed anchor segments; the active
        # anchor c[k-1] contributes its partial segment up to t
        seg = np.concatenate([[0.0], np.cumsum(-np.expm1(-beta * np.diff(c)) / beta)])
        k = np.searchsorted(c, ts, side="left")  # completions strictly before t
        contrib = np.zeros(ts.size)
        has = k > 0
        if np.any(has):
            kk = k[has] - 1
            contrib[has] = seg[kk] - np.expm1(-beta * (ts[has] - c[kk])) / beta
        out = out + m * wgt * contrib
    return out
