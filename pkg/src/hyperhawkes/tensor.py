"""Nonnegative CP factorization of fitted hyperedge weights.

A weight tensor observed only at the fitted hyperedges is compressed as
``w_e ~= sum_r prod_{v in e} F[v, r]`` with ``F >= 0``.  Factor rows are
updated one node at a time with multiplicative least-squares rules (the
model is linear in one node's row when the others are held fixed, so each
row update cannot increase the residual).  This is a post-hoc compression
layer: EM never iterates through the factors.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import DomainError, Hyperedge

__all__ = ["CPFactors", "CPFit", "cp_factorize", "cp_alpha"]

_EPS = 1e-12


@dataclass(frozen=True)
class CPFactors:
    """Nonnegative factor matrix, one row per node, one column per component."""

    factors: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.factors, dtype=np.float64)
        if f.ndim != 2:
            raise DomainError("factors must be 2-D (nodes x rank)")
        if np.any(f < 0) or not np.all(np.isfinite(f)):
            raise DomainError("factors must be finite and >= 0")
        object.__setattr__(self, "factors", f)

    @property
    def rank(self) -> int:
        return int(self.factors.shape[1])


@dataclass(frozen=True)
class CPFit:
    factors: CPFactors
    residual: float
    history: np.ndarray  # squared residual after each sweep


def cp_alpha(factors: CPFactors, edge: Hyperedge) -> float:
    """Weight the factorization implies for ``edge``: sum_r prod_{v in e} F[v, r]."""
    if not isinstance(edge, Hyperedge):
        edge = Hyperedge(edge)
    f = factors.factors
    if edge.members[-1] >= f.shape[0]:
        raise DomainError(f"edge {edge.members} references node >= {f.shape[0]}")
    return float(np.prod(f[list(edge.members), :], axis=0).sum())


def cp_factorize(weights: Sequence[tuple[Hyperedge, float]], num_nodes: int,
                 rank: int, n_sweeps: int = 500, seed: int = 0,
                 tol: float = 1e-14) -> CPFit:
    """Factorize observed (hyperedge, weight) pairs at the given rank.

    Only observed entries enter the squared-error objective.  Nodes that
    appear in no observed hyperedge get all-zero rows.  A rank exceeding the
    number of observations is allowed but warned about (overparameterized).
    """
    edges = []
    y = []
    for e, w in weights:
        e = e if isinstance(e, Hyperedge) else Hyperedge(e)
        if e.members[-1] >= num_nodes:
            raise DomainError(f"edge {e.members} references node >= {num_nodes}")
        if w < 0 or not np.isfinite(w):
            raise DomainError(f"weights must be finite and >= 0, got {w} for {e.members}")
        edges.append(e)
        y.append(float(w))
    y = np.asarray(y)
    if rank < 1:
        raise DomainError("rank must be >= 1")
    if rank > max(len(edges), 1):
        warnings.warn(f"rank {rank} exceeds the {len(edges)} observed hyperedges "
                      "(overparameterized)")

    rng = np.random.default_rng(seed)
    F = rng.uniform(0.2, 1.0, size=(num_nodes, rank))
    involved = sorted({m for e in edges for m in e.members})
    uninvolved = [v for v in range(num_nodes) if v not in set(involved)]
    F[uninvolved, :] = 0.0
    by_node = {v: [k for k, e in enumerate(edges) if v in e] for v in involved}

    def predictions() -> np.ndarray:
        return np.array([cp_alpha(CPFactors(F), e) for e in edges]) if edges else np.zeros(0)

    def residual() -> float:
        r = y - predictions()
        return float(r @ r)

    history = [residual()]
    for _ in range(n_sweeps):
        for v in involved:
            rows = by_node[v]
            if not rows:
                continue
            # design G[k, r] = prod over other members of edge k; linear in F[v]
            G = np.empty((len(rows), rank))
            for a, k in enumerate(rows):
                others = [m for m in edges[k].members if m != v]
                G[a] = np.prod(F[others, :], axis=0)
            target = y[rows]
            pred = G @ F[v]
            numer = G.T @ target
            denom = G.T @ pred + _EPS
            F[v] = F[v] * (numer / denom)
        history.append(residual())
        if history[-2] - history[-1] < tol * max(1.0, history[0]):
            break
    return CPFit(CPFactors(F), history[-1], np.asarray(history))
