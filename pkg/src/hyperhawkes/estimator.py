"""Estimator wrapper with scikit-learn conventions around the functional EM fit.

Constructor arguments are stored verbatim; fitted state lives in
trailing-underscore attributes; ``get_params``/``set_params`` follow the
scikit-learn contract (so ``sklearn.base.clone`` works) without requiring
scikit-learn at runtime.
"""
from __future__ import annotations

import inspect

import numpy as np

from .inference import FitConfig, fit
from .model import DomainError, Hyperedge, as_event_sequence, build_timeline, log_likelihood

__all__ = ["HyperedgeHawkes"]


class HyperedgeHawkes:
    """Hawkes process with per-hyperedge group excitation, fitted by EM.

    Parameters
    ----------
    hyperedges : sequence of node tuples
        Candidate hyperedges whose weights are estimated (may be empty for a
        purely pairwise model).
    beta : float
        Shared exponential decay rate of all kernels.
    delta : float
        Completion-window length for hyperedge triggering.
    l1_penalty : float
        L1 shrinkage applied to hyperedge weights only.
    compensator : str
        'piecewise' (exact) or 'naive' (biased variant) hyperedge denominator.
    multiplicity : str
        'per_member' or 'single' scaling of the hyperedge compensator.
    max_iters, tol, init_jitter, random_state
        EM budget, stopping tolerance, and seeded initialization jitter.
    """

    def __init__(self, hyperedges=(), beta=1.0, delta=0.5, l1_penalty=0.0,
                 max_iters=80, tol=1e-6, compensator="piecewise",
                 multiplicity="per_member", init_jitter=0.0, random_state=0):
        self.hyperedges = hyperedges
        self.beta = beta
        self.delta = delta
        self.l1_penalty = l1_penalty
        self.max_iters = max_iters
        self.tol = tol
        self.compensator = compensator
        self.multiplicity = multiplicity
        self.init_jitter = init_jitter
        self.random_state = random_state

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for key, val in params.items():
            if key not in valid:
                raise DomainError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, val)
        return self

    def _config(self) -> FitConfig:
        return FitConfig(max_iters=self.max_iters, tol=self.tol,
                         l1_penalty=self.l1_penalty,
                         compensator_mode=self.compensator,
                         compensator_multiplicity=self.multiplicity,
                         init_seed=self.random_state,
                         init_jitter=self.init_jitter)

    def _edges(self):
        return [e if isinstance(e, Hyperedge) else Hyperedge(e) for e in self.hyperedges]

    def fit(self, X, y=None, num_nodes=None, horizon=None):
        """Fit on an event sequence (or anything ``as_event_sequence`` accepts)."""
        seq = as_event_sequence(X, num_nodes=num_nodes, horizon=horizon)
        result = fit(seq, self._edges(), float(self.beta), float(self.delta),
                     self._config())
        self.result_ = result
        self.params_ = result.params
        self.mu_ = np.array(result.params.mu)
        self.alpha_pairwise_ = np.array(result.params.alpha_pw)
        self.hyperedge_weights_ = result.params.edge_weights()
        self.loglik_ = result.loglik
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self

    def score(self, X, num_nodes=None, horizon=None) -> float:
        """Exact log-likelihood of a sequence under the fitted parameters."""
        if not hasattr(self, "params_"):
            raise DomainError("estimator is not fitted")
        seq = as_event_sequence(X, num_nodes=num_nodes, horizon=horizon)
        timeline = build_timeline(seq, self.params_.edge_list(), self.params_.delta)
        return log_likelihood(self.params_, seq, timeline,
                              multiplicity=self.multiplicity)

    def __repr__(self):
        args = ", ".join(f"{k}={getattr(self, k)!r}" for k in self._param_names())
        return f"{type(self).__name__}({args})"
