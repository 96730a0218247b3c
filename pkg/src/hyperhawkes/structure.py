"""Hyperedge discovery, model comparison, penalty paths, and stability analysis.

Discovery is two-stage: a pairwise-only fit builds a significance graph
(both directions of a pair must clear a branching-ratio threshold), then the
candidate hyperedges are the cliques of requested sizes, enumerated in
deterministic lexicographic order.  Reported weights are thresholded; raw
values stay inside the fit results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import stats as sstats

from .inference import FitConfig, FitResult, fit
from .model import DomainError, EventSequence, Hyperedge, ModelParams
from .simulate import SimConfig, simulate

__all__ = [
    "PRUNE_THRESHOLD",
    "CandidateSet",
    "ModelComparison",
    "L1Path",
    "DeltaScan",
    "PhaseScan",
    "generate_candidates",
    "compare_models",
    "l1_path",
    "delta_grid_search",
    "interaction_matrix",
    "spectral_radius",
    "phase_scan",
]

# weights below this are reported as zero in structure outputs
PRUNE_THRESHOLD = 1e-4


@dataclass(frozen=True)
class CandidateSet:
    """Stage-1 significance graph plus the cliques proposed as hyperedges."""

    significant_pairs: tuple[tuple[int, int], ...]
    candidates: tuple[Hyperedge, ...]
    theta: float
    pairwise_fit: FitResult


def generate_candidates(seq: EventSequence, beta: float, delta: float,
                        theta: float = 0.05, sizes: tuple[int, int] = (2, 3),
                        cfg: FitConfig = FitConfig(),
                        rule: str = "min") -> CandidateSet:
    """Two-stage candidate generation.

    Stage 1 fits a pairwise-only model; pair ``{i, j}`` is significant when
    ``rule`` (min or max) of the two directed branching ratios
    ``alpha/beta`` exceeds ``theta``.  Stage 2 enumerates the cliques of the
    significance graph with sizes in ``[sizes[0], sizes[1]]``, lexicographic.
    """
    k_min, k_max = int(sizes[0]), int(sizes[1])
    if k_min < 2 or k_max < k_min:
        raise DomainError(f"sizes must satisfy 2 <= k_min <= k_max, got {sizes}")
    if rule not in ("min", "max"):
        raise DomainError(f"rule must be 'min' or 'max', got {rule!r}")
    if theta < 0:
        raise DomainError("theta must be >= 0")
    res = fit(seq, [], beta, delta, cfg)
    ratios = res.params.alpha_pw / beta
    n = seq.num_nodes
    pick = min if rule == "min" else max
    pairs = [(i, j) for i, j in combinations(range(n), 2)
             if pick(ratios[i, j], ratios[j, i]) > theta]
    adj = set(pairs)
    cliques = []
    for k in range(k_min, k_max + 1):
        for combo in combinations(range(n), k):
            if all(p in adj for p in combinations(combo, 2)):
                cliques.append(Hyperedge(combo))
    return CandidateSet(tuple(pairs), tuple(cliques), float(theta), res)


@dataclass(frozen=True)
class ModelComparison:
    """Likelihood-ratio and information-criterion comparison, baseline vs full.

    Differences are baseline minus full, so positive favors the full model.
    The chi-square 0.95 quantile at ``lr_df`` is computed, not tabulated.
    """

    loglik_full: float
    loglik_baseline: float
    delta_loglik: float
    k_full: int
    k_baseline: int
    aic_full: float
    aic_baseline: float
    aic_diff: float
    bic_full: float
    bic_baseline: float
    bic_diff: float
    lr_stat: float
    lr_df: int
    chi2_crit_095: float
    lr_significant: bool


def _param_count(res: FitResult) -> int:
    n = res.num_nodes
    return n + n * n + len(res.params.hyperedges)


def compare_models(seq: EventSequence, baseline: FitResult, full: FitResult) -> ModelComparison:
    """Compare two fits of the same sequence (same horizon, beta, delta)."""
    if baseline.fingerprint() != full.fingerprint():
        raise DomainError("fits do not share a sequence/beta/delta fingerprint")
    if len(seq) != full.n_events or seq.horizon != full.horizon:
        raise DomainError("sequence does not match the fits")
    n_ev = max(len(seq), 1)
    lf, lb = full.loglik, baseline.loglik
    kf, kb = _param_count(full), _param_count(baseline)
    aic_f, aic_b = 2 * kf - 2 * lf, 2 * kb - 2 * lb
    bic_f, bic_b = kf * math.log(n_ev) - 2 * lf, kb * math.log(n_ev) - 2 * lb
    lr = 2.0 * (lf - lb)
    df = kf - kb
    crit = float(sstats.chi2.ppf(0.95, df)) if df > 0 else math.inf
    return ModelComparison(
        loglik_full=lf, loglik_baseline=lb, delta_loglik=lf - lb,
        k_full=kf, k_baseline=kb,
        aic_full=aic_f, aic_baseline=aic_b, aic_diff=aic_b - aic_f,
        bic_full=bic_f, bic_baseline=bic_b, bic_diff=bic_b - bic_f,
        lr_stat=lr, lr_df=df, chi2_crit_095=crit,
        lr_significant=bool(df > 0 and lr > crit),
    )


@dataclass(frozen=True)
class L1Path:
    """Per-penalty fitted hyperedge weights (reported thresholded) and criteria."""

    lambdas: np.ndarray
    candidates: tuple[Hyperedge, ...]
    weights: np.ndarray        # (n_lambdas, n_candidates), thresholded
    raw_weights: np.ndarray    # same, unthresholded
    logliks: np.ndarray
    aic: np.ndarray
    bic: np.ndarray
    n_active: np.ndarray
    lambda_star: float         # BIC minimizer
    lambda_star_aic: float
    fits: tuple[FitResult, ...]


def l1_path(seq: EventSequence, candidates: Sequence[Hyperedge], lambdas,
            beta: float, delta: float, cfg: FitConfig = FitConfig()) -> L1Path:
    """Fit along an ascending penalty grid with warm starts.

    Each fit starts from the previous penalty's parameters, which makes the
    per-candidate weights non-increasing along the grid.  AIC/BIC use the
    count of surviving (above-threshold) hyperedge weights as the hyperedge
    part of the parameter count.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size == 0:
        raise DomainError("at least one penalty value is required")
    if np.any(lam < 0):
        raise DomainError("penalties must be >= 0")
    if lam.size > 1 and np.any(np.diff(lam) <= 0):
        raise DomainError("penalties must be strictly ascending")
    edges = [e if isinstance(e, Hyperedge) else Hyperedge(e) for e in candidates]
    n_ev = max(len(seq), 1)
    base_k = seq.num_nodes + seq.num_nodes ** 2

    fits = []
    raw = np.zeros((lam.size, len(edges)))
    lls = np.zeros(lam.size)
    warm = None
    for i, l1 in enumerate(lam):
        res = fit(seq, edges, beta, delta, replace(cfg, l1_penalty=float(l1)),
                  init_params=warm)
        warm = res.params
        fits.append(res)
        raw[i] = res.params.edge_weights()
        lls[i] = res.loglik
    thr = np.where(raw >= PRUNE_THRESHOLD, raw, 0.0)
    n_active = (thr > 0).sum(axis=1)
    k = base_k + n_active
    aic = 2 * k - 2 * lls
    bic = k * math.log(n_ev) - 2 * lls
    return L1Path(
        lambdas=lam, candidates=tuple(edges), weights=thr, raw_weights=raw,
        logliks=lls, aic=aic, bic=bic, n_active=n_active,
        lambda_star=float(lam[int(np.argmin(bic))]),
        lambda_star_aic=float(lam[int(np.argmin(aic))]),
        fits=tuple(fits),
    )


@dataclass(frozen=True)
class DeltaScan:
    deltas: np.ndarray
    logliks: np.ndarray
    best_delta: float
    fits: tuple[FitResult, ...]


def delta_grid_search(seq: EventSequence, candidates: Sequence[Hyperedge], beta: float,
                      deltas, cfg: FitConfig = FitConfig()) -> DeltaScan:
    """Profile the fitted log-likelihood over completion-window lengths.

    Anchors are recomputed per delta (they are data-plus-delta objects); the
    winner is the delta with the highest fitted log-likelihood.
    """
    ds = np.asarray(deltas, dtype=float).ravel()
    if ds.size == 0:
        raise DomainError("at least one delta is required")
    if np.any(ds <= 0):
        raise DomainError("deltas must be > 0")
    fits = tuple(fit(seq, candidates, beta, float(d), cfg) for d in ds)
    lls = np.array([r.loglik for r in fits])
    return DeltaScan(ds, lls, float(ds[int(np.argmax(lls))]), fits)


def interaction_matrix(params: ModelParams) -> np.ndarray:
    """Branching-ratio matrix: expected direct offspring on n per event on j.

    Pairwise weights contribute ``alpha/beta``; a hyperedge spreads its
    ``alpha_e/beta`` onto each member from each co-member (divided by K-1 so a
    row's total matches the edge's expected offspring per participating node).
    """
    beta = params.beta
    A = params.alpha_pw / beta
    for e, w in params.hyperedges:
        k = e.size
        share = w / beta / (k - 1)
        for n in e.members:
            for v in e.members:
                if v != n:
                    A[n, v] += share
    return A


def spectral_radius(A: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Perron root of a nonnegative matrix by power iteration.

    Iterates on ``A + I`` (same eigenvectors, spectrum shifted by one) so
    periodic structure cannot stall convergence, then subtracts the shift.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    if np.any(A < 0):
        raise DomainError("matrix must be nonnegative")
    n = A.shape[0]
    x = np.ones(n)
    est = 0.0
    for _ in range(max_iter):
        y = A @ x + x
        norm = float(np.max(np.abs(y)))
        if norm == 0.0:
            return 0.0
        y /= norm
        if abs(norm - est) < tol * max(1.0, norm):
            return norm - 1.0
        est = norm
        x = y
    return est - 1.0


@dataclass(frozen=True)
class PhaseScan:
    """Cascade-onset scan over hyperedge strength multipliers."""

    multipliers: np.ndarray
    rho_true: np.ndarray
    rho_fitted: np.ndarray      # mean over seeds (nan where no fit)
    mean_events: np.ndarray
    cap_fraction: np.ndarray
    critical_multiplier: float  # where rho_true crosses 1 (bisection)
    onset_multiplier: float     # first grid point with cap fraction > 0.5 (nan if none)
    onset_ratio: float          # onset / critical (nan if either is missing)


def _scale_strength(params: ModelParams, s: float) -> ModelParams:
    # scales every excitation weight; baselines stay fixed. The anchored group
    # term is bounded by its weight (refresh, not superposition), so scaling
    # it alone can never drive the process critical: real cascades require the
    # pairwise part of the scaled structure to cross branching ratio 1.
    return params.replace_weights(alpha_pw=params.alpha_pw * s,
                                  edge_weights=params.edge_weights() * s)


def phase_scan(base_params: ModelParams, multipliers, horizon: float,
               seeds: Sequence[int], event_cap: int = 20_000,
               cfg: FitConfig = FitConfig(), fit_models: bool = True) -> PhaseScan:
    """Scan interaction strength, watching theory (spectral radius) and behavior.

    At each multiplier: the true branching-ratio radius, simulated event
    counts and the fraction of seeds that hit the event cap, and (optionally)
    the mean spectral radius recovered by refitting each simulated run.
    """
    ms = np.asarray(multipliers, dtype=float).ravel()
    if ms.size == 0 or np.any(ms < 0):
        raise DomainError("multipliers must be nonnegative and nonempty")
    if np.any(np.diff(ms) <= 0):
        raise DomainError("multipliers must be strictly ascending")
    edges = base_params.edge_list()

    rho_true = np.array([spectral_radius(interaction_matrix(_scale_strength(base_params, s)))
                         for s in ms])
    rho_fit = np.full(ms.size, np.nan)
    mean_ev = np.zeros(ms.size)
    capfrac = np.zeros(ms.size)
    for i, s in enumerate(ms):
        p = _scale_strength(base_params, s)
        counts, caps, rhos = [], [], []
        for sd in seeds:
            seq, cap = simulate(SimConfig(p, horizon, int(sd), event_cap))
            counts.append(len(seq))
            caps.append(cap)
            if fit_models and len(seq) > 0:
                res = fit(seq, edges, base_params.beta, base_params.delta, cfg)
                rhos.append(spectral_radius(interaction_matrix(res.params)))
        mean_ev[i] = float(np.mean(counts))
        capfrac[i] = float(np.mean(caps))
        if rhos:
            rho_fit[i] = float(np.mean(rhos))

    # solve rho_true(s) = 1 by bisection (rho is monotone in s)
    crit = np.nan
    lo, hi = ms[0], ms[-1]
    f = lambda s: spectral_radius(interaction_matrix(_scale_strength(base_params, s))) - 1.0
    if f(lo) < 0 < f(hi):
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        crit = 0.5 * (lo + hi)
    elif f(lo) >= 0:
        crit = ms[0]

    onset = np.nan
    above = np.flatnonzero(capfrac > 0.5)
    if above.size:
        onset = float(ms[above[0]])
    ratio = onset / crit if (not math.isnan(onset) and not math.isnan(crit) and crit > 0) else math.nan
    return PhaseScan(ms, rho_true, rho_fit, mean_ev, capfrac,
                     float(crit), float(onset), float(ratio))
