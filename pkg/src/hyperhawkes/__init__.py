"""Hawkes processes with hyperedge-triggered group excitation.

Simulation by thinning, exact likelihoods with pattern-completion anchors,
closed-form EM with optional L1 shrinkage, two-stage hyperedge discovery,
information-criterion model comparison, stability analysis, and rank-based
co-activation validation.
"""
from .model import (
    AnchorTimeline,
    DomainError,
    EvaluationError,
    Event,
    EventSequence,
    Hyperedge,
    ModelParams,
    anchor_at,
    as_event_sequence,
    build_timeline,
    compute_completions,
    cumulative_compensator,
    intensity,
    kernel,
    log_likelihood,
    naive_compensator,
    piecewise_compensator,
)
from .simulate import AnchorTracker, SimConfig, SimResult, simulate, simulate_batch
from .inference import FitConfig, FitResult, Responsibilities, e_step, em_update, fit, m_step
from .tensor import CPFactors, CPFit, cp_alpha, cp_factorize
from .structure import (
    CandidateSet,
    DeltaScan,
    L1Path,
    ModelComparison,
    PhaseScan,
    PRUNE_THRESHOLD,
    compare_models,
    delta_grid_search,
    generate_candidates,
    interaction_matrix,
    l1_path,
    phase_scan,
    spectral_radius,
)
from .copula import TailStats, WelchResult, pair_activity_series, tail_stats, welch_test
from .io import (
    ingest_events,
    params_from_dict,
    params_to_dict,
    read_params,
    write_events,
    write_params,
)
from .estimator import HyperedgeHawkes

__version__ = "0.1.0"

from .experiments import (
    EXPERIMENT_IDS,
    ExperimentSpec,
    RunRecord,
    copula_separation,
    experiment_spec,
    run_experiment,
    scaling_benchmark,
)
