"""Command-line harness over simulation, fitting, discovery, and experiments.

Commands that produce output write one directory under ``--out``: a
``spec.json`` recording the resolved inputs, a ``results.json`` with the
outputs, and for grid commands a flat plot-ready CSV.  Exit codes: 0 on
success, 1 on a validation problem (bad flags, malformed files, domain
violations), 2 on a runtime failure.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from .copula import pair_activity_series, tail_stats
from .experiments import (
    EXPERIMENT_IDS,
    experiment_spec,
    run_experiment,
    scaling_benchmark,
    spec_payload,
)
from .inference import FitConfig, fit
from .io import ingest_events, params_to_dict, read_params, write_events, write_params
from .model import DomainError, EvaluationError, Hyperedge
from .simulate import SimConfig, simulate
from .structure import (
    compare_models,
    delta_grid_search,
    generate_candidates,
    l1_path,
    phase_scan,
)

# ---------------------------------------------------------------------------
# small shared helpers


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(p) for p in str(text).split(",") if p.strip() != ""]
    except ValueError:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from None


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in str(text).split(",") if p.strip() != ""]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from None


def _read_edges(path) -> list[Hyperedge]:
    """Hyperedge file: a JSON array of member-index arrays."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise DomainError(f"{path}: expected a JSON array of member arrays")
    return [Hyperedge(members) for members in data]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_jsonable(v) for v in row])


def _run_dir(ctx, name: str) -> Path:
    d = Path(ctx.obj["out"]) / name
    d.mkdir(parents=True, exist_ok=True)
    return d


def _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter) -> FitConfig:
    return FitConfig(max_iters=max_iters, tol=tol, l1_penalty=l1,
                     compensator_mode=compensator, init_seed=init_seed,
                     init_jitter=init_jitter)


def _fit_options(f):
    f = click.option("--init-jitter", type=float, default=0.0, show_default=True,
                     help="Relative jitter on initial values.")(f)
    f = click.option("--init-seed", type=int, default=0, show_default=True,
                     help="Seed for initialization jitter.")(f)
    f = click.option("--compensator", type=click.Choice(["piecewise", "naive"]),
                     default="piecewise", show_default=True,
                     help="Group-integral mode in the M-step.")(f)
    f = click.option("--l1", type=float, default=0.0, show_default=True,
                     help="L1 penalty on hyperedge weights.")(f)
    f = click.option("--tol", type=float, default=1e-6, show_default=True,
                     help="Log-likelihood convergence tolerance.")(f)
    f = click.option("--max-iters", type=int, default=80, show_default=True,
                     help="EM iteration budget.")(f)
    return f


def _fit_summary(res) -> dict:
    return {
        "loglik": res.loglik,
        "n_iter": res.n_iter,
        "converged": res.converged,
        "n_events": res.n_events,
        "edge_weights": {",".join(map(str, e.members)): w
                         for (e, _), w in zip(res.params.hyperedges,
                                              res.params.edge_weights())},
    }


# ---------------------------------------------------------------------------
# command group


def _normalize_config(loaded: dict) -> dict:
    """Let config sections key options by flag name or parameter name.

    ``--params`` binds to the parameter ``params_path``, so a literal
    default_map would force users to write the internal name; this maps each
    command's long flags (dashes as underscores) onto the bound names.
    """
    out = {}
    for section, opts in loaded.items():
        cmd = cli.commands.get(section)
        if cmd is None or not isinstance(opts, dict):
            out[section] = opts
            continue
        names = {}
        for par in cmd.params:
            for o in getattr(par, "opts", ()):
                if o.startswith("--"):
                    names[o[2:].replace("-", "_")] = par.name
        out[section] = {names.get(str(k).replace("-", "_"), k): v
                        for k, v in opts.items()}
    return out


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--out", type=click.Path(file_okay=False), default="runs",
              show_default=True, help="Root directory for run outputs.")
@click.option("--seed", type=int, default=None,
              help="Override the command's default seed(s).")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Worker threads for independent grid jobs.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file of per-command default options.")
@click.pass_context
def cli(ctx, out, seed, workers, config_path):
    """Hyperedge-triggered Hawkes processes: simulate, fit, discover, validate."""
    if config_path is not None:
        loaded = json.loads(Path(config_path).read_text())
        if not isinstance(loaded, dict):
            raise DomainError(f"{config_path}: config must be a JSON object")
        ctx.default_map = _normalize_config(loaded)
    ctx.obj = {"out": out, "seed": seed, "workers": max(int(workers), 1)}


@cli.command("simulate")
@click.option("--params", "params_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Model params JSON.")
@click.option("--horizon", type=float, required=True, help="Observation window length.")
@click.option("--event-cap", type=int, default=100_000, show_default=True,
              help="Hard cap on generated events.")
@click.option("--name", default="simulate", show_default=True,
              help="Run directory name under --out.")
@click.pass_context
def simulate_cmd(ctx, params_path, horizon, event_cap, name):
    """Draw one event sequence from a model and write it as CSV."""
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else 0
    params = read_params(params_path)
    res = simulate(SimConfig(params=params, horizon=horizon, seed=seed,
                             event_cap=event_cap))
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "simulate", "params": params_to_dict(params),
        "horizon": horizon, "seed": seed, "event_cap": event_cap,
    })
    write_events(d / "events.csv", res.seq)
    counts = np.bincount(res.seq.nodes, minlength=params.num_nodes)
    _write_json(d / "results.json", {
        "n_events": len(res.seq), "cap_hit": res.cap_hit,
        "events_per_node": counts.tolist(),
    })
    click.echo(f"{len(res.seq)} events -> {d / 'events.csv'}"
               + (" (event cap hit)" if res.cap_hit else ""))


@cli.command("fit")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--beta", type=float, required=True, help="Excitation decay rate.")
@click.option("--delta", type=float, required=True, help="Completion window width.")
@click.option("--edges", "edges_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Candidate hyperedges (JSON array of member arrays).")
@click.option("--auto", is_flag=True,
              help="Generate candidates from the data instead of --edges.")
@click.option("--theta", type=float, default=0.05, show_default=True,
              help="Significance threshold for --auto.")
@click.option("--sizes", default="2,3", show_default=True,
              help="Candidate size range for --auto, as 'min,max'.")
@_fit_options
@click.option("--name", default="fit", show_default=True)
@click.pass_context
def fit_cmd(ctx, events_path, beta, delta, edges_path, auto, theta, sizes,
            max_iters, tol, l1, compensator, init_seed, init_jitter, name):
    """Fit the model to an event file and write the estimated parameters."""
    if auto and edges_path is not None:
        raise DomainError("--auto and --edges are mutually exclusive")
    seq = ingest_events(events_path)
    cfg = _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter)
    if auto:
        lo, hi = (_parse_ints(sizes) + [0, 0])[:2]
        cands = list(generate_candidates(seq, beta, delta, theta=theta,
                                         sizes=(lo, hi), cfg=cfg).candidates)
    elif edges_path is not None:
        cands = _read_edges(edges_path)
    else:
        cands = []
    res = fit(seq, cands, beta, delta, cfg)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "fit", "events": str(events_path), "beta": beta, "delta": delta,
        "candidates": [list(e.members) for e in cands], "auto": auto,
        "fit_config": asdict(cfg),
    })
    write_params(d / "params.json", res.params)
    _write_csv(d / "trace.csv", ["iteration", "loglik", "penalized"],
               zip(range(1, res.n_iter + 1), res.loglik_trace, res.penalized_trace))
    _write_json(d / "results.json", _fit_summary(res))
    click.echo(f"loglik {res.loglik:.4f} after {res.n_iter} iterations"
               f" ({'converged' if res.converged else 'budget reached'})"
               f" -> {d / 'params.json'}")


@cli.command("candidates")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--beta", type=float, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--theta", type=float, default=0.05, show_default=True,
              help="Branching-ratio significance threshold.")
@click.option("--sizes", default="2,3", show_default=True,
              help="Clique size range as 'min,max'.")
@click.option("--rule", type=click.Choice(["min", "max"]), default="min",
              show_default=True, help="Combine the two directed ratios per pair.")
@_fit_options
@click.option("--name", default="candidates", show_default=True)
@click.pass_context
def candidates_cmd(ctx, events_path, beta, delta, theta, sizes, rule,
                   max_iters, tol, l1, compensator, init_seed, init_jitter, name):
    """Two-stage hyperedge candidate generation from data."""
    seq = ingest_events(events_path)
    cfg = _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter)
    lo, hi = (_parse_ints(sizes) + [0, 0])[:2]
    cs = generate_candidates(seq, beta, delta, theta=theta, sizes=(lo, hi),
                             cfg=cfg, rule=rule)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "candidates", "events": str(events_path), "beta": beta,
        "delta": delta, "theta": theta, "sizes": [lo, hi], "rule": rule,
        "fit_config": asdict(cfg),
    })
    _write_json(d / "candidates.json", [list(e.members) for e in cs.candidates])
    _write_json(d / "results.json", {
        "significant_pairs": [list(p) for p in cs.significant_pairs],
        "n_candidates": len(cs.candidates),
        "candidates": [list(e.members) for e in cs.candidates],
        "theta": cs.theta,
        "pairwise_loglik": cs.pairwise_fit.loglik,
    })
    click.echo(f"{len(cs.significant_pairs)} significant pairs, "
               f"{len(cs.candidates)} candidates -> {d / 'candidates.json'}")


@cli.command("compare")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--beta", type=float, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--edges", "edges_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Hyperedges for the full model (JSON array of member arrays).")
@_fit_options
@click.option("--name", default="compare", show_default=True)
@click.pass_context
def compare_cmd(ctx, events_path, beta, delta, edges_path,
                max_iters, tol, l1, compensator, init_seed, init_jitter, name):
    """Fit pairwise-only and hyperedge models, report the evidence split."""
    seq = ingest_events(events_path)
    cfg = _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter)
    cands = _read_edges(edges_path)
    full = fit(seq, cands, beta, delta, cfg)
    base = fit(seq, [], beta, delta, cfg)
    comp = compare_models(seq, base, full)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "compare", "events": str(events_path), "beta": beta,
        "delta": delta, "candidates": [list(e.members) for e in cands],
        "fit_config": asdict(cfg),
    })
    _write_json(d / "results.json", {
        "comparison": asdict(comp),
        "baseline": _fit_summary(base),
        "full": _fit_summary(full),
    })
    verdict = "full model favored" if comp.bic_diff > 0 else "baseline favored"
    click.echo(f"delta loglik {comp.delta_loglik:+.4f}, BIC diff {comp.bic_diff:+.4f}"
               f" ({verdict}) -> {d / 'results.json'}")


@cli.command("l1-path")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--beta", type=float, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--edges", "edges_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Candidate hyperedges (JSON array of member arrays).")
@click.option("--lam-min", type=float, default=0.01, show_default=True)
@click.option("--lam-max", type=float, default=1.0, show_default=True)
@click.option("--lam-num", type=int, default=20, show_default=True)
@_fit_options
@click.option("--name", default="l1-path", show_default=True)
@click.pass_context
def l1_path_cmd(ctx, events_path, beta, delta, edges_path, lam_min, lam_max,
                lam_num, max_iters, tol, l1, compensator, init_seed, init_jitter,
                name):
    """Sweep the L1 penalty geometrically and select by BIC."""
    if not (0 < lam_min < lam_max) or lam_num < 2:
        raise DomainError("need 0 < lam-min < lam-max and lam-num >= 2")
    seq = ingest_events(events_path)
    cfg = _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter)
    cands = _read_edges(edges_path)
    lams = np.geomspace(lam_min, lam_max, lam_num)
    path = l1_path(seq, cands, lams, beta, delta, cfg)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "l1-path", "events": str(events_path), "beta": beta,
        "delta": delta, "candidates": [list(e.members) for e in cands],
        "lambdas": lams.tolist(), "fit_config": asdict(cfg),
    })
    edge_cols = ["w_" + "-".join(map(str, e.members)) for e in cands]
    _write_csv(d / "path.csv",
               ["lambda", "loglik", "aic", "bic", "n_active"] + edge_cols,
               ([lam, ll, a, b, k] + list(w) for lam, ll, a, b, k, w in
                zip(path.lambdas, path.logliks, path.aic, path.bic,
                    path.n_active, path.weights)))
    _write_json(d / "results.json", {
        "lambdas": path.lambdas, "weights": path.weights,
        "logliks": path.logliks, "aic": path.aic, "bic": path.bic,
        "n_active": path.n_active, "lambda_star": path.lambda_star,
        "lambda_star_aic": path.lambda_star_aic,
    })
    click.echo(f"lambda* (BIC) {path.lambda_star:.6g}, "
               f"{int(path.n_active[np.flatnonzero(path.lambdas == path.lambda_star)[0]])}"
               f" active edges -> {d / 'path.csv'}")


@cli.command("delta-scan")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--beta", type=float, required=True)
@click.option("--edges", "edges_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Candidate hyperedges (JSON array of member arrays).")
@click.option("--deltas", default="0.1,0.25,0.5,1.0,2.0", show_default=True,
              help="Window widths to profile, comma-separated.")
@_fit_options
@click.option("--name", default="delta-scan", show_default=True)
@click.pass_context
def delta_scan_cmd(ctx, events_path, beta, edges_path, deltas,
                   max_iters, tol, l1, compensator, init_seed, init_jitter, name):
    """Profile the log-likelihood over completion-window widths."""
    seq = ingest_events(events_path)
    cfg = _fit_config(max_iters, tol, l1, compensator, init_seed, init_jitter)
    cands = _read_edges(edges_path)
    grid = _parse_floats(deltas)
    scan = delta_grid_search(seq, cands, beta, np.asarray(grid), cfg)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "delta-scan", "events": str(events_path), "beta": beta,
        "candidates": [list(e.members) for e in cands], "deltas": grid,
        "fit_config": asdict(cfg),
    })
    _write_csv(d / "scan.csv", ["delta", "loglik"],
               zip(scan.deltas, scan.logliks))
    _write_json(d / "results.json", {
        "deltas": scan.deltas, "logliks": scan.logliks,
        "best_delta": scan.best_delta,
    })
    click.echo(f"window width profiled; best delta {scan.best_delta:g}"
               f" -> {d / 'scan.csv'}")


@cli.command("phase-scan")
@click.option("--params", "params_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Model params JSON.")
@click.option("--multipliers",
              default="1.0,1.2,1.4,1.6,1.8,2.0,2.2,2.4,2.6,2.8,3.0",
              show_default=True, help="Excitation-strength multipliers.")
@click.option("--horizon", type=float, required=True)
@click.option("--seeds", default="11,12,13,14,15", show_default=True,
              help="Simulation seeds per multiplier.")
@click.option("--event-cap", type=int, default=20_000, show_default=True)
@click.option("--no-fit", is_flag=True, help="Skip refitting at each multiplier.")
@click.option("--max-iters", type=int, default=60, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--name", default="phase-scan", show_default=True)
@click.pass_context
def phase_scan_cmd(ctx, params_path, multipliers, horizon, seeds, event_cap,
                   no_fit, max_iters, tol, name):
    """Scan excitation strength across the stability boundary."""
    params = read_params(params_path)
    mults = _parse_floats(multipliers)
    seed_list = ([ctx.obj["seed"]] if ctx.obj["seed"] is not None
                 else _parse_ints(seeds))
    cfg = FitConfig(max_iters=max_iters, tol=tol)
    scan = phase_scan(params, np.asarray(mults), horizon, seed_list,
                      event_cap=event_cap, cfg=cfg, fit_models=not no_fit)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "phase-scan", "params": params_to_dict(params),
        "multipliers": mults, "horizon": horizon, "seeds": seed_list,
        "event_cap": event_cap, "fit_models": not no_fit,
        "fit_config": asdict(cfg),
    })
    _write_csv(d / "scan.csv",
               ["multiplier", "rho_true", "rho_fitted", "mean_events",
                "cap_fraction"],
               zip(scan.multipliers, scan.rho_true, scan.rho_fitted,
                   scan.mean_events, scan.cap_fraction))
    _write_json(d / "results.json", {
        "multipliers": scan.multipliers, "rho_true": scan.rho_true,
        "rho_fitted": scan.rho_fitted, "mean_events": scan.mean_events,
        "cap_fraction": scan.cap_fraction,
        "critical_multiplier": scan.critical_multiplier,
        "onset_multiplier": scan.onset_multiplier,
        "onset_ratio": scan.onset_ratio,
    })
    click.echo(f"critical multiplier {scan.critical_multiplier:g}, "
               f"cascade onset {scan.onset_multiplier:g} -> {d / 'scan.csv'}")


@cli.command("copula")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--pair", default="0,1", show_default=True,
              help="Node pair to analyze, as 'a,b'.")
@click.option("--bin-width", type=float, default=0.5, show_default=True)
@click.option("--threshold", type=float, default=0.9, show_default=True,
              help="Upper-tail quantile threshold.")
@click.option("--name", default="copula", show_default=True)
@click.pass_context
def copula_cmd(ctx, events_path, pair, bin_width, threshold, name):
    """Rank-based tail co-activation statistics for one node pair."""
    seq = ingest_events(events_path)
    nodes = _parse_ints(pair)
    if len(nodes) != 2:
        raise DomainError(f"--pair needs exactly two nodes, got {pair!r}")
    a, b = nodes
    sa, sb = pair_activity_series(seq, a, b, bin_width)
    ts = tail_stats(sa, sb, threshold)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "copula", "events": str(events_path), "pair": [a, b],
        "bin_width": bin_width, "threshold_u": threshold,
    })
    _write_json(d / "results.json", {
        "pair": [a, b], "n_bins": int(sa.shape[0]), "tau_u": ts.tau_u,
        "rho_phi": ts.rho_phi, "threshold_u": ts.threshold_u,
        "tail_empty": ts.tail_empty, "degenerate": ts.degenerate,
    })
    click.echo(f"tail dependence {ts.tau_u:.4f}, tail correlation "
               f"{ts.rho_phi:.4f} -> {d / 'results.json'}")


def _experiment_csv(d: Path, exp_id: str, results: dict) -> None:
    """Flat CSV views of grid-shaped experiment results."""
    if exp_id == "1b":
        _write_csv(d / "weights.csv", ["seed_index", "piecewise", "naive"],
                   zip(range(len(results["hyperedge_weights"])),
                       results["hyperedge_weights"],
                       results["hyperedge_weights_naive"]))
    elif exp_id == "2":
        edge_cols = [f"w_{k}" for k in range(len(results["weights"][0]))]
        _write_csv(d / "path.csv", ["lambda", "n_active"] + edge_cols,
                   ([lam, k] + list(w) for lam, k, w in
                    zip(results["lambdas"], results["n_active"],
                        results["weights"])))
    elif exp_id == "3":
        _write_csv(d / "inits.csv", ["init", "loglik"],
                   zip(range(len(results["final_logliks"])),
                       results["final_logliks"]))
    elif exp_id == "4":
        _write_csv(d / "scan.csv",
                   ["multiplier", "rho_true", "rho_fitted", "mean_events",
                    "cap_fraction"],
                   zip(results["multipliers"], results["rho_true"],
                       results["rho_fitted"], results["mean_events"],
                       results["cap_fraction"]))
    elif exp_id == "5":
        rows = ([["model", t, r] for t, r in zip(results["tau_u_model"],
                                                 results["rho_phi_model"])]
                + [["null", t, r] for t, r in zip(results["tau_u_null"],
                                                  results["rho_phi_null"])])
        _write_csv(d / "stats.csv", ["group", "tau_u", "rho_phi"], rows)
    elif exp_id == "8":
        _write_csv(d / "scan.csv", ["delta", "loglik"],
                   zip(results["deltas"], results["logliks"]))
    elif exp_id == "9":
        _write_csv(d / "scaling.csv",
                   ["n_nodes", "n_candidates", "seconds_per_iteration",
                    "per_event_pair_us"],
                   zip(results["node_counts"], results["candidate_counts"],
                       results["seconds_per_iteration"],
                       results["per_event_pair_us"]))
    elif exp_id == "11":
        _write_csv(d / "scan.csv", ["beta", "bias", "cv"],
                   zip(results["betas"], results["biases"], results["cvs"]))


@cli.command("experiment")
@click.argument("exp_id")
@click.option("--name", default=None, help="Run directory name (default exp-<id>).")
@click.pass_context
def experiment_cmd(ctx, exp_id, name):
    """Run one catalogue experiment and score it; see ids with --help.

    Known ids: 1, 1b, 2, 3, 4, 5, 6, 7, 8, 9, 11.
    """
    spec = experiment_spec(exp_id)
    rec = run_experiment(spec, workers=ctx.obj["workers"])
    d = _run_dir(ctx, name or f"exp-{spec.exp_id}")
    _write_json(d / "spec.json", spec_payload(spec))
    _write_json(d / "results.json", rec.to_dict())
    if rec.error is None:
        _experiment_csv(d, spec.exp_id, rec.results)
    for check, ok in rec.verdicts.items():
        click.echo(f"  {'PASS' if ok else 'FAIL'}  {check}")
    click.echo(f"experiment {spec.exp_id} "
               f"{'passed' if rec.passed else 'FAILED'} -> {d / 'results.json'}")
    if rec.error is not None:
        raise EvaluationError(
            f"experiment {spec.exp_id} failed in {rec.error['stage']}: "
            f"{rec.error['message']}")


@cli.command("bench-scaling")
@click.option("--node-counts", default="5,10,20,40", show_default=True,
              help="Network sizes to time, comma-separated.")
@click.option("--events", type=int, default=4000, show_default=True,
              help="Events per timed dataset.")
@click.option("--repeats", type=int, default=5, show_default=True,
              help="Timed iterations per pass (3 passes per size).")
@click.option("--seeds", default="0", show_default=True)
@click.option("--name", default="bench-scaling", show_default=True)
@click.pass_context
def bench_scaling_cmd(ctx, node_counts, events, repeats, seeds, name):
    """Time EM iterations across network sizes and fit the growth exponent."""
    counts = _parse_ints(node_counts)
    seed_list = ([ctx.obj["seed"]] if ctx.obj["seed"] is not None
                 else _parse_ints(seeds))
    bench = scaling_benchmark(counts, events_target=events, seeds=seed_list,
                              repeats=repeats)
    d = _run_dir(ctx, name)
    _write_json(d / "spec.json", {
        "command": "bench-scaling", "node_counts": counts, "events": events,
        "repeats": bench["repeats"], "seeds": seed_list,
    })
    _write_csv(d / "scaling.csv",
               ["n_nodes", "n_candidates", "seconds_per_iteration",
                "per_event_pair_us"],
               zip(bench["node_counts"], bench["candidate_counts"],
                   bench["seconds_per_iteration"], bench["per_event_pair_us"]))
    _write_json(d / "results.json", bench)
    click.echo(f"growth exponent {bench['exponent']:.3f} over n={counts}"
               f" -> {d / 'scaling.csv'}")


@cli.command("ingest-check")
@click.option("--events", "events_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Event CSV.")
@click.option("--horizon", type=float, default=None,
              help="Override the sidecar observation window.")
@click.option("--num-nodes", type=int, default=None,
              help="Override the sidecar node count.")
def ingest_check_cmd(events_path, horizon, num_nodes):
    """Validate an event file; exit 1 with a row-level message if malformed."""
    seq = ingest_events(events_path, horizon=horizon, num_nodes=num_nodes)
    counts = np.bincount(seq.nodes, minlength=seq.num_nodes) if len(seq) else \
        np.zeros(seq.num_nodes, dtype=int)
    click.echo(f"ok: {len(seq)} events, {seq.num_nodes} nodes, "
               f"window [0, {seq.horizon:g}]")
    click.echo("events per node: " + ",".join(str(int(c)) for c in counts))


def main(argv=None) -> int:
    """Entry point with deterministic exit codes (0 ok, 1 invalid, 2 failed)."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except EvaluationError as exc:
        click.echo(f"runtime failure: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort exit-code mapping
        click.echo(f"unexpected failure: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
