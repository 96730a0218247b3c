"""File formats: event CSV with a JSON metadata sidecar, and params JSON.

Events travel as a two-column CSV (``time,node``, times ascending); the
observation window and node count ride in a sidecar ``<stem>.meta.json``
holding ``{"T": ..., "N": ...}`` (or are supplied explicitly).  Times are
written with ``repr`` so a write/read round trip is value-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import DomainError, EventSequence, Hyperedge, ModelParams

__all__ = [
    "meta_path_for",
    "write_events",
    "ingest_events",
    "write_params",
    "read_params",
]


def meta_path_for(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_events(path, seq: EventSequence) -> Path:
    """Write the sequence as CSV plus sidecar metadata; returns the sidecar path."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as fh:
        fh.write("time,node\n")
        for t, n in zip(seq.times, seq.nodes):
            fh.write(f"{float(t)!r},{int(n)}\n")
    mp = meta_path_for(p)
    with open(mp, "w") as fh:
        json.dump({"T": seq.horizon, "N": seq.num_nodes}, fh)
        fh.write("\n")
    return mp


def ingest_events(path, horizon: float | None = None, num_nodes: int | None = None) -> EventSequence:
    """Read an event CSV, validating as it goes.

    ``horizon``/``num_nodes`` override the sidecar when given.  Parse problems
    report the 1-based line number; ordering and range violations report the
    offending row.  Times must be ascending (ties allowed), nodes in range,
    times within the window.
    """
    p = Path(path)
    if horizon is None or num_nodes is None:
        mp = meta_path_for(p)
        if not mp.exists():
            raise DomainError(
                f"no metadata sidecar {mp} and horizon/num_nodes not supplied")
        meta = json.loads(mp.read_text())
        if horizon is None:
            horizon = meta.get("T")
        if num_nodes is None:
            num_nodes = meta.get("N")
    if horizon is None or num_nodes is None:
        raise DomainError("horizon (T) and num_nodes (N) are both required")

    times: list[float] = []
    nodes: list[int] = []
    with open(p) as fh:
        header = fh.readline()
        if header.strip() != "time,node":
            raise DomainError(f"line 1: expected header 'time,node', got {header.strip()!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise DomainError(f"line {lineno}: expected 'time,node', got {line!r}")
            try:
                t = float(parts[0])
                n = int(parts[1])
            except ValueError as exc:
                raise DomainError(f"line {lineno}: {exc}") from None
            times.append(t)
            nodes.append(n)

    ta = np.asarray(times)
    na = np.asarray(nodes, dtype=np.int64)
    if ta.size:
        bad = np.flatnonzero(np.diff(ta) < 0)
        if bad.size:
            raise DomainError(f"row {int(bad[0]) + 1}: times not ascending")
        oob = np.flatnonzero((na < 0) | (na >= int(num_nodes)))
        if oob.size:
            k = int(oob[0])
            raise DomainError(f"row {k}: node {na[k]} outside [0, {num_nodes})")
        late = np.flatnonzero((ta < 0) | (ta > float(horizon)))
        if late.size:
            k = int(late[0])
            raise DomainError(f"row {k}: time {ta[k]!r} outside [0, {horizon!r}]")
    return EventSequence(ta, na, int(num_nodes), float(horizon))


def params_to_dict(params: ModelParams) -> dict:
    return {
        "mu": params.mu.tolist(),
        "alpha_pw": params.alpha_pw.tolist(),
        "hyperedges": [{"members": list(e.members), "weight": w}
                       for e, w in params.hyperedges],
        "beta": params.beta,
        "delta": params.delta,
    }


def params_from_dict(d: dict) -> ModelParams:
    try:
        edges = tuple((Hyperedge(h["members"]), float(h["weight"]))
                      for h in d.get("hyperedges", []))
        return ModelParams(np.asarray(d["mu"], dtype=float),
                           np.asarray(d["alpha_pw"], dtype=float),
                           edges, float(d["beta"]), float(d["delta"]))
    except KeyError as exc:
        raise DomainError(f"params object missing field {exc}") from None


def write_params(path, params: ModelParams) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as fh:
        json.dump(params_to_dict(params), fh, indent=2)
        fh.write("\n")


def read_params(path) -> ModelParams:
    return params_from_dict(json.loads(Path(path).read_text()))
