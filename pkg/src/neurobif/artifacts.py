"""Machine-readable artifact files: CSV and JSON schemas.

All floats are written in scientific notation with 17 significant digits
(lossless double round-trip); files are written atomically (temp file +
rename) and re-writing a parsed artifact reproduces it byte for byte.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

__all__ = [
    "fmt", "write_csv", "read_csv", "write_json", "read_json",
    "equilibria_rows", "bifpoint_obj", "bifpoints_payload", "cycles_rows",
    "curve_rows", "traj_rows", "spikes_rows", "phases_payload",
]


def fmt(x):
    """Canonical float formatting: 17 significant digits, scientific."""
    return format(float(x), ".16e")


def _atomic_write(path, data):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-artifact-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    """UTF-8 CSV with a header row; floats canonically formatted."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool) or isinstance(v, (np.bool_,)):
                cells.append("1" if v else "0")
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            elif isinstance(v, str):
                cells.append(v)
            else:
                cells.append(fmt(v))
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path):
    """Parse a CSV written by :func:`write_csv`: (header, rows of strings)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


def write_json(path, payload):
    _atomic_write(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# schema builders


def equilibria_rows(branch):
    """Header and rows for equilibria.csv."""
    n = branch.states.shape[1]
    header = (["X", "P", "stable", "n_unstable"]
              + [f"state_{i}" for i in range(n)]
              + [f"eig_re_{i}" for i in range(n)]
              + [f"eig_im_{i}" for i in range(n)])
    stable = branch.stable
    n_unstable = branch.n_unstable
    rows = []
    for k in range(len(branch.X)):
        ev = np.sort_complex(branch.eigvals[k])
        rows.append([branch.X[k], branch.P[k], bool(stable[k]),
                     int(n_unstable[k])]
                    + list(branch.states[k])
                    + [v.real for v in ev] + [v.imag for v in ev])
    return header, rows


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def bifpoint_obj(pt):
    """bifpoints.json element for one BifurcationPoint."""
    return {
        "kind": pt.kind,
        "plane": {"names": list(pt.plane)},
        "coords": {k: float(v) for k, v in pt.coords.items()},
        "diagnostics": _jsonable({k: v for k, v in pt.diagnostics.items()}),
    }


def bifpoints_payload(points):
    return [bifpoint_obj(p) for p in points]


CYCLE_COLUMNS = ["P", "period", "freq_hz", "x_min", "x_max",
                 "max_nontrivial_multiplier_modulus", "stable", "band",
                 "event"]


def cycles_rows(branch, a_rate=100.0):
    """Header and rows for cycles.csv (one file per branch)."""
    rows = []
    events_at = {}
    for ev in branch.events:
        events_at.setdefault(round(ev.P, 12), ev.kind)
    for c in branch.cycles:
        rows.append([
            c.P, c.period, a_rate / c.period, c.x_min, c.x_max,
            c.max_nontrivial_modulus(), bool(c.stable), c.band(a_rate),
            events_at.get(round(c.P, 12), ""),
        ])
    return CYCLE_COLUMNS, rows


def curve_rows(curve):
    """Header and rows for a codim-2 curve CSV."""
    diag_keys = sorted({k for d in curve.diagnostics for k in d
                        if not isinstance(d[k], np.ndarray)})
    header = [curve.plane[0], curve.plane[1], "X"] + diag_keys
    rows = []
    for th, P, X, d in zip(curve.theta, curve.P, curve.X, curve.diagnostics):
        rows.append([th, P, X] + [d.get(k, float("nan")) for k in diag_keys])
    return header, rows


def traj_rows(traj, state_names=None):
    n = traj.y.shape[1]
    names = state_names or [f"state_{i}" for i in range(n)]
    header = ["tau"] + list(names) + ["P_instantaneous"]
    rows = [[traj.t[k]] + list(traj.y[k]) + [traj.p_inst[k]]
            for k in range(len(traj.t))]
    return header, rows


def spikes_rows(train):
    header = ["time", "amplitude", "is_pds"]
    rows = [[train.times[k], train.amplitudes[k], bool(train.is_pds[k])]
            for k in range(len(train))]
    return header, rows


def phases_payload(phases):
    return [{"phase": name, "start": float(a), "end": float(b)}
            for name, a, b in phases]
