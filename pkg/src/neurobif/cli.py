"""Command-line entry point wiring models, analyses and artifact files.

Subcommands: equilibria, codim2, cycles, flc-curve, simulate, sde,
seizure, bands.  Each writes its schema'd CSV/JSON artifacts plus a
manifest.json into --out.  Exit status: 0 success, 1 configuration error,
2 numerical failure (partial outputs carry "partial": true in the
manifest).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from . import models as M
from . import artifacts as A
from .errors import ConfigError, NumericalFailure

STATE_NAMES = {
    "jr": ["Y0", "X", "Y2", "Y3", "Y4", "Y5"],
    "wc": ["Y0", "X", "Y2", "Y3", "Z", "Y5", "Y6", "Y7", "Y8", "Y9"],
    "dbt": ["x", "y"],
}

DEFAULT_TOLS = {
    "ode_rtol": 1e-8,
    "shooting_rtol": 1e-10,
    "sde_dt": 1e-3,
}


@dataclass
class RunConfig:
    """Fully resolved run configuration."""

    model: str = "jr"
    preset: str = None
    overrides: dict = dc_field(default_factory=dict)
    out: str = "."
    seed: int = 0
    tolerances: dict = dc_field(default_factory=lambda: dict(DEFAULT_TOLS))
    pair: tuple = None            # (theta_name, drive_name)
    range: tuple = None           # (lo, hi, n) for theta
    x_range: tuple = None
    param: str = None
    T: float = 100.0
    dt: float = 1e-3
    noise: dict = dc_field(default_factory=dict)
    ic: list = None
    from_x: float = None
    input_file: str = None

    def params(self):
        name = self.preset or f"{self.model}-default"
        p = M.preset(name)
        if p.model != self.model:
            raise ConfigError(f"preset {name!r} is for model {p.model!r}, "
                              f"not {self.model!r}")
        for k, v in self.overrides.items():
            p = M.set_param(p, k, v)
        return p


def _parse_range(text, key="range"):
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"{key} must be lo:hi or lo:hi:n, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) == 3 else None
    except ValueError as exc:
        raise ConfigError(f"bad {key} value {text!r}: {exc}") from None
    if not lo < hi:
        raise ConfigError(f"{key} must be non-empty (lo < hi), got {text!r}")
    return (lo, hi, n)


def _parse_kv(text, key):
    if "=" not in text:
        raise ConfigError(f"{key} expects name=value, got {text!r}")
    name, val = text.split("=", 1)
    try:
        return name.strip(), float(val)
    except ValueError:
        raise ConfigError(f"{key} {name!r}: not a number: {val!r}") from None


def _parse_noise(text):
    out = {}
    mapping = {"mean": "mean", "std": "std", "slope": "slope",
               "tauc": "correlation_time", "correlation_time": "correlation_time"}
    for item in text.split(","):
        name, val = _parse_kv(item, "--noise")
        if name not in mapping:
            raise ConfigError(f"--noise: unknown field {name!r}; "
                              f"known: {sorted(mapping)}")
        out[mapping[name]] = val
    return out

_CONFIG_KEYS = {"model", "preset", "set", "out", "seed", "tol", "pair",
                "range", "x_range", "param", "T", "dt", "noise", "ic",
                "from_x", "in"}


def parse_config(args, file_payload=None):
    """Resolve flags over optional config-file values into a RunConfig."""
    cfg = RunConfig()
    if file_payload:
        for key in file_payload:
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"config: unknown key {key!r}; "
                                  f"known: {sorted(_CONFIG_KEYS)}")
        cfg.model = file_payload.get("model", cfg.model)
        cfg.preset = file_payload.get("preset", cfg.preset)
        sets = file_payload.get("set", {})
        if not isinstance(sets, dict):
            raise ConfigError("config: 'set' must be an object of name->value")
        cfg.overrides.update({k: float(v) for k, v in sets.items()})
        cfg.out = file_payload.get("out", cfg.out)
        cfg.seed = int(file_payload.get("seed", cfg.seed))
        cfg.tolerances.update(file_payload.get("tol", {}))
        if "pair" in file_payload:
            cfg.pair = tuple(file_payload["pair"])
        if "range" in file_payload:
            cfg.range = _parse_range(str(file_payload["range"]))
        if "x_range" in file_payload:
            cfg.x_range = _parse_range(str(file_payload["x_range"]), "x_range")
        cfg.param = file_payload.get("param", cfg.param)
        cfg.T = float(file_payload.get("T", cfg.T))
        cfg.dt = float(file_payload.get("dt", cfg.dt))
        cfg.noise.update(file_payload.get("noise", {}))
        if "ic" in file_payload:
            cfg.ic = [float(v) for v in file_payload["ic"]]
        if "from_x" in file_payload:
            cfg.from_x = float(file_payload["from_x"])
        cfg.input_file = file_payload.get("in", cfg.input_file)

    if getattr(args, "model", None):
        cfg.model = args.model
    if getattr(args, "preset", None):
        cfg.preset = args.preset
    for item in getattr(args, "set", None) or []:
        k, v = _parse_kv(item, "--set")
        cfg.overrides[k] = v
    if getattr(args, "out", None):
        cfg.out = args.out
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    for item in getattr(args, "tol", None) or []:
        k, v = _parse_kv(item, "--tol")
        if k not in DEFAULT_TOLS:
            raise ConfigError(f"--tol: unknown tolerance {k!r}; "
                              f"known: {sorted(DEFAULT_TOLS)}")
        cfg.tolerances[k] = v
    if getattr(args, "pair", None):
        names = args.pair.split(",")
        if len(names) != 2:
            raise ConfigError(f"--pair expects theta,drive, got {args.pair!r}")
        cfg.pair = (names[0].strip(), names[1].strip())
    if getattr(args, "range", None):
        cfg.range = _parse_range(args.range)
    if getattr(args, "x_range", None):
        cfg.x_range = _parse_range(args.x_range, "--x-range")
    if getattr(args, "param", None):
        cfg.param = args.param
    if getattr(args, "T", None) is not None:
        cfg.T = args.T
    if getattr(args, "dt", None) is not None:
        cfg.dt = args.dt
    if getattr(args, "noise", None):
        cfg.noise.update(_parse_noise(args.noise))
    if getattr(args, "ic", None):
        cfg.ic = [float(v) for v in args.ic.split(",")]
    if getattr(args, "from_x", None) is not None:
        cfg.from_x = args.from_x
    if getattr(args, "input", None):
        cfg.input_file = args.input

    # validate model/overrides early
    cfg.params()
    if not os.path.isdir(cfg.out):
        os.makedirs(cfg.out, exist_ok=True)
    if not os.access(cfg.out, os.W_OK):
        raise ConfigError(f"output directory {cfg.out!r} is not writable")
    return cfg


def _manifest(cfg, subcommand, t0, outputs, partial=False, extra=None):
    import numba
    import scipy
    payload = {
        "subcommand": subcommand,
        "model": cfg.model,
        "preset": cfg.preset or f"{cfg.model}-default",
        "overrides": cfg.overrides,
        "seed": cfg.seed,
        "tolerances": cfg.tolerances,
        "noise": cfg.noise,
        "versions": {"neurobif": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "numba": numba.__version__},
        "wall_time_s": time.time() - t0,
        "partial": partial,
        "outputs": sorted(outputs),
    }
    if extra:
        payload.update(extra)
    A.write_json(os.path.join(cfg.out, "manifest.json"), payload)


def _cmd_equilibria(cfg):
    from . import equilibria as EQ
    params = cfg.params()
    xr = (cfg.x_range[0], cfg.x_range[1]) if cfg.x_range else None
    npts = cfg.x_range[2] if cfg.x_range else None
    branch, points = EQ.codim1_report(params, x_range=xr, n_points=npts)
    header, rows = A.equilibria_rows(branch)
    A.write_csv(os.path.join(cfg.out, "equilibria.csv"), header, rows)
    A.write_json(os.path.join(cfg.out, "bifpoints.json"),
                 A.bifpoints_payload(points))
    return ["equilibria.csv", "bifpoints.json"], {}


def _cmd_codim2(cfg):
    from . import codim2 as C2
    params = cfg.params()
    if cfg.pair is None or cfg.range is None:
        raise ConfigError("codim2 needs --pair theta,P and --range lo:hi[:n]")
    theta = cfg.pair[0]
    if cfg.pair[1] != params.drive_name:
        raise ConfigError(f"the second plane axis must be the drive "
                          f"{params.drive_name!r}, got {cfg.pair[1]!r}")
    n_theta = cfg.range[2] or 200
    rep = C2.codim2_report(params, theta, (cfg.range[0], cfg.range[1]),
                           n_theta=n_theta)
    outputs = []
    for kind_key in ("sn_curves", "hopf_curves"):
        for i, curve in enumerate(rep[kind_key]):
            name = f"curve_{curve.kind}_{i}.csv"
            header, rows = A.curve_rows(curve)
            A.write_csv(os.path.join(cfg.out, name), header, rows)
            outputs.append(name)
    A.write_json(os.path.join(cfg.out, "bifpoints.json"),
                 A.bifpoints_payload(rep["points"]))
    events = [{"type": e.type, "kind": e.kind, "theta": e.theta,
               "X": e.X, "P": e.P}
              for e in rep["sn_events"] + rep["hopf_events"]]
    A.write_json(os.path.join(cfg.out, "curve_events.json"), events)
    outputs += ["bifpoints.json", "curve_events.json"]
    return outputs, {"pair": list(cfg.pair), "range": list(cfg.range[:2])}


def _cmd_cycles(cfg):
    from . import cycles as CY
    params = cfg.params()
    census = CY.cycle_census(params,
                             rtol=cfg.tolerances.get("shooting_rtol", 1e-10))
    outputs = []
    for tag, branch in census["branches"].items():
        name = f"cycles_{tag}.csv"
        header, rows = A.cycles_rows(branch)
        A.write_csv(os.path.join(cfg.out, name), header, rows)
        outputs.append(name)
    points = census["folds"] + census["snics"]
    A.write_json(os.path.join(cfg.out, "bifpoints.json"),
                 A.bifpoints_payload(points))
    outputs.append("bifpoints.json")
    return outputs, {}


def _cmd_flc_curve(cfg):
    from . import cycles as CY
    params = cfg.params()
    if cfg.range is None:
        raise ConfigError("flc-curve needs --range lo:hi[:n]")
    theta = cfg.param or "j"
    samples, special = CY.trace_flc_curve(
        params, (cfg.range[0], cfg.range[1]), theta_name=theta,
        n_theta=cfg.range[2] or 8)
    drive = params.drive_name
    header = [theta, drive, "X", "period", "multiplier"]
    rows = [[s[theta], s[drive], s["X"], s["period"], s["multiplier"]]
            for s in samples]
    A.write_csv(os.path.join(cfg.out, "flc_curve.csv"), header, rows)
    points = [pt for pt in special.values() if hasattr(pt, "coords")]
    A.write_json(os.path.join(cfg.out, "bifpoints.json"),
                 A.bifpoints_payload(points))
    extras = {name: pt for name, pt in special.items()
              if not hasattr(pt, "coords")}
    A.write_json(os.path.join(cfg.out, "curve_events.json"),
                 [dict(v, name=k) for k, v in extras.items()])
    return ["flc_curve.csv", "bifpoints.json", "curve_events.json"], {}


def _cmd_simulate(cfg):
    from . import cycles as CY
    from . import scenarios as SC
    params = cfg.params()
    if cfg.ic is not None:
        x0 = np.asarray(cfg.ic, dtype=float)
    elif cfg.from_x is not None:
        x0, _ = M.equilibrium_from_x(params, cfg.from_x)
    else:
        x0 = SC._default_sde_start(params, M.get_param(params, params.drive_name))
    traj = CY.integrate(params, x0, (0.0, cfg.T),
                        tol=cfg.tolerances.get("ode_rtol", 1e-8))
    sde_like = SC.SdeTrajectory(
        t=traj.t, y=traj.y,
        p_inst=np.full(len(traj.t), M.get_param(params, params.drive_name)),
        noise=SC.NoiseSpec(), x_index=params.x_index)
    header, rows = A.traj_rows(sde_like, STATE_NAMES[params.model])
    A.write_csv(os.path.join(cfg.out, "traj.csv"), header, rows)
    return ["traj.csv"], {"T": cfg.T}


def _cmd_sde(cfg):
    from . import scenarios as SC
    params = cfg.params()
    noise = SC.NoiseSpec(seed=cfg.seed, **cfg.noise)
    traj = SC.simulate_sde(params, noise, cfg.T, dt=cfg.dt)
    header, rows = A.traj_rows(traj, STATE_NAMES[params.model])
    A.write_csv(os.path.join(cfg.out, "traj.csv"), header, rows)
    train = SC.detect_spikes(traj)
    header, rows = A.spikes_rows(train)
    A.write_csv(os.path.join(cfg.out, "spikes.csv"), header, rows)
    return ["traj.csv", "spikes.csv"], {"T": cfg.T, "dt": cfg.dt}


def _cmd_seizure(cfg):
    from . import scenarios as SC
    params = cfg.params()
    noise = dict(cfg.noise)
    traj, train, phases = SC.seizure_scenario(
        params, mu0=noise.get("mean", 1.5), slope=noise.get("slope", 1e-3),
        sigma=noise.get("std", 0.4), T=cfg.T, dt=cfg.dt, seed=cfg.seed)
    header, rows = A.traj_rows(traj, STATE_NAMES[params.model])
    A.write_csv(os.path.join(cfg.out, "traj.csv"), header, rows)
    header, rows = A.spikes_rows(train)
    A.write_csv(os.path.join(cfg.out, "spikes.csv"), header, rows)
    A.write_json(os.path.join(cfg.out, "phases.json"),
                 A.phases_payload(phases))
    return ["traj.csv", "spikes.csv", "phases.json"], {"T": cfg.T, "dt": cfg.dt}


def _cmd_bands(cfg):
    from .cycles import classify_band
    if not cfg.input_file:
        raise ConfigError("bands needs --in cycles.csv")
    header, rows = A.read_csv(cfg.input_file)
    if "period" not in header:
        raise ConfigError(f"{cfg.input_file}: no 'period' column")
    ip = header.index("period")
    counts = {}
    out_rows = []
    for row in rows:
        period = float(row[ip])
        band = classify_band(period)
        counts[band] = counts.get(band, 0) + 1
        out_rows.append([period, band])
    A.write_csv(os.path.join(cfg.out, "bands.csv"), ["period", "band"],
                out_rows)
    A.write_json(os.path.join(cfg.out, "bands.json"), counts)
    return ["bands.csv", "bands.json"], {"input": cfg.input_file}


_COMMANDS = {
    "equilibria": _cmd_equilibria,
    "codim2": _cmd_codim2,
    "cycles": _cmd_cycles,
    "flc-curve": _cmd_flc_curve,
    "simulate": _cmd_simulate,
    "sde": _cmd_sde,
    "seizure": _cmd_seizure,
    "bands": _cmd_bands,
}


def run(subcommand, cfg):
    """Execute one subcommand; returns the process exit status."""
    t0 = time.time()
    try:
        outputs, extra = _COMMANDS[subcommand](cfg)
    except ConfigError:
        raise
    except NumericalFailure as exc:
        _manifest(cfg, subcommand, t0, [], partial=True,
                  extra={"error": str(exc)})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    _manifest(cfg, subcommand, t0, outputs, extra=extra)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="neurobif",
        description="Bifurcation analysis of neural mass models")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", choices=["jr", "wc", "dbt"])
        p.add_argument("--preset")
        p.add_argument("--set", action="append", metavar="NAME=VALUE")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", action="append", metavar="NAME=VALUE")
        p.add_argument("--config", default=None)
        p.add_argument("--pair", default=None)
        p.add_argument("--range", default=None)
        p.add_argument("--x-range", dest="x_range", default=None)
        p.add_argument("--param", default=None)
        p.add_argument("--T", type=float, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--noise", default=None)
        p.add_argument("--ic", default=None)
        p.add_argument("--from-x", dest="from_x", type=float, default=None)
        p.add_argument("--in", dest="input", default=None)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        file_payload = None
        if args.config:
            file_payload = A.read_json(args.config)
        cfg = parse_config(args, file_payload)
        return run(args.subcommand, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
