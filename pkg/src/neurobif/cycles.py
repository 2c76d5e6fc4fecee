"""Limit cycles: shooting, Floquet analysis, one-parameter families.

Cycles are located as fixed points of the Poincare return map on the
hyperplane X = const (positive crossing), solved by Newton iteration with
the monodromy matrix assembled from the variational equations.  Families
over the drive P are continued by natural-parameter stepping with an
adaptive step: the step halves on failure and grows on easy success, so a
fold of cycles shows up as the step collapsing below resolution, with the
nontrivial Floquet multiplier approaching +1 as corroborating evidence.
Period blow-up near a saddle-node marks saddle-node-homoclinic (SNIC)
candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import models as M
from . import _kernels as K
from .equilibria import BifurcationPoint, codim1_report
from .errors import DomainError, NoConvergence, NotACycle, NumericalFailure

__all__ = [
    "Trajectory", "LimitCycle", "CycleBranch", "BranchEvent", "integrate",
    "find_cycle", "continue_cycles", "detect_fold_of_cycles", "detect_snic",
    "classify_band", "seed_cycle_near_hopf", "seed_epileptic_cycle",
    "cycle_census", "trace_flc_curve", "DEFAULT_A_RATE",
]

_MODEL_IDS = {"jr": 0, "wc": 1, "dbt": 2}
DEFAULT_A_RATE = 100.0      # excitatory rate constant used for Hz conversion

PERIOD_BLOWUP = 100.0       # dimensionless period treated as homoclinic blow-up
DP_MIN = 1e-5               # fold resolution in P
AMP_TOL = 2e-3              # amplitude below which a family has shrunk to a point


@dataclass
class Trajectory:
    """Deterministic trajectory samples with integrator statistics."""

    t: np.ndarray
    y: np.ndarray
    stats: dict


@dataclass
class LimitCycle:
    """A periodic orbit anchored on the section X = anchor[x_index]."""

    P: float
    anchor: np.ndarray
    period: float
    multipliers: np.ndarray
    x_min: float
    x_max: float
    stable: bool

    @property
    def amplitude(self):
        return self.x_max - self.x_min

    def band(self, a_rate=DEFAULT_A_RATE):
        return classify_band(self.period, a_rate)

    def trivial_multiplier_error(self):
        return float(np.min(np.abs(self.multipliers - 1.0)))

    def max_nontrivial_modulus(self):
        k = int(np.argmin(np.abs(self.multipliers - 1.0)))
        rest = np.delete(self.multipliers, k)
        return float(np.max(np.abs(rest))) if rest.size else 0.0


@dataclass
class BranchEvent:
    kind: str                 # fold_of_cycles, hopf_endpoint, period_blowup,
    P: float                  # range_end, no_convergence
    details: dict = dc_field(default_factory=dict)


@dataclass
class CycleBranch:
    """Cycles met along one natural-parameter continuation run."""

    params: object
    cycles: list
    events: list

    def periods(self):
        return np.array([c.period for c in self.cycles])

    def drives(self):
        return np.array([c.P for c in self.cycles])


def _mid(params):
    return _MODEL_IDS[params.model]


def integrate(params, x0, t_span, tol=1e-8, n_out=1000, max_steps=20_000_000):
    """Adaptive trajectory of the deterministic model on [t0, t1]."""
    if not (1e-12 <= tol <= 1e-3):
        raise DomainError(f"tol must lie in [1e-12, 1e-3], got {tol}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (params.dim,):
        raise ValueError(f"state has shape {x0.shape}, expected ({params.dim},)")
    t_eval = np.linspace(t0, t1, int(n_out))
    ys, status, acc, rej = K.integrate_sampled(
        _mid(params), x0, params.pack(), t_eval - t0, tol, tol * 1e-3, max_steps)
    if status == K.UNDERFLOW:
        raise NumericalFailure(
            "step-size underflow (stiffness?)",
            {"t": t_eval[len(ys) - 1] if len(ys) else t0})
    if status != K.OK:
        raise NumericalFailure(f"integration failed with status {status}",
                               {"t": t_eval[len(ys) - 1] if len(ys) else t0})
    return Trajectory(t=t_eval, y=ys,
                      stats={"steps": int(acc), "rejected": int(rej),
                             "tol": tol})


def _return_map(params, y0, x_sec, rtol, t_max, variational):
    """One positive-crossing return; optionally with monodromy columns."""
    mid = _mid(params)
    n = params.dim
    ix = params.x_index
    c = params.pack()
    atol = rtol * 1e-2
    if variational:
        yext = np.zeros(n + n * n + n)
        yext[:n] = y0
        for i in range(n):
            yext[n + i * n + i] = 1.0
        t, ye, xmin, xmax, status = K.integrate_to_section(
            mid, 1, yext, c, ix, x_sec, t_max, rtol, atol, 50_000_000)
        yR = ye[:n]
        Mono = ye[n:n + n * n].reshape(n, n)
        return t, yR, Mono, xmin, xmax, status
    t, yR, xmin, xmax, status = K.integrate_to_section(
        mid, 0, y0, c, ix, x_sec, t_max, rtol, atol, 50_000_000)
    return t, yR, None, xmin, xmax, status


def find_cycle(params, guess, x_section=None, rtol=1e-10, tol=1e-8,
               t_max=400.0, max_iter=30):
    """Locate a limit cycle near ``guess`` by Poincare-section shooting.

    The section is the hyperplane X = x_section crossed with dX/dt > 0;
    by default the section passes through the guess.  Raises
    :class:`NotACycle` when the orbit never returns, :class:`NoConvergence`
    when the Newton iteration stalls.
    """
    n = params.dim
    ix = params.x_index
    guess = np.asarray(guess, dtype=float)
    x_sec = float(guess[ix]) if x_section is None else float(x_section)

    # land on the section first
    t, y, _, _, _, status = _return_map(params, guess, x_sec, rtol, t_max, False)
    if status != K.OK:
        raise NotACycle(f"no section return from guess (status {status})",
                        {"last": guess})
    free = [i for i in range(n) if i != ix]
    eix = np.zeros(n)
    eix[ix] = 1.0
    resid_prev = np.inf
    for it in range(max_iter):
        T, yR, Mono, xmin, xmax, status = _return_map(params, y, x_sec, rtol,
                                                      t_max, True)
        if status != K.OK:
            raise NotACycle(f"return integration failed (status {status})",
                            {"last": y})
        r = yR - y
        resid = float(np.max(np.abs(r[free])))
        if resid <= tol:
            mults = np.linalg.eigvals(Mono)
            stable = _is_stable(mults)
            return LimitCycle(P=float(M.get_param(params, params.drive_name)),
                              anchor=y.copy(), period=float(T),
                              multipliers=mults, x_min=float(xmin),
                              x_max=float(xmax), stable=stable)
        fR = M.field(params, yR)
        denom = fR[ix]
        if denom == 0.0:
            raise NumericalFailure("section tangency at return point",
                                   {"last": y})
        DP = (np.eye(n) - np.outer(fR, eix) / denom) @ Mono
        A = DP[np.ix_(free, free)] - np.eye(n - 1)
        try:
            step = np.linalg.solve(A, -r[free])
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular shooting system", {"last": y}) from exc
        # cap the update so the iterate stays near the orbit
        cap = 0.5 * max(1.0, xmax - xmin)
        nstep = float(np.max(np.abs(step)))
        if nstep > cap:
            step *= cap / nstep
        lam = 1.0
        improved = False
        for _ in range(6):
            y_try = y.copy()
            y_try[free] += lam * step
            _, yR2, _, _, _, st2 = _return_map(params, y_try, x_sec, rtol,
                                               t_max, False)
            if st2 == K.OK:
                r2 = float(np.max(np.abs((yR2 - y_try)[free])))
                if r2 < resid or r2 < tol:
                    y = y_try
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            raise NoConvergence("shooting Newton stalled", {"last": y})
    raise NoConvergence("shooting Newton iteration cap", {"last": y})


def _is_stable(mults):
    k = int(np.argmin(np.abs(mults - 1.0)))
    rest = np.delete(mults, k)
    if rest.size == 0:
        return True
    return bool(np.all(np.abs(rest) < 1.0 - 1e-6))


def classify_band(period, a_rate=DEFAULT_A_RATE):
    """EEG band of a dimensionless period under the time scale tau = a*t.

    Bands are closed on the left: delta [0.5, 4), theta [4, 8),
    alpha [8, 13), beta [13, 30), gamma [30, inf); below 0.5 Hz is
    sub_delta.  (Theta is extended to the alpha edge at 8 Hz so that the
    classification is total.)
    """
    if not period > 0:
        raise DomainError(f"period must be positive, got {period}")
    f = a_rate / period
    if f < 0.5:
        return "sub_delta"
    if f < 4.0:
        return "delta"
    if f < 8.0:
        return "theta"
    if f < 13.0:
        return "alpha"
    if f < 30.0:
        return "beta"
    return "gamma"


# ---------------------------------------------------------------------------
# seeding


def seed_cycle_near_hopf(params, hopf_point, offset=None, rtol=1e-10):
    """Shoot for the small cycle emerging from a Hopf point.

    The cycle side is -sign(l1*d): supercritical cycles live where the
    equilibrium is unstable, subcritical ones where it is stable.  The
    initial guess displaces the equilibrium along the critical eigenplane
    with the amplitude predicted by the Hopf normal form.
    """
    l1 = hopf_point.diagnostics["l1"]
    d = hopf_point.diagnostics["d_transversality"]
    omega = hopf_point.diagnostics["omega"]
    P_h = hopf_point.coords[params.drive_name]
    side = -math.copysign(1.0, l1 * d)
    X_h = hopf_point.coords["X"]
    state, _ = M.equilibrium_from_x(params, X_h)
    A = M.jacobian_batch(M.set_param(params, params.drive_name, P_h),
                         state[None, :])[0]
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmin(np.abs(vals - 1j * omega)))
    q = vecs[:, k]
    q = q / np.linalg.norm(q)
    offsets = [offset] if offset is not None else [0.01, 0.03, 0.1, 0.3]
    last_exc = None
    for dP in offsets:
        P_try = P_h + side * dP
        amp = math.sqrt(abs(d * dP / l1)) if l1 != 0 else 0.05
        amp = min(max(amp, 1e-3), 0.5)
        guess = state + 2.0 * amp * np.real(q)
        p_try = M.set_param(params, params.drive_name, P_try)
        try:
            cyc = find_cycle(p_try, guess, rtol=rtol)
            if cyc.amplitude > 0.5 * AMP_TOL:
                return cyc
        except (NotACycle, NoConvergence, NumericalFailure) as exc:
            last_exc = exc
    raise NoConvergence(f"could not seed a cycle at the Hopf point {P_h:.4f}",
                        {"last": last_exc})


def seed_epileptic_cycle(params, sn_points=None, rtol=1e-10,
                         offsets=(0.05, 0.1, 0.2, 0.35), transient=300.0):
    """Find the large slow cycle just past the upper saddle-node.

    Starting from a down-state-like initial condition slightly above the
    largest saddle-node drive value, the flow is attracted by the large
    epileptic orbit (when one exists); the converged transient seeds the
    shooting solver.
    """
    if sn_points is None:
        _, pts = codim1_report(params)
        sn_points = [p for p in pts if p.kind == "saddle_node"]
    if not sn_points:
        raise NotACycle("no saddle-node to seed the epileptic family from", {})
    top = max(sn_points, key=lambda p: p.coords[params.drive_name])
    P_sn = top.coords[params.drive_name]
    X_sn = top.coords["X"]
    down_state, _ = M.equilibrium_from_x(params, X_sn - 2.0)
    mid = _mid(params)
    last_exc = None
    for off in offsets:
        p_try = M.set_param(params, params.drive_name, P_sn + off)
        c = p_try.pack()
        yT, status = K.integrate_final(mid, 0, down_state, c, transient,
                                       1e-9, 1e-12, 50_000_000)
        if status != K.OK:
            continue
        ts = np.linspace(0.0, 150.0, 3001)
        ys, status, _, _ = K.integrate_sampled(mid, yT, c, ts, 1e-9, 1e-12,
                                               50_000_000)
        if status != K.OK:
            continue
        x = ys[:, params.x_index]
        if x.max() - x.min() < 0.5:
            continue     # settled on a fixed point or a tiny cycle
        try:
            cyc = find_cycle(p_try, ys[-1], x_section=0.5 * (x.max() + x.min()),
                             rtol=rtol)
            return cyc
        except (NotACycle, NoConvergence, NumericalFailure) as exc:
            last_exc = exc
    raise NotACycle("no epileptic attractor found above the upper saddle-node",
                    {"last": last_exc})


# ---------------------------------------------------------------------------
# continuation


def continue_cycles(params, seed, p_target, dp0=0.02, dp_min=DP_MIN,
                    dp_max=0.25, rtol=1e-10, period_blowup=PERIOD_BLOWUP,
                    amp_tol=AMP_TOL, max_points=2000, p_floor=None,
                    period_cap=None):
    """Natural-parameter continuation of a cycle family toward p_target.

    The branch records one cycle per accepted step and terminates with an
    explanatory event: ``fold_of_cycles`` when the adaptive step collapses
    below ``dp_min`` (with the nontrivial multiplier nearest +1 attached),
    ``period_blowup`` on homoclinic-style period growth, ``hopf_endpoint``
    when the amplitude shrinks to a point, or ``range_end``.
    """
    ix = params.x_index
    direction = 1.0 if p_target >= seed.P else -1.0
    cycles = [seed]
    events = []
    dp = dp0
    x_sec = float(seed.anchor[ix])
    prev = seed
    prev2 = None
    while len(cycles) < max_points:
        if prev.period > period_blowup:
            events.append(BranchEvent("period_blowup", prev.P,
                                      {"period": prev.period}))
            break
        if period_cap is not None and prev.period > period_cap:
            events.append(BranchEvent("period_cap", prev.P,
                                      {"period": prev.period}))
            break
        if prev.amplitude < amp_tol:
            events.append(BranchEvent("hopf_endpoint", prev.P,
                                      {"amplitude": prev.amplitude}))
            break
        if direction * (prev.P - p_target) >= 0.0:
            events.append(BranchEvent("range_end", prev.P, {}))
            break
        if p_floor is not None and prev.P <= p_floor:
            events.append(BranchEvent("range_end", prev.P, {"floor": True}))
            break
        P_next = prev.P + direction * dp
        if direction * (P_next - p_target) > 0.0:
            P_next = p_target
        # re-anchor when the section drifts toward the orbit's X extremes
        amp = prev.amplitude
        margin = min(x_sec - prev.x_min, prev.x_max - x_sec)
        if amp > 10 * amp_tol and margin < 0.2 * amp:
            x_new = 0.5 * (prev.x_min + prev.x_max)
            t, y_new, _, _, _, status = _return_map(params_at(params, prev.P),
                                                    prev.anchor, x_new, rtol,
                                                    600.0, False)
            if status == K.OK:
                x_sec = x_new
                prev = LimitCycle(P=prev.P, anchor=y_new, period=prev.period,
                                  multipliers=prev.multipliers,
                                  x_min=prev.x_min, x_max=prev.x_max,
                                  stable=prev.stable)
                prev2 = None
        if prev2 is not None and prev.P != prev2.P:
            frac = (P_next - prev.P) / (prev.P - prev2.P)
            guess = prev.anchor + frac * (prev.anchor - prev2.anchor)
            guess[ix] = x_sec
        else:
            guess = prev.anchor
        ok = False
        try:
            cyc = find_cycle(params_at(params, P_next), guess,
                             x_section=x_sec, rtol=rtol,
                             t_max=max(400.0, 6.0 * prev.period))
            pr = cyc.period / prev.period
            ar = (cyc.amplitude + amp_tol) / (prev.amplitude + amp_tol)
            if 0.6 < pr < 1.6 and 0.45 < ar < 2.2:
                ok = True
        except (NotACycle, NoConvergence, NumericalFailure):
            ok = False
        if ok:
            cycles.append(cyc)
            prev2, prev = prev, cyc
            dp = min(dp * 1.5, dp_max)
        else:
            dp *= 0.5
            if dp < dp_min:
                mu = prev.max_nontrivial_modulus()
                details = {"multiplier_near_one": mu,
                           "amplitude": prev.amplitude, "period": prev.period,
                           "X": float(prev.anchor[ix])}
                # a fold has its nontrivial multiplier at +1; a continuation
                # stalling on a long-period homoclinic approach does not
                kind = "fold_of_cycles" if 0.9 <= mu <= 1.2 else "stall"
                events.append(BranchEvent(kind, prev.P, details))
                break
    else:
        events.append(BranchEvent("max_points", prev.P, {}))
    return CycleBranch(params=params, cycles=cycles, events=events)


def params_at(params, P):
    return M.set_param(params, params.drive_name, P)


def detect_fold_of_cycles(branches, dedupe_p=5e-3):
    """Deduplicated fold-of-cycles points collected from branch events."""
    folds = []
    for br in branches:
        for ev in br.events:
            if ev.kind == "fold_of_cycles":
                folds.append((ev.P, ev.details, br.params))
    folds.sort(key=lambda t: t[0])
    points = []
    for P, det, params in folds:
        if points and abs(P - points[-1].coords[params.drive_name]) < dedupe_p:
            continue
        points.append(BifurcationPoint(
            kind="fold_of_cycles", plane=(params.drive_name,),
            coords={params.drive_name: float(P), "X": det.get("X", float("nan"))},
            diagnostics={"multiplier_near_one": det.get("multiplier_near_one"),
                         "amplitude": det.get("amplitude"),
                         "period": det.get("period")}))
    return points


def detect_snic(branch, sn_drives, period_threshold=PERIOD_BLOWUP, p_tol=1e-3,
                extend=True, rtol=1e-10):
    """SNIC candidates: period blow-up onto a known saddle-node drive value.

    Requires the period to exceed the threshold with monotone growth over
    the last five continuation steps while the drive sits within ``p_tol``
    of a saddle-node.  A branch that ended in a period-blow-up event
    farther than ``p_tol`` from the saddle-node is first pushed closer by
    a short continuation extension toward the saddle-node drive.
    """
    markers = []
    sn_drives = np.atleast_1d(np.asarray(sn_drives, dtype=float))
    if len(branch.cycles) < 5 or sn_drives.size == 0:
        return markers
    blew_up = any(ev.kind in ("period_blowup", "period_cap", "stall")
                  for ev in branch.events)
    if not blew_up:
        return markers
    tail = branch
    P_end = branch.cycles[-1].P
    sn = float(sn_drives[np.argmin(np.abs(sn_drives - P_end))])
    if abs(P_end - sn) > p_tol and extend:
        target = sn + math.copysign(0.25 * p_tol, P_end - sn)
        tail = continue_cycles(branch.params, branch.cycles[-1], target,
                               dp0=abs(P_end - sn) * 0.5, dp_min=1e-8,
                               rtol=rtol, period_blowup=np.inf,
                               max_points=40)
    periods = np.concatenate([branch.periods(), tail.periods()[1:]])
    drives = np.concatenate([branch.drives(), tail.drives()[1:]])
    if len(periods) < 5:
        return markers
    tail_T = periods[-5:]
    if not np.all(np.diff(tail_T) > 0) or tail_T[-1] <= period_threshold:
        return markers
    if abs(drives[-1] - sn) <= p_tol:
        markers.append(BifurcationPoint(
            kind="snic_candidate", plane=(branch.params.drive_name,),
            coords={branch.params.drive_name: float(drives[-1]),
                    "X": float(tail.cycles[-1].anchor[branch.params.x_index])},
            diagnostics={"period": float(periods[-1]), "sn_drive": sn}))
    return markers


# ---------------------------------------------------------------------------
# per-parameter-set census and the fold-of-cycles curve


def cycle_census(params, points=None, include=("super", "sub", "epileptic"),
                 rtol=1e-10, p_margin=1.0, period_cap=None, dp0=0.02):
    """All cycle families reachable from Hopf seeds and the epileptic seed.

    Returns a dict with the continued branches, the deduplicated folds and
    SNIC markers.  Branch keys: ``super_up``/``super_down`` per
    supercritical Hopf (continued away from the Hopf into the family),
    ``sub_<k>`` per subcritical one, ``epileptic_up``/``epileptic_down``.
    """
    if points is None:
        _, points = codim1_report(params)
    drive = params.drive_name
    sns = [p for p in points if p.kind == "saddle_node"]
    hopfs = [p for p in points if p.kind.startswith("hopf")]
    supers = sorted((p for p in hopfs if p.kind == "hopf_supercritical"),
                    key=lambda p: p.coords[drive])
    subs = sorted((p for p in hopfs if p.kind == "hopf_subcritical"),
                  key=lambda p: p.coords[drive])
    drives_all = [p.coords[drive] for p in points]
    p_lo = (min(drives_all) if drives_all else 0.0) - p_margin
    p_hi = (max(drives_all) if drives_all else 0.0) + p_margin
    branches = {}

    def run(tag, seed, target, **kw):
        branches[tag] = continue_cycles(params, seed, target, rtol=rtol,
                                        period_cap=period_cap, dp0=dp0, **kw)

    if "super" in include:
        for k, hp in enumerate(supers):
            l1 = hp.diagnostics["l1"]
            d = hp.diagnostics["d_transversality"]
            side = -math.copysign(1.0, l1 * d)
            try:
                seed = seed_cycle_near_hopf(params, hp, rtol=rtol)
            except (NoConvergence, NotACycle, NumericalFailure):
                continue
            target = p_hi if side > 0 else p_lo
            run(f"super{k}_{'up' if side > 0 else 'down'}", seed, target)
    if "sub" in include:
        for k, hp in enumerate(subs):
            l1 = hp.diagnostics["l1"]
            d = hp.diagnostics["d_transversality"]
            side = -math.copysign(1.0, l1 * d)
            try:
                seed = seed_cycle_near_hopf(params, hp, rtol=rtol)
            except (NoConvergence, NotACycle, NumericalFailure):
                continue
            target = p_hi if side > 0 else p_lo
            run(f"sub{k}_{'up' if side > 0 else 'down'}", seed, target)
    if "epileptic" in include and sns:
        try:
            seed = seed_epileptic_cycle(params, sns, rtol=rtol)
        except (NoConvergence, NotACycle, NumericalFailure):
            seed = None
        if seed is not None:
            run("epileptic_up", seed, p_hi)
            run("epileptic_down", seed, p_lo)
    _reclassify_hopf_endpoints(branches, hopfs, drive)
    folds = detect_fold_of_cycles(branches.values())
    sn_drives = [p.coords[drive] for p in sns]
    snics = []
    for br in branches.values():
        for mk in detect_snic(br, sn_drives):
            if not any(abs(mk.coords[drive] - q.coords[drive]) < 1e-2
                       for q in snics):
                snics.append(mk)
    return {"branches": branches, "folds": folds, "snics": snics,
            "points": points}


def _reclassify_hopf_endpoints(branches, hopfs, drive, p_tol=5e-3):
    # a continuation stalling right at a Hopf drive value with shrinking
    # amplitude has reached the family endpoint, not a fold
    hopf_ps = [p.coords[drive] for p in hopfs]
    for br in branches.values():
        for ev in br.events:
            if ev.kind != "fold_of_cycles":
                continue
            amps = [c.amplitude for c in br.cycles[-5:]]
            near = any(abs(ev.P - ph) <= p_tol for ph in hopf_ps)
            if near and len(amps) >= 2 and amps[-1] < amps[0]:
                ev.kind = "hopf_endpoint"
                ev.details["reclassified_from_fold"] = True


def _bisect_boolean(f, lo, hi, tol, f_lo=None):
    """Bisect a boolean-valued function; returns the transition abscissa."""
    v_lo = f(lo) if f_lo is None else f_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) == v_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def trace_flc_curve(params_base, theta_range, theta_name="j", n_theta=8,
                    rtol=1e-9, refine_tol=5e-3,
                    census_include=("super", "sub", "epileptic")):
    """Fold-of-limit-cycles curve over theta, with its special points.

    For each theta slice the cycle census supplies the fold drive values;
    the cusp of the fold curve (CLC, where the two folds merge and
    disappear at large theta) and the monotony-change point (E, where an
    extra fold pair is born at small theta) are refined by bisection on
    fold existence probes.  The endpoint of the lower fold branch (S, the
    last slice where the large-cycle fold still exists) is reported at
    grid resolution.
    """
    lo, hi = theta_range
    thetas = np.linspace(float(lo), float(hi), int(n_theta))
    samples = []
    census_cache = {}

    def census_at(th, include=None):
        include = census_include if include is None else include
        key = (round(th, 10), include)
        if key not in census_cache:
            p = M.set_param(params_base, theta_name, th)
            census_cache[key] = cycle_census(p, include=include, rtol=rtol,
                                             period_cap=PERIOD_BLOWUP * 1.5)
        return census_cache[key]

    for th in thetas:
        cen = census_at(th)
        for fp in cen["folds"]:
            samples.append({theta_name: float(th),
                            params_base.drive_name: fp.coords[params_base.drive_name],
                            "X": fp.coords.get("X", float("nan")),
                            "period": fp.diagnostics.get("period"),
                            "multiplier": fp.diagnostics.get("multiplier_near_one")})

    drive = params_base.drive_name

    def upper_fold_survives(th):
        # does the family continued down from the top Hopf hit a fold?
        cen = census_at(th, include=("super", "epileptic"))
        down = [b for tag, b in cen["branches"].items() if tag.endswith("down")
                and not tag.startswith("epileptic")]
        for b in down:
            if any(ev.kind == "fold_of_cycles" for ev in b.events):
                return True
        return False

    def middle_fold_exists(th):
        # does the family continued up from the middle supercritical Hopf
        # fold before shrinking at the top Hopf?
        cen = census_at(th, include=("super",))
        ups = [b for tag, b in cen["branches"].items() if tag.endswith("up")]
        for b in ups:
            if any(ev.kind == "fold_of_cycles" for ev in b.events):
                return True
        return False

    special = {}
    span = hi - lo
    eps = refine_tol * max(1.0, span)
    # CLC: the topmost transition where the top-Hopf family stops folding
    flags = {th: upper_fold_survives(th) for th in thetas}
    trans = None
    for k in range(len(thetas) - 1, 0, -1):
        if flags[thetas[k]] != flags[thetas[k - 1]]:
            trans = (thetas[k - 1], thetas[k])
            break
    if trans is not None and flags[trans[0]] and not flags[trans[1]]:
        th_clc = _bisect_boolean(upper_fold_survives, trans[0], trans[1],
                                 eps, f_lo=True)
        cen = census_at(th_clc - eps)
        fold_ps = sorted(fp.coords[drive] for fp in cen["folds"])
        p_clc = float(np.mean(fold_ps[-2:])) if len(fold_ps) >= 2 else (
            fold_ps[0] if fold_ps else float("nan"))
        special["CLC"] = BifurcationPoint(
            kind="cusp_of_cycles", plane=(theta_name, drive),
            coords={theta_name: float(th_clc), drive: p_clc,
                    "X": float("nan")},
            diagnostics={"merged_folds": fold_ps[-2:]})
    # E: the bottommost transition where the middle-Hopf family starts
    # folding (birth of the extra fold pair)
    e_flags = {th: middle_fold_exists(th) for th in thetas}
    e_trans = None
    for k in range(1, len(thetas)):
        if e_flags[thetas[k]] != e_flags[thetas[k - 1]]:
            e_trans = (thetas[k - 1], thetas[k])
            break
    if e_trans is not None and not e_flags[e_trans[0]] and e_flags[e_trans[1]]:
        th_e = _bisect_boolean(middle_fold_exists, e_trans[0], e_trans[1],
                               eps, f_lo=False)
        cen = census_at(th_e + eps, include=("super",))
        fold_ps = []
        for tag, b in cen["branches"].items():
            if tag.endswith("up"):
                fold_ps += [ev.P for ev in b.events
                            if ev.kind == "fold_of_cycles"]
        special["E"] = {
            "kind": "flc_monotony_change", "plane": (theta_name, drive),
            theta_name: float(th_e),
            drive: float(np.mean(fold_ps)) if fold_ps else float("nan")}
    # S: last grid slice where the epileptic-side fold is present
    last_with_fold = None
    for th in thetas:
        cen = census_at(th)
        if cen["folds"]:
            if last_with_fold is None or th < last_with_fold[0]:
                fold_ps = [fp.coords[drive] for fp in cen["folds"]]
                last_with_fold = (th, min(fold_ps))
    if last_with_fold is not None:
        special["S"] = {"kind": "flc_endpoint", "plane": (theta_name, drive),
                        theta_name: float(last_with_fold[0]),
                        drive: float(last_with_fold[1])}
    return samples, special
