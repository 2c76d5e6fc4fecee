"""Codimension-1 analysis along the X-parametrized equilibrium manifold.

The fixed points of the reduced models form a single curve parametrized
by the pyramidal coordinate X, with the drive P recovered in closed form.
Saddle-nodes are roots of det J(X); Hopf candidates are roots of
det(2 J(X) (.) I), filtered for a genuine pure-imaginary pair; both are
refined by bisection and verified against the textbook genericity
conditions (simple zero eigenvalue, nonzero quadratic coefficient and
drive derivative for folds; nonzero first Lyapunov coefficient and
transversal eigenvalue crossing for Hopf points).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import models as M
from . import numerics as N

__all__ = [
    "EquilibriumBranch", "BifurcationPoint", "sweep_branch",
    "detect_saddle_nodes", "detect_hopf", "first_lyapunov", "codim1_report",
    "DEFAULT_SWEEPS",
]

# default sweep windows (X range, point count) per model
DEFAULT_SWEEPS = {
    "jr": (-12.0, 20.0, 2000),
    "wc": (-12.0, 25.0, 3000),
    "dbt": (-3.0, 3.0, 1200),
}

# tolerances used by the detectors
RE_TOL = 1e-6          # max |Re lambda| accepted as "on the imaginary axis"
OMEGA_TOL = 1e-6       # min |Im lambda| accepted as a genuine Hopf frequency
DEGENERACY_TOL = 1e-4  # |l1| or |<w,B(v,v)>| below this flags a degenerate point
NONZERO_TOL = 1e-6     # SN2/SN3 magnitudes above this count as nonzero


@dataclass
class EquilibriumBranch:
    """Ordered samples of the fixed-point manifold for one parameter set."""

    params: object
    X: np.ndarray                 # (N,)
    P: np.ndarray                 # (N,) drive values
    states: np.ndarray            # (N, dim)
    eigvals: np.ndarray           # (N, dim) complex
    ok: np.ndarray                # (N,) bool, eigensolver success
    det_j: np.ndarray = dc_field(default=None, repr=False)
    det_bialt: np.ndarray = dc_field(default=None, repr=False)

    @property
    def n_unstable(self):
        return np.sum(self.eigvals.real > RE_TOL, axis=1)

    @property
    def stable(self):
        return np.all(self.eigvals.real < -RE_TOL, axis=1)


@dataclass
class BifurcationPoint:
    """A tagged bifurcation or special point with its diagnostics."""

    kind: str                     # saddle_node, hopf_subcritical, ...
    plane: tuple                  # parameter names, e.g. ("P",) or ("j", "P")
    coords: dict                  # name -> value, always includes "X"
    diagnostics: dict = dc_field(default_factory=dict)

    def coord(self, name):
        return self.coords[name]


def _bialt_batch(J):
    """Vectorized bialternate product of a (N, n, n) stack."""
    n = J.shape[1]
    rows, cols, si, sj, sg = N.bialternate_terms(n)
    m = n * (n - 1) // 2
    B = np.zeros((J.shape[0], m, m))
    for r, c, i, j, s in zip(rows, cols, si, sj, sg):
        B[:, r, c] += s * J[:, i, j]
    return B


def sweep_branch(params, x_range=None, n_points=None):
    """Sample the equilibrium manifold on a regular X grid."""
    lo, hi, npts = DEFAULT_SWEEPS[params.model]
    if x_range is not None:
        lo, hi = x_range
    if n_points is not None:
        npts = n_points
    if npts < 2:
        raise ValueError("n_points must be >= 2")
    X = np.linspace(float(lo), float(hi), int(npts))
    states, P = M.equilibrium_batch(params, X)
    J = M.jacobian_batch(params, states)
    n = params.dim
    eigvals = np.full((npts, n), np.nan + 0j)
    ok = np.ones(npts, dtype=bool)
    try:
        eigvals = np.linalg.eigvals(J)
    except np.linalg.LinAlgError:
        for k in range(npts):
            try:
                eigvals[k] = np.linalg.eigvals(J[k])
            except np.linalg.LinAlgError:
                ok[k] = False
    det_j = np.linalg.det(J)
    det_bialt = np.linalg.det(_bialt_batch(J))
    return EquilibriumBranch(params=params, X=X, P=P, states=states,
                             eigvals=eigvals, ok=ok,
                             det_j=det_j, det_bialt=det_bialt)


def _det_j_at(params, X):
    states, _ = M.equilibrium_batch(params, np.array([X]))
    return float(np.linalg.det(M.jacobian_batch(params, states)[0]))


def _det_bialt_at(params, X):
    states, _ = M.equilibrium_batch(params, np.array([X]))
    J = M.jacobian_batch(params, states)
    return float(np.linalg.det(_bialt_batch(J)[0]))


def _refined_roots(params, branch, values, scalar_f, xtol=1e-11):
    """Bracket the sign changes of a test function along X and bisect.

    Local minima of |f| that approach zero without a visible sign change
    are rescanned on a 10x finer local grid so that root pairs inside one
    cell are not silently missed.
    """
    X = branch.X
    brackets, exact = N.bracket_scan(None, X, values=values)
    roots = list(exact)
    for br in brackets:
        roots.append(N.dichotomy_solve(scalar_f, br, xtol=xtol))
    # near-miss rescan: |f| dips below 1e-6 of its median scale
    absv = np.abs(values)
    scale = max(np.median(absv), 1e-300)
    for k in range(1, len(X) - 1):
        if absv[k] < 1e-6 * scale and absv[k] <= absv[k - 1] and absv[k] <= absv[k + 1]:
            near = any(X[k - 1] <= r <= X[k + 1] for r in roots)
            if near:
                continue
            sub = np.linspace(X[k - 1], X[k + 1], 21)
            subv = np.array([scalar_f(x) for x in sub])
            sub_brackets, sub_exact = N.bracket_scan(None, sub, values=subv)
            roots.extend(sub_exact)
            for br in sub_brackets:
                roots.append(N.dichotomy_solve(scalar_f, br, xtol=xtol))
    return sorted(roots)


def _drive_vector(params):
    e = np.zeros(params.dim)
    e[params.drive_row] = 1.0
    return e


def detect_saddle_nodes(branch):
    """Saddle-node points on a branch, with (SN1)-(SN3) verification."""
    params = branch.params
    roots = _refined_roots(params, branch, branch.det_j,
                           lambda x: _det_j_at(params, x))
    points = []
    for Xs in roots:
        state, P = M.equilibrium_from_x(params, Xs)
        J = M.jacobian_batch(params, state[None, :])[0]
        spec = N.eigen(J)
        kz = spec.closest(0.0)
        lam0 = spec.values[kz]
        simple = spec.is_simple(kz) if np.isfinite(lam0) else False
        lam, v, w = N.null_pair(J)
        v = np.real(v)
        nv = np.linalg.norm(v)
        if nv > 0:
            v = v / nv
        w = np.real(w)
        dv = np.vdot(w, v)
        if abs(dv) > 1e-14:
            w = w / dv
        p2 = M.set_param(params, params.drive_name, P)
        f = lambda y: M.field(p2, y)
        sn2 = float(np.dot(w, _drive_vector(params)))
        sn3 = float(np.dot(w, N.bilinear_form(f, state, v, v)))
        degenerate = (abs(sn2) <= NONZERO_TOL or abs(sn3) <= NONZERO_TOL
                      or not simple)
        diagnostics = {
            "eig_zero": float(np.real(lam0)),
            "simple_zero": bool(simple),
            "sn2_drive": sn2,
            "sn3_quadratic": sn3,
            "degenerate": bool(degenerate),
        }
        if degenerate:
            diagnostics["degenerate_flags"] = [
                flag for flag, bad in (
                    ("bt_candidate", not simple),
                    ("cusp_candidate", abs(sn3) <= DEGENERACY_TOL),
                    ("no_drive_unfolding", abs(sn2) <= NONZERO_TOL),
                ) if bad]
        points.append(BifurcationPoint(
            kind="saddle_node",
            plane=(params.drive_name,),
            coords={params.drive_name: float(P), "X": float(Xs)},
            diagnostics=diagnostics))
    return points


def pure_imaginary_pair(eigvals, re_tol=RE_TOL, omega_tol=OMEGA_TOL):
    """Frequency of a genuine +/- i*omega pair, or None.

    Rejects spectra whose zero-sum pair is real-opposite (neutral saddle)
    and spectra with additional eigenvalues on the imaginary axis.
    """
    ev = np.asarray(eigvals)
    cand = [k for k in range(len(ev))
            if abs(ev[k].real) < re_tol and ev[k].imag > omega_tol]
    if len(cand) != 1:
        return None
    omega = float(ev[cand[0]].imag)
    # the conjugate partner must exist; everything else stays off-axis
    partner = [k for k in range(len(ev))
               if abs(ev[k].real) < re_tol and ev[k].imag < -omega_tol]
    if len(partner) != 1:
        return None
    others = [k for k in range(len(ev)) if k not in (cand[0], partner[0])]
    if any(abs(ev[k].real) < re_tol for k in others):
        return None
    return omega


def first_lyapunov(params, x_star, omega=None):
    """First Lyapunov coefficient at the Hopf point with abscissa x_star."""
    state, P = M.equilibrium_from_x(params, x_star)
    p2 = M.set_param(params, params.drive_name, P)
    A = M.jacobian_batch(p2, state[None, :])[0]
    if omega is None:
        ev = np.linalg.eigvals(A)
        k = int(np.argmin(np.abs(ev.real) + (ev.imag <= 0) * 1e9))
        omega = float(abs(ev[k].imag))
    f = lambda y: M.field(p2, y)
    return N.first_lyapunov_coefficient(f, state, omega, A=A)


def _transversality(params, x_star, omega, dx=1e-4):
    """d Re(lambda)/dP of the critical pair across the Hopf point."""
    out = []
    for Xs in (x_star - dx, x_star + dx):
        state, P = M.equilibrium_batch(params, np.array([Xs]))
        J = M.jacobian_batch(params, state)[0]
        ev = np.linalg.eigvals(J)
        k = int(np.argmin(np.abs(ev - 1j * omega)))
        out.append((float(P[0]), float(ev[k].real)))
    (P0, r0), (P1, r1) = out
    if P1 == P0:
        return 0.0
    return (r1 - r0) / (P1 - P0)


def detect_hopf(branch):
    """Hopf points on a branch with criticality classification."""
    params = branch.params
    roots = _refined_roots(params, branch, branch.det_bialt,
                           lambda x: _det_bialt_at(params, x))
    points = []
    for Xs in roots:
        state, P = M.equilibrium_from_x(params, Xs)
        J = M.jacobian_batch(params, state[None, :])[0]
        ev = np.linalg.eigvals(J)
        omega = pure_imaginary_pair(ev)
        if omega is None:
            continue
        l1 = first_lyapunov(params, Xs, omega)
        d = _transversality(params, Xs, omega)
        if abs(l1) < DEGENERACY_TOL:
            kind = "hopf_degenerate"
        elif l1 > 0:
            kind = "hopf_subcritical"
        else:
            kind = "hopf_supercritical"
        points.append(BifurcationPoint(
            kind=kind,
            plane=(params.drive_name,),
            coords={params.drive_name: float(P), "X": float(Xs)},
            diagnostics={"omega": omega, "l1": l1, "d_transversality": d}))
    return points


def codim1_report(params, x_range=None, n_points=None):
    """Full codimension-1 scan: branch plus bifurcation points by drive."""
    branch = sweep_branch(params, x_range=x_range, n_points=n_points)
    points = detect_saddle_nodes(branch) + detect_hopf(branch)
    points.sort(key=lambda pt: pt.coords[params.drive_name])
    return branch, points
