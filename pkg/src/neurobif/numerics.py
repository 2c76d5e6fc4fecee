"""Dense linear algebra and scalar root-finding kernels.

Dense eigenproblems go through LAPACK (balanced Hessenberg + shifted QR
via numpy); the bialternate product, the bracketing ("dichotomy") solver,
damped Newton refinement, finite-difference multilinear forms and the
first-Lyapunov-coefficient projection are implemented here.  Everything
is deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure, NoConvergence, NumericsWarning

__all__ = [
    "Spectrum", "Bracket", "eigen", "bialternate", "bracket_scan",
    "dichotomy_solve", "newton_refine", "fd_jacobian", "bilinear_form",
    "trilinear_form", "bilinear_form_complex", "trilinear_form_complex",
    "first_lyapunov_coefficient", "null_pair",
]


@dataclass
class Spectrum:
    """Eigenvalues of a real matrix, with on-demand eigenvector retrieval."""

    values: np.ndarray          # complex eigenvalues, length n
    matrix: np.ndarray = field(repr=False, default=None)

    @property
    def n(self):
        return len(self.values)

    def closest(self, target):
        """Index of the eigenvalue closest to ``target``."""
        return int(np.argmin(np.abs(self.values - target)))

    def is_simple(self, i, tol_factor=1e-6):
        """True when no other eigenvalue lies within tol of values[i]."""
        scale = 1.0 + np.linalg.norm(self.matrix, 2) if self.matrix is not None else 1.0
        d = np.abs(self.values - self.values[i])
        d[i] = np.inf
        simple = np.min(d) > tol_factor * scale
        if not simple:
            warnings.warn(
                f"eigenvalue {self.values[i]:.6g} is within {tol_factor:g}*(1+||M||) "
                "of another eigenvalue", NumericsWarning, stacklevel=2)
        return bool(simple)

    def right_vector(self, i):
        """Right eigenvector for values[i], unit norm."""
        return _eigvec(self.matrix, self.values[i])

    def left_vector(self, i):
        """Left eigenvector w (conj(w)^T M = lambda conj(w)^T), unit norm."""
        return np.conj(_eigvec(self.matrix.T, np.conj(self.values[i])))


def _eigvec(M, lam):
    # eigenvector of M for the eigenvalue of M closest to lam
    vals, vecs = np.linalg.eig(M)
    k = int(np.argmin(np.abs(vals - lam)))
    v = vecs[:, k]
    v = v / np.linalg.norm(v)
    scale = np.linalg.norm(M, 2)
    res = np.linalg.norm(M @ v - vals[k] * v)
    if res > 1e-8 * max(scale, 1.0):
        raise NumericalFailure(
            f"eigenvector residual {res:.3e} exceeds tolerance", {"matrix": M})
    return v


def eigen(M):
    """All eigenvalues of a real square matrix (n <= 64)."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > 64:
        raise ValueError("eigen() is sized for n <= 64")
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("matrix has non-finite entries", {"matrix": M})
    try:
        vals = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"QR iteration failed: {exc}", {"matrix": M}) from exc
    return Spectrum(values=vals, matrix=M)


def bialternate(M):
    """Bialternate product 2*M (.) I of shape (m, m), m = n*(n-1)/2.

    Rows and columns are indexed by pairs (i, j) with i < j in
    lexicographic order.  The eigenvalues of the result are the pairwise
    sums lambda_i + lambda_j (i < j) of the eigenvalues of M, so its
    determinant vanishes exactly when two eigenvalues of M sum to zero.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n < 2:
        raise ValueError("bialternate product needs n >= 2")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(pairs)
    B = np.zeros((m, m))
    for a, (i, j) in enumerate(pairs):
        # (p, q) = (j, i) in the classical p > q convention
        for b, (k, l) in enumerate(pairs):
            r, s = l, k
            p, q = j, i
            v = 0.0
            if q == s:
                v += M[p, r]
            if q == r:
                v -= M[p, s]
            if p == r:
                v += M[q, s]
            if p == s:
                v -= M[q, r]
            B[a, b] = v
    return B


def bialternate_terms(n):
    """Sparse assembly recipe for :func:`bialternate` at dimension n.

    Returns (rows, cols, src_i, src_j, signs) index arrays such that
    ``B[rows, cols] += signs * A[src_i, src_j]`` builds the product; used
    for vectorized batches.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rows, cols, si, sj, sg = [], [], [], [], []
    for a, (i, j) in enumerate(pairs):
        p, q = j, i
        for b, (k, l) in enumerate(pairs):
            r, s = l, k
            if q == s:
                rows.append(a); cols.append(b); si.append(p); sj.append(r); sg.append(1.0)
            if q == r:
                rows.append(a); cols.append(b); si.append(p); sj.append(s); sg.append(-1.0)
            if p == r:
                rows.append(a); cols.append(b); si.append(q); sj.append(s); sg.append(1.0)
            if p == s:
                rows.append(a); cols.append(b); si.append(q); sj.append(r); sg.append(-1.0)
    return (np.array(rows), np.array(cols), np.array(si), np.array(sj), np.array(sg))


@dataclass(frozen=True)
class Bracket:
    """A sign-change interval for a scalar function."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if np.sign(self.f_lo) == np.sign(self.f_hi):
            raise ValueError("function values must have opposite signs")


def bracket_scan(f, grid, values=None):
    """Brackets of every sign change of f on an increasing grid.

    ``values`` may carry precomputed f(grid).  Exact zeros at grid points
    are returned as degenerate (lo == hi) pseudo-brackets via the second
    element of the result: (brackets, exact_roots).
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with >= 2 points")
    if values is None:
        values = np.array([f(x) for x in grid], dtype=float)
    brackets = []
    exact = [float(x) for x, v in zip(grid, values) if v == 0.0]
    sign = np.sign(values)
    for k in range(len(grid) - 1):
        if sign[k] == 0 or sign[k + 1] == 0:
            continue
        if sign[k] != sign[k + 1]:
            brackets.append(Bracket(grid[k], grid[k + 1], values[k], values[k + 1]))
    return brackets, exact


def dichotomy_solve(f, bracket, xtol=1e-12, ftol=0.0, max_iter=200):
    """Bisection on a bracket, with a final secant polish.

    Halves the bracket every iteration until its width is <= xtol or the
    midpoint residual is <= ftol; a single secant step is then taken if it
    improves the residual.  Deterministic.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = bracket.f_lo, bracket.f_hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("invalid bracket: same signs at both ends")
    it = 0
    mid = 0.5 * (lo + hi)
    while hi - lo > xtol:
        it += 1
        if it > max_iter:
            raise NoConvergence("dichotomy iteration cap exceeded",
                                {"last": 0.5 * (lo + hi)})
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (ftol > 0.0 and abs(fm) <= ftol):
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    root = 0.5 * (lo + hi)
    # secant polish using the bracket endpoints
    if fhi != flo:
        sec = hi - fhi * (hi - lo) / (fhi - flo)
        if lo <= sec <= hi:
            froot = f(root)
            if abs(f(sec)) < abs(froot):
                return sec
    return root


def newton_refine(F, x0, jac=None, tol=1e-10, max_iter=50, fd_step=1e-7):
    """Damped Newton for F(x) = 0, vector or scalar systems.

    ``jac`` may be a callable returning the Jacobian; otherwise central
    finite differences are used.  Steps are halved (up to 20 times) while
    the residual norm fails to decrease.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    scalar = np.isscalar(x0) or np.ndim(x0) == 0

    def Fv(z):
        return np.atleast_1d(np.asarray(F(z[0] if scalar else z), dtype=float))

    r = Fv(x)
    for _ in range(max_iter):
        nr = np.linalg.norm(r)
        if nr <= tol:
            return x[0] if scalar else x
        if jac is not None:
            Jm = np.atleast_2d(np.asarray(jac(x[0] if scalar else x), dtype=float))
        else:
            Jm = fd_jacobian(lambda z: Fv(np.atleast_1d(z)), x, fd_step)
        try:
            step = np.linalg.solve(Jm, -r)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular Jacobian in Newton solve",
                                   {"last": x.copy()}) from exc
        lam = 1.0
        for _ in range(20):
            x_try = x + lam * step
            r_try = Fv(x_try)
            if np.linalg.norm(r_try) < nr:
                x, r = x_try, r_try
                break
            lam *= 0.5
        else:
            raise NoConvergence("Newton damping failed to reduce the residual",
                                {"last": x.copy()})
    if np.linalg.norm(r) <= tol:
        return x[0] if scalar else x
    raise NoConvergence("Newton iteration cap exceeded", {"last": x.copy()})


# ---------------------------------------------------------------------------
# finite-difference derivative helpers


def fd_jacobian(f, x, h=1e-6):
    """Central-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(f(x), dtype=float))
    J = np.empty((f0.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        J[:, k] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h)
    return J


def _bilinear_once(f, x, u, v, h):
    # D^2 f (u, v) via the polarization of directional second differences
    def q(w):
        return (np.asarray(f(x + h * w)) - 2.0 * np.asarray(f(x))
                + np.asarray(f(x - h * w))) / (h * h)
    return 0.25 * (q(u + v) - q(u - v))


def bilinear_form(f, x, u, v, h=1e-4, richardson=True):
    """Second multilinear form D^2 f(x)[u, v] for real directions."""
    b = _bilinear_once(f, x, u, v, h)
    if richardson:
        b2 = _bilinear_once(f, x, u, v, 0.5 * h)
        b = (4.0 * b2 - b) / 3.0
    return b


def _trilinear_once(f, x, u, v, w, h):
    acc = 0.0
    for su in (1.0, -1.0):
        for sv in (1.0, -1.0):
            for sw in (1.0, -1.0):
                acc = acc + su * sv * sw * np.asarray(
                    f(x + h * (su * u + sv * v + sw * w)))
    return acc / (8.0 * h ** 3)


def trilinear_form(f, x, u, v, w, h=1e-3, richardson=True):
    """Third multilinear form D^3 f(x)[u, v, w] for real directions."""
    t = _trilinear_once(f, x, u, v, w, h)
    if richardson:
        t2 = _trilinear_once(f, x, u, v, w, 0.5 * h)
        t = (4.0 * t2 - t) / 3.0
    return t


def bilinear_form_complex(f, x, u, v, h=1e-4):
    """D^2 f(x)[u, v] extended to complex directions by bilinearity."""
    ur, ui = np.real(u), np.imag(u)
    vr, vi = np.real(v), np.imag(v)
    re = bilinear_form(f, x, ur, vr, h) - bilinear_form(f, x, ui, vi, h)
    im = bilinear_form(f, x, ur, vi, h) + bilinear_form(f, x, ui, vr, h)
    return re + 1j * im


def trilinear_form_complex(f, x, u, v, w, h=1e-3):
    """D^3 f(x)[u, v, w] extended to complex directions by trilinearity."""
    ur, ui = np.real(u), np.imag(u)
    vr, vi = np.real(v), np.imag(v)
    wr, wi = np.real(w), np.imag(w)
    T = lambda a, b, c: trilinear_form(f, x, a, b, c, h)
    re = T(ur, vr, wr) - T(ur, vi, wi) - T(ui, vr, wi) - T(ui, vi, wr)
    im = T(ur, vr, wi) + T(ur, vi, wr) + T(ui, vr, wr) - T(ui, vi, wi)
    return re + 1j * im


def null_pair(M, normalize="biorthogonal"):
    """Right and left vectors for the eigenvalue of M closest to zero.

    Returns (lam, v, w) with v unit norm.  With the default normalization
    w is scaled so that <w, v> = 1; with ``normalize='unit'`` w has unit
    norm and a deterministic orientation (largest component of v positive).
    """
    spec = eigen(M)
    k = spec.closest(0.0)
    lam = spec.values[k]
    v = spec.right_vector(k)
    w = spec.left_vector(k)
    # deterministic orientation for v
    imax = int(np.argmax(np.abs(v)))
    if np.real(v[imax]) < 0:
        v = -v
    denom = np.vdot(w, v)
    if normalize == "biorthogonal":
        if abs(denom) < 1e-14:
            raise NumericalFailure("left/right eigenvectors are orthogonal "
                                   "(defective eigenvalue?)", {"matrix": M})
        w = w / np.conj(denom)
    else:
        if np.real(np.vdot(w, v)) < 0:
            w = -w
    return lam, v, w


def first_lyapunov_coefficient(f, x0, omega, A=None, h2=1e-4, h3=1e-3):
    """First Lyapunov coefficient at a Hopf point of ``xdot = f(x)``.

    Uses the invariant projection formula with the critical eigenvectors
    and finite-difference multilinear forms:

        l1 = Re[ <p, C(q,q,qbar)> - 2<p, B(q, A^-1 B(q,qbar))>
                 + <p, B(qbar, (2 i omega I - A)^-1 B(q,q))> ] / (2 omega)

    The magnitude depends on the eigenvector normalization (q is unit
    norm here); only the sign and zero crossings are meaningful.  A
    :class:`NumericsWarning` is issued when the spectrum is near-resonant
    (another eigenvalue within 1e-4 of 0 or +/- 2 i omega).
    """
    x0 = np.asarray(x0, dtype=float)
    if A is None:
        A = fd_jacobian(f, x0)
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    spec = eigen(A)
    kq = spec.closest(1j * omega)
    lam = spec.values[kq]
    if abs(lam - 1j * omega) > 1e-3 * (1.0 + abs(omega)):
        raise NumericalFailure(
            f"no eigenvalue near i*omega (closest {lam:.4g} vs {1j*omega:.4g})",
            {"matrix": A})
    # resonance screening
    others = np.delete(spec.values, [kq, spec.closest(-1j * omega)])
    for target in (0.0, 2j * omega, -2j * omega):
        if others.size and np.min(np.abs(others - target)) < 1e-4:
            warnings.warn("near-resonant spectrum at Hopf point "
                          f"(eigenvalue close to {target:.4g})",
                          NumericsWarning, stacklevel=2)
    q = _eigvec(A, 1j * omega)
    # deterministic phase: largest component real positive
    imax = int(np.argmax(np.abs(q)))
    q = q * (np.abs(q[imax]) / q[imax])
    p = _eigvec(A.T, -1j * omega)
    denom = np.vdot(p, q)
    if abs(denom) < 1e-12:
        raise NumericalFailure("degenerate eigenvector normalization at Hopf",
                               {"matrix": A})
    p = p / np.conj(denom)

    B_qq = bilinear_form_complex(f, x0, q, q, h2)
    B_qqb = bilinear_form_complex(f, x0, q, np.conj(q), h2)
    C_qqqb = trilinear_form_complex(f, x0, q, q, np.conj(q), h3)

    h11 = np.linalg.solve(A, B_qqb)
    h20 = np.linalg.solve(2j * omega * np.eye(n) - A, B_qq)
    g21 = (np.vdot(p, C_qqqb)
           - 2.0 * np.vdot(p, bilinear_form_complex(f, x0, q, h11, h2))
           + np.vdot(p, bilinear_form_complex(f, x0, np.conj(q), h20, h2)))
    return float(np.real(g21) / (2.0 * omega))
