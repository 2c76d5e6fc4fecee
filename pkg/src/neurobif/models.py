"""Neural mass models and their dimensionless reductions.

Three vector fields are implemented: the reduced Jansen-Rit system (6D),
the reduced Wendling-Chauvel system (10D) and the planar two-parameter-
plus-one normal form used as an analytic test model (2D).  The original
physical Jansen-Rit and Wendling-Chauvel systems are kept alongside as
cross-validation oracles for the dimensionless reductions.

Every fixed point of the reduced systems can be written in closed form as
a function of the pyramidal membrane coordinate X, with the drive (the
scaled input P, or the additive unfolding parameter of the normal form)
recovered from the stationarity conditions.  That parametrization is the
backbone of all bifurcation detection downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "PhysicalJRParams", "PhysicalWCParams", "JRParams", "WCParams",
    "DBTParams", "sigmoid", "sigmoid_prime", "reduce_jr", "reduce_wc",
    "field", "jacobian", "equilibrium_from_x", "equilibrium_batch",
    "jacobian_batch", "preset", "PRESETS", "set_param", "get_param",
    "param_names", "jr_state_to_reduced", "jr_state_to_physical",
    "wc_state_to_reduced", "wc_state_to_physical",
]


def _check_positive(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (v > 0.0) or not math.isfinite(v):
            raise DomainError(f"{type(obj).__name__}.{name} must be positive, got {v}")


@dataclass(frozen=True)
class PhysicalJRParams:
    """Jansen-Rit parameters in physical units (mV, s^-1)."""

    A: float = 3.25        # excitatory PSP amplitude (mV)
    B: float = 22.0        # inhibitory PSP amplitude (mV)
    a: float = 100.0       # excitatory rate constant (s^-1)
    b: float = 50.0        # inhibitory rate constant (s^-1)
    alpha1: float = 1.0
    alpha2: float = 0.8
    alpha3: float = 0.25
    alpha4: float = 0.25
    J: float = 135.0       # mean synapse count
    v0: float = 6.0        # half-activation potential (mV)
    r: float = 0.56        # sigmoid slope (mV^-1)
    nu_max: float = 5.0    # maximal firing rate (s^-1)
    p: float = 0.0         # input firing rate (s^-1)

    def __post_init__(self):
        _check_positive(self, ("A", "B", "a", "b", "r", "nu_max"))
        if self.J < 0:
            raise DomainError("J must be >= 0")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    @property
    def dim(self):
        return 6


@dataclass(frozen=True)
class PhysicalWCParams:
    """Wendling-Chauvel parameters in physical units.

    Extends the Jansen-Rit set with the fast somatic inhibition loop
    (C, c, alpha5..alpha7).  Note 1/b = 35 ms here, not the 20 ms of the
    Jansen-Rit table.
    """

    A: float = 3.25
    B: float = 22.0
    C: float = 20.0        # fast-inhibition amplitude (mV)
    a: float = 100.0
    b: float = 1.0 / 0.035
    c: float = 200.0       # fast-inhibition rate constant (s^-1)
    alpha1: float = 1.0
    alpha2: float = 0.8
    alpha3: float = 0.25
    alpha4: float = 0.25
    alpha5: float = 0.1
    alpha6: float = 0.1
    alpha7: float = 0.8
    J: float = 135.0
    v0: float = 6.0
    r: float = 0.56
    nu_max: float = 5.0
    p: float = 0.0

    def __post_init__(self):
        _check_positive(self, ("A", "B", "C", "a", "b", "c", "r", "nu_max"))
        if self.J < 0:
            raise DomainError("J must be >= 0")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "alpha7"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    @property
    def dim(self):
        return 10


@dataclass(frozen=True)
class JRParams:
    """Dimensionless Jansen-Rit parameters.

    j: scaled connectivity, G = B/A, d = b/a, k0 = exp(r*v0), P: scaled
    input.  State order is (Y0, X, Y2, Y3, Y4, Y5) with X the pyramidal
    membrane coordinate.
    """

    j: float = 12.285
    G: float = 22.0 / 3.25
    d: float = 0.5
    alpha1: float = 1.0
    alpha2: float = 0.8
    alpha3: float = 0.25
    alpha4: float = 0.25
    k0: float = math.exp(3.36)
    P: float = 0.0

    def __post_init__(self):
        if self.j < 0:
            raise DomainError("j must be >= 0")
        _check_positive(self, ("G", "d", "k0"))
        for name in ("alpha1", "alpha2", "alpha3", "alpha4"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")

    model = "jr"

    @property
    def dim(self):
        return 6

    @property
    def ln_k0(self):
        return math.log(self.k0)

    # index of the state equation that receives the additive drive
    drive_row = 4
    drive_name = "P"
    x_index = 1

    def pack(self):
        return np.array([self.j, self.G, self.d, self.alpha1, self.alpha2,
                         self.alpha3, self.alpha4, self.ln_k0, self.P])


@dataclass(frozen=True)
class WCParams:
    """Dimensionless Wendling-Chauvel parameters.

    G1 = B/A, G2 = C/A, d1 = b/a, d2 = c/a.  State order is
    (Y0, X, Y2, Y3, Z, Y5, Y6, Y7, Y8, Y9) with X = Y1 - Y2 - Y3 and
    Z = alpha5*Y0 - alpha6*Y4.
    """

    j: float = 12.285
    G1: float = 22.0 / 3.25
    G2: float = 20.0 / 3.25
    d1: float = (1.0 / 0.035) / 100.0
    d2: float = 2.0
    alpha1: float = 1.0
    alpha2: float = 0.8
    alpha3: float = 0.25
    alpha4: float = 0.25
    alpha5: float = 0.1
    alpha6: float = 0.1
    alpha7: float = 0.8
    k0: float = math.exp(3.36)
    P: float = 0.0

    def __post_init__(self):
        if self.j < 0:
            raise DomainError("j must be >= 0")
        _check_positive(self, ("G1", "G2", "d1", "d2", "k0", "alpha6"))
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha7"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")

    model = "wc"

    @property
    def dim(self):
        return 10

    @property
    def ln_k0(self):
        return math.log(self.k0)

    drive_row = 6
    drive_name = "P"
    x_index = 1

    def pack(self):
        return np.array([self.j, self.G1, self.G2, self.d1, self.d2,
                         self.alpha1, self.alpha2, self.alpha3, self.alpha4,
                         self.alpha5, self.alpha6, self.alpha7,
                         self.ln_k0, self.P])


@dataclass(frozen=True)
class DBTParams:
    """Planar normal form of the degenerate (cusp-case) double-zero point.

        x' = y
        y' = x^2 + alpha + y*(beta + gamma*x + sign*x^3)

    Used as the analytic oracle for the bifurcation detectors: its
    equilibria, eigenvalues and multilinear forms are polynomial.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 1.0
    sign: float = 1.0

    def __post_init__(self):
        if self.sign not in (1.0, -1.0):
            raise DomainError("sign must be +1 or -1")

    model = "dbt"

    @property
    def dim(self):
        return 2

    drive_row = 1
    drive_name = "alpha"
    x_index = 0

    def pack(self):
        return np.array([self.alpha, self.beta, self.gamma, self.sign])


# ---------------------------------------------------------------------------
# sigmoid


def sigmoid(x, k0):
    """Dimensionless firing-rate sigmoid 1 / (1 + k0 * exp(-x)).

    Evaluated as the logistic function of x - ln(k0), which is stable for
    any float x.  Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("sigmoid argument must be finite")
    if not (np.isscalar(k0) or np.ndim(k0) == 0) or not (k0 > 0) or not math.isfinite(k0):
        raise DomainError(f"k0 must be a positive finite scalar, got {k0}")
    scalar = x.ndim == 0
    out = _expit(x - math.log(k0))
    return float(out[0]) if scalar else out


def sigmoid_prime(x, k0):
    """Derivative of :func:`sigmoid`; equals S*(1-S) identically."""
    s = sigmoid(x, k0)
    return s * (1.0 - s)


def _expit(z):
    # internal: stable logistic of an ndarray without domain checks
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _s(u, lk0):
    # internal: stable scalar logistic of u - lk0
    z = u - lk0
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


# ---------------------------------------------------------------------------
# physical -> dimensionless reductions and state maps


def reduce_jr(phys: PhysicalJRParams) -> JRParams:
    """Map physical Jansen-Rit parameters to the dimensionless set."""
    return JRParams(
        j=phys.r * phys.A * (phys.nu_max / phys.a) * phys.J,
        G=phys.B / phys.A,
        d=phys.b / phys.a,
        alpha1=phys.alpha1, alpha2=phys.alpha2,
        alpha3=phys.alpha3, alpha4=phys.alpha4,
        k0=math.exp(phys.r * phys.v0),
        P=(phys.r * phys.A / phys.a) * phys.p,
    )


def reduce_wc(phys: PhysicalWCParams) -> WCParams:
    """Map physical Wendling-Chauvel parameters to the dimensionless set."""
    return WCParams(
        j=phys.r * phys.A * (phys.nu_max / phys.a) * phys.J,
        G1=phys.B / phys.A,
        G2=phys.C / phys.A,
        d1=phys.b / phys.a,
        d2=phys.c / phys.a,
        alpha1=phys.alpha1, alpha2=phys.alpha2, alpha3=phys.alpha3,
        alpha4=phys.alpha4, alpha5=phys.alpha5, alpha6=phys.alpha6,
        alpha7=phys.alpha7,
        k0=math.exp(phys.r * phys.v0),
        P=(phys.r * phys.A / phys.a) * phys.p,
    )


def jr_state_to_reduced(phys: PhysicalJRParams, y):
    """Physical state (y0..y5) -> reduced state (Y0, X, Y2, Y3, Y4, Y5).

    Reduced time is tau = a*t; the derivative components absorb the 1/a.
    """
    y = np.asarray(y, dtype=float)
    J, r, a = phys.J, phys.r, phys.a
    return np.array([
        J * r * y[0], r * (y[1] - y[2]), r * y[2],
        J * r / a * y[3], r / a * y[4], r / a * y[5]])


def jr_state_to_physical(phys: PhysicalJRParams, Y):
    """Inverse of :func:`jr_state_to_reduced`."""
    Y = np.asarray(Y, dtype=float)
    J, r, a = phys.J, phys.r, phys.a
    y0 = Y[0] / (J * r)
    y2 = Y[2] / r
    y1 = (Y[1] + Y[2]) / r
    return np.array([y0, y1, y2, a * Y[3] / (J * r), a * Y[4] / r, a * Y[5] / r])


def wc_state_to_reduced(phys: PhysicalWCParams, y):
    """Physical state (y0..y9) -> reduced (Y0, X, Y2, Y3, Z, Y5..Y9)."""
    y = np.asarray(y, dtype=float)
    J, r, a = phys.J, phys.r, phys.a
    Y0 = J * r * y[0]
    Y1 = r * y[1]
    Y2 = r * y[2]
    Y3 = r * y[3]
    Y4 = J * r * y[4]
    return np.array([
        Y0, Y1 - Y2 - Y3, Y2, Y3,
        phys.alpha5 * Y0 - phys.alpha6 * Y4,
        J * r / a * y[5], r / a * y[6], r / a * y[7], r / a * y[8],
        J * r / a * y[9]])


def wc_state_to_physical(phys: PhysicalWCParams, Y):
    """Inverse of :func:`wc_state_to_reduced`."""
    Y = np.asarray(Y, dtype=float)
    J, r, a = phys.J, phys.r, phys.a
    y0 = Y[0] / (J * r)
    y2 = Y[2] / r
    y3 = Y[3] / r
    y1 = (Y[1] + Y[2] + Y[3]) / r
    y4 = (phys.alpha5 * Y[0] - Y[4]) / phys.alpha6 / (J * r)
    return np.array([
        y0, y1, y2, y3, y4,
        a * Y[5] / (J * r), a * Y[6] / r, a * Y[7] / r, a * Y[8] / r,
        a * Y[9] / (J * r)])


# ---------------------------------------------------------------------------
# vector fields


def _sigm_phys(v, r, v0, nu_max):
    # physical sigmoid nu_max / (1 + exp(r*(v0 - v)))
    return nu_max * _s(r * v, r * v0)


def field(params, state):
    """Time derivative of the state for the model selected by ``params``."""
    y = np.asarray(state, dtype=float)
    if y.shape != (params.dim,):
        raise ValueError(f"state has shape {y.shape}, expected ({params.dim},)")
    if isinstance(params, JRParams):
        pj = params
        lk0 = pj.ln_k0
        Y0, X, Y2, Y3, Y4, Y5 = y
        S = lambda u: _s(u, lk0)
        return np.array([
            Y3,
            Y4 - Y5,
            Y5,
            pj.j * S(X) - 2.0 * Y3 - Y0,
            pj.P + pj.alpha2 * pj.j * S(pj.alpha1 * Y0) - 2.0 * Y4 - (Y2 + X),
            pj.d * pj.alpha4 * pj.G * pj.j * S(pj.alpha3 * Y0) - 2.0 * pj.d * Y5 - pj.d ** 2 * Y2,
        ])
    if isinstance(params, WCParams):
        pw = params
        lk0 = pw.ln_k0
        Y0, X, Y2, Y3, Z, Y5, Y6, Y7, Y8, Y9 = y
        S = lambda u: _s(u, lk0)
        return np.array([
            Y5,
            Y6 - Y7 - Y8,
            Y7,
            Y8,
            pw.alpha5 * Y5 - pw.alpha6 * Y9,
            pw.j * S(X) - 2.0 * Y5 - Y0,
            pw.P + pw.j * pw.alpha2 * S(pw.alpha1 * Y0) - 2.0 * Y6 - (X + Y2 + Y3),
            pw.j * pw.d1 * pw.G1 * pw.alpha4 * S(pw.alpha3 * Y0) - 2.0 * pw.d1 * Y7 - pw.d1 ** 2 * Y2,
            pw.j * pw.d2 * pw.G2 * pw.alpha7 * S(Z) - 2.0 * pw.d2 * Y8 - pw.d2 ** 2 * Y3,
            pw.j * pw.d1 * pw.G1 * S(pw.alpha3 * Y0) - 2.0 * pw.d1 * Y9
            - pw.d1 ** 2 * (pw.alpha5 * Y0 - Z) / pw.alpha6,
        ])
    if isinstance(params, DBTParams):
        x, yy = y
        return np.array([
            yy,
            x * x + params.alpha + yy * (params.beta + params.gamma * x + params.sign * x ** 3),
        ])
    if isinstance(params, PhysicalJRParams):
        ph = params
        y0, y1, y2, y3, y4, y5 = y
        Sg = lambda v: _sigm_phys(v, ph.r, ph.v0, ph.nu_max)
        J1, J2, J3, J4 = (ph.alpha1 * ph.J, ph.alpha2 * ph.J, ph.alpha3 * ph.J, ph.alpha4 * ph.J)
        return np.array([
            y3, y4, y5,
            ph.A * ph.a * Sg(y1 - y2) - 2 * ph.a * y3 - ph.a ** 2 * y0,
            ph.A * ph.a * (ph.p + J2 * Sg(J1 * y0)) - 2 * ph.a * y4 - ph.a ** 2 * y1,
            ph.B * ph.b * J4 * Sg(J3 * y0) - 2 * ph.b * y5 - ph.b ** 2 * y2,
        ])
    if isinstance(params, PhysicalWCParams):
        ph = params
        y0, y1, y2, y3, y4, y5, y6, y7, y8, y9 = y
        Sg = lambda v: _sigm_phys(v, ph.r, ph.v0, ph.nu_max)
        J1, J2, J3, J4 = (ph.alpha1 * ph.J, ph.alpha2 * ph.J, ph.alpha3 * ph.J, ph.alpha4 * ph.J)
        J5, J6, J7 = (ph.alpha5 * ph.J, ph.alpha6 * ph.J, ph.alpha7 * ph.J)
        return np.array([
            y5,
            y6,
            y7,
            y8,
            y9,
            ph.A * ph.a * Sg(y1 - y2 - y3) - 2 * ph.a * y5 - ph.a ** 2 * y0,
            ph.A * ph.a * (ph.p + J2 * Sg(J1 * y0)) - 2 * ph.a * y6 - ph.a ** 2 * y1,
            ph.B * ph.b * J4 * Sg(J3 * y0) - 2 * ph.b * y7 - ph.b ** 2 * y2,
            ph.C * ph.c * J7 * Sg(J5 * y0 - J6 * y4) - 2 * ph.c * y8 - ph.c ** 2 * y3,
            ph.B * ph.b * Sg(J3 * y0) - 2 * ph.b * y9 - ph.b ** 2 * y4,
        ])
    raise TypeError(f"unsupported parameter type {type(params)!r}")


def jacobian(params, state):
    """Analytic Jacobian of :func:`field` at ``state``.

    All entries are derived from the field equations themselves (not from
    any printed matrix), so ``jacobian`` is consistent with ``field`` by
    construction and is validated against finite differences in the tests.
    """
    y = np.asarray(state, dtype=float)
    if y.shape != (params.dim,):
        raise ValueError(f"state has shape {y.shape}, expected ({params.dim},)")
    return jacobian_batch(params, y[None, :])[0]


# reordering note: physical-model Jacobians are only needed by tests via
# finite differences, so only the reduced/normal-form models get them here.


def equilibrium_from_x(params, X):
    """Closed-form equilibrium with abscissa X and the drive that fixes it.

    Returns ``(state, drive)`` where ``drive`` is the input P (JR / WC) or
    the unfolding parameter alpha (normal form) at which ``state`` is an
    equilibrium.  All derivative components of ``state`` are zero.
    """
    if not math.isfinite(X):
        raise DomainError("X must be finite")
    states, drives = equilibrium_batch(params, np.array([float(X)]))
    return states[0], float(drives[0])


def equilibrium_batch(params, X):
    """Vectorized :func:`equilibrium_from_x` over an array of abscissae."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if isinstance(params, JRParams):
        lk0 = params.ln_k0
        S = lambda u: _expit(u - lk0)
        j, G, d = params.j, params.G, params.d
        a1, a2, a3, a4 = params.alpha1, params.alpha2, params.alpha3, params.alpha4
        Y0 = j * S(X)
        Y2 = (a4 * G / d) * j * S(a3 * Y0)
        P = X + Y2 - a2 * j * S(a1 * Y0)
        states = np.zeros((n, 6))
        states[:, 0] = Y0
        states[:, 1] = X
        states[:, 2] = Y2
        return states, P
    if isinstance(params, WCParams):
        lk0 = params.ln_k0
        S = lambda u: _expit(u - lk0)
        j = params.j
        G1, G2, d1, d2 = params.G1, params.G2, params.d1, params.d2
        a2, a3, a4 = params.alpha2, params.alpha3, params.alpha4
        a5, a6, a7 = params.alpha5, params.alpha6, params.alpha7
        S0 = S(X)
        Y0 = j * S0
        S3 = S(a3 * Y0)
        Y2 = (j * G1 * a4 / d1) * S3
        Z = -(j * G1 * a6 / d1) * S3 + a5 * Y0
        Y3 = (j * G2 * a7 / d2) * S(Z)
        P = X + Y2 + Y3 - a2 * j * S(params.alpha1 * Y0)
        states = np.zeros((n, 10))
        states[:, 0] = Y0
        states[:, 1] = X
        states[:, 2] = Y2
        states[:, 3] = Y3
        states[:, 4] = Z
        return states, P
    if isinstance(params, DBTParams):
        states = np.zeros((n, 2))
        states[:, 0] = X
        return states, -X * X
    raise TypeError("equilibrium parametrization exists only for the reduced models")


def jacobian_batch(params, states):
    """Vectorized analytic Jacobians, shape (N, dim, dim)."""
    Y = np.asarray(states, dtype=float)
    N = Y.shape[0]
    if isinstance(params, JRParams):
        lk0 = params.ln_k0
        j, G, d = params.j, params.G, params.d
        a1, a2, a3, a4 = params.alpha1, params.alpha2, params.alpha3, params.alpha4
        Sp = lambda u: (lambda s: s * (1.0 - s))(_expit(u - lk0))
        J = np.zeros((N, 6, 6))
        J[:, 0, 3] = 1.0
        J[:, 1, 4] = 1.0
        J[:, 1, 5] = -1.0
        J[:, 2, 5] = 1.0
        J[:, 3, 0] = -1.0
        J[:, 3, 1] = j * Sp(Y[:, 1])
        J[:, 3, 3] = -2.0
        J[:, 4, 0] = a1 * a2 * j * Sp(a1 * Y[:, 0])
        J[:, 4, 1] = -1.0
        J[:, 4, 2] = -1.0
        J[:, 4, 4] = -2.0
        J[:, 5, 0] = a3 * a4 * d * G * j * Sp(a3 * Y[:, 0])
        J[:, 5, 2] = -d * d
        J[:, 5, 5] = -2.0 * d
        return J
    if isinstance(params, WCParams):
        lk0 = params.ln_k0
        j = params.j
        G1, G2, d1, d2 = params.G1, params.G2, params.d1, params.d2
        a1, a2, a3, a4 = params.alpha1, params.alpha2, params.alpha3, params.alpha4
        a5, a6, a7 = params.alpha5, params.alpha6, params.alpha7
        Sp = lambda u: (lambda s: s * (1.0 - s))(_expit(u - lk0))
        J = np.zeros((N, 10, 10))
        J[:, 0, 5] = 1.0
        J[:, 1, 6] = 1.0
        J[:, 1, 7] = -1.0
        J[:, 1, 8] = -1.0
        J[:, 2, 7] = 1.0
        J[:, 3, 8] = 1.0
        J[:, 4, 5] = a5
        J[:, 4, 9] = -a6
        J[:, 5, 0] = -1.0
        J[:, 5, 1] = j * Sp(Y[:, 1])
        J[:, 5, 5] = -2.0
        J[:, 6, 0] = j * a1 * a2 * Sp(a1 * Y[:, 0])
        J[:, 6, 1] = -1.0
        J[:, 6, 2] = -1.0
        J[:, 6, 3] = -1.0
        J[:, 6, 6] = -2.0
        J[:, 7, 0] = j * d1 * G1 * a3 * a4 * Sp(a3 * Y[:, 0])
        J[:, 7, 2] = -d1 * d1
        J[:, 7, 7] = -2.0 * d1
        J[:, 8, 4] = j * d2 * G2 * a7 * Sp(Y[:, 4])
        J[:, 8, 3] = -d2 * d2
        J[:, 8, 8] = -2.0 * d2
        J[:, 9, 0] = j * d1 * G1 * a3 * Sp(a3 * Y[:, 0]) - d1 * d1 * a5 / a6
        J[:, 9, 4] = d1 * d1 / a6
        J[:, 9, 9] = -2.0 * d1
        return J
    if isinstance(params, DBTParams):
        al, be, ga, sg = params.alpha, params.beta, params.gamma, params.sign
        x = Y[:, 0]
        yy = Y[:, 1]
        J = np.zeros((N, 2, 2))
        J[:, 0, 1] = 1.0
        J[:, 1, 0] = 2.0 * x + yy * (ga + 3.0 * sg * x * x)
        J[:, 1, 1] = be + ga * x + sg * x ** 3
        return J
    raise TypeError(f"analytic Jacobian not available for {type(params)!r}")


# ---------------------------------------------------------------------------
# parameter access by name (used by the CLI and the two-parameter tracing)


def param_names(params):
    """Names of the scalar parameters of a params dataclass."""
    return tuple(f.name for f in fields(params))


def _unknown_param(params, name):
    from .errors import ConfigError
    return ConfigError(
        f"unknown parameter {name!r} for model "
        f"{getattr(params, 'model', type(params).__name__)!r}; "
        f"known: {', '.join(param_names(params))}")


def get_param(params, name):
    if name not in param_names(params):
        raise _unknown_param(params, name)
    return getattr(params, name)


def set_param(params, name, value):
    """Return a copy of ``params`` with one named parameter replaced."""
    if name not in param_names(params):
        raise _unknown_param(params, name)
    return replace(params, **{name: float(value)})


# ---------------------------------------------------------------------------
# presets

def _jr_default():
    return reduce_jr(PhysicalJRParams())


def _wc_default():
    return reduce_wc(PhysicalWCParams())


def _dbt_default():
    return DBTParams()


PRESETS = {
    "jr-default": _jr_default,
    "wc-default": _wc_default,
    "dbt-default": _dbt_default,
    "jr-physical": PhysicalJRParams,
    "wc-physical": PhysicalWCParams,
}


def preset(name):
    """Instantiate a named parameter preset ('jr-default', 'wc-default', ...)."""
    try:
        return PRESETS[name]()
    except KeyError:
        from .errors import ConfigError
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
