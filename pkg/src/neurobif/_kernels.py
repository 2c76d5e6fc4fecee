"""Compiled integration kernels.

Everything here is numba-jitted and operates on packed float64 parameter
vectors; the dataclass-facing wrappers live in :mod:`neurobif.cycles` and
:mod:`neurobif.scenarios`.  One Dormand-Prince 5(4) stepper (embedded
error estimate, FSAL) drives three entry points:

* ``integrate_sampled``   -- trajectory values on a fixed output grid,
* ``integrate_to_section``-- run until the next positive crossing of a
  coordinate hyperplane, with the crossing time polished to machine
  precision by short exact re-integrations (used by the shooting solver),
* ``integrate_final``     -- endpoint only.

``mode=1`` augments the state with the fundamental matrix and the
derivative with respect to the additive drive parameter, integrated from
the variational equations, which is how monodromy matrices and parameter
sensitivities are obtained.

Model ids: 0 = Jansen-Rit reduced, 1 = Wendling-Chauvel reduced,
2 = planar normal form, 3 = Jansen-Rit physical, 4 = Wendling-Chauvel
physical.  Status codes: 0 ok, 1 step budget exhausted, 2 step-size
underflow (stiffness), 3 no section crossing, 4 state blow-up.
"""

import math

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# error weights (5th-order minus embedded 4th-order solution)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

OK = 0
MAX_STEPS = 1
UNDERFLOW = 2
NO_CROSSING = 3
BLOWUP = 4


@njit(cache=True)
def _dim(mid):
    if mid == 0:
        return 6
    if mid == 1:
        return 10
    if mid == 2:
        return 2
    if mid == 3:
        return 6
    return 10


@njit(cache=True)
def _drive_row(mid):
    # state equation receiving the additive drive (P, alpha, or p)
    if mid == 0:
        return 4
    if mid == 1:
        return 6
    if mid == 2:
        return 1
    if mid == 3:
        return 4
    return 6


@njit(cache=True)
def _logistic(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@njit(cache=True)
def _rhs(mid, y, c, out):
    if mid == 0:
        j, G, d = c[0], c[1], c[2]
        a1, a2, a3, a4 = c[3], c[4], c[5], c[6]
        lk0, P = c[7], c[8]
        out[0] = y[3]
        out[1] = y[4] - y[5]
        out[2] = y[5]
        out[3] = j * _logistic(y[1] - lk0) - 2.0 * y[3] - y[0]
        out[4] = P + a2 * j * _logistic(a1 * y[0] - lk0) - 2.0 * y[4] - (y[2] + y[1])
        out[5] = d * a4 * G * j * _logistic(a3 * y[0] - lk0) - 2.0 * d * y[5] - d * d * y[2]
    elif mid == 1:
        j, G1, G2, d1, d2 = c[0], c[1], c[2], c[3], c[4]
        a1, a2, a3, a4 = c[5], c[6], c[7], c[8]
        a5, a6, a7 = c[9], c[10], c[11]
        lk0, P = c[12], c[13]
        out[0] = y[5]
        out[1] = y[6] - y[7] - y[8]
        out[2] = y[7]
        out[3] = y[8]
        out[4] = a5 * y[5] - a6 * y[9]
        out[5] = j * _logistic(y[1] - lk0) - 2.0 * y[5] - y[0]
        out[6] = P + j * a2 * _logistic(a1 * y[0] - lk0) - 2.0 * y[6] - (y[1] + y[2] + y[3])
        out[7] = j * d1 * G1 * a4 * _logistic(a3 * y[0] - lk0) - 2.0 * d1 * y[7] - d1 * d1 * y[2]
        out[8] = j * d2 * G2 * a7 * _logistic(y[4] - lk0) - 2.0 * d2 * y[8] - d2 * d2 * y[3]
        out[9] = (j * d1 * G1 * _logistic(a3 * y[0] - lk0) - 2.0 * d1 * y[9]
                  - d1 * d1 * (a5 * y[0] - y[4]) / a6)
    elif mid == 2:
        al, be, ga, sg = c[0], c[1], c[2], c[3]
        x = y[0]
        out[0] = y[1]
        out[1] = x * x + al + y[1] * (be + ga * x + sg * x * x * x)
    elif mid == 3:
        A, B, a, b = c[0], c[1], c[2], c[3]
        a1, a2, a3, a4 = c[4], c[5], c[6], c[7]
        J, v0, r, numax, p = c[8], c[9], c[10], c[11], c[12]
        out[0] = y[3]
        out[1] = y[4]
        out[2] = y[5]
        out[3] = A * a * numax * _logistic(r * (y[1] - y[2]) - r * v0) - 2.0 * a * y[3] - a * a * y[0]
        out[4] = (A * a * (p + a2 * J * numax * _logistic(r * a1 * J * y[0] - r * v0))
                  - 2.0 * a * y[4] - a * a * y[1])
        out[5] = (B * b * a4 * J * numax * _logistic(r * a3 * J * y[0] - r * v0)
                  - 2.0 * b * y[5] - b * b * y[2])
    else:
        A, B, C, a, b, cc = c[0], c[1], c[2], c[3], c[4], c[5]
        a1, a2, a3, a4 = c[6], c[7], c[8], c[9]
        a5, a6, a7 = c[10], c[11], c[12]
        J, v0, r, numax, p = c[13], c[14], c[15], c[16], c[17]
        out[0] = y[5]
        out[1] = y[6]
        out[2] = y[7]
        out[3] = y[8]
        out[4] = y[9]
        out[5] = (A * a * numax * _logistic(r * (y[1] - y[2] - y[3]) - r * v0)
                  - 2.0 * a * y[5] - a * a * y[0])
        out[6] = (A * a * (p + a2 * J * numax * _logistic(r * a1 * J * y[0] - r * v0))
                  - 2.0 * a * y[6] - a * a * y[1])
        out[7] = (B * b * a4 * J * numax * _logistic(r * a3 * J * y[0] - r * v0)
                  - 2.0 * b * y[7] - b * b * y[2])
        out[8] = (C * cc * a7 * J * numax * _logistic(r * (a5 * J * y[0] - a6 * J * y[4]) - r * v0)
                  - 2.0 * cc * y[8] - cc * cc * y[3])
        out[9] = (B * b * numax * _logistic(r * a3 * J * y[0] - r * v0)
                  - 2.0 * b * y[9] - b * b * y[4])


@njit(cache=True)
def _jac(mid, y, c, J):
    n = _dim(mid)
    for i in range(n):
        for k in range(n):
            J[i, k] = 0.0
    if mid == 0:
        j, G, d = c[0], c[1], c[2]
        a1, a2, a3, a4 = c[3], c[4], c[5], c[6]
        lk0 = c[7]
        s1 = _logistic(y[1] - lk0)
        s2 = _logistic(a1 * y[0] - lk0)
        s3 = _logistic(a3 * y[0] - lk0)
        J[0, 3] = 1.0
        J[1, 4] = 1.0
        J[1, 5] = -1.0
        J[2, 5] = 1.0
        J[3, 0] = -1.0
        J[3, 1] = j * s1 * (1.0 - s1)
        J[3, 3] = -2.0
        J[4, 0] = a1 * a2 * j * s2 * (1.0 - s2)
        J[4, 1] = -1.0
        J[4, 2] = -1.0
        J[4, 4] = -2.0
        J[5, 0] = a3 * a4 * d * G * j * s3 * (1.0 - s3)
        J[5, 2] = -d * d
        J[5, 5] = -2.0 * d
    elif mid == 1:
        j, G1, G2, d1, d2 = c[0], c[1], c[2], c[3], c[4]
        a1, a2, a3, a4 = c[5], c[6], c[7], c[8]
        a5, a6, a7 = c[9], c[10], c[11]
        lk0 = c[12]
        s1 = _logistic(y[1] - lk0)
        s2 = _logistic(a1 * y[0] - lk0)
        s3 = _logistic(a3 * y[0] - lk0)
        sz = _logistic(y[4] - lk0)
        J[0, 5] = 1.0
        J[1, 6] = 1.0
        J[1, 7] = -1.0
        J[1, 8] = -1.0
        J[2, 7] = 1.0
        J[3, 8] = 1.0
        J[4, 5] = a5
        J[4, 9] = -a6
        J[5, 0] = -1.0
        J[5, 1] = j * s1 * (1.0 - s1)
        J[5, 5] = -2.0
        J[6, 0] = j * a1 * a2 * s2 * (1.0 - s2)
        J[6, 1] = -1.0
        J[6, 2] = -1.0
        J[6, 3] = -1.0
        J[6, 6] = -2.0
        J[7, 0] = j * d1 * G1 * a3 * a4 * s3 * (1.0 - s3)
        J[7, 2] = -d1 * d1
        J[7, 7] = -2.0 * d1
        J[8, 4] = j * d2 * G2 * a7 * sz * (1.0 - sz)
        J[8, 3] = -d2 * d2
        J[8, 8] = -2.0 * d2
        J[9, 0] = j * d1 * G1 * a3 * s3 * (1.0 - s3) - d1 * d1 * a5 / a6
        J[9, 4] = d1 * d1 / a6
        J[9, 9] = -2.0 * d1
    elif mid == 2:
        be, ga, sg = c[1], c[2], c[3]
        x = y[0]
        J[0, 1] = 1.0
        J[1, 0] = 2.0 * x + y[1] * (ga + 3.0 * sg * x * x)
        J[1, 1] = be + ga * x + sg * x * x * x
    # physical models (3, 4) are exercised through finite differences only


@njit(cache=True)
def _ext_dim(mid, mode):
    n = _dim(mid)
    if mode == 0:
        return n
    return n + n * n + n


@njit(cache=True)
def _rhs_ext(mid, mode, y, c, out):
    n = _dim(mid)
    _rhs(mid, y[:n], c, out[:n])
    if mode == 1:
        J = np.empty((n, n))
        _jac(mid, y[:n], c, J)
        # fundamental matrix block, row-major
        for i in range(n):
            for k in range(n):
                acc = 0.0
                for l in range(n):
                    acc += J[i, l] * y[n + l * n + k]
                out[n + i * n + k] = acc
        # drive-sensitivity column
        base = n + n * n
        pr = _drive_row(mid)
        for i in range(n):
            acc = 0.0
            for l in range(n):
                acc += J[i, l] * y[base + l]
            if i == pr:
                acc += 1.0
            out[base + i] = acc


@njit(cache=True)
def _error_norm(e, y0, y1, rtol, atol):
    m = e.shape[0]
    acc = 0.0
    for i in range(m):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        q = e[i] / sc
        acc += q * q
    return math.sqrt(acc / m)


@njit(cache=True)
def _try_step(mid, mode, t, y, f, h, c, rtol, atol, ynew, fnew, k2, k3, k4, k5, k6, ytmp):
    """One DP5 step attempt; returns the scaled error norm.

    On return ``ynew`` holds the 5th-order solution and ``fnew`` its
    derivative (FSAL).  Caller accepts when the error norm is <= 1.
    """
    m = y.shape[0]
    for i in range(m):
        ytmp[i] = y[i] + h * _A21 * f[i]
    _rhs_ext(mid, mode, ytmp, c, k2)
    for i in range(m):
        ytmp[i] = y[i] + h * (_A31 * f[i] + _A32 * k2[i])
    _rhs_ext(mid, mode, ytmp, c, k3)
    for i in range(m):
        ytmp[i] = y[i] + h * (_A41 * f[i] + _A42 * k2[i] + _A43 * k3[i])
    _rhs_ext(mid, mode, ytmp, c, k4)
    for i in range(m):
        ytmp[i] = y[i] + h * (_A51 * f[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
    _rhs_ext(mid, mode, ytmp, c, k5)
    for i in range(m):
        ytmp[i] = y[i] + h * (_A61 * f[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i]
                              + _A65 * k5[i])
    _rhs_ext(mid, mode, ytmp, c, k6)
    for i in range(m):
        ynew[i] = y[i] + h * (_B1 * f[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
    _rhs_ext(mid, mode, ynew, c, fnew)
    # reuse ytmp for the error vector
    for i in range(m):
        ytmp[i] = h * (_E1 * f[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i]
                       + _E7 * fnew[i])
    return _error_norm(ytmp, y, ynew, rtol, atol)


@njit(cache=True)
def _initial_step(m, f, y, rtol, atol):
    d0 = 0.0
    d1 = 0.0
    for i in range(m):
        sc = atol + rtol * abs(y[i])
        q0 = y[i] / sc
        q1 = f[i] / sc
        d0 += q0 * q0
        d1 += q1 * q1
    d0 = math.sqrt(d0 / m)
    d1 = math.sqrt(d1 / m)
    if d0 < 1e-5 or d1 < 1e-5:
        return 1e-6
    return 0.01 * d0 / d1


@njit(cache=True)
def _advance(mid, mode, y, c, t_span, rtol, atol, max_steps):
    """Integrate ``y`` in place over exactly ``t_span``.

    Returns (status, accepted_steps, rejected_steps).
    """
    if t_span == 0.0:
        return OK, 0, 0
    m = y.shape[0]
    f = np.empty(m)
    fnew = np.empty(m)
    ynew = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    k5 = np.empty(m)
    k6 = np.empty(m)
    ytmp = np.empty(m)
    _rhs_ext(mid, mode, y, c, f)
    direction = 1.0 if t_span > 0 else -1.0
    remaining = abs(t_span)
    h = min(_initial_step(m, f, y, rtol, atol), remaining)
    hmin = 1e-14 * max(1.0, abs(t_span))
    steps = 0
    accepted = 0
    rejected = 0
    while remaining > 0.0:
        steps += 1
        if steps > max_steps:
            return MAX_STEPS, accepted, rejected
        if h < hmin:
            return UNDERFLOW, accepted, rejected
        hstep = min(h, remaining)
        err = _try_step(mid, mode, 0.0, y, f, direction * hstep, c, rtol, atol,
                        ynew, fnew, k2, k3, k4, k5, k6, ytmp)
        if err <= 1.0:
            accepted += 1
            remaining -= hstep
            for i in range(m):
                y[i] = ynew[i]
                f[i] = fnew[i]
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            h = hstep * min(5.0, max(0.2, fac))
        else:
            rejected += 1
            h = hstep * min(1.0, max(0.1, 0.9 * err ** -0.2))
    return OK, accepted, rejected


@njit(cache=True)
def integrate_final(mid, mode, y0, c, t_span, rtol, atol, max_steps):
    y = y0.copy()
    status, _, _ = _advance(mid, mode, y, c, t_span, rtol, atol, max_steps)
    return y, status


@njit(cache=True)
def integrate_sampled(mid, y0, c, t_eval, rtol, atol, max_steps):
    """Trajectory on a fixed time grid (grid must start at 0, increasing).

    Returns (values, status, accepted_steps, rejected_steps).
    """
    m = y0.shape[0]
    nt = t_eval.shape[0]
    out = np.empty((nt, m))
    y = y0.copy()
    out[0] = y
    t = t_eval[0]
    acc = 0
    rej = 0
    for k in range(1, nt):
        status, a, r = _advance(mid, 0, y, c, t_eval[k] - t, rtol, atol, max_steps)
        acc += a
        rej += r
        if status != OK:
            return out[:k], status, acc, rej
        t = t_eval[k]
        out[k] = y
    return out, OK, acc, rej


@njit(cache=True)
def _hermite(y0, f0, y1, f1, h, theta):
    # cubic Hermite interpolation on one accepted step
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + theta
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


@njit(cache=True)
def integrate_to_section(mid, mode, y0, c, ix, s_val, t_max, rtol, atol, max_steps):
    """Run until the next positive-direction crossing of y[ix] = s_val.

    Returns (t_cross, y_at_cross, x_min, x_max, status).  The crossing is
    armed only after the coordinate has actually left the section on the
    negative side, so starting exactly on the section is fine.  x_min and
    x_max track the ix coordinate over the whole run (dense-subsampled),
    giving the orbit amplitude over one return for free.
    """
    m = y0.shape[0]
    y = y0.copy()
    f = np.empty(m)
    fnew = np.empty(m)
    ynew = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    k5 = np.empty(m)
    k6 = np.empty(m)
    ytmp = np.empty(m)
    yold = np.empty(m)
    fold = np.empty(m)
    _rhs_ext(mid, mode, y, c, f)
    t = 0.0
    h = min(_initial_step(m, f, y, rtol, atol), t_max * 0.25)
    hmin = 1e-14 * max(1.0, t_max)
    xmin = y[ix]
    xmax = y[ix]
    armed = y[ix] - s_val < -1e-10
    steps = 0
    while t < t_max:
        steps += 1
        if steps > max_steps:
            return t, y, xmin, xmax, MAX_STEPS
        if h < hmin:
            return t, y, xmin, xmax, UNDERFLOW
        hstep = min(h, t_max - t)
        err = _try_step(mid, mode, t, y, f, hstep, c, rtol, atol,
                        ynew, fnew, k2, k3, k4, k5, k6, ytmp)
        if err > 1.0:
            h = hstep * min(1.0, max(0.1, 0.9 * err ** -0.2))
            continue
        for i in range(m):
            yold[i] = y[i]
            fold[i] = f[i]
        g_old = y[ix] - s_val
        g_new = ynew[ix] - s_val
        # amplitude tracking with interior samples
        for q in range(1, 4):
            vi = _hermite(yold[ix], fold[ix], ynew[ix], fnew[ix], hstep, 0.25 * q)
            if vi < xmin:
                xmin = vi
            if vi > xmax:
                xmax = vi
        if ynew[ix] < xmin:
            xmin = ynew[ix]
        if ynew[ix] > xmax:
            xmax = ynew[ix]
        crossed = armed and g_old < 0.0 and g_new >= 0.0
        if not armed and g_new < -1e-10:
            armed = True
        if crossed:
            # bisect the Hermite interpolant for a first estimate
            lo = 0.0
            hi = 1.0
            for _ in range(60):
                mid_th = 0.5 * (lo + hi)
                gv = _hermite(yold[ix], fold[ix], ynew[ix], fnew[ix], hstep, mid_th) - s_val
                if gv < 0.0:
                    lo = mid_th
                else:
                    hi = mid_th
            th = 0.5 * (lo + hi)
            tc = t + th * hstep
            for i in range(m):
                y[i] = yold[i]
            st, _, _ = _advance(mid, mode, y, c, tc - t, rtol, atol, max_steps)
            if st != OK:
                return tc, y, xmin, xmax, st
            # Newton polish on the exact flow
            for _ in range(6):
                g = y[ix] - s_val
                if abs(g) < 1e-13 * (1.0 + abs(s_val)):
                    break
                _rhs_ext(mid, mode, y, c, f)
                gd = f[ix]
                if gd == 0.0:
                    break
                dt_n = -g / gd
                st, _, _ = _advance(mid, mode, y, c, dt_n, rtol, atol, max_steps)
                if st != OK:
                    return tc, y, xmin, xmax, st
                tc += dt_n
            if y[ix] < xmin:
                xmin = y[ix]
            if y[ix] > xmax:
                xmax = y[ix]
            return tc, y, xmin, xmax, OK
        t += hstep
        for i in range(m):
            y[i] = ynew[i]
            f[i] = fnew[i]
        fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        h = hstep * min(5.0, max(0.2, fac))
    return t, y, xmin, xmax, NO_CROSSING


@njit(cache=True)
def em_path(mid, y0, c, prow, mu0, slope, sigma, tau_c, T, dt, seed, stride):
    """Euler-Maruyama path with a stochastically perturbed drive.

    With ``tau_c`` > 0 the drive is the mean-reverting diffusion
        dP = (mu(tau) - P)/tau_c dtau + sigma*sqrt(2/tau_c) dW
    whose stationary law is N(mu, sigma^2); with ``tau_c`` = 0 the drive
    is white, dY_prow = f_prow dtau + sigma dW, and p_inst records the
    implied white-noise sample mu + sigma*Z/sqrt(dt).  mu(tau) = mu0 +
    slope*tau.  Sampled every ``stride`` steps; bit-reproducible per seed.
    """
    m = y0.shape[0]
    nsteps = int(round(T / dt))
    nout = nsteps // stride + 1
    ts = np.empty(nout)
    ys = np.empty((nout, m))
    ps = np.empty(nout)
    np.random.seed(seed)
    y = y0.copy()
    f = np.empty(m)
    cc = c.copy()
    sqdt = math.sqrt(dt)
    ou = tau_c > 0.0
    ou_gain = sigma * math.sqrt(2.0 * dt / tau_c) if ou else 0.0
    p_state = mu0
    ts[0] = 0.0
    ys[0] = y
    ps[0] = mu0
    kout = 1
    for step in range(1, nsteps + 1):
        tau = (step - 1) * dt
        mu = mu0 + slope * tau
        z = np.random.standard_normal() if sigma > 0.0 else 0.0
        if ou:
            p_state += (mu - p_state) * dt / tau_c + ou_gain * z
            p_inst = p_state
            cc[cc.shape[0] - 1] = p_state
        else:
            p_inst = mu + (sigma * z / sqdt if sigma > 0.0 else 0.0)
            cc[cc.shape[0] - 1] = mu
        _rhs(mid, y, cc, f)
        for i in range(m):
            y[i] += f[i] * dt
        if not ou:
            y[prow] += sigma * sqdt * z
        if step % stride == 0:
            if kout < nout:
                ts[kout] = step * dt
                for i in range(m):
                    ys[kout, i] = y[i]
                ps[kout] = p_inst
                kout += 1
        for i in range(m):
            if abs(y[i]) > 1e6:
                return ts[:kout], ys[:kout], ps[:kout], BLOWUP
    return ts[:kout], ys[:kout], ps[:kout], OK
