"""Stochastic rhythm and seizure scenarios.

The input drive is perturbed by white noise: the driven component obeys
dY = f(Y) dtau + sigma dW with the mean drive mu(tau) = mu0 + slope*tau,
integrated by Euler-Maruyama at a fixed step.  Spike detection, the
four-phase seizure segmentation and the linearized noise-response
spectrum are deterministic functions of the simulated path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import models as M
from . import _kernels as K
from .errors import DomainError, NumericalFailure

__all__ = [
    "NoiseSpec", "SpikeTrain", "simulate_sde", "detect_spikes",
    "oscillation_epochs", "seizure_scenario", "linear_noise_spectrum",
    "spike_rate",
]

_MODEL_IDS = {"jr": 0, "wc": 1, "dbt": 2}


@dataclass(frozen=True)
class NoiseSpec:
    """Stochastic drive specification.

    The drive fluctuates around mu(tau) = mean + slope*tau with stationary
    standard deviation ``std``.  With the default unit correlation time
    the drive is a mean-reverting diffusion whose stationary law is
    N(mu, std^2); ``correlation_time=0`` selects the white-noise limit
    where std is the diffusion intensity added to the driven component.
    A fixed seed gives a bit-reproducible path.
    """

    mean: float = 0.0
    std: float = 0.0
    slope: float = 0.0
    seed: int = 0
    correlation_time: float = 1.0

    def __post_init__(self):
        if self.std < 0:
            raise DomainError("std must be >= 0")
        if self.correlation_time < 0:
            raise DomainError("correlation_time must be >= 0")


@dataclass
class SpikeTrain:
    """Detected spikes with amplitudes and depolarizing-shift flags."""

    times: np.ndarray
    amplitudes: np.ndarray
    is_pds: np.ndarray
    refractory: float = 2.0

    def __len__(self):
        return len(self.times)

    def rate(self, t_total):
        return len(self.times) / t_total if t_total > 0 else 0.0


@dataclass
class SdeTrajectory:
    t: np.ndarray
    y: np.ndarray
    p_inst: np.ndarray
    noise: NoiseSpec
    x_index: int = 1
    stats: dict = dc_field(default_factory=dict)


def simulate_sde(params, noise, T, dt=1e-3, sample_dt=0.05, x0=None):
    """Euler-Maruyama path of the drive-perturbed model.

    The deterministic part uses the drive mu(tau); the Wiener increment
    sigma*sqrt(dt)*N(0,1) is added to the driven state component each
    step.  ``p_inst`` records the implied white-noise drive sample
    mu + sigma*Z/sqrt(dt).  With std = 0 this reduces to fixed-step Euler
    integration of the deterministic model.  Identical ``noise`` specs
    give bit-identical paths.
    """
    if dt > 1e-3:
        raise DomainError("dt must be <= 1e-3 for the fixed-step scheme")
    nsteps = T / dt
    if nsteps > 1e7:
        raise DomainError("T/dt exceeds the 1e7-step budget")
    if x0 is None:
        x0 = _default_sde_start(params, noise.mean)
    x0 = np.asarray(x0, dtype=float)
    stride = max(1, int(round(sample_dt / dt)))
    ts, ys, ps, status = K.em_path(
        _MODEL_IDS[params.model], x0, params.pack(), params.drive_row,
        noise.mean, noise.slope, noise.std, float(noise.correlation_time),
        float(T), float(dt), int(noise.seed) & 0x7FFFFFFF, stride)
    if status == K.BLOWUP:
        raise NumericalFailure("state blew up during the SDE run",
                               {"t": ts[-1] if len(ts) else 0.0})
    return SdeTrajectory(t=ts, y=ys, p_inst=ps, noise=noise,
                         x_index=params.x_index,
                         stats={"dt": dt, "stride": stride,
                                "scheme": "euler-maruyama"})


def _default_sde_start(params, mu):
    # start on the fixed-point manifold at the drive mean: the lowest-X
    # equilibrium existing at mu (the resting down-state), or the closest one
    X = np.linspace(*_sweep_window(params), 4001)
    states, P = M.equilibrium_batch(params, X)
    crossing = np.where(np.diff(np.sign(P - mu)) != 0)[0]
    if len(crossing):
        return states[crossing[0] + 1]
    k = int(np.argmin(np.abs(P - mu)))
    return states[k]


def _sweep_window(params):
    from .equilibria import DEFAULT_SWEEPS
    lo, hi, _ = DEFAULT_SWEEPS[params.model]
    return lo, hi


def detect_spikes(traj, baseline_window=50.0, refractory=2.0,
                  threshold_sigmas=4.0, pds_factor=1.5, robust=True,
                  min_amplitude=1.0):
    """Threshold-crossing spike detection with a trailing baseline.

    A spike is a local maximum of X exceeding the trailing-window baseline
    level by ``threshold_sigmas`` baseline deviations, separated from the
    previous spike by at least the refractory time.  With ``robust`` the
    baseline level and deviation are the median and the scaled median
    absolute deviation, which keeps the threshold meaningful while the
    window itself contains spikes (rhythmic ictal activity would inflate a
    plain mean/std estimate and mask further detections).  Spikes whose
    neighbor lies within ``pds_factor`` refractory windows are flagged as
    parts of a paroxysmal depolarizing shift.  ``min_amplitude`` floors
    the required excursion above baseline in absolute units, keeping rare
    4-sigma noise bumps (amplitude well below one) out of the train; set
    it to zero for the bare statistical threshold.
    """
    t = traj.t
    x = traj.y[:, traj.x_index]
    if len(t) < 3:
        return SpikeTrain(np.empty(0), np.empty(0), np.empty(0, dtype=bool),
                          refractory)
    dt_s = t[1] - t[0]
    if t[-1] - t[0] <= baseline_window:
        raise DomainError("trajectory shorter than the baseline window")
    # local maxima
    peaks = np.where((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1
    wlen = max(3, int(round(baseline_window / dt_s)))
    gap = max(1, int(round(1.0 / dt_s)))
    times = []
    amps = []
    last = -np.inf
    for k in peaks:
        if t[k] - last < refractory:
            continue
        lo = max(0, k - gap - wlen)
        hi = max(1, k - gap)
        if hi - lo < 10:
            continue
        base = x[lo:hi]
        if robust:
            mu = float(np.median(base))
            sd = 1.4826 * float(np.median(np.abs(base - mu)))
        else:
            mu = float(np.mean(base))
            sd = float(np.std(base))
        if x[k] > mu + max(threshold_sigmas * sd, min_amplitude):
            times.append(t[k])
            amps.append(x[k] - mu)
            last = t[k]
    times = np.asarray(times)
    amps = np.asarray(amps)
    is_pds = np.zeros(len(times), dtype=bool)
    if len(times) > 1:
        gaps = np.diff(times)
        close = gaps <= pds_factor * refractory
        is_pds[:-1] |= close
        is_pds[1:] |= close
    return SpikeTrain(times=times, amplitudes=amps, is_pds=is_pds,
                      refractory=refractory)


def oscillation_epochs(traj, window=10.0, min_amplitude=0.25,
                       max_amplitude=3.0, min_duration=30.0, level_min=None):
    """Maximal intervals of sustained small-amplitude rhythmic activity.

    An epoch is a run of rolling windows whose X peak-to-peak range stays
    inside [min_amplitude, max_amplitude] (oscillating, but below spike
    scale) lasting at least ``min_duration``; with ``level_min`` set, the
    window mean must also stay above it, which separates oscillation
    around the depolarized state from noise around the resting one.
    Thresholds are heuristics exposed as arguments.
    """
    t = traj.t
    x = traj.y[:, traj.x_index]
    dt_s = t[1] - t[0]
    w = max(2, int(round(window / dt_s)))
    n = len(x) // w
    flags = np.zeros(n, dtype=bool)
    for k in range(n):
        seg = x[k * w:(k + 1) * w]
        p2p = seg.max() - seg.min()
        flags[k] = min_amplitude <= p2p <= max_amplitude
        if level_min is not None and np.mean(seg) < level_min:
            flags[k] = False
    epochs = []
    start = None
    for k in range(n + 1):
        on = flags[k] if k < n else False
        if on and start is None:
            start = k
        elif not on and start is not None:
            dur = (k - start) * window
            if dur >= min_duration:
                epochs.append((t[start * w], t[min(k * w, len(t) - 1)]))
            start = None
    return epochs


def spike_rate(params, mu, sigma, T=1000.0, seeds=range(10), dt=1e-3,
               j=None):
    """Mean spike rate over seeds at a fixed drive mean (spikes per tau)."""
    p = params if j is None else M.set_param(params, "j", j)
    rates = []
    for seed in seeds:
        traj = simulate_sde(p, NoiseSpec(mean=mu, std=sigma, seed=seed), T,
                            dt=dt)
        train = detect_spikes(traj)
        rates.append(train.rate(T))
    return float(np.mean(rates))


def seizure_scenario(params, mu0=1.5, slope=1e-3, sigma=0.4, T=3500.0,
                     dt=1e-3, seed=0, cv_max=0.3, rate_band_hz=(0.5, 8.0),
                     a_rate=100.0, min_run=5):
    """Slow drive ramp through the seizure transition, with phases.

    Returns (trajectory, spike_train, phases) where phases is an ordered
    list of (name, t_start, t_end) among normal / onset / seizure / post.
    The seizure core is the longest run of at least ``min_run`` consecutive
    inter-spike intervals with coefficient of variation below ``cv_max``
    and mean rate inside ``rate_band_hz``; segmentation is a deterministic
    function of the spike train and the trajectory.
    """
    if slope < 0:
        raise DomainError("slope must be >= 0")
    noise = NoiseSpec(mean=mu0, std=sigma, slope=slope, seed=seed)
    traj = simulate_sde(params, noise, T, dt=dt)
    train = detect_spikes(traj)
    phases = []
    times = train.times
    if len(times) == 0:
        phases.append(("normal", 0.0, float(T)))
        return traj, train, phases
    # inter-spike intervals (tau) consistent with the rate band (Hz)
    isi_lo = a_rate / rate_band_hz[1]
    isi_hi = a_rate / rate_band_hz[0]
    best = None
    if len(times) > min_run:
        isi = np.diff(times)
        for i in range(len(isi)):
            for jj in range(i + min_run, len(isi) + 1):
                seg = isi[i:jj]
                mean = seg.mean()
                if not (isi_lo <= mean <= isi_hi):
                    continue
                cv = seg.std() / mean if mean > 0 else np.inf
                if cv < cv_max:
                    if best is None or jj - i > best[1] - best[0]:
                        best = (i, jj)
                else:
                    break
    if best is None:
        phases.append(("normal", 0.0, float(times[0])))
        phases.append(("onset", float(times[0]), float(T)))
        return traj, train, phases
    i0, i1 = best
    t_sz0, t_sz1 = float(times[i0]), float(times[i1])
    if times[0] < t_sz0:
        phases.append(("normal", 0.0, float(times[0])))
        phases.append(("onset", float(times[0]), t_sz0))
    else:
        phases.append(("normal", 0.0, t_sz0))
    phases.append(("seizure", t_sz0, t_sz1))
    tail = _clip_traj(traj, t_sz1)
    if tail is not None:
        epochs = oscillation_epochs(tail)
        if epochs:
            phases.append(("post", float(epochs[0][0]), float(T)))
    return traj, train, phases


def _clip_traj(traj, t_from):
    k = int(np.searchsorted(traj.t, t_from))
    if len(traj.t) - k < 10:
        return None
    return SdeTrajectory(t=traj.t[k:], y=traj.y[k:], p_inst=traj.p_inst[k:],
                         noise=traj.noise, x_index=traj.x_index)


def linear_noise_spectrum(params, x_star, a_rate=100.0):
    """Spectral peak of noise-driven fluctuation around a stable focus.

    The least-damped complex eigenvalue pair of the Jacobian at the
    equilibrium with abscissa ``x_star`` sets the resonance: peak
    frequency Im(lambda)/(2 pi) * a in Hz and damping |Re(lambda)| * a.
    Returns {"resonance": False} when the spectrum is purely real.
    """
    state, P = M.equilibrium_from_x(params, x_star)
    p2 = M.set_param(params, params.drive_name, P)
    J = M.jacobian_batch(p2, state[None, :])[0]
    ev = np.linalg.eigvals(J)
    cplx = ev[np.abs(ev.imag) > 1e-9]
    if cplx.size == 0:
        return {"resonance": False}
    k = int(np.argmax(cplx.real))
    lam = cplx[k]
    return {"resonance": True,
            "freq_hz": float(abs(lam.imag) / (2.0 * math.pi) * a_rate),
            "damping": float(abs(lam.real) * a_rate),
            "stable": bool(np.all(ev.real < 0))}
