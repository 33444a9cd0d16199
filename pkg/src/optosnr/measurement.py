"""Windowed signal and noise integrals and the cooling/measurement cycle.

Units are prefactor-free: the homodyne photocurrent is divided by its
position gain ``8 G beta eta / sqrt(gamma_c)``.  The signal is then the
windowed Fourier transform of ``<Q(t)>``, and the shot floor contributes
``int F^2 dt / (64 kappa eta)`` to ``N^2``.  In the long-window limit these
reduce to ``|chi f~|`` and ``sqrt((N_Q + 1/64 kappa eta) T_m)``.

During the measurement window the feedback loop is open, so the signal is
always shaped by the bare susceptibility; cooling only sets the initial
covariance of the window.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.signal import fftconvolve
from scipy.signal.windows import tukey

from .dynamics import (CovarianceState, CovarianceTimeline, build_state_space,
                       covariance_timeline, lyapunov_steady)
from .errors import ArrivalTimeWarning, ConfigurationError, CoolingTimeWarning
from .model import FeedbackConfig, NoiseModel, PhysicalParams, Scheme
from .response import PulseForce, drift_matrix, rk4_linear

#: Leading pulse tail integrated before the window opens, in units of sigma.
PULSE_LEAD = 8.0
#: RK4 steps per mechanical period used for the signal trajectories.
RK4_PER_PERIOD = 128
_CHUNK = 4_000_000
#: Largest window grid accepted before refusing the plan.
MAX_WINDOW_POINTS = 20_000_000


class Filter(str, Enum):
    RECT = "rect"
    TUKEY = "tukey"


@dataclass(frozen=True)
class Window:
    """Uniform time grid on ``[0, T_m]`` with trapezoid weights times the filter."""

    t: np.ndarray
    F: np.ndarray
    weights: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def T_m(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def filter_energy(self) -> float:
        """Trapezoid value of ``int F^2 dt`` (equals ``T_m`` by normalization)."""
        w = np.full(self.t.size, self.dt)
        w[0] = w[-1] = self.dt / 2
        return float(np.sum(w * self.F**2))


@dataclass(frozen=True)
class MeasurementPlan:
    """Measurement window, cooling interval, filter and grid resolution.

    ``n_t`` defaults to ``points_per_period`` samples per period of the
    highest analysed frequency.  ``t1_grid`` holds ``n_t1`` uniformly spaced
    arrival times across ``[0, T_m]``.
    """

    T_m: float
    T_cool: float = 0.0
    filter: Filter = Filter.RECT
    tukey_alpha: float = 0.1
    n_t: int | None = None
    n_t1: int = 33
    points_per_period: int = 64
    omega_grid: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "filter", Filter(self.filter))
        if not self.T_m > 0:
            raise ConfigurationError(f"T_m must be > 0, got {self.T_m!r}")
        if self.T_cool < 0:
            raise ConfigurationError(f"T_cool must be >= 0, got {self.T_cool!r}")
        if not 0 <= self.tukey_alpha <= 1:
            raise ConfigurationError("tukey_alpha must lie in [0, 1]")
        if self.n_t1 < 2:
            raise ConfigurationError("n_t1 must be >= 2")
        if self.points_per_period < 40:
            raise ConfigurationError("points_per_period must be >= 40")
        if self.omega_grid is not None:
            object.__setattr__(self, "omega_grid", tuple(float(w) for w in self.omega_grid))

    def replace(self, **changes) -> "MeasurementPlan":
        import dataclasses
        return dataclasses.replace(self, **changes)

    def required_points(self, omega_max: float, per_period: float = 40) -> int:
        return int(math.ceil(per_period * omega_max * self.T_m / (2 * np.pi))) + 1

    def window(self, omega_max: float) -> Window:
        n = self.n_t if self.n_t is not None else max(41, self.required_points(omega_max, self.points_per_period))
        if n < self.required_points(omega_max):
            raise ConfigurationError(
                f"n_t={n} too coarse: need >= {self.required_points(omega_max)} points "
                f"to resolve omega={omega_max:.4g} rad/s over T_m"
            )
        if n > MAX_WINDOW_POINTS:
            raise ConfigurationError(
                f"window needs {n} samples (limit {MAX_WINDOW_POINTS}); shorten T_m or lower omega"
            )
        t = np.linspace(0.0, self.T_m, n)
        dt = t[1] - t[0]
        trap = np.full(n, dt)
        trap[0] = trap[-1] = dt / 2
        if self.filter is Filter.TUKEY:
            F = tukey(n, self.tukey_alpha)
            F = F * np.sqrt(self.T_m / np.sum(trap * F**2))
        else:
            F = np.ones(n)
        return Window(t, F, trap * F)

    def t1_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T_m, self.n_t1)


def _omega_array(omega) -> np.ndarray:
    return np.atleast_1d(np.asarray(omega, dtype=float))


def _check_nyquist(window: Window, omega: np.ndarray) -> None:
    if np.max(np.abs(omega)) * window.dt > 2 * np.pi / 40 * (1 + 1e-9):
        raise ConfigurationError("time grid too coarse for the requested frequency")


def _transform(window: Window, values: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """``sum_k w_k exp(-i omega t_k) values[k, ...]`` over chunks of omega."""
    wv = window.weights.reshape(-1, *([1] * (values.ndim - 1))) * values
    out = np.empty((omega.size,) + values.shape[1:], dtype=complex)
    step = max(1, _CHUNK // window.t.size)
    for s in range(0, omega.size, step):
        E = np.exp(-1j * np.outer(omega[s:s + step], window.t))
        out[s:s + step] = np.tensordot(E, wv, axes=(1, 0))
    return out


def response_trajectories(pulse: PulseForce, params: PhysicalParams, window: Window,
                          t1s) -> np.ndarray:
    """Open-loop ``<Q(t)>`` on the window grid, one column per arrival time.

    Integration starts ``PULSE_LEAD * sigma`` before the earliest arrival
    (or at ``t = 0``), on a grid aligned with the window samples.
    """
    t1s = np.atleast_1d(np.asarray(t1s, dtype=float))
    dt = window.dt
    lead = max(0.0, PULSE_LEAD * pulse.sigma - float(t1s.min()))
    n_pre = int(math.ceil(lead / dt))
    grid = dt * (np.arange(n_pre + window.t.size) - n_pre)
    substeps = max(1, int(math.ceil(dt * params.omega_m * RK4_PER_PERIOD / (2 * np.pi))))
    A = drift_matrix(params, FeedbackConfig())
    inv2s2 = 1.0 / (2 * pulse.sigma**2)

    def force(t):
        return pulse.f0 * np.exp(-((t - t1s) ** 2) * inv2s2) * np.cos(pulse.omega_f * t)

    traj = rk4_linear(A, force, grid, substeps)
    return traj[n_pre:, 0, :]


def windowed_signal(pulse: PulseForce, params: PhysicalParams, plan: MeasurementPlan,
                    omega, t1: float | None = None):
    """``S(omega) = |int dt exp(-i omega t) <Q(t)> F(t)|`` for one arrival time."""
    t1 = pulse.t1 if t1 is None else t1
    if t1 < -3 * pulse.sigma or t1 > plan.T_m + 3 * pulse.sigma:
        warnings.warn(f"arrival time {t1!r} lies mostly outside the window", ArrivalTimeWarning,
                      stacklevel=2)
    w = _omega_array(omega)
    win = plan.window(float(np.max(np.abs(w))))
    _check_nyquist(win, w)
    Q = response_trajectories(pulse, params, win, [t1])
    out = np.abs(_transform(win, Q, w))[:, 0]
    return out if np.ndim(omega) else float(out[0])


def noise_from_timeline(timeline: CovarianceTimeline, window: Window, omega,
                        shot_density: float) -> np.ndarray:
    """Windowed noise amplitude from a covariance timeline on the window grid.

    ``N^2 = sum_ij w_i w_j exp(-i omega (t_i - t_j)) C_ij + shot * int F^2``,
    evaluated lag by lag: ``C[i, i+k] = phi_q[k] . sig_q[i]`` so the inner
    sums over ``i`` are correlations computed by FFT.
    """
    w = _omega_array(omega)
    _check_nyquist(window, w)
    n = window.t.size
    wt = window.weights
    phi_q, sig_q = timeline.lag_coefficients()
    lagged = []
    for c in range(2):
        full = fftconvolve(wt, (wt * sig_q[:, c])[::-1])
        lagged.append(full[n - 1:])
    # lagged[c][k] = sum_i w_i sig_q[i, c] w_{i+k}
    coef = phi_q[:, 0] * lagged[0] + phi_q[:, 1] * lagged[1]
    coef[1:] *= 2.0
    pos = np.empty(w.size)
    step = max(1, _CHUNK // n)
    lag_t = window.dt * np.arange(n)
    for s in range(0, w.size, step):
        E = np.cos(np.outer(w[s:s + step], lag_t))
        pos[s:s + step] = E @ coef
    n2 = pos + shot_density * window.filter_energy
    return np.sqrt(np.maximum(n2, 0.0))


def cooled_state(params: PhysicalParams, config_cooling: FeedbackConfig) -> CovarianceState:
    """Steady covariance with the loop closed (hot equilibrium if the loop is off)."""
    return lyapunov_steady(build_state_space(params, config_cooling))


def window_timeline(params: PhysicalParams, config_cooling: FeedbackConfig, window: Window,
                    sigma0: CovarianceState | None = None) -> CovarianceTimeline:
    if sigma0 is None:
        sigma0 = cooled_state(params, config_cooling)
    ss_open = build_state_space(params, config_cooling.switched_off())
    return covariance_timeline(sigma0, ss_open, window.t)


def windowed_noise(params: PhysicalParams, config_cooling: FeedbackConfig,
                   plan: MeasurementPlan, omega, sigma0: CovarianceState | None = None):
    """Noise of the windowed spectral estimate, starting from the cooled state."""
    w = _omega_array(omega)
    win = plan.window(float(np.max(np.abs(w))))
    tl = window_timeline(params, config_cooling, win, sigma0)
    out = noise_from_timeline(tl, win, w, params.shot_density)
    return out if np.ndim(omega) else float(out[0])


class CycleEvaluator:
    """Averaged SNR for a fixed pulse, window and frequency set.

    The open-loop signal does not depend on the cooling configuration, so it
    is computed once and reused across gains and noise models.
    """

    def __init__(self, params: PhysicalParams, plan: MeasurementPlan, pulse: PulseForce, omega):
        self.params = params
        self.plan = plan
        self.pulse = pulse
        self.omega = _omega_array(omega)
        self.window = plan.window(float(np.max(np.abs(self.omega))))
        _check_nyquist(self.window, self.omega)

    @cached_property
    def signal_matrix(self) -> np.ndarray:
        """``S(omega, t1)`` with shape ``(n_omega, n_t1)``."""
        Q = response_trajectories(self.pulse, self.params, self.window, self.plan.t1_grid())
        return np.abs(_transform(self.window, Q, self.omega))

    @cached_property
    def signal_integral(self) -> np.ndarray:
        """``int_0^T_m S(omega, t1) dt1`` by the trapezoid rule."""
        return np.trapezoid(self.signal_matrix, self.plan.t1_grid(), axis=1)

    def noise(self, config_cooling: FeedbackConfig, sigma0: CovarianceState | None = None):
        tl = window_timeline(self.params, config_cooling, self.window, sigma0)
        return noise_from_timeline(tl, self.window, self.omega, self.params.shot_density)

    def snr(self, config_cooling: FeedbackConfig, T_cool: float | None = None,
            sigma0: CovarianceState | None = None) -> np.ndarray:
        T_cool = self.plan.T_cool if T_cool is None else T_cool
        return self.signal_integral / (self.plan.T_m + T_cool) / self.noise(config_cooling, sigma0)


def averaged_snr(pulse: PulseForce, params: PhysicalParams, config_cooling: FeedbackConfig,
                 plan: MeasurementPlan, omega):
    """Cycle-averaged SNR: ``(1/(T_m+T_cool)) int_0^T_m dt1 S(omega, t1) / N(omega)``."""
    out = CycleEvaluator(params, plan, pulse, omega).snr(config_cooling)
    return out if np.ndim(omega) else float(out[0])


@dataclass(frozen=True)
class CycleResult:
    omega: np.ndarray
    snr_quantum: np.ndarray
    snr_classical: np.ndarray
    snr_nofeedback: np.ndarray
    noise_quantum: np.ndarray
    noise_classical: np.ndarray
    noise_nofeedback: np.ndarray
    sigma0_quantum: CovarianceState
    sigma0_classical: CovarianceState

    @property
    def improvement(self) -> np.ndarray:
        return self.snr_quantum / self.snr_nofeedback

    @property
    def classical_error(self) -> np.ndarray:
        """``(SNR_classical - SNR_quantum) / SNR_quantum``."""
        return self.snr_classical / self.snr_quantum - 1.0

    def rows(self):
        for i, w in enumerate(self.omega):
            yield (float(w), float(self.snr_quantum[i]), float(self.snr_classical[i]),
                   float(self.snr_nofeedback[i]))


def check_cooling_time(params: PhysicalParams, config: FeedbackConfig, plan: MeasurementPlan) -> None:
    if config.scheme is Scheme.OFF:
        return
    needed = 5.0 / (params.gamma_m + config.gain)
    if plan.T_cool < needed:
        warnings.warn(
            f"T_cool={plan.T_cool:.3g} s is shorter than 5/(gamma_m+g)={needed:.3g} s; "
            "the window is still assumed to start from the cooled steady state",
            CoolingTimeWarning, stacklevel=3,
        )


def run_cycle(params: PhysicalParams, config_cooling: FeedbackConfig, plan: MeasurementPlan,
              pulse: PulseForce, omega=None) -> CycleResult:
    """Quantum, classical and never-cooled averaged SNR spectra.

    The never-cooled baseline starts from the hot equilibrium state and has
    no cooling interval, so its duty-cycle factor is 1.
    """
    if omega is None:
        omega = plan.omega_grid if plan.omega_grid is not None else [params.omega_m]
    check_cooling_time(params, config_cooling, plan)
    ev = CycleEvaluator(params, plan, pulse, omega)
    q_cfg = config_cooling.replace(noise_model=NoiseModel.QUANTUM)
    c_cfg = config_cooling.replace(noise_model=NoiseModel.CLASSICAL)
    base = FeedbackConfig()
    s0q, s0c = cooled_state(params, q_cfg), cooled_state(params, c_cfg)
    nq, nc, nb = ev.noise(q_cfg, s0q), ev.noise(c_cfg, s0c), ev.noise(base)
    sig = ev.signal_integral
    duty = plan.T_m + plan.T_cool
    return CycleResult(
        omega=ev.omega,
        snr_quantum=sig / duty / nq,
        snr_classical=sig / duty / nc,
        snr_nofeedback=sig / plan.T_m / nb,
        noise_quantum=nq,
        noise_classical=nc,
        noise_nofeedback=nb,
        sigma0_quantum=s0q,
        sigma0_classical=s0c,
    )
