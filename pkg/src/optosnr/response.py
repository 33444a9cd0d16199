"""Mechanical susceptibilities, the Gaussian force pulse and the mean response.

Fourier convention used throughout the package::

    x~(omega) = integral dt exp(-i omega t) x(t)

so that ``d/dt -> i omega`` and ``Q~ = chi(omega) f~(omega)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import FeedbackConfig, PhysicalParams, Scheme

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def chi(params: PhysicalParams, config: FeedbackConfig, omega):
    """Susceptibility of the mirror position to the force ``f``.

    Cold damping only raises the damping rate, ``gamma_m -> gamma_m + g2``.
    Stochastic cooling also shifts the squared frequency by ``g1 * gamma_m``.
    """
    w = np.asarray(omega, dtype=float)
    wm, gm, g = params.omega_m, params.gamma_m, config.gain
    if config.scheme is Scheme.STOCHASTIC_COOLING:
        out = wm / (wm * wm + g * gm - w * w + 1j * w * (gm + g))
    else:
        out = wm / (wm * wm - w * w + 1j * w * (gm + g))
    return out[()] if out.ndim == 0 else out


def drift_matrix(params: PhysicalParams, config: FeedbackConfig) -> np.ndarray:
    """Deterministic drift of ``(Q, P)`` including the feedback loop.

    For stochastic cooling the loop adds ``-g1 * Q`` to ``dQ/dt``; the
    transfer function of the resulting system is exactly ``chi_sc``.
    """
    wm, gm, g = params.omega_m, params.gamma_m, config.gain
    if config.scheme is Scheme.STOCHASTIC_COOLING:
        return np.array([[-g, wm], [-wm, -gm]])
    if config.scheme is Scheme.COLD_DAMPING:
        return np.array([[0.0, wm], [-wm, -(gm + g)]])
    return np.array([[0.0, wm], [-wm, -gm]])


@dataclass(frozen=True)
class PulseForce:
    """Gaussian-envelope force ``f0 exp(-(t-t1)^2 / 2 sigma^2) cos(omega_f t)``.

    ``f0`` is in units of 1/s (momentum is dimensionless).
    """

    f0: float
    t1: float
    sigma: float
    omega_f: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError(f"pulse sigma must be > 0, got {self.sigma!r}")
        if self.omega_f < 0:
            raise ConfigurationError(f"pulse omega_f must be >= 0, got {self.omega_f!r}")

    def at(self, t1: float) -> "PulseForce":
        return PulseForce(self.f0, t1, self.sigma, self.omega_f)

    def scaled(self, factor: float) -> "PulseForce":
        return PulseForce(self.f0 * factor, self.t1, self.sigma, self.omega_f)


def force_time(pulse: PulseForce, t):
    t = np.asarray(t, dtype=float)
    out = pulse.f0 * np.exp(-((t - pulse.t1) ** 2) / (2 * pulse.sigma**2)) * np.cos(pulse.omega_f * t)
    return out[()] if out.ndim == 0 else out


def force_spectrum(pulse: PulseForce, omega):
    """Closed-form Fourier transform of the pulse.

    Each carrier sideband is a shifted Gaussian carrying the arrival phase
    ``exp(-i (omega -+ omega_f) t1)``.
    """
    w = np.asarray(omega, dtype=float)
    s, t1, wf = pulse.sigma, pulse.t1, pulse.omega_f
    lo, hi = w - wf, w + wf
    out = 0.5 * pulse.f0 * s * _SQRT_2PI * (
        np.exp(-0.5 * (s * lo) ** 2 - 1j * lo * t1)
        + np.exp(-0.5 * (s * hi) ** 2 - 1j * hi * t1)
    )
    return out[()] if out.ndim == 0 else out


def rk4_linear(A, force, t_grid, substeps=1, y0=None):
    """Integrate ``dy/dt = A y + (0, force(t))`` with fixed-step RK4.

    ``force(t)`` may return a scalar or an array of shape ``(m,)``; in the
    latter case ``m`` independent trajectories are integrated together.
    Returns the states at ``t_grid`` with shape ``(len(t_grid), 2, m)``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    f0 = np.atleast_1d(np.asarray(force(t_grid[0])))
    y = np.zeros((2, f0.shape[0]), dtype=np.result_type(f0, A, float))
    if y0 is not None:
        y = y + np.asarray(y0).reshape(2, -1)
    out = np.empty((t_grid.size,) + y.shape, dtype=y.dtype)
    out[0] = y
    a00, a01, a10, a11 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]

    def rhs(t, q, p):
        return a00 * q + a01 * p, a10 * q + a11 * p + force(t)

    for k in range(t_grid.size - 1):
        h = (t_grid[k + 1] - t_grid[k]) / substeps
        t = t_grid[k]
        q, p = y[0], y[1]
        for _ in range(substeps):
            k1q, k1p = rhs(t, q, p)
            k2q, k2p = rhs(t + h / 2, q + h / 2 * k1q, p + h / 2 * k1p)
            k3q, k3p = rhs(t + h / 2, q + h / 2 * k2q, p + h / 2 * k2p)
            k4q, k4p = rhs(t + h, q + h * k3q, p + h * k3p)
            q = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
            p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
            t = t + h
        y = np.stack([q, p])
        out[k + 1] = y
    return out


def check_time_step(params: PhysicalParams, step: float, per_period: int = 40) -> None:
    limit = 2 * np.pi / params.omega_m / per_period
    if step > limit * (1 + 1e-12):
        raise ConfigurationError(
            f"time step {step:.3e} s exceeds T_osc/{per_period} = {limit:.3e} s"
        )


def mean_response(pulse: PulseForce, params: PhysicalParams, config: FeedbackConfig,
                  t_grid, substeps: int = 1) -> np.ndarray:
    """Noise-free position ``<Q(t)>`` driven by ``pulse``.

    Starts from ``<Q> = <P> = 0`` at ``t_grid[0]``.  The grid must be
    uniform with step at most a fortieth of the mechanical period; use
    ``substeps`` to refine the RK4 step when the pulse is very short.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2:
        raise ConfigurationError("t_grid needs at least two points")
    steps = np.diff(t_grid)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
        raise ConfigurationError("t_grid must be uniform and increasing")
    check_time_step(params, steps[0])
    A = drift_matrix(params, config)
    traj = rk4_linear(A, lambda t: force_time(pulse, t), t_grid, substeps)
    return traj[:, 0, 0]
