"""Stationary noise budget, position-noise spectrum and stationary SNR.

Everything is referred to the force acting on the mirror momentum, in the
same prefactor-free units used by :mod:`optosnr.measurement`: the common
homodyne gain ``8 G beta eta / sqrt(gamma_c)`` cancels in the SNR.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FeedbackConfig, PhysicalParams, Scheme, omega_coth
from .response import PulseForce, chi, force_spectrum


@dataclass(frozen=True)
class NoiseBudget:
    """Force-equivalent noise densities at each frequency (arrays or floats)."""

    omega: np.ndarray
    thermal: np.ndarray
    backaction: np.ndarray
    shot_floor: np.ndarray
    feedback_noise: np.ndarray

    @property
    def total(self):
        return self.thermal + self.backaction + self.shot_floor + self.feedback_noise


def thermal_force_density(params: PhysicalParams, omega):
    """Symmetrized Brownian force density ``gamma_m |omega| coth(...) / omega_m``.

    Normalized so that the bare oscillator obeys ``<Q^2> = coth_m / 2``.
    """
    return params.gamma_m * omega_coth(omega, params.temperature) / params.omega_m


def feedback_force_density(params: PhysicalParams, config: FeedbackConfig, omega):
    w = np.asarray(omega, dtype=float)
    if config.classical or config.scheme is Scheme.OFF:
        return np.zeros_like(w)[()]
    g = config.gain
    if config.scheme is Scheme.COLD_DAMPING:
        shape = w * w
    else:
        # position noise of stochastic cooling, mapped through (i omega + gamma_m)/omega_m
        shape = w * w + params.gamma_m**2
    return g * g * shape / params.omega_m**2 * params.shot_density


def noise_budget(params: PhysicalParams, config: FeedbackConfig, omega) -> NoiseBudget:
    w = np.asarray(omega, dtype=float)
    ones = np.ones_like(w)
    ba = 0.0 if config.classical else params.backaction_density
    return NoiseBudget(
        omega=w,
        thermal=thermal_force_density(params, w) * ones,
        backaction=ba * ones,
        shot_floor=params.shot_density / np.abs(chi(params, config, w)) ** 2,
        feedback_noise=feedback_force_density(params, config, w) * ones,
    )


def position_noise_spectrum(params: PhysicalParams, config: FeedbackConfig, omega):
    """Stationary symmetrized position spectrum ``N_Q(omega)``.

    ``N_Q = |chi|^2 (S_thermal + S_backaction + S_feedback)``, so that
    ``(1/2 pi) int N_Q d omega`` is the stationary ``<Q^2>``.
    """
    b = noise_budget(params, config, omega)
    return np.abs(chi(params, config, omega)) ** 2 * (b.thermal + b.backaction + b.feedback_noise)


def stationary_noise(params: PhysicalParams, config: FeedbackConfig, omega, T_m: float):
    """Long-window noise amplitude ``sqrt([N_Q + shot] T_m)`` in position units."""
    nq = position_noise_spectrum(params, config, omega)
    return np.sqrt((nq + params.shot_density) * T_m)


def stationary_snr(params: PhysicalParams, config: FeedbackConfig, pulse: PulseForce,
                   omega, T_m: float):
    """Stationary SNR ``|f~| / sqrt(T_m * total force-equivalent noise)``."""
    if T_m <= 0:
        raise ValueError("T_m must be positive")
    b = noise_budget(params, config, omega)
    return np.abs(force_spectrum(pulse, omega)) / np.sqrt(T_m * b.total)


def default_omega_grid(omega_m: float, points: int = 2001, wings: bool = True,
                       wing_points: int = 40) -> np.ndarray:
    """Resonance band ``[0.9, 1.1] omega_m`` plus optional log-spaced far wings."""
    core = np.linspace(0.9 * omega_m, 1.1 * omega_m, points)
    if not wings:
        return core
    lo = np.geomspace(0.1 * omega_m, 0.9 * omega_m, wing_points + 1)[:-1]
    hi = np.geomspace(1.1 * omega_m, 10 * omega_m, wing_points + 1)[1:]
    return np.concatenate([lo, core, hi])
