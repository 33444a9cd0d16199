"""Physical parameters, unit conventions and the thermal bath.

All frequencies and rates are angular (rad/s).  Position ``Q`` and momentum
``P`` of the mirror are dimensionless with ``[Q, P] = i``, so the ground
state has ``<Q^2> = <P^2> = 1/2``.

The optomechanical coupling only ever enters through the effective rate
``kappa = G**2 * beta**2 / gamma_c``: the radiation-pressure back-action
force has spectral density ``4 * kappa`` and the homodyne shot floor,
referred to the mirror position, is ``1 / (64 * kappa * eta)``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DomainError

#: Reduced Planck constant, J s (CODATA 2018, exact).
HBAR = 1.054571817e-34
#: Boltzmann constant, J/K (CODATA 2018, exact).
K_B = 1.380649e-23

#: Default reservoir cutoff in units of the mechanical frequency.
DEFAULT_CUTOFF_FACTOR = 100.0


class Scheme(str, Enum):
    OFF = "off"
    STOCHASTIC_COOLING = "stochastic-cooling"
    COLD_DAMPING = "cold-damping"


class NoiseModel(str, Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class RawCavityParams:
    """Cavity and drive constants from which ``kappa`` can be derived.

    Parameters
    ----------
    mass : float
        Effective mirror mass (kg).
    length : float
        Cavity length (m).
    omega_c : float
        Cavity mode angular frequency (rad/s).
    omega_0 : float
        Driving laser angular frequency (rad/s).
    gamma_c : float
        Cavity decay rate (1/s).
    power : float
        Input laser power (W).
    """

    mass: float
    length: float
    omega_c: float
    omega_0: float
    gamma_c: float
    power: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v) or v <= 0:
                raise DomainError(f"RawCavityParams.{f.name} must be positive, got {v!r}")

    def coupling(self, omega_m: float) -> float:
        """Radiation-pressure coupling ``G = (omega_c/L) sqrt(hbar / 2 m omega_m)``."""
        return self.omega_c / self.length * np.sqrt(HBAR / (2.0 * self.mass * omega_m))

    @property
    def drive(self) -> float:
        """Drive amplitude ``E = sqrt(P gamma_c / hbar omega_0)`` (1/s)."""
        return np.sqrt(self.power * self.gamma_c / (HBAR * self.omega_0))

    @property
    def beta(self) -> float:
        """Mean intracavity amplitude at zero detuning, ``2 E / gamma_c``."""
        return 2.0 * self.drive / self.gamma_c


def derive_kappa(raw: RawCavityParams, omega_m: float) -> float:
    """Effective optomechanical rate ``G^2 beta^2 / gamma_c`` at zero detuning."""
    if not omega_m > 0:
        raise DomainError(f"omega_m must be positive, got {omega_m!r}")
    g = raw.coupling(omega_m)
    return g * g * raw.beta**2 / raw.gamma_c


def thermal_strength(omega, temperature):
    """Bose factor ``coth(hbar omega / 2 k_B T)``, equal to ``2 n + 1``.

    Returns exactly 1 at ``T = 0``.  Accepts scalars or arrays.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("thermal_strength requires omega > 0")
    if temperature < 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if K_B * temperature == 0:  # includes temperatures that underflow
        out = np.ones_like(omega)
    else:
        x = HBAR * omega / (2.0 * K_B * temperature)
        with np.errstate(over="ignore"):
            out = 1.0 / np.tanh(x)
    return out[()] if out.ndim == 0 else out


def omega_coth(omega, temperature):
    """``|omega| coth(hbar |omega| / 2 k_B T)`` with its finite limit at ``omega = 0``."""
    w = np.abs(np.asarray(omega, dtype=float))
    if K_B * temperature == 0:
        out = w.copy()
    else:
        scale = 2.0 * K_B * temperature / HBAR
        x = w / scale
        small = x < 1e-4
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.where(small, scale * (1.0 + x * x / 3.0), w / np.tanh(x))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class PhysicalParams:
    """Mirror, cavity and bath constants.

    ``kappa`` may be omitted when ``raw`` is given; when both are present
    they must agree to 1e-12 relative.  ``cutoff`` defaults to
    ``100 * omega_m``.  The model assumes a high-Q oscillator, so
    ``gamma_m >= omega_m / 10`` is rejected unless ``allow_strong_damping``.
    """

    omega_m: float
    gamma_m: float
    kappa: float | None = None
    eta: float = 1.0
    temperature: float = 0.0
    cutoff: float | None = None
    raw: RawCavityParams | None = None
    allow_strong_damping: bool = False

    def __post_init__(self):
        if self.kappa is None:
            if self.raw is None:
                raise ConfigurationError("either kappa or raw cavity parameters are required")
            object.__setattr__(self, "kappa", derive_kappa(self.raw, self.omega_m))
        elif self.raw is not None:
            derived = derive_kappa(self.raw, self.omega_m)
            if abs(derived - self.kappa) > 1e-12 * abs(derived):
                raise ConfigurationError(
                    f"kappa={self.kappa!r} disagrees with raw cavity parameters ({derived!r})"
                )
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", DEFAULT_CUTOFF_FACTOR * self.omega_m)
        self._validate()

    def _validate(self):
        checks = [
            (self.omega_m > 0, "omega_m > 0"),
            (self.gamma_m > 0, "gamma_m > 0"),
            (self.kappa > 0, "kappa > 0"),
            (0 < self.eta <= 1, "0 < eta <= 1"),
            (self.temperature >= 0, "temperature >= 0"),
            (self.cutoff > self.omega_m, "cutoff > omega_m"),
        ]
        for ok, what in checks:
            if not ok:
                raise ConfigurationError(f"invalid physical parameters: requires {what}")
        if not self.allow_strong_damping and self.gamma_m >= self.omega_m / 10:
            raise ConfigurationError(
                "gamma_m must be < omega_m/10 for the high-Q model "
                "(set allow_strong_damping=True to override)"
            )

    @property
    def coth_m(self) -> float:
        """Bose factor at the mechanical frequency."""
        return float(thermal_strength(self.omega_m, self.temperature))

    @property
    def mean_occupancy(self) -> float:
        return 0.5 * (self.coth_m - 1.0)

    @property
    def shot_density(self) -> float:
        """Homodyne shot floor referred to position, ``1/(64 kappa eta)``."""
        return 1.0 / (64.0 * self.kappa * self.eta)

    @property
    def backaction_density(self) -> float:
        return 4.0 * self.kappa

    def replace(self, **changes) -> "PhysicalParams":
        if "omega_m" in changes and "cutoff" not in changes:
            changes["cutoff"] = DEFAULT_CUTOFF_FACTOR * changes["omega_m"]
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class FeedbackConfig:
    """Feedback scheme, effective gain and noise treatment.

    ``gain`` is the damping-rate increase ``g1`` (stochastic cooling) or
    ``g2`` (cold damping), in rad/s.
    """

    scheme: Scheme = Scheme.OFF
    gain: float = 0.0
    noise_model: NoiseModel = NoiseModel.QUANTUM

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "noise_model", NoiseModel(self.noise_model))
        if not np.isfinite(self.gain) or self.gain < 0:
            raise ConfigurationError(f"feedback gain must be >= 0, got {self.gain!r}")
        if self.scheme is Scheme.OFF and self.gain != 0:
            raise ConfigurationError("scheme 'off' requires gain = 0")

    @property
    def classical(self) -> bool:
        return self.noise_model is NoiseModel.CLASSICAL

    def replace(self, **changes) -> "FeedbackConfig":
        return dataclasses.replace(self, **changes)

    def switched_off(self) -> "FeedbackConfig":
        """Same noise treatment with the feedback loop open."""
        return FeedbackConfig(Scheme.OFF, 0.0, self.noise_model)
