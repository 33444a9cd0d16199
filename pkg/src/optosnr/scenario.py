"""Scenarios: presets, the key-value config format and CSV emission.

Config files are flat ``section.key = value [unit]`` lines; ``#`` starts a
comment.  Dimensional fields require an explicit unit::

    preset = fig1-4K              # optional, expanded first
    params.omega_m = 11.7e6 rad/s
    params.gamma_m = 270 rad/s
    params.kappa = 10.3 rad/s
    params.eta = 0.99
    params.temperature = 4 K
    params.cutoff = 1.17e9 rad/s
    feedback.scheme = cold-damping   # off | cold-damping | stochastic-cooling
    feedback.gain = 82.4e3 rad/s
    feedback.noise_model = quantum   # quantum | classical
    force.f0 = 1 1/s
    force.t1 = 5.5 us
    force.sigma = 3.7 us
    force.omega_f = 11.7e6 rad/s
    plan.T_m = 11 us
    plan.T_cool = 2 us
    plan.filter = rect               # rect | tukey
    plan.tukey_alpha = 0.1
    plan.n_t = 2000
    plan.n_t1 = 33
    output.path = out.csv

Rate units: ``rad/s`` or ``1/s`` as given; ``Hz``, ``kHz``, ``MHz``, ``GHz``
are cyclic and multiplied by ``2 pi``.  Time units: ``s``, ``ms``, ``us``,
``ns``.  Temperature: ``K``.
"""
from __future__ import annotations

import dataclasses
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .errors import ConfigurationError
from .measurement import MeasurementPlan
from .model import FeedbackConfig, NoiseModel, PhysicalParams, Scheme
from .response import PulseForce

RATE_UNITS = {
    "rad/s": 1.0, "1/s": 1.0,
    "hz": 2 * math.pi, "khz": 2e3 * math.pi, "mhz": 2e6 * math.pi, "ghz": 2e9 * math.pi,
}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}
TEMP_UNITS = {"k": 1.0}

# key -> (unit table or None for dimensionless/text, python type)
_FIELDS = {
    "params.omega_m": RATE_UNITS, "params.gamma_m": RATE_UNITS, "params.kappa": RATE_UNITS,
    "params.eta": None, "params.temperature": TEMP_UNITS, "params.cutoff": RATE_UNITS,
    "feedback.scheme": str, "feedback.gain": RATE_UNITS, "feedback.noise_model": str,
    "force.f0": RATE_UNITS, "force.t1": TIME_UNITS, "force.sigma": TIME_UNITS,
    "force.omega_f": RATE_UNITS,
    "plan.T_m": TIME_UNITS, "plan.T_cool": TIME_UNITS, "plan.filter": str,
    "plan.tukey_alpha": None, "plan.n_t": int, "plan.n_t1": int,
    "output.path": str,
}


@dataclass(frozen=True)
class Scenario:
    params: PhysicalParams
    config: FeedbackConfig
    pulse: PulseForce
    plan: MeasurementPlan
    output: str | None = None
    preset: str | None = None

    def resolved(self) -> dict:
        """Flat mapping of every resolved field in SI / rad/s units."""
        p, c, f, m = self.params, self.config, self.pulse, self.plan
        out = {
            "preset": self.preset or "",
            "params.omega_m": p.omega_m, "params.gamma_m": p.gamma_m, "params.kappa": p.kappa,
            "params.eta": p.eta, "params.temperature": p.temperature, "params.cutoff": p.cutoff,
            "feedback.scheme": c.scheme.value, "feedback.gain": c.gain,
            "feedback.noise_model": c.noise_model.value,
            "force.f0": f.f0, "force.t1": f.t1, "force.sigma": f.sigma, "force.omega_f": f.omega_f,
            "plan.T_m": m.T_m, "plan.T_cool": m.T_cool, "plan.filter": m.filter.value,
            "plan.tukey_alpha": m.tukey_alpha, "plan.n_t": m.n_t if m.n_t is not None else "auto",
            "plan.n_t1": m.n_t1,
        }
        return out


# Reference parameter set behind the fig1-* presets; frequencies are angular (rad/s).
FIG1 = dict(omega_m=11.7e6, gamma_m=270.0, kappa=10.3, eta=0.99, sigma=3.7e-6,
            T_m=11e-6, T_cool=2e-6, gain=82.4e3)

PRESETS = ("fig1-4K", "fig1-300K", "fig1-nofeedback", "fig1-classical")


def _fig1(temperature: float, scheme: Scheme, gain: float, noise_model: NoiseModel, name: str):
    params = PhysicalParams(FIG1["omega_m"], FIG1["gamma_m"], FIG1["kappa"], FIG1["eta"], temperature)
    plan = MeasurementPlan(FIG1["T_m"], FIG1["T_cool"])
    pulse = PulseForce(1.0, FIG1["T_m"] / 2, FIG1["sigma"], FIG1["omega_m"])
    return Scenario(params, FeedbackConfig(scheme, gain, noise_model), pulse, plan, preset=name)


@lru_cache(maxsize=None)
def _optimal_gain_300k() -> float:
    from .optimize import optimize_gain
    base = _fig1(300.0, Scheme.OFF, 0.0, NoiseModel.QUANTUM, "fig1-300K")
    bracket = (10 * FIG1["gamma_m"], 30000 * FIG1["gamma_m"])
    return optimize_gain(base.params, base.plan, base.pulse, bracket=bracket).gain


def preset(name: str) -> Scenario:
    if name == "fig1-4K":
        return _fig1(4.0, Scheme.COLD_DAMPING, FIG1["gain"], NoiseModel.QUANTUM, name)
    if name == "fig1-classical":
        return _fig1(4.0, Scheme.COLD_DAMPING, FIG1["gain"], NoiseModel.CLASSICAL, name)
    if name == "fig1-nofeedback":
        return _fig1(4.0, Scheme.OFF, 0.0, NoiseModel.QUANTUM, name)
    if name == "fig1-300K":
        return _fig1(300.0, Scheme.COLD_DAMPING, _optimal_gain_300k(), NoiseModel.QUANTUM, name)
    raise ConfigurationError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")


def parse_quantity(key: str, text: str):
    kind = _FIELDS.get(key)
    if key not in _FIELDS:
        raise ConfigurationError(f"unknown config key {key!r}")
    if kind is str:
        return text.strip()
    if kind is int:
        return int(text)
    parts = text.split()
    if kind is None:
        if len(parts) != 1:
            raise ConfigurationError(f"{key} is dimensionless; got {text!r}")
        return float(parts[0])
    if len(parts) != 2:
        raise ConfigurationError(f"{key} needs a value and a unit, got {text!r}")
    unit = parts[1] if parts[1] in kind else parts[1].lower()
    if unit not in kind:
        raise ConfigurationError(f"{key}: unit {parts[1]!r} not one of {sorted(kind)}")
    return float(parts[0]) * kind[unit]


def parse_config(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(io.StringIO(text), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val if key == "preset" else parse_quantity(key, val)
    return values


def build_scenario(values: dict, base: Scenario | None = None) -> Scenario:
    """Overlay parsed config values on a preset (or on ``base``) and validate."""
    name = values.get("preset")
    if name:
        base = preset(name)
    sect = {"params": {}, "feedback": {}, "force": {}, "plan": {}, "output": {}}
    for key, val in values.items():
        if key == "preset":
            continue
        s, k = key.split(".", 1)
        sect[s][k] = val
    if base is None:
        try:
            params = PhysicalParams(**sect["params"])
            pulse = PulseForce(**{"t1": sect["plan"].get("T_m", 0.0) / 2, **sect["force"]})
            plan = MeasurementPlan(**sect["plan"])
        except TypeError as exc:
            raise ConfigurationError(f"incomplete configuration: {exc}") from exc
        config = FeedbackConfig(**sect["feedback"])
        return Scenario(params, config, pulse, plan, sect["output"].get("path"))
    params = base.params.replace(**sect["params"]) if sect["params"] else base.params
    config = base.config.replace(**sect["feedback"]) if sect["feedback"] else base.config
    pulse = dataclasses.replace(base.pulse, **sect["force"]) if sect["force"] else base.pulse
    plan = base.plan.replace(**sect["plan"]) if sect["plan"] else base.plan
    return Scenario(params, config, pulse, plan, sect["output"].get("path", base.output), base.preset)


def load_scenario(path: str | Path) -> Scenario:
    return build_scenario(parse_config(Path(path).read_text()))


def format_csv(columns, rows, meta: dict | None = None) -> str:
    """CSV text with ``#``-prefixed metadata lines; floats use ``repr``."""
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k} = {v!r}\n" if isinstance(v, float) else f"# {k} = {v}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(repr(float(x)) if not isinstance(x, str) else x for x in row) + "\n")
    return buf.getvalue()
