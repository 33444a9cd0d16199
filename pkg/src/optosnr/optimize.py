"""Scalar optimization of the feedback gain and parameter sweeps."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DegenerateObjectiveError, OptoSNRError
from .measurement import CycleEvaluator, MeasurementPlan, run_cycle
from .model import FeedbackConfig, NoiseModel, PhysicalParams, Scheme
from .response import PulseForce

INVPHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, a: float, b: float, xtol: float, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[a, b]`` until the bracket is below ``xtol``.

    Returns ``(x_best, f_best, n_evaluations)``.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    while abs(b - a) > xtol and n < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        n += 1
    return (c, fc, n) if fc >= fd else (d, fd, n)


@dataclass(frozen=True)
class GainOptimum:
    gain: float
    snr: float
    evaluations: int
    unimodal: bool
    scan_gain: np.ndarray = field(repr=False)
    scan_snr: np.ndarray = field(repr=False)

    @property
    def at_edge(self) -> bool:
        """True when the optimum sits on the bracket boundary."""
        lo, hi = self.scan_gain[0], self.scan_gain[-1]
        tol = 1e-3 * max(hi, 1e-300)
        return self.gain - lo <= tol or hi - self.gain <= tol


def _is_unimodal(values: np.ndarray) -> bool:
    diffs = np.sign(np.diff(values))
    diffs = diffs[diffs != 0]
    return int(np.count_nonzero(np.diff(diffs) < 0)) <= 1 and int(np.count_nonzero(np.diff(diffs) > 0)) == 0


def optimize_gain(params: PhysicalParams, plan: MeasurementPlan, pulse: PulseForce,
                  omega_star: float | None = None, bracket=None,
                  scheme: Scheme = Scheme.COLD_DAMPING,
                  noise_model: NoiseModel = NoiseModel.QUANTUM,
                  n_prescan: int = 17, rtol: float = 1e-3) -> GainOptimum:
    """Feedback gain maximizing the cycle-averaged SNR at ``omega_star``.

    A ``n_prescan``-point scan (log-spaced when the bracket excludes zero)
    locates the best sample; golden-section search then refines within its
    neighbouring scan points.  The scan also reports whether the objective
    looked unimodal.
    """
    omega_star = params.omega_m if omega_star is None else omega_star
    if bracket is None:
        bracket = (10 * params.gamma_m, 3000 * params.gamma_m)
    lo, hi = map(float, bracket)
    if lo < 0 or hi < lo:
        raise ConfigurationError(f"invalid gain bracket {bracket!r}")
    ev = CycleEvaluator(params, plan, pulse, [omega_star])
    n_eval = 0

    def objective(g):
        nonlocal n_eval
        n_eval += 1
        cfg = FeedbackConfig(scheme, g, noise_model) if g > 0 else FeedbackConfig(noise_model=noise_model)
        return float(ev.snr(cfg)[0])

    use_log = lo > 0
    grid = np.geomspace(lo, hi, n_prescan) if use_log and hi > lo else np.linspace(lo, hi, n_prescan)
    vals = np.array([objective(g) for g in grid])
    spread = vals.max() - vals.min()
    if not spread > 1e-6 * abs(vals.max()):
        raise DegenerateObjectiveError(
            f"objective varies by less than 1e-6 relative over gain bracket [{lo}, {hi}]"
        )
    unimodal = _is_unimodal(vals)
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if use_log:
        x, fx, _ = golden_section_max(lambda u: objective(math.exp(u)), math.log(a), math.log(b),
                                      xtol=math.log1p(rtol))
        x = math.exp(x)
    else:
        x, fx, _ = golden_section_max(objective, a, b, xtol=rtol * max(abs(b), 1e-300))
    if vals[i] > fx:
        x, fx = float(grid[i]), float(vals[i])
    return GainOptimum(float(x), float(fx), n_eval, unimodal, grid, vals)


class SweepVariable(str, Enum):
    GAIN = "gain"
    TEMPERATURE = "temperature"
    T_M = "T_m"
    SIGMA = "sigma"


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    grid: tuple
    objective_omega: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigurationError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


SWEEP_COLUMNS = ("value", "omega", "snr_quantum", "snr_classical", "snr_nofeedback", "improvement")


def _apply(variable: SweepVariable, value: float, params, config, plan, pulse):
    if variable is SweepVariable.GAIN:
        config = config.replace(gain=value) if value > 0 else config.replace(scheme=Scheme.OFF, gain=0.0)
    elif variable is SweepVariable.TEMPERATURE:
        params = params.replace(temperature=value)
    elif variable is SweepVariable.T_M:
        plan = plan.replace(T_m=value)
    elif variable is SweepVariable.SIGMA:
        pulse = PulseForce(pulse.f0, pulse.t1, value, pulse.omega_f)
    return params, config, plan, pulse


def sweep(spec: SweepSpec, scenario, max_workers: int | None = None) -> list[dict]:
    """Evaluate :func:`run_cycle` at every grid value of one scenario variable.

    Rows come back in grid order whatever the worker scheduling.
    """
    omega = scenario.params.omega_m if spec.objective_omega is None else spec.objective_omega

    def one(idx_value):
        idx, value = idx_value
        try:
            p, c, pl, pu = _apply(spec.variable, value, scenario.params, scenario.config,
                                  scenario.plan, scenario.pulse)
            r = run_cycle(p, c, pl, pu, [omega])
        except OptoSNRError as exc:
            raise type(exc)(f"sweep point {idx} ({spec.variable.value}={value!r}): {exc}") from exc
        return dict(zip(SWEEP_COLUMNS, (value, float(omega), float(r.snr_quantum[0]),
                                        float(r.snr_classical[0]), float(r.snr_nofeedback[0]),
                                        float(r.improvement[0]))))

    items = list(enumerate(spec.grid))
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]
