"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .dynamics import build_state_space, covariance_timeline
from .errors import ConfigurationError, DomainError, OptoSNRError
from .measurement import cooled_state, run_cycle
from .model import FeedbackConfig, NoiseModel
from .optimize import SWEEP_COLUMNS, SweepSpec, optimize_gain, sweep
from .response import chi, mean_response
from .scenario import PRESETS, Scenario, build_scenario, format_csv, parse_config, preset
from .spectra import default_omega_grid, noise_budget, stationary_snr

COMMANDS = ("susceptibility", "stationary-snr", "averaged-snr", "optimize-gain", "sweep",
            "preset-list", "mean-response", "covariance-timeline")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="optosnr", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key-value scenario file")
    p.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--omega-min", type=float, help="rad/s")
    p.add_argument("--omega-max", type=float, help="rad/s")
    p.add_argument("--omega-points", type=int)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("--variable", choices=("gain", "temperature", "T_m", "sigma"),
                   help="sweep variable")
    p.add_argument("--values", help="comma-separated sweep values in SI / rad/s")
    p.add_argument("--gain-min", type=float, help="optimize-gain bracket, rad/s")
    p.add_argument("--gain-max", type=float, help="optimize-gain bracket, rad/s")
    p.add_argument("--noise-model", choices=("quantum", "classical"), default="quantum",
                   help="noise model for optimize-gain")
    return p


def _scenario(args) -> Scenario:
    if args.preset and args.preset not in PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}; valid presets: {', '.join(PRESETS)}")
    if args.config:
        values = parse_config(Path(args.config).read_text())
        if args.preset and "preset" not in values:
            return build_scenario(values, preset(args.preset))
        return build_scenario(values)
    return preset(args.preset or "fig1-4K")


def _omega(args, sc: Scenario, wings: bool) -> np.ndarray:
    wm = sc.params.omega_m
    if args.omega_min is None and args.omega_max is None and args.omega_points is None:
        if sc.plan.omega_grid is not None:
            return np.asarray(sc.plan.omega_grid)
        return default_omega_grid(wm, wings=wings)
    lo = args.omega_min if args.omega_min is not None else 0.9 * wm
    hi = args.omega_max if args.omega_max is not None else 1.1 * wm
    n = args.omega_points if args.omega_points is not None else 2001
    if not (0 < lo <= hi) or n < 1:
        raise ConfigurationError("omega grid requires 0 < omega-min <= omega-max and points >= 1")
    return np.linspace(lo, hi, n)


def _run(args, out) -> None:
    if args.command == "preset-list":
        out.write("\n".join(PRESETS) + "\n")
        return
    sc = _scenario(args)
    meta = sc.resolved()
    meta["command"] = args.command
    p, cfg, pulse, plan = sc.params, sc.config, sc.pulse, sc.plan

    if args.command == "susceptibility":
        w = _omega(args, sc, wings=True)
        x = chi(p, cfg, w)
        text = format_csv(("omega", "chi_re", "chi_im", "chi_abs"),
                          zip(w, x.real, x.imag, np.abs(x)), meta)
    elif args.command == "stationary-snr":
        w = _omega(args, sc, wings=True)
        q = cfg.replace(noise_model=NoiseModel.QUANTUM)
        c = cfg.replace(noise_model=NoiseModel.CLASSICAL)
        b = noise_budget(p, q, w)
        text = format_csv(
            ("omega", "snr_quantum", "snr_classical", "thermal", "backaction", "shot_floor",
             "feedback_noise"),
            zip(w, stationary_snr(p, q, pulse, w, plan.T_m), stationary_snr(p, c, pulse, w, plan.T_m),
                b.thermal, b.backaction, b.shot_floor, b.feedback_noise), meta)
    elif args.command == "averaged-snr":
        w = _omega(args, sc, wings=False)
        r = run_cycle(p, cfg, plan, pulse, w)
        text = format_csv(("omega", "snr_quantum", "snr_classical", "snr_nofeedback"), r.rows(), meta)
    elif args.command == "optimize-gain":
        lo = args.gain_min if args.gain_min is not None else 10 * p.gamma_m
        hi = args.gain_max if args.gain_max is not None else 3000 * p.gamma_m
        scheme = cfg.scheme if cfg.scheme.value != "off" else "cold-damping"
        res = optimize_gain(p, plan, pulse, bracket=(lo, hi), scheme=scheme,
                            noise_model=NoiseModel(args.noise_model))
        meta["optimize.noise_model"] = args.noise_model
        meta["optimize.bracket"] = f"{lo!r},{hi!r}"
        text = format_csv(("gain", "gain_over_gamma_m", "snr", "at_edge", "unimodal"),
                          [(res.gain, res.gain / p.gamma_m, res.snr, float(res.at_edge),
                            float(res.unimodal))], meta)
    elif args.command == "sweep":
        if not args.variable or not args.values:
            raise UsageError("sweep requires --variable and --values")
        try:
            grid = tuple(float(v) for v in args.values.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --values: {exc}") from exc
        spec = SweepSpec(args.variable, grid, args.omega_min)
        meta["sweep.variable"] = args.variable
        meta["sweep.grid"] = args.values
        rows = sweep(spec, sc)
        text = format_csv(SWEEP_COLUMNS, ([r[k] for k in SWEEP_COLUMNS] for r in rows), meta)
    elif args.command == "mean-response":
        n = plan.required_points(p.omega_m, plan.points_per_period)
        t = np.linspace(0.0, plan.T_m, n)
        q = mean_response(pulse, p, FeedbackConfig(), t)
        text = format_csv(("t", "Q_mean"), zip(t, q), meta)
    elif args.command == "covariance-timeline":
        n = plan.required_points(p.omega_m, plan.points_per_period)
        t = np.linspace(0.0, plan.T_m, n)
        tl = covariance_timeline(cooled_state(p, cfg), build_state_space(p, cfg.switched_off()), t)
        text = format_csv(("t", "sqq", "spp", "sqp"), tl.to_rows(), meta)
    else:  # pragma: no cover
        raise UsageError(f"unknown command {args.command}")

    path = args.out or sc.output
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            _run(args, sys.stdout)
    except UsageError as exc:
        print(f"optosnr: usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, DomainError, ValueError, TypeError) as exc:
        print(f"optosnr: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (OptoSNRError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"optosnr: numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"optosnr: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
