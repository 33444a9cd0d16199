"""Choosing the feedback gain and scanning the temperature.

Run with ``python3 demos/04_gain_optimization.py``.
"""
import warnings

from optosnr.errors import CoolingTimeWarning
from optosnr.optimize import SweepSpec, optimize_gain, sweep
from optosnr.scenario import preset

warnings.simplefilter("ignore", CoolingTimeWarning)
sc = preset("fig1-4K")
gm = sc.params.gamma_m

# Too little gain leaves the mirror hot; too much feeds shot noise back in
for model in ("quantum", "classical"):
    opt = optimize_gain(sc.params, sc.plan, sc.pulse, noise_model=model)
    print(f"{model:>9}: g_opt = {opt.gain / gm:6.0f} gamma_m after {opt.evaluations} evaluations"
          f"{'  (bracket edge)' if opt.at_edge else ''}")
# The classical model never sees the loop's own noise, so it keeps asking for more gain

print("\n  T [K]   improvement   classical error")
for row in sweep(SweepSpec("temperature", (0.5, 4.0, 30.0, 300.0)), sc, max_workers=4):
    err = row["snr_classical"] / row["snr_quantum"] - 1
    print(f"{row['value']:7.1f}   {row['improvement']:11.2f}   {100 * err:+14.2f}%")
