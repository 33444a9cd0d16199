"""Cooling the mirror and watching it heat up again once the loop opens.

Run with ``python3 demos/02_covariance_dynamics.py``.
"""
import numpy as np

from optosnr import (FeedbackConfig, PhysicalParams, build_state_space, covariance_timeline,
                     lyapunov_steady)

params = PhysicalParams(11.7e6, 270.0, 10.3, 0.99, 4.0)
hot = lyapunov_steady(build_state_space(params, FeedbackConfig()))
print(f"equilibrium <Q^2> with the loop open: {hot.sigma_qq:.1f}")

for g in (82.4e3, 200e3):
    for model in ("quantum", "classical"):
        cold = lyapunov_steady(build_state_space(params, FeedbackConfig("cold-damping", g, model)))
        print(f"g = {g:.3g} rad/s, {model:>9} noise: <Q^2> = {cold.sigma_qq:7.2f}"
              f"  (uncertainty product {cold.uncertainty_product:.1f})")

# Open the loop on the quantum cooled state and follow an 11 us window
cold = lyapunov_steady(build_state_space(params, FeedbackConfig("cold-damping", 82.4e3)))
t = np.linspace(0.0, 11e-6, 12)
tl = covariance_timeline(cold, build_state_space(params, FeedbackConfig()), t)
print("\n t [us]   <Q^2>")
for ti, s in zip(t, tl.sigma):
    print(f"{1e6 * ti:6.1f}  {s[0, 0]:7.2f}")
# Reheating takes ~1/gamma_m = 3.7 ms, so the window stays far colder than equilibrium
