"""Response and stationary noise of a feedback-cooled mirror.

Run with ``python3 demos/01_susceptibility_and_noise.py``.
"""
import numpy as np

from optosnr import FeedbackConfig, PhysicalParams, PulseForce, chi, noise_budget, stationary_snr

# A 1.86 MHz mirror at 4 K, written in rad/s
params = PhysicalParams(omega_m=11.7e6, gamma_m=270.0, kappa=10.3, eta=0.99, temperature=4.0)
print(f"thermal occupancy at omega_m: {params.mean_occupancy:.3g}")

# Both loops broaden the resonance; at omega_m the response drops by (gamma_m+g)/gamma_m
configs = {
    "off": FeedbackConfig(),
    "cold damping": FeedbackConfig("cold-damping", 82.4e3),
    "stochastic cooling": FeedbackConfig("stochastic-cooling", 82.4e3),
}
w = params.omega_m * np.array([0.999, 1.0, 1.001])
for name, cfg in configs.items():
    print(f"{name:>18}: |chi| at 0.999, 1, 1.001 omega_m =", np.abs(chi(params, cfg, w)))

# Force-equivalent noise at resonance, split by origin
b = noise_budget(params, configs["cold damping"], params.omega_m)
print("\ncold-damping budget at omega_m (force units):")
for field in ("thermal", "backaction", "shot_floor", "feedback_noise"):
    print(f"  {field:>15}: {float(getattr(b, field)):.4g}")

# In steady state the loop rescales signal and noise alike, so the SNR can only lose
pulse = PulseForce(f0=1.0, t1=5.5e-6, sigma=3.7e-6, omega_f=params.omega_m)
grid = np.linspace(0.99, 1.01, 5) * params.omega_m
ref = stationary_snr(params, configs["off"], pulse, grid, 11e-6)
for g in (0.0, 1e3, 1e4, 1e5):
    s = stationary_snr(params, FeedbackConfig("cold-damping", g) if g else configs["off"], pulse, grid, 11e-6)
    print(f"g = {g:8.0f} rad/s   stationary SNR / open loop = {np.round(s / ref, 4)}")
