import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from optosnr import FeedbackConfig, PhysicalParams, PulseForce, chi, force_spectrum, force_time, mean_response
from optosnr.errors import ConfigurationError
from optosnr.response import drift_matrix

WM, GM = 11.7e6, 270.0
P = PhysicalParams(WM, GM, 10.3, 0.99, 4.0)
SCHEMES = ["off", "cold-damping", "stochastic-cooling"]


def cfg(scheme, g):
    return FeedbackConfig(scheme, 0.0 if scheme == "off" else g)


def test_chi_cold_damping_points():
    c = FeedbackConfig("cold-damping", 82.4e3)
    assert chi(P, c, 0.0) == pytest.approx(1 / WM, rel=1e-15)
    r = chi(P, c, WM)
    assert abs(r) == pytest.approx(1 / (GM + 82.4e3), rel=1e-12)
    assert np.angle(r) == pytest.approx(-np.pi / 2, abs=1e-12)


def test_chi_stochastic_cooling_static():
    g = 5e3
    c = FeedbackConfig("stochastic-cooling", g)
    assert chi(P, c, 0.0) == pytest.approx(WM / (WM**2 + g * GM), rel=1e-15)


def test_chi_off_is_bare_lorentzian():
    w = np.linspace(0, 3 * WM, 101)
    bare = WM / (WM**2 - w**2 + 1j * w * GM)
    for scheme in ("cold-damping", "stochastic-cooling"):
        np.testing.assert_allclose(chi(P, FeedbackConfig(scheme, 0.0), w), bare, rtol=1e-15)
    np.testing.assert_allclose(chi(P, FeedbackConfig(), w), bare, rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SCHEMES), st.floats(0, 1e6), st.floats(1e3, 1e9))
def test_chi_properties(scheme, g, w):
    c = cfg(scheme, g)
    assert chi(P, c, -w) == pytest.approx(np.conj(chi(P, c, w)), rel=1e-12)
    inv = 1 / chi(P, c, w)
    assert inv.imag * WM / w == pytest.approx(GM + c.gain, rel=1e-9)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_chi_high_frequency_falloff(scheme):
    c = cfg(scheme, 1e5)
    w = 1e4 * WM
    assert abs(chi(P, c, w)) == pytest.approx(WM / w**2, rel=1e-6)


def test_stochastic_cooling_frequency_shift():
    g = 2e4
    inv0 = 1 / chi(P, FeedbackConfig("stochastic-cooling", g), 0.0)
    assert inv0.real == pytest.approx((WM**2 + g * GM) / WM, rel=1e-15)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_drift_transfer_function_is_chi(scheme):
    c = cfg(scheme, 3e4)
    A = drift_matrix(P, c)
    for w in [0.0, 0.5 * WM, WM, 2 * WM]:
        H = np.linalg.solve(1j * w * np.eye(2) - A, np.array([0.0, 1.0]))
        assert H[0] == pytest.approx(chi(P, c, w), rel=1e-10)


def test_force_time_examples():
    pulse = PulseForce(2.5, 2 * np.pi * 3 / WM, 1e-6, WM)
    assert force_time(pulse, pulse.t1) == pytest.approx(2.5, rel=1e-12)
    far = force_time(pulse, pulse.t1 + 10 * pulse.sigma)
    assert abs(far) <= 2.5 * np.exp(-50)
    zero = PulseForce(0.0, 1.0, 1.0, 3.0)
    assert np.all(force_time(zero, np.linspace(-5, 5, 11)) == 0)


def quad_spectrum(pulse, w):
    """Adaptive quadrature of int exp(-i w t) f(t) dt, split into carrier sidebands."""
    s, t1 = pulse.sigma, pulse.t1
    env = lambda u: np.exp(-u * u / (2 * s * s))  # noqa: E731
    a, b = -14 * s, 14 * s
    total = 0j
    for nu in (w - pulse.omega_f, w + pulse.omega_f):
        # int env(u) exp(-i nu (u + t1)) du / 2
        c = quad(env, a, b, weight="cos", wvar=nu, epsabs=0, epsrel=1e-11, limit=400)[0]
        total += 0.5 * pulse.f0 * np.exp(-1j * nu * t1) * c
    return total


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_force_spectrum_quadrature_resonant():
    pulse = PulseForce(1.0, 0.0, 3.7e-6, WM)
    val = force_spectrum(pulse, WM)
    assert val == pytest.approx(pulse.sigma * np.sqrt(2 * np.pi) / 2, rel=1e-12)
    assert val == pytest.approx(quad_spectrum(pulse, WM), rel=1e-9)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_force_spectrum_direct_quadrature():
    # brute-force complex integral without the sideband split
    pulse = PulseForce(1.3, 0.7, 0.4, 5.0)
    for w in [-6.0, 0.0, 4.1, 5.0, 7.5]:
        re = quad(lambda t: force_time(pulse, t) * np.cos(w * t), -8, 10, limit=500, epsabs=1e-15, epsrel=1e-11)[0]
        im = quad(lambda t: -force_time(pulse, t) * np.sin(w * t), -8, 10, limit=500, epsabs=1e-15, epsrel=1e-11)[0]
        assert force_spectrum(pulse, w) == pytest.approx(re + 1j * im, rel=1e-9, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 10), st.floats(0, 20), st.floats(-5, 5), st.floats(0, 30))
def test_force_spectrum_hermitian(sigma, wf, t1, w):
    pulse = PulseForce(1.0, t1, sigma, wf)
    assert force_spectrum(pulse, -w) == pytest.approx(np.conj(force_spectrum(pulse, w)), rel=1e-12, abs=1e-300)


def test_force_spectrum_tails():
    pulse = PulseForce(1.0, 0.3, 2.0, 4.0)
    for w in (4.0 + 10 / 2.0, 4.0 + 12 / 2.0):
        assert abs(force_spectrum(pulse, w)) < pulse.sigma * np.exp(-50 + 1e-9) * np.sqrt(2 * np.pi)


def test_mean_response_zero_force(toy_params):
    t = np.linspace(0, 50, 2001)
    q = mean_response(PulseForce(0.0, 10, 1, 1), toy_params, FeedbackConfig(), t)
    assert np.all(q == 0)


def test_mean_response_impulse_green_function(toy_params):
    p = toy_params
    sigma = 1e-3 / p.omega_m
    A = 1.0
    f0 = A / (sigma * np.sqrt(2 * np.pi))
    t1 = 1.0
    pulse = PulseForce(f0, t1, sigma, 0.0)
    t = np.linspace(0, t1 + 6 * np.pi, 1201)
    q = mean_response(pulse, p, FeedbackConfig(), t, substeps=200)
    wd = np.sqrt(p.omega_m**2 - p.gamma_m**2 / 4)
    tau = np.clip(t - t1, 0, None)
    green = A * p.omega_m / wd * np.exp(-p.gamma_m * tau / 2) * np.sin(wd * tau)
    after = t > t1 + 10 * sigma
    assert np.max(np.abs(q[after] - green[after])) < 0.01 * np.max(np.abs(green))


def test_mean_response_harmonic_amplitude(toy_params):
    p = toy_params
    for wf in (0.8, 1.0, 1.15):
        pulse = PulseForce(1.0, 0.0, 1e9, wf)  # flat envelope: pure cosine drive
        t = np.arange(0, 1400, 2 * np.pi / 80)
        q = mean_response(pulse, p, FeedbackConfig(), t)
        tail = q[t > 1400 - 4 * 2 * np.pi / wf]
        amp = 0.5 * (tail.max() - tail.min())
        assert amp == pytest.approx(abs(chi(p, FeedbackConfig(), wf)), rel=5e-3)


@pytest.mark.parametrize("scheme,g", [("off", 0.0), ("cold-damping", 0.05), ("stochastic-cooling", 0.05)])
def test_mean_response_fourier_matches_chi_times_force(toy_params, scheme, g):
    p = toy_params
    c = FeedbackConfig(scheme, g)
    pulse = PulseForce(1.0, 0.0, 4.0, 1.0)
    t = np.arange(-40, 1200, 2 * np.pi / 60)
    q = mean_response(pulse, p, c, t, substeps=2)
    for w in (0.9, 0.97, 1.0, 1.04):
        num = np.trapezoid(q * np.exp(-1j * w * t), t)
        ref = chi(p, c, w) * force_spectrum(pulse, w)
        assert num == pytest.approx(ref, rel=2e-3)


def test_mean_response_step_too_coarse(toy_params):
    t = np.linspace(0, 100, 100)
    with pytest.raises(ConfigurationError):
        mean_response(PulseForce(1, 0, 1, 1), toy_params, FeedbackConfig(), t)


def test_mean_response_nonuniform_grid(toy_params):
    t = np.concatenate([np.linspace(0, 1, 50), [1.05]])
    with pytest.raises(ConfigurationError):
        mean_response(PulseForce(1, 0, 1, 1), toy_params, FeedbackConfig(), t)
