import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from optosnr import (CovarianceState, FeedbackConfig, PhysicalParams, StateSpace, build_state_space,
                     covariance_timeline, lyapunov_steady, propagate_covariance, two_time_qq)
from optosnr.dynamics import expm2, markov_position_spectrum
from optosnr.errors import DomainError, StabilityError

WM, GM = 11.7e6, 270.0


def fig1(T=4.0, kappa=10.3):
    return PhysicalParams(WM, GM, kappa, 0.99, T)


def relax(ss, S0=None, t_end=None):
    """Brute-force integration of dS/dt = A S + S A^T + D to convergence."""
    S0 = np.zeros((2, 2)) if S0 is None else S0
    t_end = t_end or 40.0 / ss.slowest_rate

    def f(_t, y):
        S = y.reshape(2, 2)
        return (ss.A @ S + S @ ss.A.T + ss.D).ravel()

    scale = ss.D.max() / ss.slowest_rate
    sol = solve_ivp(f, (0, t_end), S0.ravel(), method="DOP853", rtol=1e-12, atol=1e-12 * scale)
    S = sol.y[:, -1].reshape(2, 2)
    return S, np.abs(f(0, S.ravel())).max()


def test_ground_state():
    p = PhysicalParams(WM, GM, 1e-12, 1.0, 0.0)
    S = lyapunov_steady(build_state_space(p, FeedbackConfig())).matrix
    np.testing.assert_allclose(S, 0.5 * np.eye(2), atol=1e-10)
    assert CovarianceState.from_matrix(S).satisfies_uncertainty()


@pytest.mark.parametrize("T", [0.0, 0.01, 4.0, 300.0])
def test_thermal_steady_state(T):
    p = fig1(T)
    S = lyapunov_steady(build_state_space(p, FeedbackConfig(noise_model="classical")))
    assert S.sigma_qq == pytest.approx(p.coth_m / 2, rel=1e-10)
    assert S.sigma_pp == pytest.approx(p.coth_m / 2, rel=1e-10)
    assert abs(S.sigma_qp) < 1e-10 * S.sigma_qq
    q = lyapunov_steady(build_state_space(p, FeedbackConfig()))
    assert q.sigma_qq == pytest.approx((GM * p.coth_m + 4 * p.kappa) / (2 * GM), rel=1e-10)


def test_cold_damping_cooled_state_against_relaxation():
    p = fig1()
    ss = build_state_space(p, FeedbackConfig("cold-damping", 305 * GM))
    S = lyapunov_steady(ss).matrix
    S_ode, resid = relax(ss)
    np.testing.assert_allclose(S, S_ode, rtol=1e-8, atol=1e-8 * S[0, 0])
    hot = lyapunov_steady(build_state_space(p, FeedbackConfig())).sigma_qq
    # well below the bare value but above the purely damping-limited one
    assert hot / S[0, 0] < (GM + 305 * GM) / GM
    assert S[0, 0] == pytest.approx(ss.D[1, 1] / (2 * (GM + 305 * GM)), rel=1e-12)


def test_stochastic_cooling_diffusion_and_state():
    p = fig1()
    g = 200 * GM
    ss = build_state_space(p, FeedbackConfig("stochastic-cooling", g))
    assert ss.D[0, 0] == pytest.approx(g**2 * p.shot_density)
    assert ss.D[1, 1] == pytest.approx(GM * p.coth_m + 4 * p.kappa)
    S_ode, _ = relax(ss)
    np.testing.assert_allclose(lyapunov_steady(ss).matrix, S_ode, rtol=1e-8, atol=1e-8 * S_ode[0, 0])


def test_classical_drops_quantum_diffusion():
    p = fig1()
    for scheme in ("cold-damping", "stochastic-cooling"):
        ss = build_state_space(p, FeedbackConfig(scheme, 1e5, "classical"))
        assert ss.D[0, 0] == 0 and ss.D[1, 1] == pytest.approx(GM * p.coth_m)


def test_lyapunov_trivial_cases():
    A = -3.0 * np.eye(2)
    assert np.all(lyapunov_steady(StateSpace(A, np.zeros((2, 2)))).matrix == 0)
    S = lyapunov_steady(StateSpace(A, 2.0 * np.eye(2))).matrix
    np.testing.assert_allclose(S, (2.0 / 6.0) * np.eye(2), rtol=1e-14)


def test_lyapunov_rejects_unstable():
    with pytest.raises(StabilityError):
        lyapunov_steady(StateSpace([[0, 1], [-1, 0]], np.eye(2)))
    with pytest.raises(StabilityError):
        lyapunov_steady(StateSpace([[0.6, 1], [-1, -0.5]], np.eye(2)))


def test_state_space_validation():
    with pytest.raises(DomainError):
        StateSpace(np.eye(2), [[1, 0], [0, -1]])
    with pytest.raises(DomainError):
        StateSpace(np.eye(2), [[1, 1], [0, 1]])


@pytest.mark.parametrize("A", [
    [[0.0, 11.7], [-11.7, -0.3]],      # underdamped
    [[-5.0, 1.0], [0.5, -7.0]],        # overdamped, real eigenvalues
    [[-2.0, 1.0], [0.0, -2.0]],        # defective (critical)
    [[0.0, 1.0], [-1.0, 0.0]],         # undamped
    [[0.3, 2.0], [-1.0, 0.1]],         # unstable
])
def test_expm2_against_scipy(A):
    A = np.array(A)
    t = np.array([0.0, 1e-9, 0.3, 2.0, 7.5])
    got = expm2(A, t)
    for k, tk in enumerate(t):
        np.testing.assert_allclose(got[k], expm(A * tk), rtol=1e-11, atol=1e-13)


def test_propagate_zero_time_is_identity():
    s0 = CovarianceState(3.0, 2.0, 0.5)
    ss = build_state_space(fig1(), FeedbackConfig())
    assert propagate_covariance(s0, ss, 0.0).matrix.tolist() == s0.matrix.tolist()
    with pytest.raises(DomainError):
        propagate_covariance(s0, ss, -1.0)


def test_propagate_relaxes_to_steady_state():
    p = PhysicalParams(1.0, 0.05, 0.1, 0.9, 0.0)
    ss = build_state_space(p, FeedbackConfig("cold-damping", 0.03))
    t = 20 / ss.slowest_rate
    S = propagate_covariance(CovarianceState(5.0, 0.1, 0.3), ss, t).matrix
    np.testing.assert_allclose(S, lyapunov_steady(ss).matrix, rtol=1e-9, atol=1e-12)


def test_free_rotation_preserves_trace():
    ss = StateSpace([[0.0, 2.0], [-2.0, 0.0]], np.zeros((2, 2)))
    s0 = CovarianceState(3.0, 0.5, 0.7)
    for t in (0.1, 1.0, 13.7):
        S = propagate_covariance(s0, ss, t).matrix
        assert np.trace(S) == pytest.approx(3.5, rel=1e-12)
        R = expm(ss.A * t)
        np.testing.assert_allclose(S, R @ s0.matrix @ R.T, rtol=1e-12, atol=1e-12)


def test_expm_and_ode_routes_agree():
    p = fig1()
    for cfg in (FeedbackConfig(), FeedbackConfig("cold-damping", 305 * GM), FeedbackConfig("stochastic-cooling", 100 * GM)):
        ss = build_state_space(p, cfg)
        s0 = CovarianceState(209.0, 180.0, 10.0)
        for t in (1e-7, 11e-6):
            a = propagate_covariance(s0, ss, t, "expm").matrix
            b = propagate_covariance(s0, ss, t, "ode").matrix
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9 * np.abs(a).max())


def test_timeline_matches_pointwise_propagation():
    p = fig1()
    ss = build_state_space(p, FeedbackConfig())
    s0 = CovarianceState(209.0, 209.0, 0.0)
    t = np.linspace(0, 11e-6, 301)
    tl = covariance_timeline(s0, ss, t)
    for k in (0, 17, 150, 300):
        np.testing.assert_allclose(tl.sigma[k], propagate_covariance(s0, ss, t[k]).matrix, rtol=1e-10, atol=1e-12 * 341)
    # non-Hurwitz branch (undamped, recurrence)
    free = StateSpace([[0.0, 1.0], [-1.0, 0.0]], np.diag([0.0, 0.2]))
    t2 = np.linspace(0, 30, 1201)
    tl2 = covariance_timeline(s0, free, t2)
    np.testing.assert_allclose(tl2.sigma[-1], propagate_covariance(s0, free, 30.0).matrix, rtol=1e-10)


def test_two_time_examples():
    ss = StateSpace([[0.0, 1.5], [-1.5, 0.0]], np.zeros((2, 2)))
    tl = covariance_timeline(CovarianceState(2.0, 2.0, 0.0), ss, np.linspace(0, 10, 501))
    for tau in (0.0, 0.3, 2.2, 7.9):
        assert two_time_qq(tl, 1.0, 1.0 + tau) == pytest.approx(2.0 * np.cos(1.5 * tau), abs=1e-12)
    assert two_time_qq(tl, 4.0, 4.0) == pytest.approx(tl.sigma_at(4.0).sigma_qq)
    assert two_time_qq(tl, 3.3, 1.2) == two_time_qq(tl, 1.2, 3.3)
    with pytest.raises(DomainError):
        two_time_qq(tl, 1.0, 11.0)


def test_kernel_matrix_matches_two_time():
    p = fig1()
    ss = build_state_space(p, FeedbackConfig())
    t = np.linspace(0, 11e-6, 81)
    tl = covariance_timeline(CovarianceState(150.0, 260.0, 20.0), ss, t)
    C = tl.kernel_matrix()
    for i, j in [(0, 0), (3, 50), (50, 3), (80, 10), (40, 40)]:
        assert C[i, j] == pytest.approx(tl.two_time_qq(t[i], t[j]), rel=1e-9)


def test_stationary_correlation_spectrum():
    # FFT of the stationary C(tau) against the Markov model's closed-form spectrum
    p = PhysicalParams(1.0, 0.01, 0.2, 0.9, 0.0)
    for cfg in (FeedbackConfig(), FeedbackConfig("cold-damping", 0.02), FeedbackConfig("stochastic-cooling", 0.02)):
        ss = build_state_space(p, cfg)
        S = lyapunov_steady(ss).matrix
        dt = 2 * np.pi / 64
        n = 2**17
        tau = dt * np.arange(n)
        C = (expm2(ss.A, tau) @ S)[:, 0, 0]
        w = 2 * np.pi * np.fft.rfftfreq(2 * n, dt)
        sym = np.concatenate([C, [0.0], C[:0:-1]])
        spec = (np.fft.rfft(sym) * dt).real
        band = (w >= 0.5) & (w <= 1.5)
        ref = markov_position_spectrum(ss, w[band])
        assert np.max(np.abs(spec[band] / ref - 1)) < 0.02


def test_markov_spectrum_matches_stationary_spectrum_near_resonance():
    from optosnr import position_noise_spectrum
    p = fig1(300.0)
    ss = build_state_space(p, FeedbackConfig())
    w = np.linspace(0.99, 1.01, 201) * WM
    np.testing.assert_allclose(markov_position_spectrum(ss, w), position_noise_spectrum(p, FeedbackConfig(), w), rtol=0.02)


def test_positivity_and_monotone_heating():
    p = fig1()
    cooled = lyapunov_steady(build_state_space(p, FeedbackConfig("cold-damping", 305 * GM)))
    ss = build_state_space(p, FeedbackConfig())
    t = np.linspace(0, 5 / GM, 4001)
    tl = covariance_timeline(cooled, ss, t)
    eig = np.linalg.eigvalsh(tl.sigma)
    assert np.all(eig >= -1e-9)
    energy = tl.sigma[:, 0, 0] + tl.sigma[:, 1, 1]
    assert np.all(np.diff(energy) >= -1e-9 * energy[1:])
    assert energy[-1] < 2 * lyapunov_steady(ss).sigma_qq


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.8 * WM, 1.2 * WM))
def test_window_kernel_is_positive(seed, w):
    p = fig1()
    cooled = lyapunov_steady(build_state_space(p, FeedbackConfig("cold-damping", 305 * GM)))
    t = np.linspace(0, 11e-6, 121)
    C = covariance_timeline(cooled, build_state_space(p, FeedbackConfig()), t).kernel_matrix()
    v = np.random.default_rng(seed).normal(size=t.size)
    ph = v * np.exp(-1j * w * t)
    assert (ph @ C @ ph.conj()).real >= -1e-9 * np.abs(C).max() * np.sum(v * v)
