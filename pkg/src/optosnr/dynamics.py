"""Markovian (Q, P) dynamics: drift and diffusion, steady states, propagation.

Every noise entering the mirror equations is replaced by white noise with
its symmetrized spectral density evaluated at ``omega_m``.  For a high-Q
resonator only the density near resonance shapes the second moments, and
this keeps ``<P^2>`` finite under the derivative-of-white-noise feedback
force of cold damping.  Diffusion strengths (delta-correlated, per unit
time) are

==================  =====================================  ==============
scheme              d_pp                                   d_qq
==================  =====================================  ==============
off                 gamma_m coth_m + 4 kappa               0
cold damping        gamma_m coth_m + 4 kappa + g2^2 s      0
stochastic cooling  gamma_m coth_m + 4 kappa               g1^2 s
==================  =====================================  ==============

with ``coth_m = coth(hbar omega_m / 2 k_B T)`` and ``s = 1/(64 kappa eta)``.
The classical treatment keeps only ``gamma_m coth_m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import DomainError, StabilityError
from .model import FeedbackConfig, PhysicalParams, Scheme
from .response import drift_matrix


@dataclass(frozen=True)
class StateSpace:
    """Linear SDE ``dx = A x dt + dW`` with ``<dW dW^T> = D dt``."""

    A: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float).reshape(2, 2)
        D = np.array(self.D, dtype=float).reshape(2, 2)
        if not np.allclose(D, D.T, rtol=0, atol=1e-12 * max(1.0, np.abs(D).max())):
            raise DomainError("diffusion matrix must be symmetric")
        if np.linalg.eigvalsh(D).min() < -1e-12 * max(1.0, np.abs(D).max()):
            raise DomainError("diffusion matrix must be positive semidefinite")
        A.flags.writeable = False
        D.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "D", D)

    @property
    def is_hurwitz(self) -> bool:
        return bool(np.trace(self.A) < 0 and np.linalg.det(self.A) > 0)

    @property
    def slowest_rate(self) -> float:
        """Smallest ``|Re lambda|`` over the eigenvalues of ``A``."""
        return float(np.min(np.abs(np.linalg.eigvals(self.A).real)))


@dataclass(frozen=True)
class CovarianceState:
    """Symmetrized second moments of ``(Q, P)`` at time ``t``."""

    sigma_qq: float
    sigma_pp: float
    sigma_qp: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("sigma_qq", "sigma_pp", "sigma_qp", "t"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.sigma_qq < 0 or self.sigma_pp < 0:
            raise DomainError("covariance diagonal must be nonnegative")

    @classmethod
    def from_matrix(cls, m, t: float = 0.0) -> "CovarianceState":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[1, 1]), float(0.5 * (m[0, 1] + m[1, 0])), t)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.sigma_qq, self.sigma_qp], [self.sigma_qp, self.sigma_pp]])

    @property
    def uncertainty_product(self) -> float:
        return self.sigma_qq * self.sigma_pp - self.sigma_qp**2

    def satisfies_uncertainty(self, tol: float = 1e-9) -> bool:
        """Robertson-Schroedinger bound ``det(Sigma) >= 1/4`` for ``[Q, P] = i``."""
        return self.uncertainty_product >= 0.25 - tol


def diffusion_strengths(params: PhysicalParams, config: FeedbackConfig) -> tuple[float, float]:
    """White-noise strengths ``(d_qq, d_pp)`` for the given loop configuration."""
    d_pp = params.gamma_m * params.coth_m
    if config.classical:
        return 0.0, d_pp
    d_pp += params.backaction_density
    fb = config.gain**2 * params.shot_density
    if config.scheme is Scheme.COLD_DAMPING:
        return 0.0, d_pp + fb
    if config.scheme is Scheme.STOCHASTIC_COOLING:
        return fb, d_pp
    return 0.0, d_pp


def build_state_space(params: PhysicalParams, config: FeedbackConfig) -> StateSpace:
    d_qq, d_pp = diffusion_strengths(params, config)
    return StateSpace(drift_matrix(params, config), np.diag([d_qq, d_pp]))


def lyapunov_steady(ss: StateSpace) -> CovarianceState:
    """Unique solution of ``A S + S A^T + D = 0`` (closed 3x3 linear solve)."""
    if not ss.is_hurwitz:
        raise StabilityError("drift matrix is not Hurwitz; no steady state exists")
    (a, b), (c, d) = ss.A
    # unknowns (s_qq, s_qp, s_pp)
    M = np.array([
        [2 * a, 2 * b, 0.0],
        [c, a + d, b],
        [0.0, 2 * c, 2 * d],
    ])
    rhs = -np.array([ss.D[0, 0], 0.5 * (ss.D[0, 1] + ss.D[1, 0]), ss.D[1, 1]])
    sqq, sqp, spp = np.linalg.solve(M, rhs)
    return CovarianceState(sqq, spp, sqp)


def expm2(A, t):
    """``exp(A t)`` for a real 2x2 ``A``; ``t`` may be an array.

    Uses ``exp(A t) = exp(tau t/2) [cosh(s t) I + sinh(s t)/s (A - tau/2 I)]``
    with ``s^2 = tau^2/4 - det A``.  Returns shape ``t.shape + (2, 2)``.
    """
    A = np.asarray(A, dtype=float)
    t = np.asarray(t, dtype=float)
    tau = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    s = np.sqrt(complex(tau * tau / 4 - det))
    half = tau / 2
    st = s * t
    ep = np.exp((half + s) * t)
    em = np.exp((half - s) * t)
    c = (0.5 * (ep + em)).real
    small = np.abs(st) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        sh = np.where(small, np.exp(half * t) * t * (1 + st * st / 6), (ep - em) / (2 * s)).real
    Mx = A - half * np.eye(2)
    return c[..., None, None] * np.eye(2) + sh[..., None, None] * Mx


def _van_loan(A, D, t):
    """Transition matrix and accumulated diffusion over an interval ``t``.

    The block exponential contains ``exp(-A h)``, which loses the diffusion
    integral to cancellation once ``|A| h`` is large, so it is only evaluated
    on a short step ``h = t / 2^k`` and then doubled:
    ``Q(2h) = phi(h) Q(h) phi(h)^T + Q(h)``.
    """
    norm = float(np.abs(A).sum(axis=1).max()) * t
    k = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    h = t / 2**k
    blk = np.zeros((4, 4))
    blk[:2, :2] = -A
    blk[:2, 2:] = D
    blk[2:, 2:] = A.T
    E = expm(blk * h)
    phi = E[2:, 2:].T
    q = phi @ E[:2, 2:]
    for _ in range(k):
        q = phi @ q @ phi.T + q
        phi = phi @ phi
    return phi, 0.5 * (q + q.T)


def _moment_rhs(A, D):
    def f(_t, y):
        S = y.reshape(2, 2)
        return (A @ S + S @ A.T + D).ravel()
    return f


def propagate_covariance(sigma0: CovarianceState, ss: StateSpace, t: float,
                         method: str = "expm") -> CovarianceState:
    """Covariance after evolving for a time ``t`` under ``ss``.

    ``method="expm"`` evaluates ``e^{At} S0 e^{A^T t} + int_0^t e^{As} D e^{A^T s} ds``
    through the block-matrix exponential; ``method="ode"`` integrates the
    moment equation ``dS/dt = A S + S A^T + D`` instead.
    """
    if t < 0:
        raise DomainError(f"propagation time must be >= 0, got {t!r}")
    S0 = sigma0.matrix
    if t == 0:
        return CovarianceState.from_matrix(S0, sigma0.t)
    if method == "expm":
        phi, q = _van_loan(ss.A, ss.D, t)
        S = phi @ S0 @ phi.T + q
    elif method == "ode":
        # rtol sits just above solve_ivp's floor of 100 eps; the global error
        # of lightly damped systems grows with the number of oscillations
        rate = np.abs(np.linalg.eigvals(ss.A)).max()
        scale = max(np.abs(S0).max(), np.abs(ss.D).max() / rate if rate > 0 else 0.0, 1e-300)
        sol = solve_ivp(_moment_rhs(ss.A, ss.D), (0.0, t), S0.ravel(), method="DOP853",
                        rtol=2.5e-14, atol=1e-18 * scale)
        S = sol.y[:, -1].reshape(2, 2)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CovarianceState.from_matrix(S, sigma0.t + t)


@dataclass(frozen=True)
class CovarianceTimeline:
    """Covariances on a uniform grid plus cached lag propagators.

    ``phi[k] = exp(A k dt)`` so the two-time position correlation on the
    grid is ``C(t_i, t_{i+k}) = (phi[k] @ sigma[i])[0, 0]``.
    """

    t: np.ndarray
    sigma: np.ndarray
    ss: StateSpace
    phi: np.ndarray = field(repr=False)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def state(self, i: int) -> CovarianceState:
        return CovarianceState.from_matrix(self.sigma[i], float(self.t[i]))

    def _check(self, *times):
        lo, hi = self.t[0], self.t[-1]
        span = hi - lo
        for x in times:
            if x < lo - 1e-12 * span or x > hi + 1e-12 * span:
                raise DomainError(f"time {x!r} outside the propagated interval [{lo}, {hi}]")

    def sigma_at(self, t: float) -> CovarianceState:
        self._check(t)
        i = int(np.clip(np.floor((t - self.t[0]) / self.dt), 0, self.t.size - 1))
        return propagate_covariance(self.state(i), self.ss, max(0.0, t - self.t[i]))

    def two_time_qq(self, t: float, t2: float) -> float:
        self._check(t, t2)
        if t2 < t:
            t, t2 = t2, t
        S = self.sigma_at(t).matrix
        return float((expm2(self.ss.A, t2 - t) @ S)[0, 0])

    def lag_coefficients(self):
        """Per-start-point and per-lag pieces of the grid kernel.

        Returns ``(phi_q, sig_q)`` with ``C[i, i+k] = phi_q[k] @ sig_q[i]``.
        """
        return self.phi[:, 0, :], self.sigma[:, :, 0]

    def kernel_matrix(self) -> np.ndarray:
        """Dense symmetric matrix ``C(t_i, t_j)``; O(n^2) memory."""
        phi_q, sig_q = self.lag_coefficients()
        n = self.t.size
        i, j = np.triu_indices(n)
        C = np.zeros((n, n))
        C[i, j] = np.einsum("kc,kc->k", phi_q[j - i], sig_q[i])
        return np.triu(C) + np.triu(C, 1).T

    def to_rows(self):
        for tk, S in zip(self.t, self.sigma):
            yield float(tk), float(S[0, 0]), float(S[1, 1]), float(S[0, 1])


def covariance_timeline(sigma0: CovarianceState, ss: StateSpace, t_grid) -> CovarianceTimeline:
    """Propagate ``sigma0`` (taken at ``t_grid[0]``) across a uniform grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    n = t_grid.size
    dt = t_grid[1] - t_grid[0] if n > 1 else 0.0
    lags = dt * np.arange(n)
    phi = expm2(ss.A, lags)
    S0 = sigma0.matrix
    if ss.is_hurwitz and ss.slowest_rate * lags[-1] > 1e-6:
        Sinf = lyapunov_steady(ss).matrix
        sig = Sinf + phi @ (S0 - Sinf) @ np.swapaxes(phi, -1, -2)
    else:
        step, q = _van_loan(ss.A, ss.D, dt) if n > 1 else (np.eye(2), np.zeros((2, 2)))
        sig = np.empty((n, 2, 2))
        sig[0] = S0
        for k in range(1, n):
            sig[k] = step @ sig[k - 1] @ step.T + q
    sig = 0.5 * (sig + np.swapaxes(sig, -1, -2))
    return CovarianceTimeline(t_grid, sig, ss, phi)


def two_time_qq(timeline: CovarianceTimeline, t: float, t2: float) -> float:
    """Symmetrized position correlation ``C(t, t2)`` on a propagated timeline."""
    return timeline.two_time_qq(t, t2)


def markov_position_spectrum(ss: StateSpace, omega):
    """Exact stationary position spectrum of the Markovian model.

    ``N(omega) = [H D H^dagger]_qq`` with ``H = (i omega - A)^{-1}``.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    M = 1j * w[:, None, None] * np.eye(2) - ss.A
    H = np.linalg.inv(M)
    out = np.einsum("wa,ab,wb->w", H[:, 0, :], ss.D, H[:, 0, :].conj()).real
    return out if np.ndim(omega) else out[0]
