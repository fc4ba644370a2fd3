"""Magnetization relaxation from the Majorana covariance matrix.

Gamma obeys the Lyapunov equation dGamma/dt = X Gamma + Gamma X^T (Y = 0),
so Gamma(t) = exp(Xt) Gamma(0) exp(X^T t).  With X = R diag(s) R^-1 this is
R [exp((s_j + s_k) t) * (R^-1 Gamma(0) R^-T)_{jk}] R^T.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import ModelParams, ParameterError

#: Condition number of the eigenvector matrix above which the spectral formula is abandoned.
COND_LIMIT = 1e8
IMAG_TOL = 1e-6


class IntegrityError(RuntimeError):
    """An observable that must be real came out with a sizeable imaginary part."""


@dataclass
class CovarianceState:
    gamma_matrix: np.ndarray
    time: float = 0.0

    @property
    def N(self) -> int:
        return self.gamma_matrix.shape[0] // 2


@dataclass
class Evolution:
    states: list
    method: str  # "spectral" or "rk45"
    diagnostics: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])


def build_x(params: ModelParams) -> np.ndarray:
    """Real 2N x 2N drift matrix for equal dissipation gamma at both ends."""
    if params.gammaL != params.gammaR:
        raise ParameterError("X is built for equal dissipation at both ends")
    N, J, g = params.N, params.J, params.gammaL
    h = np.asarray(params.fields, dtype=float)
    X = np.zeros((2 * N, 2 * N))
    X[0, 0] = X[-1, -1] = -2 * g
    j = np.arange(N)
    X[j, N + j] = 2 * h
    X[N + j, j] = -2 * h
    k = np.arange(N - 1)
    X[k + 1, N + k] = -2 * J
    X[N + k, k + 1] = 2 * J
    return X


def gamma0_all_up(N: int, lower_block: str = "zero") -> CovarianceState:
    """Covariance matrix of the all-up product state.

    ``lower_block="zero"`` follows from the definition of Gamma (each
    Majorana squares to 1/2, so the diagonal vanishes); ``"printed"`` puts
    -i on the lower-right diagonal instead.  Both give m^z = 1 at t = 0.
    """
    I = np.eye(N)
    D = np.zeros((N, N), dtype=complex)
    if lower_block == "printed":
        D = -1j * I
    elif lower_block != "zero":
        raise ValueError("lower_block must be 'zero' or 'printed'")
    G = np.block([[np.zeros((N, N)), -I / 2], [I / 2, D]]).astype(complex)
    return CovarianceState(G, 0.0)


def magnetization(state: CovarianceState | np.ndarray, imag_tol: float = IMAG_TOL) -> float:
    """m^z = (1/N) sum_j (Gamma_{N+j, j} - Gamma_{j, N+j})."""
    G = getattr(state, "gamma_matrix", state)
    N = G.shape[0] // 2
    j = np.arange(N)
    m = (G[N + j, j] - G[j, N + j]).sum() / N
    if abs(m.imag) > imag_tol:
        raise IntegrityError(f"magnetization has imaginary part {m.imag:.3e}")
    return float(m.real)


def site_sz(state: CovarianceState | np.ndarray, reading: str = "lower") -> np.ndarray:
    """Per-site <sz_j> read from one off-diagonal block.

    ``"lower"`` uses 2 Gamma_{N+j, j}, ``"upper"`` uses -2 Gamma_{j, N+j}.  The two
    agree whenever Gamma is antisymmetric, which makes the pair a check on Gamma(0).
    """
    G = getattr(state, "gamma_matrix", state)
    N = G.shape[0] // 2
    j = np.arange(N)
    return 2 * G[N + j, j] if reading == "lower" else -2 * G[j, N + j]


def _spectral(X, G0, t):
    s, R = np.linalg.eig(X)
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        return None, cond
    Rinv = np.linalg.inv(R)
    C = Rinv @ G0 @ Rinv.T
    ss = s[:, None] + s[None, :]
    out = [R @ (np.exp(ss * ti) * C) @ R.T for ti in t]
    return out, cond


def _rk45(X, G0, t, rtol=1e-11, atol=1e-13):
    n = X.shape[0]

    def rhs(_, y):
        G = y.reshape(n, n)
        return (X @ G + G @ X.T).ravel()

    sol = solve_ivp(rhs, (t[0], t[-1]), G0.ravel(), t_eval=t, method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"time stepping failed: {sol.message}")
    return [sol.y[:, i].reshape(n, n) for i in range(t.size)]


def evolve(x: np.ndarray, gamma0: CovarianceState, t_list, method: str = "auto") -> Evolution:
    """Covariance matrices at the requested times.

    ``method="auto"`` uses the eigen-decomposition of X unless its
    eigenvectors are ill-conditioned, in which case adaptive RK45 takes over.
    """
    t = np.asarray(t_list, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_list must be a non-empty 1-d sequence")
    if np.any(np.diff(t) < 0):
        raise ValueError("t_list must be non-decreasing")
    G0 = np.asarray(gamma0.gamma_matrix, dtype=complex)
    diag = {}
    mats = None
    if method in ("auto", "spectral"):
        mats, cond = _spectral(x, G0, t - gamma0.time)
        diag["eigvec_cond"] = float(cond)
        if mats is None and method == "spectral":
            raise RuntimeError(f"X eigenvectors ill-conditioned (cond={cond:.3g})")
        used = "spectral"
    if mats is None:
        if method not in ("auto", "rk45"):
            raise ValueError(f"unknown method {method!r}")
        # solve_ivp integrates forward from t[0]; prepend t0 if needed
        t0 = gamma0.time
        grid = t if np.isclose(t[0], t0) else np.concatenate([[t0], t])
        mats = _rk45(x, G0, grid)
        if grid.size != t.size:
            mats = mats[1:]
        used = "rk45"
        diag["fallback"] = method == "auto"
    states = [CovarianceState(M, float(ti)) for M, ti in zip(mats, t)]
    return Evolution(states=states, method=used, diagnostics=diag)


def magnetization_curve(params: ModelParams, t_list, lower_block: str = "zero",
                        method: str = "auto") -> np.ndarray:
    ev = evolve(build_x(params), gamma0_all_up(params.N, lower_block), t_list, method=method)
    return np.array([magnetization(s) for s in ev.states])


def first_crossing(t, a, b, skip: int = 1) -> float | None:
    """Time of the first sign change of a - b after index ``skip`` (linear interpolation)."""
    d = np.asarray(a) - np.asarray(b)
    t = np.asarray(t)
    for i in range(max(skip, 0), d.size - 1):
        if d[i] == 0:
            return float(t[i])
        if d[i] * d[i + 1] < 0:
            return float(t[i] - d[i] * (t[i + 1] - t[i]) / (d[i + 1] - d[i]))
    return None


@dataclass
class DualityReport:
    t: np.ndarray
    m_gamma: np.ndarray
    m_dual: np.ndarray
    t_cross: float | None
    divergence: float
    slower_initially: bool


def dynamical_duality_compare(h: float, gamma: float, N: int, t_list, J: float = 1.0,
                              t_transient: float | None = None) -> DualityReport:
    """m^z curves at gamma and 1/gamma and the largest gap between them after ``t_transient``.

    By default ``t_transient`` is the first crossing of the two curves.
    ``slower_initially`` reports whether the curve with the smaller of the
    two dissipation strengths stays on top before that time.
    """
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    t = np.asarray(t_list, dtype=float)
    a = magnetization_curve(ModelParams.symmetric(N, h, gamma, J), t)
    b = a.copy() if gamma == 1 else magnetization_curve(ModelParams.symmetric(N, h, 1.0 / gamma, J), t)
    tc = first_crossing(t, a, b) if t_transient is None else t_transient
    mask = t > (tc if tc is not None else t[-1])
    div = float(np.max(np.abs(a - b)[mask])) if mask.any() else 0.0
    lo, hi = (a, b) if gamma < 1 else (b, a)
    early = t <= (tc if tc is not None else t[-1])
    early &= t > 0
    slower = bool(np.all(lo[early] >= hi[early] - 1e-12)) if early.any() else True
    return DualityReport(t=t, m_gamma=a, m_dual=b, t_cross=tc, divergence=div, slower_initially=slower)
