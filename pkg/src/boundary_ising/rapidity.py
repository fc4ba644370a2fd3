"""Rapidity spectrum from the boundary equation of T^P.

A bulk plane-wave ansatz psi_n ~ z^n with z = e^{i theta} gives the dispersion

    E^2 = J^2 + h^2 + 2 J h cos(theta)

and the two boundary rows fix theta through

    p1 sin(N theta) - p2 sin((N+1) theta) + p3 sin((N-1) theta) = 0,
    p1 = i J (P gL + gR) E - (J^3 - J P gL gR),   p2 = J^2 h,   p3 = h P gL gR.

Writing ``p1 = a E + b`` the equation is solved as a polynomial in z.  When
``a == 0`` (odd channel with equal dissipation, or no dissipation) it is linear
in the sines.  Otherwise the ``a E sin(N theta)`` term is isolated and squared,
and E^2 is replaced by the dispersion.  The trivial roots z = +-1 (theta = 0, pi)
are removed exactly by using

    2i z^{N+1} sin(k theta) / (z^2 - 1) = z^{N+1-k} (1 + z^2 + ... + z^{2k-2}).

Roots come in z <-> 1/z pairs (theta <-> -theta); one of each pair is kept and
polished with Newton's method on the joint (theta, E) system.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import linear_sum_assignment

from . import tmatrix
from .matching import pairing_error
from .model import ModelParams, ParameterError, Parity, validate

ROOT_ACCEPT = 1e-6
TOL_BOUND = 1e-6
TOL_PI = 1e-6


class RootCountError(RuntimeError):
    """The filtered root set does not have the expected size."""

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots


@dataclass(frozen=True)
class RapidityMode:
    channel: Parity
    theta: complex
    E: complex
    sign: int
    residual: float
    is_bound_state: bool
    is_pure_imaginary_E: bool

    @property
    def z(self) -> complex:
        return complex(np.exp(1j * self.theta))


@dataclass
class RapiditySpectrum:
    channel: Parity
    modes: list
    params: ModelParams
    diagnostics: dict = field(default_factory=dict)

    @property
    def energies(self) -> np.ndarray:
        return np.array([m.E for m in self.modes], dtype=complex)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([m.theta for m in self.modes], dtype=complex)

    def __len__(self):
        return len(self.modes)


# -- elementary pieces -------------------------------------------------------

def dispersion(theta, params: ModelParams):
    """E^2 as a function of theta."""
    J, h = params.J, _uniform_h(params)
    return J * J + h * h + 2 * J * h * np.cos(theta)


def boundary_coefficients(E, params: ModelParams, parity):
    P = int(Parity.parse(parity))
    J, h, gl, gr = params.J, _uniform_h(params), params.gammaL, params.gammaR
    p1 = 1j * J * (P * gl + gr) * E - (J ** 3 - J * P * gl * gr)
    return p1, J * J * h, h * P * gl * gr


def _scaled_sin(k, theta, shift):
    """sin(k theta) * exp(-shift) without overflow for large |Im(k theta)|."""
    return (np.exp(1j * k * theta - shift) - np.exp(-1j * k * theta - shift)) / 2j


def _scaled_cos(k, theta, shift):
    return (np.exp(1j * k * theta - shift) + np.exp(-1j * k * theta - shift)) / 2


def boundary_equation_residual(theta, E, params: ModelParams, parity, scaled: bool = False):
    """p1 sin(N theta) - p2 sin((N+1) theta) + p3 sin((N-1) theta).

    With ``scaled=True`` the value is multiplied by exp(-N |Im theta|), which
    keeps it finite for strongly localised (bound) modes at large N.
    """
    N = params.N
    theta = np.asarray(theta, dtype=complex)
    shift = N * np.abs(theta.imag) if scaled else 0.0
    p1, p2, p3 = boundary_coefficients(E, params, parity)
    return (p1 * _scaled_sin(N, theta, shift) - p2 * _scaled_sin(N + 1, theta, shift)
            + p3 * _scaled_sin(N - 1, theta, shift))


def coefficient_scale(params: ModelParams, E=1.0) -> float:
    p1, p2, p3 = boundary_coefficients(E, params, Parity.EVEN)
    q1, _, _ = boundary_coefficients(E, params, Parity.ODD)
    return float(max(abs(p1), abs(q1), abs(p2), abs(p3)))


def canonical_theta(theta, tol: float = TOL_PI) -> complex:
    """Representative of {theta, -theta} mod 2 pi with Re in (0, pi].

    On the line Re theta = pi both signs of Im theta are equivalent; the one
    with Im >= 0 is chosen.
    """
    t = complex(theta)
    re = (t.real + np.pi) % (2 * np.pi) - np.pi
    t = complex(re, t.imag)
    if t.real < 0 or (abs(t.real) <= tol and t.imag < 0):
        t = -t
    if abs(t.real - np.pi) <= tol or abs(t.real + np.pi) <= tol:
        t = complex(np.pi, abs(t.imag))
    return t


def theta_from_eigenvalue(E, params: ModelParams, parity=None) -> complex:
    """Invert the dispersion: theta = arccos((E^2 - J^2 - h^2) / (2 J h)), Re theta in (0, pi]."""
    validate(params, analytic=True)
    J, h = params.J, _uniform_h(params)
    if h == 0:
        raise ParameterError("theta_from_eigenvalue requires h != 0")
    w = (complex(E) ** 2 - J * J - h * h) / (2 * J * h)
    base = np.arccos(complex(w))
    cands = {canonical_theta(base), canonical_theta(np.conj(base))}
    cands = [c for c in cands if abs(np.cos(c) - w) <= 1e-8 * max(1.0, abs(w))] or [canonical_theta(base)]
    if parity is None or len(cands) == 1:
        return cands[0]
    return min(cands, key=lambda c: abs(boundary_equation_residual(c, E, params, parity, scaled=True)))


# -- polynomial construction -------------------------------------------------

def _deflated_sin_poly(k: int, N: int) -> np.ndarray:
    """Coefficients (ascending) of 2i z^{N+1} sin(k theta) / (z^2 - 1)."""
    c = np.zeros(N + k, dtype=complex)
    c[N + 1 - k:N + k:2] = 1.0
    return c


def _sum_polys(terms) -> np.ndarray:
    out = np.zeros(1, dtype=complex)
    for coef, poly in terms:
        out = npoly.polyadd(out, coef * poly)
    return out


def boundary_polynomial(params: ModelParams, parity) -> tuple[np.ndarray, bool]:
    """Polynomial in z whose roots are the nontrivial boundary-equation solutions.

    Returns ``(coefficients ascending, squared)``; ``squared`` tells whether the
    E-dependent term had to be eliminated by squaring (each root then carries
    one sign of E rather than both).
    """
    N = params.N
    J, h = params.J, _uniform_h(params)
    P = int(Parity.parse(parity))
    a = 1j * J * (P * params.gammaL + params.gammaR)
    b = -(J ** 3 - J * P * params.gammaL * params.gammaR)
    p2, p3 = J * J * h, h * P * params.gammaL * params.gammaR
    S = {k: _deflated_sin_poly(k, N) for k in (N - 1, N, N + 1)}
    R = _sum_polys([(b, S[N]), (-p2, S[N + 1]), (p3, S[N - 1])])
    if a == 0:
        return np.trim_zeros(R, "b"), False
    # a E S_N = -R  =>  a^2 (z E^2) S_N^2 - z R^2 = 0, then divide by z
    e2z = np.array([J * h, J * J + h * h, J * h], dtype=complex)
    lhs = a * a * npoly.polymul(e2z, npoly.polymul(S[N], S[N]))
    rhs = npoly.polymul([0.0, 1.0], npoly.polymul(R, R))
    poly = npoly.polysub(lhs, rhs)
    scale = np.abs(poly).max()
    if abs(poly[0]) > 1e-12 * scale:
        raise AssertionError("expected a vanishing constant term")
    return np.trim_zeros(poly[1:], "b"), True


def polynomial_roots(coeffs) -> np.ndarray:
    """All roots via companion-matrix eigenvalues."""
    return np.roots(np.asarray(coeffs)[::-1])


def _select_half(z: np.ndarray) -> np.ndarray:
    """One representative from each z <-> 1/z pair.

    Partners are found by a minimum-cost matching of the roots against their
    reciprocals; the representative is the one with Re theta in (0, pi], i.e.
    Im z > 0, or |z| > 1 for a pair on the real axis.
    """
    n = z.size
    cost = np.abs(z[:, None] - 1.0 / z[None, :])
    cost[np.diag_indices(n)] = np.inf
    rows, cols = linear_sum_assignment(np.where(np.isfinite(cost), cost, 1e300))
    partner = np.empty(n, dtype=int)
    partner[rows] = cols
    if np.any(partner[partner] != np.arange(n)):
        raise RootCountError("roots do not split into z <-> 1/z pairs", roots=z)
    keep = []
    for i in range(n):
        j = partner[i]
        if i > j:
            continue
        # average the two estimates of the same theta
        zi = 0.5 * (z[i] + 1.0 / z[j])
        zj = 1.0 / zi
        if abs(zi.imag - zj.imag) > 1e-12 * max(1.0, abs(zi)):
            keep.append(zi if zi.imag > zj.imag else zj)
        else:
            keep.append(zi if abs(zi) >= abs(zj) else zj)
    return np.array(keep, dtype=complex)


# -- Newton polish -----------------------------------------------------------

def _newton(theta, E, params, parity, steps: int = 12):
    """Polish (theta, E) on {E^2 = dispersion(theta), boundary(theta, E) = 0}."""
    N = params.N
    J, h = params.J, _uniform_h(params)
    P = int(Parity.parse(parity))
    a = 1j * J * (P * params.gammaL + params.gammaR)
    p_scale = coefficient_scale(params, E)

    def F(t, e):
        shift = N * abs(t.imag)
        f1 = (e * e - dispersion(t, params)) / max(1.0, abs(e * e))
        f2 = complex(boundary_equation_residual(t, e, params, parity, scaled=True)) / p_scale
        return f1, f2, shift

    f1, f2, shift = F(theta, E)
    err = abs(f1) + abs(f2)
    for _ in range(steps):
        if err < 1e-15:
            break
        p1, p2, p3 = boundary_coefficients(E, params, parity)
        nrm = max(1.0, abs(E * E))
        j11 = 2 * J * h * np.sin(theta) / nrm
        j12 = 2 * E / nrm
        j21 = (p1 * N * _scaled_cos(N, theta, shift) - p2 * (N + 1) * _scaled_cos(N + 1, theta, shift)
               + p3 * (N - 1) * _scaled_cos(N - 1, theta, shift)) / p_scale
        j22 = a * _scaled_sin(N, theta, shift) / p_scale
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        dt = (f1 * j22 - j12 * f2) / det
        de = (j11 * f2 - j21 * f1) / det
        t_new, e_new = theta - dt, E - de
        g1, g2, s_new = F(t_new, e_new)
        new_err = abs(g1) + abs(g2)
        if not new_err < err:
            break
        theta, E, f1, f2, shift, err = t_new, e_new, g1, g2, s_new, new_err
    return theta, E


def _uniform_h(params: ModelParams) -> float:
    if not params.uniform:
        raise ParameterError("the boundary equation assumes a uniform field")
    return float(params.h)


# -- solvers -----------------------------------------------------------------

def _check_pre(params: ModelParams):
    validate(params, analytic=True)
    _uniform_h(params)
    if not params.equal_dissipation:
        raise ParameterError("channel solvers assume gammaL == gammaR")
    if params.h == 0:
        raise ParameterError("channel solvers assume h != 0")


def _make_mode(channel, theta, E, params, tol_bound, tol_pi):
    theta = canonical_theta(theta, tol_pi)
    res = abs(complex(boundary_equation_residual(theta, E, params, channel, scaled=True)))
    res /= coefficient_scale(params, E)
    bound = abs(theta.imag) > tol_bound
    pure = bool(bound and abs(theta.real - np.pi) <= tol_pi)
    return RapidityMode(
        channel=Parity.parse(channel), theta=complex(theta), E=complex(E),
        sign=1 if complex(E).real > 0 or (complex(E).real == 0 and complex(E).imag >= 0) else -1,
        residual=float(res), is_bound_state=bool(bound), is_pure_imaginary_E=pure,
    )


def _polished_roots(params, parity, polish=True):
    coeffs, squared = boundary_polynomial(params, parity)
    z = polynomial_roots(coeffs)
    half = _select_half(z)
    expected = 2 * params.N if squared else params.N
    if half.size != expected:
        raise RootCountError(
            f"{Parity.parse(parity).label} channel: {half.size} roots after filtering, "
            f"expected {expected}", roots=z)
    thetas = -1j * np.log(half)
    out = []
    for i, t in enumerate(thetas):
        e0 = np.sqrt(dispersion(t, params))
        if squared:
            r_plus = abs(boundary_equation_residual(t, e0, params, parity, scaled=True))
            r_minus = abs(boundary_equation_residual(t, -e0, params, parity, scaled=True))
            e0 = e0 if r_plus <= r_minus else -e0
        t1, e1 = (t, e0)
        if polish:
            t1, e1 = _newton(t, e0, params, parity)
            others = np.delete(thetas, i)
            spacing = np.abs(others - t).min() if others.size else np.inf
            if abs(t1 - t) > max(0.5 * spacing, 1e-9):
                t1, e1 = t, e0
        out.append((t1, e1))
    return out, squared, coeffs


def _solve_channel(params, parity, tol_bound, tol_pi, fallback, polish=True):
    _check_pre(params)
    parity = Parity.parse(parity)
    diag = {"route": "polynomial"}
    try:
        roots, squared, coeffs = _polished_roots(params, parity, polish)
        diag.update(degree=len(coeffs) - 1, squared=squared)
        modes = []
        for t, e in roots:
            modes.append(_make_mode(parity, t, e, params, tol_bound, tol_pi))
            if not squared:
                modes.append(_make_mode(parity, t, -e, params, tol_bound, tol_pi))
        worst = max(m.residual for m in modes)
        diag["max_residual"] = worst
        if worst > ROOT_ACCEPT:
            raise RootCountError(f"root residual {worst:.2e} above acceptance", roots=[m.theta for m in modes])
        if squared:
            # squaring can only introduce roots carrying the wrong sign of E;
            # cross-check the multiset against the matrix eigenvalues
            diag["matrix_pairing_error"] = pairing_error(
                [m.E for m in modes], tmatrix.eigenvalues(tmatrix.build_t(params, parity)))
    except RootCountError as exc:
        if not fallback:
            raise
        diag = {"route": "eigenvalue", "polynomial_failure": str(exc)}
        modes = [
            _make_mode(parity, theta_from_eigenvalue(e, params, parity), e, params, tol_bound, tol_pi)
            for e in tmatrix.eigenvalues(tmatrix.build_t(params, parity))
        ]
    return RapiditySpectrum(channel=parity, modes=modes, params=params, diagnostics=diag)


def solve_odd_channel(params: ModelParams, tol_bound: float = TOL_BOUND, tol_pi: float = TOL_PI,
                      fallback: bool = False) -> RapiditySpectrum:
    """2N odd-channel rapidities: N roots theta of the boundary equation, each with +-E."""
    return _solve_channel(params, Parity.ODD, tol_bound, tol_pi, fallback)


def solve_even_channel(params: ModelParams, tol_bound: float = TOL_BOUND, tol_pi: float = TOL_PI,
                       fallback: bool = True) -> RapiditySpectrum:
    """2N even-channel rapidities: 2N roots theta, each carrying one sign of E."""
    return _solve_channel(params, Parity.EVEN, tol_bound, tol_pi, fallback)


def solve_channel(params: ModelParams, parity, **kw) -> RapiditySpectrum:
    parity = Parity.parse(parity)
    return solve_even_channel(params, **kw) if parity is Parity.EVEN else solve_odd_channel(params, **kw)


def classify_bound_states(spec: RapiditySpectrum, tol_bound: float | None = None,
                          tol_pi: float = TOL_PI) -> dict:
    """Count conjugate pairs of rapidities belonging to complex theta.

    Pairs with Re theta = pi are pure-imaginary E (E, -E); the rest are
    generic complex pairs.
    """
    n_pure = n_generic = 0
    for m in spec.modes:
        bound = m.is_bound_state if tol_bound is None else abs(m.theta.imag) > tol_bound
        if not bound:
            continue
        if abs(m.theta.real - np.pi) <= tol_pi:
            n_pure += 1
        else:
            n_generic += 1
    return {"n_pure_imaginary_pairs": n_pure // 2, "n_generic_complex_pairs": n_generic // 2}
