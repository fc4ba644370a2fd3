"""Thermodynamic-limit classification of the spectral structure in the (h, gamma) plane.

Pure-imaginary bound states of the odd channel exist when the roots

    x_pm = (1 + g^2 +- sqrt((1 + g^2)^2 - 4 h^2 g^2)) / (2h)

are real and larger than one; the number of such states (and of the generic
complex bound states beyond h = (1 + g^2) / 2g) fixes how many stripes the
Liouvillian spectrum splits into.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

#: Distance below which a point counts as lying on a boundary curve.
BOUNDARY_TOL = 1e-12


class SpectrumStructure(enum.Enum):
    OneSegment = 1
    ThreeSegment = 3
    FiveSegment = 5
    NineSegment = 9

    @property
    def n_segments(self) -> int:
        return self.value


# (pure-imaginary pairs, generic complex pairs) in the odd channel
BOUND_STATE_SIGNATURE = {
    SpectrumStructure.OneSegment: (0, 0),
    SpectrumStructure.ThreeSegment: (1, 0),
    SpectrumStructure.FiveSegment: (0, 2),
    SpectrumStructure.NineSegment: (2, 0),
}


@dataclass(frozen=True)
class RegionClass:
    structure: SpectrumStructure
    on_boundary: bool
    distance: float  # smallest distance to a boundary curve, measured along h or gamma


def _check(h, gamma):
    if not (h > 0 and gamma > 0):
        raise ValueError(f"need h > 0 and gamma > 0, got h={h}, gamma={gamma}")


def critical_field(gamma: float) -> float:
    """h = (1 + gamma^2) / (2 gamma), where the two roots x_pm merge."""
    return (1.0 + gamma * gamma) / (2.0 * gamma)


def bound_state_x(h: float, gamma: float) -> tuple[complex, complex]:
    """Return (x_plus, x_minus); complex when the discriminant is negative."""
    _check(h, gamma)
    a = 1.0 + gamma * gamma
    disc = complex(a * a - 4.0 * h * h * gamma * gamma)
    root = np.sqrt(disc)
    xp, xm = (a + root) / (2 * h), (a - root) / (2 * h)
    if disc.real >= 0:
        return complex(xp.real, 0.0), complex(xm.real, 0.0)
    return complex(xp), complex(xm)


def boundary_distance(h: float, gamma: float) -> float:
    """Distance to the nearest boundary curve (h = 1, gamma = 1, and h = h_c(gamma) for gamma > 1)."""
    d = min(abs(h - 1.0), abs(gamma - 1.0))
    if gamma > 1:
        d = min(d, abs(h - critical_field(gamma)))
    return d


def classify_region(h: float, gamma: float) -> RegionClass:
    """Analytic structure at (h, gamma), with a flag for points on a boundary curve.

    The line h = 1 with gamma > 1 belongs to the three-segment region.  The
    line gamma = 1, h > 1 has no assigned structure of its own; it is
    reported as OneSegment with ``on_boundary`` set.
    """
    _check(h, gamma)
    d = boundary_distance(h, gamma)
    on_boundary = d <= BOUNDARY_TOL
    if h < 1 or (abs(h - 1) <= BOUNDARY_TOL and gamma > 1):
        s = SpectrumStructure.ThreeSegment
    elif gamma > 1 and h <= critical_field(gamma) + BOUNDARY_TOL:
        s = SpectrumStructure.NineSegment
    elif gamma > 1:
        s = SpectrumStructure.FiveSegment
    else:
        s = SpectrumStructure.OneSegment
    return RegionClass(structure=s, on_boundary=on_boundary, distance=d)


def bound_state_theta_I(h: float, gamma: float) -> list[float]:
    """ln x for every real root x_pm larger than one (pure-imaginary bound states)."""
    out = []
    for x in bound_state_x(h, gamma):
        if abs(x.imag) < 1e-14 and x.real > 1.0:
            out.append(float(np.log(x.real)))
    return sorted(out, reverse=True)


def structure_from_bound_states(n_pure: int, n_generic: int) -> SpectrumStructure | None:
    """Invert :data:`BOUND_STATE_SIGNATURE`; ``None`` for a signature outside the table."""
    for s, sig in BOUND_STATE_SIGNATURE.items():
        if sig == (n_pure, n_generic):
            return s
    return None


def default_grid(n: int = 20, lo: float = 0.1, hi: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    g = np.geomspace(lo, hi, n)
    return g.copy(), g.copy()


def numeric_structure(h: float, gamma: float, N: int = 100) -> SpectrumStructure | None:
    """Structure read off the odd-channel rapidity roots at finite N."""
    from .model import ModelParams
    from . import rapidity

    spec = rapidity.solve_odd_channel(ModelParams.symmetric(N, h, gamma))
    c = rapidity.classify_bound_states(spec)
    return structure_from_bound_states(c["n_pure_imaginary_pairs"], c["n_generic_complex_pairs"])
