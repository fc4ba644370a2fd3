"""Physical parameters of the boundary-dissipated transverse-field Ising chain."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

#: Global tolerance for equality checks on double-precision complex numbers.
EPS_NUM = 1e-9


class ParameterError(ValueError):
    """Raised when model parameters violate their invariants."""


class Parity(enum.IntEnum):
    """Parity channel of the doubled (ket x bra) space, P = +1 or -1."""

    EVEN = 1
    ODD = -1

    @property
    def label(self) -> str:
        return "even" if self is Parity.EVEN else "odd"

    @classmethod
    def parse(cls, value) -> "Parity":
        if isinstance(value, Parity):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("even", "e", "+", "+1", "1"):
                return cls.EVEN
            if key in ("odd", "o", "-", "-1"):
                return cls.ODD
            raise ValueError(f"unknown parity {value!r}")
        return cls(int(value))


@dataclass(frozen=True)
class ModelParams:
    """Chain of ``N`` spins with coupling ``J``, transverse field and edge dissipation.

    ``h`` is either a scalar (uniform field) or a length-``N`` sequence of
    per-site fields.  Instances are immutable; use :func:`validate` before
    handing user input to the solvers.
    """

    N: int
    h: float | tuple[float, ...] = 1.0
    gammaL: float = 0.0
    gammaR: float = 0.0
    J: float = 1.0

    def __post_init__(self):
        if not np.isscalar(self.h):
            object.__setattr__(self, "h", tuple(float(x) for x in self.h))

    @classmethod
    def symmetric(cls, N: int, h, gamma: float, J: float = 1.0) -> "ModelParams":
        """Equal dissipation on both edges, ``gammaL = gammaR = gamma``."""
        return cls(N=N, h=h, gammaL=gamma, gammaR=gamma, J=J)

    @property
    def uniform(self) -> bool:
        return np.isscalar(self.h)

    @property
    def fields(self) -> np.ndarray:
        """Per-site fields h_1..h_N as an array."""
        if self.uniform:
            return np.full(self.N, float(self.h))
        return np.asarray(self.h, dtype=float)

    @property
    def equal_dissipation(self) -> bool:
        return self.gammaL == self.gammaR

    @property
    def gamma(self) -> float:
        """Common dissipation strength; only defined when both edges agree."""
        if not self.equal_dissipation:
            raise ParameterError("gammaL != gammaR; no single dissipation strength")
        return self.gammaL

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def validate(params: ModelParams, *, analytic: bool = False) -> ModelParams:
    """Check the invariants of ``params`` and return it unchanged.

    With ``analytic=True`` the coupling must also be nonzero, as required by
    the rapidity (boundary-equation) solvers.
    """
    if int(params.N) != params.N or params.N < 2:
        raise ParameterError(f"N must be an integer >= 2, got {params.N!r}")
    for name in ("gammaL", "gammaR"):
        value = getattr(params, name)
        if not np.isfinite(value) or value < 0:
            raise ParameterError(f"{name} must be finite and >= 0, got {value!r}")
    if not params.uniform and len(params.h) != params.N:
        raise ParameterError(
            f"per-site field list has {len(params.h)} entries, expected N={params.N}"
        )
    if not np.all(np.isfinite(params.fields)) or not np.isfinite(params.J):
        raise ParameterError("J and h must be finite")
    if analytic and params.J == 0:
        raise ParameterError("analytic solvers require J != 0")
    return params


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform relative on-site disorder of width ``delta`` in the transverse field."""

    delta: float
    seed: int = 0
    n_configs: int = 1

    def __post_init__(self):
        if self.delta < 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        if self.n_configs < 1:
            raise ParameterError(f"n_configs must be >= 1, got {self.n_configs}")


def sample_disorder(params: ModelParams, spec: DisorderSpec) -> list[ModelParams]:
    """Draw ``spec.n_configs`` disordered copies with h_j = h (1 + d_j), d_j ~ U(-delta, delta)."""
    validate(params)
    if not params.uniform:
        raise ParameterError("disorder sampling needs a uniform base field")
    rng = np.random.default_rng(spec.seed)
    out = []
    for _ in range(spec.n_configs):
        d = rng.uniform(-spec.delta, spec.delta, size=params.N)
        out.append(params.with_(h=tuple(params.h * (1.0 + d))))
    return out


def from_mapping(values: dict) -> ModelParams:
    """Build parameters from a flat key-value mapping (config files, CLI).

    Recognised keys: ``N``/``n``, ``J``, ``h`` (scalar or comma-separated list),
    ``gamma`` or ``gammaL``/``gammaR``.
    """
    v = {k.lower(): val for k, val in values.items()}
    N = int(v["n"])
    h = v.get("h", 1.0)
    if isinstance(h, str):
        parts = [float(x) for x in h.split(",") if x.strip()]
        h = parts[0] if len(parts) == 1 else tuple(parts)
    elif isinstance(h, Sequence):
        h = tuple(float(x) for x in h)
    else:
        h = float(h)
    gamma = v.get("gamma")
    gl = float(v.get("gammal", gamma if gamma is not None else 0.0))
    gr = float(v.get("gammar", gamma if gamma is not None else 0.0))
    return validate(ModelParams(N=N, h=h, gammaL=gl, gammaR=gr, J=float(v.get("j", 1.0))))
