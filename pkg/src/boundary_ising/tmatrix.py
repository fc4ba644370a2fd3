"""Single-particle matrix T^P of each parity channel and its biorthogonal eigensystem.

T^P is a 2N x 2N tridiagonal matrix (a non-Hermitian SSH chain): the bonds
alternate between the local field h_j and the coupling J, and the two corner
sites carry imaginary potentials P*i*gammaL and i*gammaR.  The rapidities are
its eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .matching import closure_residual
from .model import ModelParams, Parity, validate

#: Biorthogonal normaliser below which an eigenvalue is treated as defective.
EP_THRESHOLD = 1e-10
PAIRING_TOL = 1e-6


@dataclass(frozen=True)
class TMatrix:
    parity: Parity
    matrix: np.ndarray
    params: ModelParams

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass
class BiorthogonalEigensystem:
    """Eigenvalues with right vectors (columns of ``right``) and left vectors
    (rows of ``left``) normalised so that ``left @ right`` is the identity."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    normalizers: np.ndarray
    exceptional: bool
    diagnostics: dict = field(default_factory=dict)

    def reconstruct(self) -> np.ndarray:
        return (self.right * self.eigenvalues) @ self.left


def build_t(params: ModelParams, parity) -> TMatrix:
    parity = Parity.parse(parity)
    validate(params)
    N = params.N
    h = params.fields
    off = np.empty(2 * N - 1)
    off[0::2] = h
    off[1::2] = params.J
    t = np.diag(off.astype(complex), 1) + np.diag(off.astype(complex), -1)
    t[0, 0] = int(parity) * 1j * params.gammaL
    t[-1, -1] = 1j * params.gammaR
    return TMatrix(parity=parity, matrix=t, params=params)


def eigenvalues(t: TMatrix) -> np.ndarray:
    return scipy.linalg.eigvals(t.matrix, check_finite=False)


def eig_biorthogonal(t: TMatrix) -> BiorthogonalEigensystem:
    """Right and left eigenvectors of T with <Phi_i|Psi_j> = delta_ij.

    Near an exceptional point the overlap <Phi_j|Psi_j> of unit-norm left and
    right vectors vanishes; the system is then flagged and the reconstruction
    contract no longer holds.
    """
    w, vl, vr = scipy.linalg.eig(t.matrix, left=True, right=True)
    # scipy returns left vectors as columns of vl with vl^H T = w vl^H
    left = vl.conj().T
    overlaps = np.einsum("ij,ji->i", left, vr)
    mags = np.abs(overlaps)
    exceptional = bool(mags.min() < EP_THRESHOLD)
    safe = np.where(mags < np.finfo(float).tiny, 1.0, overlaps)
    left = left / safe[:, None]
    gram = left @ vr
    diagnostics = {
        "min_normalizer": float(mags.min()),
        "biorthogonality_residual": float(np.abs(gram - np.eye(len(w))).max()),
    }
    return BiorthogonalEigensystem(
        eigenvalues=w, right=vr, left=left, normalizers=mags,
        exceptional=exceptional, diagnostics=diagnostics,
    )


def _eta(n: int) -> np.ndarray:
    return np.where(np.arange(n) % 2 == 0, -1.0, 1.0)


def check_symmetries(t: TMatrix) -> dict:
    """Check the K, PT and reflection symmetries of T^P.

    Returns a report with a boolean and a max residual per symmetry.  The
    statements assume a uniform field and gammaL == gammaR; otherwise the
    report is marked not applicable.
    """
    p = t.params
    report = {"parity": t.parity.label, "applicable": p.uniform and p.equal_dissipation}
    if not report["applicable"]:
        report.update(K=None, PT=None, reflection=None)
        return report
    m = t.matrix
    n = t.size
    eta = np.diag(_eta(n))
    k_op = float(np.abs(eta @ m @ eta + m.conj()).max())
    w = eigenvalues(t)
    k_spec = closure_residual(w, lambda x: -np.conj(x))
    report["K_residual"] = max(k_op, k_spec)
    report["K"] = report["K_residual"] < PAIRING_TOL
    flip = np.eye(n)[::-1]
    if t.parity is Parity.ODD:
        # PT: reflection combined with complex conjugation
        pt_op = float(np.abs(flip @ m.conj() @ flip - m).max())
        pt_spec = closure_residual(w, np.conj)
        report["PT_residual"] = max(pt_op, pt_spec)
        report["PT"] = report["PT_residual"] < PAIRING_TOL
        report["reflection"] = None
    else:
        refl = float(np.abs(flip @ m @ flip - m).max())
        report["reflection_residual"] = refl
        report["reflection"] = refl < PAIRING_TOL
        report["PT"] = None
    return report


def trace_identity_residual(t: TMatrix, w=None) -> float:
    """|sum E_j - i(P gammaL + gammaR)|."""
    p = t.params
    w = eigenvalues(t) if w is None else w
    return float(abs(w.sum() - 1j * (int(t.parity) * p.gammaL + p.gammaR)))
