"""Brute-force exact diagonalisation of the vectorised Liouvillian.

Vectorisation convention: rho = sum rho_mn |m><n|  ->  |rho> = sum rho_mn |m> (x) |n>,
i.e. row-major flattening, ``vec(rho) = rho.reshape(-1)``.  With it
vec(A rho B) = (A (x) B^T) vec(rho).  The first tensor factor ("sigma" copy)
is the ket space, the second ("tau" copy) the bra space.

The superoperator is assembled sparse and densified per parity sector; the
eigensolvers themselves are dense.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .model import EPS_NUM, ModelParams, ParameterError, validate

N_MAX_ED = 6

_SX = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
_SZ = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex))


def _site_op(op, j: int, n: int):
    """``op`` acting on site j (0-based) of an n-site register."""
    mats = [sp.identity(2, dtype=complex, format="csr")] * n
    mats[j] = op
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


def hamiltonian(params: ModelParams):
    """Sparse spin Hamiltonian H = -J sum sx_j sx_{j+1} - sum h_j sz_j."""
    n = params.N
    dim = 2 ** n
    H = sp.csr_matrix((dim, dim), dtype=complex)
    for j in range(n - 1):
        H = H - params.J * (_site_op(_SX, j, n) @ _site_op(_SX, j + 1, n))
    for j, hj in enumerate(params.fields):
        H = H - hj * _site_op(_SZ, j, n)
    return H.tocsr()


def jump_operators(params: ModelParams) -> list:
    n = params.N
    return [
        np.sqrt(params.gammaL) * _site_op(_SX, 0, n),
        np.sqrt(params.gammaR) * _site_op(_SX, n - 1, n),
    ]


def magnetization_operator(N: int):
    """m^z = (1/N) sum_j sz_j as a sparse matrix."""
    return (sum(_site_op(_SZ, j, N) for j in range(N)) / N).tocsr()


@dataclass
class SuperOperator:
    params: ModelParams
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass
class ParityMatrix:
    N: int
    diagonal: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def sector(self, sign: int) -> np.ndarray:
        """Basis indices of the P = sign eigenspace."""
        return np.flatnonzero(self.diagonal == sign)


def _check_size(params: ModelParams, n_max: int):
    if params.N > n_max:
        raise ParameterError(
            f"ED dimension 4^{params.N} exceeds the limit N_max_ed={n_max}"
        )


def build_superoperator(params: ModelParams, n_max: int = N_MAX_ED) -> SuperOperator:
    """L = i(1 (x) H^T - H (x) 1) + sum_mu [L (x) L* - 1/2 (L^dag L (x) 1 + 1 (x) L^T L*)]."""
    validate(params)
    _check_size(params, n_max)
    H = hamiltonian(params)
    one = sp.identity(H.shape[0], dtype=complex, format="csr")
    L = 1j * (sp.kron(one, H.T) - sp.kron(H, one))
    for c in jump_operators(params):
        cdc = (c.conj().T @ c)
        L = L + sp.kron(c, c.conj()) - 0.5 * (sp.kron(cdc, one) + sp.kron(one, c.T @ c.conj()))
    return SuperOperator(params=params, matrix=L.tocsr())


def build_superoperator_spin_form(params: ModelParams, n_max: int = N_MAX_ED) -> SuperOperator:
    """The same Liouvillian written directly on 2N spins (sigma = ket copy, tau = bra copy).

    L = i(J sum sx sx + sum h_j sz - J sum tx tx - sum h_j tz)
        + gL sx_1 tx_1 + gR sx_N tx_N - (gL + gR)
    """
    validate(params)
    _check_size(params, n_max)
    n = params.N
    m = 2 * n
    sig = lambda op, j: _site_op(op, j, m)
    tau = lambda op, j: _site_op(op, n + j, m)
    dim = 4 ** n
    L = sp.csr_matrix((dim, dim), dtype=complex)
    for j in range(n - 1):
        L = L + 1j * params.J * (sig(_SX, j) @ sig(_SX, j + 1) - tau(_SX, j) @ tau(_SX, j + 1))
    for j, hj in enumerate(params.fields):
        L = L + 1j * hj * (sig(_SZ, j) - tau(_SZ, j))
    L = L + params.gammaL * (sig(_SX, 0) @ tau(_SX, 0))
    L = L + params.gammaR * (sig(_SX, n - 1) @ tau(_SX, n - 1))
    L = L - (params.gammaL + params.gammaR) * sp.identity(dim, dtype=complex)
    return SuperOperator(params=params, matrix=L.tocsr())


def build_parity(N: int) -> ParityMatrix:
    """(prod sz_j)(prod tz_j) in the vectorised basis, as a +-1 diagonal."""
    x = np.arange(4 ** N)
    ones = np.zeros(x.size, dtype=np.int64)
    while x.any():
        ones += x & 1
        x >>= 1
    # basis bit 1 means spin down (sz = -1)
    return ParityMatrix(N=N, diagonal=np.where(ones % 2 == 0, 1, -1))


def commutator_norm(superop: SuperOperator, parity: ParityMatrix) -> float:
    """Max-norm of [L, P] for diagonal P: entries L_ij (p_i - p_j)."""
    L = superop.matrix.tocoo()
    d = parity.diagonal
    vals = L.data * (d[L.row] - d[L.col])
    return float(np.abs(vals).max()) if vals.size else 0.0


def trace_preservation_residual(superop: SuperOperator) -> float:
    """|| vec(1)^T L ||: the vectorised identity must be a left null vector."""
    d = 2 ** superop.params.N
    ident = np.eye(d).reshape(-1)
    return float(np.abs(superop.matrix.T @ ident).max())


def spectrum(superop: SuperOperator) -> np.ndarray:
    """Full eigenvalue multiset (dense solve of the whole matrix)."""
    return scipy.linalg.eigvals(superop.dense(), overwrite_a=True, check_finite=False)


def parity_resolved_spectrum(superop: SuperOperator, parity: ParityMatrix | None = None,
                             tol: float = 1e-8):
    """Eigenvalues restricted to the P = +1 and P = -1 sectors.

    P is diagonal, so the projectors (1 +- P)/2 select basis indices and the
    restricted blocks are exact.  Returns ``(even, odd)``.
    """
    parity = parity or build_parity(superop.params.N)
    if commutator_norm(superop, parity) > tol:
        raise ValueError("superoperator does not commute with the parity operator")
    out = []
    for sign in (1, -1):
        idx = parity.sector(sign)
        block = superop.matrix[idx][:, idx].toarray()
        out.append(scipy.linalg.eigvals(block, overwrite_a=True, check_finite=False))
    return out[0], out[1]


def vectorize(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvectorize(vec: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vec.size)))
    return vec.reshape(d, d)


def all_up_state(N: int) -> np.ndarray:
    """Density matrix |up...up><up...up| (basis index 0, sz = +1 on every site)."""
    d = 2 ** N
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def evolve_density(superop: SuperOperator, rho0, t_list, cond_limit: float = 1e8):
    """Vectorised states e^{Lt}|rho0> for each t.

    Uses the eigen-expansion L = sum_i lambda_i |r_i><l_i| when the eigenvector
    matrix is well conditioned; otherwise falls back to matrix-exponential
    stepping between consecutive times.  Returns ``(states, method)`` with
    ``states`` of shape (len(t_list), 4^N).
    """
    v0 = vectorize(rho0) if np.ndim(rho0) == 2 else np.asarray(rho0, dtype=complex)
    d = int(round(np.sqrt(v0.size)))
    tr = np.trace(unvectorize(v0))
    if abs(tr - 1) > 1e-10:
        raise ValueError(f"initial state must have unit trace, got {tr}")
    t_list = np.asarray(t_list, dtype=float)
    L = superop.dense()
    w, vr = scipy.linalg.eig(L, check_finite=False)
    cond = np.linalg.cond(vr)
    if np.isfinite(cond) and cond < cond_limit:
        coeffs = np.linalg.solve(vr, v0)
        states = (np.exp(np.outer(t_list, w)) * coeffs) @ vr.T
        method = "eigen"
    else:
        states = np.empty((t_list.size, v0.size), dtype=complex)
        order = np.argsort(t_list)
        cur, t_cur = v0, 0.0
        for i in order:
            dt = t_list[i] - t_cur
            if dt != 0:
                cur = scipy.linalg.expm(L * dt) @ cur
                t_cur = t_list[i]
            states[i] = cur
        method = "expm"
    ident = np.eye(d).reshape(-1)
    drift = np.abs(states @ ident - 1).max()
    if drift > 1e-8:
        raise RuntimeError(f"trace not preserved during evolution (drift {drift:.2e})")
    return states, method


def expectation_series(states: np.ndarray, op) -> np.ndarray:
    """Tr[A rho(t)] for a stack of vectorised states."""
    A = op.toarray() if sp.issparse(op) else np.asarray(op)
    # Tr[A rho] = sum_mn A_nm rho_mn = vec(A^T) . vec(rho)
    return states @ vectorize(A.T)


def magnetization_series(states: np.ndarray, N: int) -> np.ndarray:
    """Tr[m^z rho(t)] for a stack of vectorised states."""
    return expectation_series(states, magnetization_operator(N))


def site_sz_series(states: np.ndarray, N: int, j: int) -> np.ndarray:
    """Tr[sz_j rho(t)] (0-based site index)."""
    return expectation_series(states, _site_op(_SZ, j, N))
