import numpy as np
import pytest
import scipy.linalg

from boundary_ising import oracle_ed as O
from boundary_ising import spectrum as S
from boundary_ising.matching import pairing_error
from boundary_ising.model import ModelParams, ParameterError

from conftest import sym


def test_hamiltonian_is_hermitian():
    H = O.hamiltonian(ModelParams(N=4, h=(0.3, 1.1, 2.0, 0.7), J=1.3)).toarray()
    assert np.allclose(H, H.conj().T)


def test_two_site_hamiltonian_explicit():
    sx = np.array([[0, 1], [1, 0]])
    sz = np.diag([1, -1])
    I = np.eye(2)
    ref = -0.7 * np.kron(sx, sx) - 0.4 * (np.kron(sz, I) + np.kron(I, sz))
    assert np.allclose(O.hamiltonian(ModelParams(N=2, h=0.4, J=0.7)).toarray(), ref)


def test_row_major_vectorization_identity(rng):
    A, B, rho = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    lhs = O.vectorize(A @ rho @ B)
    rhs = np.kron(A, B.T) @ O.vectorize(rho)
    assert np.allclose(lhs, rhs)
    assert np.allclose(O.unvectorize(O.vectorize(rho)), rho)


def test_superoperator_matches_direct_lindblad(rng):
    p = ModelParams(N=3, h=0.8, gammaL=0.4, gammaR=1.5, J=1.2)
    L = O.build_superoperator(p).dense()
    H = O.hamiltonian(p).toarray()
    jumps = [j.toarray() for j in O.jump_operators(p)]
    rho = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    drho = -1j * (H @ rho - rho @ H)
    for Lk in jumps:
        LdL = Lk.conj().T @ Lk
        drho += Lk @ rho @ Lk.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    assert np.allclose(O.unvectorize(L @ O.vectorize(rho)), drho)


@pytest.mark.parametrize("h,g", [(0.3, 0.2), (3.0, 5.0)])
def test_spin_form_equals_lindblad_form(h, g):
    p = sym(3, h, g)
    a = O.build_superoperator(p).dense()
    b = O.build_superoperator_spin_form(p).dense()
    assert np.abs(a - b).max() < 1e-12


def test_trace_preservation_and_parity():
    p = ModelParams(N=4, h=(0.5, 1.0, 1.5, 2.0), gammaL=0.3, gammaR=0.9)
    L = O.build_superoperator(p)
    assert O.trace_preservation_residual(L) < 1e-12
    assert O.commutator_norm(L, O.build_parity(4)) < 1e-12


def test_parity_diagonal_is_popcount_sign():
    P = O.build_parity(2)
    assert list(P.diagonal) == [1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1]
    assert P.sector(1).size == P.sector(-1).size == 8


def test_steady_state_eigenvalue_present():
    lam = O.spectrum(O.build_superoperator(sym(3, 0.3, 0.2)))
    assert np.min(np.abs(lam)) < 1e-10
    assert lam.real.max() < 1e-10


def test_parity_resolved_union_is_full_spectrum():
    L = O.build_superoperator(sym(3, 3.0, 5.0))
    e, o = O.parity_resolved_spectrum(L)
    assert pairing_error(np.concatenate([e, o]), O.spectrum(L)) < 1e-9


def test_ed_gap_frozen():
    # frozen from a dense diagonalisation of the 64 x 64 superoperator
    lam = O.spectrum(O.build_superoperator(sym(3, 0.3, 0.2)))
    lam = lam[np.abs(lam) > 1e-10]
    assert -lam.real.max() == pytest.approx(0.021279680753735722, rel=1e-9)


def test_size_limit():
    with pytest.raises(ParameterError):
        O.build_superoperator(sym(O.N_MAX_ED + 1, 1.0, 1.0))


def test_evolution_matches_expm():
    p = sym(2, 0.7, 0.4)
    L = O.build_superoperator(p)
    t = np.array([0.0, 0.5, 2.0])
    states, method = O.evolve_density(L, O.all_up_state(2), t)
    v0 = O.vectorize(O.all_up_state(2))
    for ti, s in zip(t, states):
        assert np.allclose(s, scipy.linalg.expm(L.dense() * ti) @ v0)
    assert method in ("eigen", "expm")


def test_all_up_magnetization_is_one():
    states, _ = O.evolve_density(O.build_superoperator(sym(3, 1.0, 1.0)), O.all_up_state(3), [0.0])
    assert O.magnetization_series(states, 3)[0] == pytest.approx(1.0)


def test_closed_chain_spectrum_is_imaginary():
    lam = O.spectrum(O.build_superoperator(sym(3, 1.0, 0.0)))
    assert np.abs(lam.real).max() < 1e-10


def test_assembly_matches_ed_small():
    for N in (2, 3):
        p = ModelParams(N=N, h=0.9, gammaL=0.3, gammaR=1.7, J=0.8)
        e, o = O.parity_resolved_spectrum(O.build_superoperator(p))
        asm = S.from_params(p)
        assert pairing_error(asm.even, e) < 1e-9
        assert pairing_error(asm.odd, o) < 1e-9
