import numpy as np
import pytest

from boundary_ising import gap as G
from boundary_ising import oracle_ed as O
from boundary_ising.model import ModelParams, ParameterError

from conftest import FOUR_POINTS, sym


@pytest.mark.parametrize("N", [2, 3, 4, 5])
@pytest.mark.parametrize("h,g", FOUR_POINTS)
def test_exact_gap_equals_ed(N, h, g):
    p = sym(N, h, g)
    e, o = O.parity_resolved_spectrum(O.build_superoperator(p))
    lam = np.concatenate([e, o])
    ed = -lam.real[np.abs(lam) > 1e-10].max()
    assert G.gap_exact(p).delta_g == pytest.approx(ed, abs=1e-8)
    if N >= 4:
        # long enough chains relax slowest through the even channel
        assert -o.real.max() > ed
        assert G.gap_exact(p).diagnostics["channel"] == "even"


def test_short_strongly_damped_chain_relaxes_through_odd_channel():
    r = G.gap_exact(sym(2, 3.0, 5.0))
    assert r.diagnostics["channel"] == "odd"
    assert r.diagnostics["even_candidate"] == pytest.approx(7.309089614344877, rel=1e-9)
    assert r.delta_g == pytest.approx(5.4210667675651925, rel=1e-9)


def test_exact_gap_matches_full_spectrum():
    p = sym(6, 0.3, 0.2)
    assert G.gap_exact(p).delta_g == pytest.approx(G.gap_full_spectrum(p).delta_g, abs=1e-8)


def test_k_pair_choice_irrelevant():
    r = G.gap_exact(sym(20, 0.3, 0.2))
    a, b = r.modes
    assert a.imag == pytest.approx(b.imag, rel=1e-9)
    assert r.delta_g == pytest.approx(4 * a.imag, rel=1e-9)
    assert b == pytest.approx(-np.conj(a), rel=1e-8)


def test_routes_agree():
    p = sym(40, 1.0, 0.3)
    assert G.gap_exact(p, "rapidity").delta_g == pytest.approx(G.gap_exact(p).delta_g, rel=1e-6)


def test_frozen_values():
    assert G.gap_exact(sym(50, 1.0, 0.01)).delta_g == pytest.approx(1.5320562517562597e-06, rel=1e-7)
    assert G.gap_exact(sym(100, 0.3, 0.2)).delta_g == pytest.approx(8.033485305139852e-07, rel=1e-7)


def test_closed_system_rejected():
    with pytest.raises(ParameterError):
        G.gap_exact(sym(6, 1.0, 0.0))


def test_seeds_at_unit_field():
    N = 10
    assert G.weak_theta0(N, 1.0) == pytest.approx(2 * np.pi / (2 * N + 1))
    assert G.strong_theta0(N, 1.0) == pytest.approx(2 * np.pi / (2 * N - 1))


@pytest.mark.parametrize("g,fn", [(0.01, G.gap_perturbative_weak), (100.0, G.gap_perturbative_strong)])
def test_perturbative_vs_exact(g, fn):
    p = sym(50, 1.0, g)
    assert fn(p).delta_g == pytest.approx(G.gap_exact(p).delta_g, rel=0.05)


@pytest.mark.parametrize("h", [0.3, 3.0])
def test_perturbative_limits_converge(h):
    ratios_w, ratios_s = [], []
    for g in (1e-1, 1e-2, 1e-3):
        p = sym(40, h, g)
        ratios_w.append(abs(G.gap_exact(p).delta_g / G.gap_perturbative_weak(p).delta_g - 1))
        q = sym(40, h, 1 / g)
        ratios_s.append(abs(G.gap_exact(q).delta_g / G.gap_perturbative_strong(q).delta_g - 1))
    for r in (ratios_w, ratios_s):
        assert r[0] > r[1] > r[2] and r[2] < 1e-4


@pytest.mark.parametrize("g", [0.01, 100.0])
def test_n_cubed_scaling(g):
    Ns = [32, 64, 128, 256]
    gaps = [G.gap_exact(sym(N, 1.0, g)).delta_g for N in Ns]
    assert G.loglog_slope(Ns, gaps) == pytest.approx(-3, abs=0.1)


def test_general_coupling_rescaling():
    a = G.gap_perturbative_weak(ModelParams.symmetric(30, 2.0, 0.02, J=2.0)).delta_g
    b = G.gap_perturbative_weak(ModelParams.symmetric(30, 1.0, 0.01, J=1.0)).delta_g
    assert a == pytest.approx(2 * b)


def test_duality_scan():
    rows = G.duality_scan(0.3, [1.0, 0.2, 5.0], 100)
    assert rows[0]["mismatch"] == 0.0
    assert all(r["mismatch"] < 0.05 for r in rows)
    m50 = G.duality_scan(3.0, [0.2], 50)[0]["mismatch"]
    m200 = G.duality_scan(3.0, [0.2], 200)[0]["mismatch"]
    assert m200 < m50


@pytest.mark.parametrize("h", [0.3, 3.0])
def test_gap_rises_then_falls(h):
    gs = np.geomspace(0.1, 10, 30)
    d = np.diff(G.gap_scan(h, gs, 100))
    assert np.all(d[gs[1:] < 1] > 0)
    assert np.all(d[gs[:-1] > 1] < 0)
