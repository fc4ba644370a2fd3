import numpy as np
import pytest

from boundary_ising import phase as P
from boundary_ising import rapidity as R
from boundary_ising.phase import SpectrumStructure as SS

from conftest import sym


def test_x_closed_form_example():
    xp, xm = P.bound_state_x(0.5, 1.0)
    assert xp == pytest.approx(2 + np.sqrt(3))
    assert xm == pytest.approx(2 - np.sqrt(3))


@pytest.mark.parametrize("h,g", [(0.5, 1.0), (0.3, 0.2), (3.0, 8.0), (3.0, 5.0), (7.0, 0.4)])
def test_product_identity(h, g):
    xp, xm = P.bound_state_x(h, g)
    assert xp * xm == pytest.approx(g * g)  # = ((1+g^2)^2 - disc) / 4h^2


def test_double_root_on_critical_line():
    g = 3.0
    xp, xm = P.bound_state_x(P.critical_field(g), g)
    assert xp == pytest.approx(xm)


def test_complex_roots_beyond_critical_field():
    xp, xm = P.bound_state_x(3.0, 5.0)
    assert xp.imag != 0 and xp == pytest.approx(np.conj(xm))


@pytest.mark.parametrize("h,g,s", [
    (0.3, 0.2, SS.ThreeSegment), (3.0, 5.0, SS.FiveSegment), (3.0, 8.0, SS.NineSegment),
    (3.0, 0.2, SS.OneSegment), (0.5, 4.0, SS.ThreeSegment), (1.2, 2.0, SS.NineSegment),
])
def test_classify_region(h, g, s):
    rc = P.classify_region(h, g)
    assert rc.structure is s and not rc.on_boundary


def test_boundary_points_flagged():
    assert P.classify_region(1.0, 3.0).on_boundary
    assert P.classify_region(1.0, 3.0).structure is SS.ThreeSegment
    assert P.classify_region(2.0, 1.0).on_boundary
    rc = P.classify_region(P.critical_field(4.0), 4.0)
    assert rc.on_boundary and rc.structure is SS.NineSegment


def test_segment_counts():
    assert [s.n_segments for s in SS] == [1, 3, 5, 9]


def test_theta_I_values():
    for h in (0.2, 0.5, 0.9):
        assert P.bound_state_theta_I(h, 1.0) == [pytest.approx(np.arccosh(1 / h))]
    assert len(P.bound_state_theta_I(0.3, 0.2)) == 1
    assert len(P.bound_state_theta_I(3.0, 8.0)) == 2
    assert P.bound_state_theta_I(3.0, 0.2) == []
    assert P.bound_state_theta_I(3.0, 5.0) == []


def test_finite_size_theta_I_converges():
    h, g = 0.9, 0.5  # shallow bound state, so finite-size effects are visible
    ref = P.bound_state_theta_I(h, g)[0]
    errs = []
    for N in (25, 50, 100, 200):
        spec = R.solve_odd_channel(sym(N, h, g))
        ti = [abs(m.theta.imag) for m in spec.modes if m.is_pure_imaginary_E]
        errs.append(min(abs(t - ref) for t in ti))
    assert all(b <= max(a, 1e-12) for a, b in zip(errs, errs[1:]))
    assert errs[0] > 1e-6 and errs[-1] < 1e-10


def test_numeric_agreement_coarse_grid():
    hs, gs = P.default_grid(7)
    agree = total = 0
    for h in hs:
        for g in gs:
            rc = P.classify_region(h, g)
            if rc.distance <= 0.05:
                continue
            total += 1
            agree += P.numeric_structure(h, g, 60) is rc.structure
    assert agree == total


def test_duality_of_one_and_three_regions():
    for h in (0.3, 0.7):
        for g in (0.2, 0.5):
            assert P.classify_region(h, g).structure is P.classify_region(h, 1 / g).structure is SS.ThreeSegment
    # one-segment region has no gamma -> 1/gamma image
    assert P.classify_region(3.0, 0.2).structure is SS.OneSegment
    assert P.classify_region(3.0, 5.0).structure is SS.FiveSegment


def test_rejects_nonpositive():
    with pytest.raises(ValueError):
        P.classify_region(0.0, 1.0)
