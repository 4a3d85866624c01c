import numpy as np
import pytest

from src.core.box import Box
from src.pencil.singular import SingularSet, find_pencil_singular, wronskian
from src.pencil.spec import (
    INFINITY,
    ROOT,
    ExtendedComplex,
    PencilSpec,
    pencil_sum,
    swap_ends,
    t_samples,
    tau_skeleton_sum,
    tree_coordinate,
)
from src.pencil.verify import vertex_gap, verify_pencil
from src.solve.winding import VALUE, count_winding

PHASES = 2 * np.pi * np.arange(3) / 3


@pytest.fixture
def pencil():
    """Exponents 0, 1, 2i; μ_0 rotates term j by e^{2πij/3}, μ_∞ = 1 + e^z + e^{2iz}."""
    return PencilSpec.build([0, 1, 2j], 1j * PHASES, np.zeros(3))


def test_extended_complex():
    assert ExtendedComplex.of('inf') is INFINITY
    assert ExtendedComplex.of(float('inf')).infinite
    assert ExtendedComplex.of('1+2j').value == 1 + 2j
    assert ExtendedComplex.of(0).inverse() is INFINITY
    assert INFINITY.inverse().value == 0
    with pytest.raises(ValueError):
        ExtendedComplex.of(complex(np.nan, 0))


def test_build_derives_legs_and_radius(pencil):
    assert pencil.legs == ((0,), (1,), (2,))
    assert pencil.separation == pytest.approx(2 * np.pi / 3)
    assert pencil.r0 == pytest.approx(np.sqrt(3) / 2)
    np.testing.assert_allclose(pencil.leg_centers, -np.exp(1j * PHASES))


def test_build_validation():
    with pytest.raises(ValueError):
        PencilSpec.build([0, 1], [1.0, 0], [0, 0])
    with pytest.raises(ValueError):
        PencilSpec.build([0, 0], [0, 1j], [0, 0])
    with pytest.raises(ValueError):
        PencilSpec.build([0, 1, 2j], 1j * PHASES, np.zeros(3), r0=1.0)
    with pytest.raises(ValueError):
        PencilSpec.build([0, 1], [0, 1j], [0, 0], section=True)


def test_section_pencil_groups_legs():
    p = PencilSpec.build([0, 1, 2, 3], [0, 0, 1j * np.pi, 1j * np.pi], np.zeros(4), section=True, N=2)
    assert p.legs == ((0, 1), (2, 3))
    assert p.leg_of(3) == 1


def test_pencil_sum_cancellation(pencil):
    member = pencil_sum(pencil, -1.0)
    assert member.dropped == (0,)
    assert member.flagged
    assert member.sum.size == 2

    at_zero = pencil_sum(pencil, 0)
    np.testing.assert_allclose(np.exp(at_zero.sum.alphas), np.exp(pencil.alpha0), atol=1e-12)
    assert pencil_sum(pencil, 'inf').sum.size == 3


def test_tree_coordinate(pencil):
    near = tree_coordinate(pencil, -1 + 0.1)
    assert near.leg == 0
    assert near.tau == pytest.approx(np.log(0.1 / pencil.r0))
    assert tree_coordinate(pencil, -1.0).at_limit
    assert tree_coordinate(pencil, 0) == ROOT
    assert tree_coordinate(pencil, INFINITY) == ROOT


def test_tau_skeleton_sum(pencil):
    assert tau_skeleton_sum(pencil, ROOT).size == 3
    limit = tree_coordinate(pencil, -1.0)
    assert tau_skeleton_sum(pencil, limit).size == 2


def test_t_samples():
    ts = t_samples(64)
    assert len(ts) == 62
    assert ts[0].value == 0 and ts[-1] is INFINITY


def test_spread_and_containment_constant(pencil):
    assert pencil.spread(0) == pytest.approx(0.0, abs=1e-12)
    assert pencil.containment_constant([0, INFINITY]) == pytest.approx(np.log(2))


def test_swap_ends(pencil):
    swapped = swap_ends(pencil)
    np.testing.assert_allclose(swapped.rho, np.conj(pencil.rho))


def test_two_term_wronskian_has_no_zeros():
    p = PencilSpec.build([0, 1], [0, 0.5j * np.pi], [0, 0])
    w = wronskian(p)
    assert w.size == 1
    # (1 − ρ_1/ρ_0)e^z with ρ_1 = i
    assert np.exp(w.alphas[0]) == pytest.approx(1 - 1j)
    singular = find_pencil_singular(p, Box.planar(-2, -2, 2, 2))
    assert len(singular) == 0


def test_equal_ratios_have_identically_zero_wronskian():
    p = PencilSpec.build([0, 1], [0.3j, 0.3j], [0, 0])
    assert wronskian(p) is None
    assert len(find_pencil_singular(p, Box.planar(-1, -1, 1, 1))) == 0


def test_singular_points_are_critical_zeros(pencil):
    singular = find_pencil_singular(pencil, Box.planar(-6, -6, 6, 6))
    assert len(singular) >= 1
    assert singular.total_multiplicity >= len(singular)
    mu0, muinf = pencil.mu0, pencil.muinf
    for point in singular.points:
        _, v0, g0, _ = mu0.log_jet([point.z], order=1)
        _, vi, gi, _ = muinf.log_jet([point.z], order=1)
        # μ_0 and μ_∞ share b(z), so the Wronskian is v0·gi − g0·vi up to e^{2b}
        assert abs(v0[0] * gi[0, 0] - g0[0, 0] * vi[0]) < 1e-8
        if not point.t.infinite:
            assert abs(v0[0] + point.t.value * vi[0]) <= 1e-9 * (abs(v0[0]) + abs(vi[0]))


def test_singular_set_is_planar_only():
    p = PencilSpec.build([[0, 0], [1, 0]], [0, 1j], [0, 0])
    with pytest.raises(ValueError):
        find_pencil_singular(p, Box((-1, -1, -1, -1), (1, 1, 1, 1)))


def test_vertex_gap(pencil):
    root_sum = tau_skeleton_sum(pencil, ROOT)
    assert vertex_gap(root_sum, 0) == pytest.approx(0.0)
    assert vertex_gap(root_sum, 1.0) == pytest.approx(1.0)


def test_verify_pencil_fibers_and_base_locus(pencil):
    report = verify_pencil(pencil, Box.planar(-3, -3, 3, 3), t_values=t_samples(32), workers=1)
    assert report.c == pytest.approx(report.containment_constant)
    assert report.c >= np.log(2)
    assert report.fiber_ok
    assert report.vertex_ok
    assert any(f.zero_count > 0 for f in report.fibers)
    assert all(np.isfinite(s.c_needed) for s in report.singular)


def test_verify_pencil_reuses_a_known_singular_set(pencil):
    window = Box.planar(-3, -3, 3, 3)
    singular = find_pencil_singular(pencil, window)
    fresh = verify_pencil(pencil, window, t_values=t_samples(8), workers=1)
    reused = verify_pencil(pencil, window, t_values=t_samples(8), workers=1, singular=singular)
    assert [s.z for s in reused.singular] == [s.z for s in fresh.singular]
    empty = verify_pencil(pencil, window, t_values=t_samples(8), workers=1, singular=SingularSet())
    assert empty.singular == []


def _random_pencil(rng):
    size = int(rng.integers(3, 6))
    exponents = rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)
    phases = 2 * np.pi * (np.arange(size) + rng.uniform(-0.2, 0.2, size)) / size
    return PencilSpec.build(exponents, 1j * phases, np.zeros(size))


def test_singular_count_matches_wronskian_winding(rng):
    window = Box.planar(-4, -4, 4, 4)
    for _ in range(20):
        p = _random_pencil(rng)
        singular = find_pencil_singular(p, window)
        assert singular.total_multiplicity == count_winding(wronskian(p), VALUE, window)


@pytest.mark.slow
def test_fibers_of_random_pencils_stay_near_the_tree(rng):
    window = Box.planar(-3, -3, 3, 3)
    ts = t_samples(64)
    for _ in range(5):
        p = _random_pencil(rng)
        report = verify_pencil(p, window, t_values=ts, c=p.containment_constant(ts) + 0.1, workers=1)
        assert report.fiber_ok
        assert report.vertex_ok is not False
        tight = [t for t in ts if p.spread(t) < 0.05]
        assert tight
        literal = verify_pencil(p, window, t_values=tight, c=np.log(p.size - 1) + 0.1, workers=1)
        assert literal.fiber_ok
