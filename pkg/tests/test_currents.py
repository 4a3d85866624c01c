import numpy as np
import pytest

from src.core.box import Box
from src.currents.pairing import (
    ZERO_WEIGHT,
    beta_edges,
    beta_pairing,
    section_zeros,
    torus_weights,
    unfolded_window,
    wrap_to,
    zero_pairing,
)
from src.currents.study import CSV_HEADER, FIXED, SCHEDULE, PairingRow, PairingTable, limit_study, power_schedule
from src.currents.testfunctions import BUMP, CONSTANT, TRIGONOMETRIC, bump, catalog, constant, trigonometric
from src.section.net import Net, generic_net
from src.section.section import build_section

TWO_POINT_K = 8 * np.pi


@pytest.fixture
def two_point_net():
    """Net {0, 1} over a window holding the zeros 0.5 + 0.5i and 0.5 + 1.0i."""
    return Net([0, 1], 0.6, (0, 0.1, 1, 1.1))


@pytest.fixture
def two_point(two_point_net):
    return build_section(two_point_net, amplitudes=[1, -1], k=TWO_POINT_K)


def test_constant_integral():
    assert constant(2.0).integral((0, 0, 2, 3)) == pytest.approx(12.0)
    assert constant(2.0)(np.array([0.1, 0.2j])).tolist() == [2.0, 2.0]


def test_trigonometric_integral_is_offset_times_area():
    psi = trigonometric((0, 0, 2, 1), kx=1, ky=2, amplitude=0.5, offset=1.0)
    assert psi.integral((0, 0, 2, 1)) == pytest.approx(2.0, abs=1e-7)
    assert float(psi(0j)) == pytest.approx(1.5)
    assert psi.c0 == pytest.approx(1.5)


def test_bump_support():
    psi = bump(0.5 + 0.5j, 0.2)
    assert float(psi(0.5 + 0.5j)) == pytest.approx(1.0)
    assert float(psi(0.8 + 0.5j)) == 0.0
    assert 0 < float(psi(0.6 + 0.5j)) < 1
    assert psi.c0 == 1.0
    assert psi.c1 > 0
    with pytest.raises(ValueError):
        bump(0, 0.0)


def test_test_function_algebra():
    total = constant(1.0) + constant(2.0)
    assert float(total(0.3j)) == pytest.approx(3.0)
    assert total.c0 == pytest.approx(3.0)
    scaled = constant(1.0).scaled(-2.0)
    assert float(scaled(0j)) == pytest.approx(-2.0)
    assert scaled.c0 == pytest.approx(2.0)


def test_catalog_names():
    assert [psi.name for psi in catalog((0, 0, 1, 1))] == [CONSTANT, BUMP, TRIGONOMETRIC]


def test_two_point_zeros(two_point):
    roots = section_zeros(two_point, two_point.net.domain)
    assert roots.total == 2
    np.testing.assert_allclose(sorted(roots.planar, key=lambda z: z.imag), [0.5 + 0.5j, 0.5 + 1.0j], atol=1e-8)


def test_two_point_zero_pairing(two_point):
    assert zero_pairing(two_point, constant()) == pytest.approx(2 * ZERO_WEIGHT)
    assert zero_pairing(two_point, constant()) == pytest.approx(4 * np.pi)


def test_zero_pairing_reuses_root_sets(two_point):
    roots = section_zeros(two_point, two_point.net.domain)
    psi = bump(0.5 + 0.5j, 0.2)
    assert zero_pairing(roots, psi) == pytest.approx(ZERO_WEIGHT)


def test_two_point_beta_pairing(two_point_net):
    edges = beta_edges(two_point_net)
    assert len(edges) == 1
    density, start, end = edges[0]
    assert density == pytest.approx(0.5)
    assert abs(end - start) == pytest.approx(1.0)
    assert beta_pairing(two_point_net, constant()) == pytest.approx(0.5)
    assert beta_pairing(two_point_net, constant()) == pytest.approx(4 * np.pi / TWO_POINT_K)


def test_torus_beta_pairing_is_the_area():
    net = generic_net((0, 0, 1, 1), 0.3, periodic=True)
    assert beta_pairing(net, constant()) == pytest.approx(1.0, rel=1e-6)


def test_power_schedule():
    assert power_schedule(0.5)(100) == pytest.approx(0.1)
    assert power_schedule()(1000) == pytest.approx(0.1)


def test_limit_study_validation():
    with pytest.raises(ValueError):
        limit_study((0, 0, 1, 1), [100, 200])
    with pytest.raises(ValueError):
        limit_study((0, 0, 1, 1), [100, 50, 200])
    with pytest.raises(ValueError):
        limit_study((0, 0, 1, 1), [100, 200, 400], epsilon=None)


def test_pairing_table_csv():
    table = PairingTable(FIXED, [PairingRow(100.0, 0.3, 12.0, 0.1, 0.02, 'constant', 1.0, 2)])
    lines = table.to_csv().splitlines()
    assert lines[0] == ','.join(CSV_HEADER)
    assert lines[1] == '100,0.3,12,0.1,0.02,constant,1,2,'
    assert table.rows[0].omega_gap == pytest.approx(0.88)


def test_consecutive_ratios():
    rows = [PairingRow(k, 0.3, 0.0, 0.0, gap, 'constant') for k, gap in [(100.0, 0.4), (200.0, 0.2), (400.0, 0.05)]]
    table = PairingTable(FIXED, rows)
    assert table.consecutive_ratios('constant') == pytest.approx([0.5, 0.25])
    assert table.psi_names == ['constant']


@pytest.fixture(scope='module')
def torus_net():
    return generic_net((0, 0, 1, 1), 0.3, periodic=True)


def test_torus_weights_partition_unity(rng):
    domain = Box.planar(0, 0, 1, 2)
    z = rng.uniform(-1, 2, 200) + 1j * rng.uniform(-1, 3, 200)
    total = sum(
        torus_weights(z + a + 2j * b, domain) for a in range(-2, 3) for b in range(-2, 3)
    )
    np.testing.assert_allclose(total, 1.0, atol=1e-12)
    assert np.all(torus_weights(np.array([-0.6 + 1j, 0.5 + 3.1j, 1.6 + 0.5j]), domain) == 0)
    assert unfolded_window(domain) == Box.planar(-0.5, -1, 1.5, 3)
    with pytest.raises(ValueError):
        torus_weights(z, domain, band=0.75)


def test_wrap_to_domain():
    np.testing.assert_allclose(wrap_to(np.array([1.25 - 0.5j, -0.25 + 2.5j]), (0, 0, 1, 2)), [0.25 + 1.5j, 0.75 + 0.5j])


def test_torus_zero_pairing_matches_the_area(torus_net):
    spec = build_section(torus_net, k=100)
    assert zero_pairing(spec, constant()) / 100 == pytest.approx(1.0, abs=0.01)


def test_pairings_are_linear_and_positive(torus_net):
    domain = torus_net.domain
    spec = build_section(torus_net, k=100)
    roots = section_zeros(spec, unfolded_window(domain))
    first, second = bump(0.4 + 0.6j, 0.3), trigonometric(domain)
    total = first + second

    def zero(psi):
        return zero_pairing(roots, psi, domain, periodic=True)

    assert zero(total) == pytest.approx(zero(first) + zero(second), rel=1e-9)
    assert beta_pairing(torus_net, total) == pytest.approx(
        beta_pairing(torus_net, first) + beta_pairing(torus_net, second), rel=1e-9
    )
    assert zero(first) >= 0
    assert beta_pairing(torus_net, first) >= 0
    assert zero(constant(0.0)) == 0.0
    assert beta_pairing(torus_net, constant(0.0)) == 0.0


@pytest.mark.slow
def test_fixed_epsilon_torus_study_converges_to_beta():
    table = limit_study((0, 0, 1, 1), [100, 200, 400], epsilon=0.3, periodic=True, workers=1)
    assert table.mode == FIXED
    assert len(table) == 9
    assert table.psi_names == [CONSTANT, BUMP, TRIGONOMETRIC]
    for row in table.for_psi(CONSTANT):
        assert row.error == ''
        assert row.beta_pairing == pytest.approx(1.0, rel=0.02)
        assert row.zero_count > 0
    assert all(ratio <= 0.75 for ratio in table.consecutive_ratios(CONSTANT))
    for name in table.psi_names:
        gaps = [row.gap_over_k for row in table.for_psi(name)]
        assert gaps[0] > gaps[1] > gaps[2], name


@pytest.mark.slow
def test_shrinking_epsilon_study_approaches_the_area_form():
    table = limit_study((0, 0, 1, 1), [100, 200, 400], schedule=1 / 3, periodic=True, workers=1)
    assert table.mode == SCHEDULE
    for name in table.psi_names:
        rows = table.for_psi(name)
        assert [row.epsilon for row in rows] == pytest.approx([100 ** (-1 / 3), 200 ** (-1 / 3), 400 ** (-1 / 3)])
        gaps = [row.omega_gap for row in rows]
        assert gaps[0] > gaps[1] > gaps[2], name
