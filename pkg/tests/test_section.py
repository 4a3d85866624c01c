import numpy as np
import pytest

from src.core.box import Box
from src.core.expsum import evaluate_jet
from src.pencil.spec import PencilSpec, pencil_sum
from src.section.clusters import ClusterSet, c1_datum, detect_clusters
from src.section.coloring import Coloring, color_and_pencil, greedy_coloring
from src.section.local import local_model, pencil_local_model
from src.section.net import Net, generic_net, greedy_net
from src.section.section import build_section, error_scale, section_skeleton
from src.section.surgery import SectionField, ball_grid, field_zeros, perturb_pencil, perturb_section, smooth_step
from src.section.voronoi import voronoi_adjacency, voronoi_geometry, voronoi_segments
from src.currents.pairing import section_zeros

# k = 16 ln 2 turns the section of the net {0, 0.5, 1} into (1 + u/4)² with u = e^{kz/4}
TRIPLE_K = 16 * np.log(2)
DOUBLE_ZERO_Y = np.pi / (4 * np.log(2))


@pytest.fixture
def triple_net():
    return Net([0, 0.5, 1], 0.75, (-0.5, -2, 1.5, 2))


@pytest.fixture
def triple(triple_net):
    return build_section(triple_net, k=TRIPLE_K)


@pytest.fixture
def triple_clusters(triple):
    return detect_clusters(triple, C3=0.05, R1=0.5, grid_density=200)


def test_net_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        Net([0, 1], 0.0, (0, 0, 1, 1))


def test_periodic_net_uses_minimum_image():
    net = Net([0.1, 0.9], 0.3, (0, 0, 1, 1), periodic=True)
    assert net.min_separation() == pytest.approx(0.2)
    assert complex(net.wrap(1.2 - 0.1j)) == pytest.approx(0.2 + 0.9j)


def test_non_periodic_replication_is_identity(triple_net):
    positions, sources = triple_net.replicated(5.0)
    assert positions.tolist() == [0, 0.5, 1]
    assert sources.tolist() == [0, 1, 2]


def test_generic_net_guarantees():
    net = generic_net((0, 0, 1.5, 1.5), 0.3, c1=0.2, seed=1)
    assert net.size > 4
    assert net.min_separation() > (1 - 0.2) * 0.3
    assert net.cover_radius() <= 0.3
    assert net.cell_bounds_ok()
    assert np.all(net.domain.contains(net.points[:, None]))


def test_generic_net_validation():
    with pytest.raises(ValueError):
        generic_net((0, 0, 1, 1), 0.3, c1=0.5)
    with pytest.raises(ValueError):
        generic_net((0, 0, 1, 1), -0.3)


def test_build_section_terms(triple):
    np.testing.assert_allclose(triple.global_sum.alphas, [0, -np.log(2), -4 * np.log(2)], atol=1e-12)
    np.testing.assert_allclose(triple.global_sum.exponents[:, 0], [0, 4 * np.log(2), 8 * np.log(2)], atol=1e-12)
    assert triple.scale == pytest.approx(0.75 * TRIPLE_K)


def test_build_section_validation(triple_net):
    with pytest.raises(ValueError):
        build_section(triple_net, k=0)
    with pytest.raises(ValueError):
        build_section(triple_net, amplitudes=[1, 1])
    with pytest.raises(ValueError):
        build_section(triple_net, amplitudes=[1, 2, 1])


def test_section_log_modulus_includes_gaussian_frame(triple):
    z = 0.2 + 0.3j
    expected = np.log(abs((1 + np.exp(TRIPLE_K * z / 4) / 4) ** 2)) - TRIPLE_K * abs(z) ** 2 / 4
    assert triple.log_modulus(z)[0] == pytest.approx(expected)


def test_error_scale():
    assert error_scale(0.1, 1000) == pytest.approx(0.1)
    assert error_scale(0.1, 50) == pytest.approx(np.exp(-0.5))
    assert error_scale(0.5, 2, c=10) == pytest.approx(1.0)


def test_section_skeleton_is_the_voronoi_diagram(triple):
    skeleton = section_skeleton(triple)
    assert len(skeleton.edges) == 2
    xs = sorted(round(e.midpoint.real, 6) for e in skeleton.edges)
    assert xs == [0.25, 0.75]


def test_voronoi_segments_two_sites():
    segments = voronoi_segments([0, 1], Box.planar(-1, -1, 2, 1))
    assert len(segments) == 1
    (pair, start, end), = segments
    assert pair == (0, 1)
    assert start.real == pytest.approx(0.5)
    assert end.real == pytest.approx(0.5)
    assert abs(end - start) == pytest.approx(2.0)


def test_voronoi_segments_triangle_meet_at_circumcenter():
    segments = voronoi_segments([0, 2, 1 + 2j], Box.planar(-1, -1, 3, 3))
    assert sorted(pair for pair, _, _ in segments) == [(0, 1), (0, 2), (1, 2)]
    ends = np.array([p for _, s, e in segments for p in (s, e)])
    assert np.sum(np.abs(ends - (1 + 0.75j)) < 1e-9) == 3


def test_voronoi_adjacency():
    assert voronoi_adjacency([0, 2, 1 + 2j]) == {(0, 1), (0, 2), (1, 2)}
    assert voronoi_adjacency([0, 1, 2, 3]) == {(0, 1), (1, 2), (2, 3)}
    assert voronoi_adjacency([0, 1, 2], sources=[0, 1, 0]) == {(0, 1)}
    assert voronoi_adjacency([0]) == set()


def test_greedy_coloring_of_a_square_cycle():
    pairs = {(0, 1), (1, 2), (2, 3), (0, 3)}
    coloring = Coloring(greedy_coloring(4, pairs), tuple(sorted(pairs)))
    assert coloring.proper()
    assert coloring.N == 2
    assert coloring.max_degree == 2
    assert coloring.groups == [[0, 2], [1, 3]]


def test_color_and_pencil(triple):
    coloring, pencil = color_and_pencil(triple)
    assert coloring.proper()
    assert coloring.N == 2
    assert pencil.section
    assert pencil.N == 2
    np.testing.assert_allclose(pencil.alphainf, triple.global_sum.alphas)
    colors = np.asarray(coloring.colors)
    np.testing.assert_allclose(
        np.exp(1j * (pencil.alpha0.imag - pencil.alphainf.imag)), -np.exp(1j * np.pi * colors)
    )


def test_c1_datum_vanishes_at_double_zero(triple):
    assert c1_datum(triple, 0.5 + 1j * DOUBLE_ZERO_Y)[0] < 1e-9
    assert c1_datum(triple, 0.0)[0] > 0.05


def test_detect_clusters_at_double_zeros(triple_clusters):
    assert len(triple_clusters) == 2
    assert not triple_clusters.flagged
    assert triple_clusters.disjoint()
    centers = sorted(triple_clusters.centers, key=lambda c: c.imag)
    assert centers[0] == pytest.approx(0.5 - 1j * DOUBLE_ZERO_Y, abs=0.03)
    assert centers[1] == pytest.approx(0.5 + 1j * DOUBLE_ZERO_Y, abs=0.03)
    assert triple_clusters.C4 == pytest.approx(0.0025)


def test_detect_clusters_validation(triple):
    assert len(detect_clusters(triple, C3=0.0)) == 0
    with pytest.raises(ValueError):
        detect_clusters(triple, R1=0.0)


def test_section_zeros_double(triple):
    roots = section_zeros(triple, triple.net.domain)
    assert roots.total == 4
    assert sorted(r.multiplicity for r in roots) == [2, 2]
    for r in roots:
        assert abs(r.z.real - 0.5) < 1e-3
        assert abs(abs(r.z.imag) - DOUBLE_ZERO_Y) < 1e-3


def test_field_without_clusters_is_the_section(triple):
    field = SectionField.of(triple, ClusterSet())
    z = np.array([0.1 + 0.2j, 0.6 - 1.0j])
    np.testing.assert_allclose(field.datum(z), c1_datum(triple, z))
    np.testing.assert_allclose(field.log_modulus(z), triple.log_modulus(z))


def test_perturb_section_clears_clusters(triple, triple_clusters):
    result = perturb_section(triple, triple_clusters, seed=0)
    assert len(result.eps_hat) == 2
    assert result.min_margin >= triple_clusters.C4
    np.testing.assert_allclose(np.abs(result.eps_hat), 0.1 * 0.05)


def test_surgered_field_is_unchanged_away_from_clusters(triple, triple_clusters):
    s_hat = perturb_section(triple, triple_clusters, seed=0).s_hat
    z = np.array([0.25, 0.25 + 0.4j, 0.25 - 0.4j, 1.25 + 0.1j])
    assert not np.any(s_hat.touched(z))
    b, value, d, dbar = s_hat.jet(z)
    b0, value0, gradient0, _ = triple.global_sum.log_jet(z, order=1)
    np.testing.assert_allclose(b, b0)
    np.testing.assert_allclose(value, value0)
    np.testing.assert_allclose(d, gradient0[:, 0])
    assert np.all(dbar == 0)


def test_surgery_splits_double_zeros(triple, triple_clusters):
    s_hat = perturb_section(triple, triple_clusters, seed=0).s_hat
    roots = field_zeros(s_hat, triple.net.domain, grid_density=200)
    assert roots.total == 4
    assert all(r.multiplicity == 1 for r in roots)


def test_local_model_frame_identity(triple):
    p, w = 0.5 + 0.3j, 0.7 - 0.4j
    model = local_model(triple, p)
    z = p + w / triple.scale
    lhs = evaluate_jet(triple.global_sum, z)[0]
    frame = np.exp(TRIPLE_K * abs(p) ** 2 / 4 + np.conj(p) * w / (2 * 0.75))
    assert lhs == pytest.approx(frame * evaluate_jet(model.full, w)[0])


def test_local_model_of_small_net_is_exact(triple):
    model = local_model(triple, 0.5 + 1j * DOUBLE_ZERO_Y)
    assert model.indices == (0, 1, 2)
    assert model.size == 3
    assert model.error_sup == 0.0
    assert model.shift == 0
    assert model.strict is None
    assert model.error_scale == pytest.approx(0.75)


def test_local_model_far_from_net(triple):
    with pytest.raises(ValueError):
        local_model(triple, 10 + 10j)


def test_smooth_step():
    value, slope = smooth_step(np.array([0.0, 1.0, 1.5, 2.0, 3.0]), 1.0, 2.0)
    np.testing.assert_allclose(value, [1, 1, 0.5, 0, 0], atol=1e-12)
    assert slope[2] == pytest.approx(-2.0)
    assert slope[0] == 0 and slope[4] == 0


def test_greedy_net_separation_exceeds_epsilon():
    net = greedy_net((0, 0, 1, 1), 0.25, seed=3)
    assert net.min_separation() > 0.25
    assert net.cover_radius() <= 0.25


def test_pencil_local_model_drops_cancelled_terms(triple):
    _, pencil = color_and_pencil(triple)
    # the middle point has ρ = −1, so its coefficient cancels at t = 1
    model = pencil_local_model(triple, pencil, 1.0, 0.5)
    assert model.indices == (0, 2)
    assert model.error_sup == 0.0


def test_pencil_local_model_frame_identity(triple):
    _, pencil = color_and_pencil(triple)
    p, w, t = 0.5 + 0.3j, 0.7 - 0.4j, 0.5
    model = pencil_local_model(triple, pencil, t, p)
    assert model.indices == (0, 1, 2)
    lhs = evaluate_jet(pencil_sum(pencil, t).sum, p + w / triple.scale)[0]
    frame = np.exp(TRIPLE_K * abs(p) ** 2 / 4 + np.conj(p) * w / (2 * 0.75))
    assert lhs == pytest.approx(frame * evaluate_jet(model.full, w)[0])


def test_pencil_local_model_needs_matching_pencil(triple):
    other = PencilSpec.build([0, 1], [0, 1j * np.pi], [0, 0])
    with pytest.raises(ValueError):
        pencil_local_model(triple, other, 0.5, 0.5)


def test_perturb_pencil_interpolates_eps_hat(triple, triple_clusters):
    _, pencil = color_and_pencil(triple)
    eps0, epsinf = [0.001, 0.002], [0.001j, 0]
    field = perturb_pencil(triple, pencil, triple_clusters, 2.0, eps_hat0=eps0, eps_hatinf=epsinf)
    np.testing.assert_allclose(field.eps_hat, [0.001 + 0.002j, 0.002])
    at_infinity = perturb_pencil(triple, pencil, triple_clusters, 'inf', eps_hat0=eps0, eps_hatinf=epsinf)
    np.testing.assert_allclose(at_infinity.eps_hat, epsinf)


def test_perturbed_pencil_fiber_matches_member_away_from_clusters(triple, triple_clusters):
    _, pencil = color_and_pencil(triple)
    field = perturb_pencil(triple, pencil, triple_clusters, 0.5, seed=0)
    z = np.array([0.25, 1.25 + 0.1j])
    assert not np.any(field.touched(z))
    b, value, _, _ = field.jet(z)
    b0, value0, _, _ = pencil_sum(pencil, 0.5).sum.log_jet(z, order=1)
    np.testing.assert_allclose(b, b0)
    np.testing.assert_allclose(value, value0)


@pytest.mark.slow
def test_random_net_skeletons_match_voronoi_cells():
    for seed in range(20):
        net = generic_net((0, 0, 1, 1), 0.3, seed=seed)
        spec = build_section(net, k=50)
        skeleton = section_skeleton(spec)
        oracle = voronoi_geometry(voronoi_segments(spec.centers, net.domain))
        assert skeleton.edge_geometry().hausdorff_distance(oracle) <= 1e-8 * net.domain.diameter
        assert all(len(v.edges) == 3 and len(v.active) == 3 for v in skeleton.vertices)


def test_net_skeleton_vertices_are_trivalent():
    net = generic_net((0, 0, 1, 1), 0.3, seed=3)
    skeleton = section_skeleton(build_section(net, k=50))
    assert skeleton.vertices
    for vertex in skeleton.vertices:
        assert len(vertex.edges) == 3
        assert len(vertex.active) == 3


@pytest.mark.slow
def test_zeros_approach_the_skeleton_like_one_over_k():
    net = generic_net((0, 0, 1, 1), 0.3, seed=0)
    wide = Box.planar(-0.5, -0.5, 1.5, 1.5)
    scaled = []
    for k in (100, 400):
        spec = build_section(net, k=k)
        skeleton = section_skeleton(spec, wide)
        roots = section_zeros(spec, net.domain)
        assert roots.total > 0
        scaled.append(max(skeleton.distance(r.z) for r in roots) * k * net.epsilon)
    assert 0.5 <= scaled[1] / scaled[0] <= 2.0


def test_surgery_bounds_the_datum_on_cluster_balls(triple, triple_clusters):
    s_hat = perturb_section(triple, triple_clusters, seed=0).s_hat
    assert triple_clusters.C4 == pytest.approx(0.05 * 0.05)
    for cluster in triple_clusters:
        grid = ball_grid(cluster, triple_clusters.ball_radius(3), 41)
        assert grid.size
        assert s_hat.datum(grid).min() >= triple_clusters.C4

    grid = triple.net.domain.grid(60)
    away = grid[~s_hat.touched(grid)]
    assert away.size
    b, value, d, dbar = s_hat.jet(away)
    b0, value0, gradient0, _ = triple.global_sum.log_jet(away, order=1)
    np.testing.assert_allclose(b, b0, rtol=1e-14)
    np.testing.assert_allclose(value, value0, rtol=1e-14, atol=1e-300)
    np.testing.assert_allclose(d, gradient0[:, 0], rtol=1e-14, atol=1e-300)
    assert np.all(dbar == 0)
