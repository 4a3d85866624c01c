import itertools
import math

import numpy as np
import pytest

from src.core.box import Box
from src.core.errors import SearchExhaustedError
from src.core.expsum import ExpSum
from src.core.genericity import (
    COMPLEXIFIED,
    REAL,
    catalog_from_skeleton,
    classify_sum,
    exponent_set_quality,
    find_shift,
    shift_margin,
    simplex_quality,
    simplex_volume,
)
from src.skeleton.planar import build_skeleton_2d


def test_simplex_volumes():
    assert simplex_volume([0, 1, 1j]) == pytest.approx(0.5)
    assert simplex_volume([0, 2]) == pytest.approx(2.0)
    # complexified segment [0, v]: square spanned by v and iv, over 2!
    assert simplex_volume([0, 2], COMPLEXIFIED) == pytest.approx(2.0)
    assert simplex_volume([0, 1, 2]) == pytest.approx(0.0, abs=1e-12)


def test_complexified_needs_few_vertices():
    with pytest.raises(ValueError):
        simplex_volume([0, 1, 1j], COMPLEXIFIED)
    with pytest.raises(ValueError):
        simplex_quality([0, 1], REAL, extra_point=0.5)


def test_unit_triangle_quality():
    report = exponent_set_quality([0, 1, 1j])
    assert report.delta_r == pytest.approx(0.5)
    assert report.delta_c == pytest.approx(1 / np.sqrt(2))
    assert report.delta_set == pytest.approx(0.5)
    assert report.strongly_basic
    # three pairs and the triangle
    assert report.simplex_count == 4


def test_collinear_set_is_degenerate():
    report = exponent_set_quality([0, 1, 2])
    assert report.delta_r == 0.0
    assert not report.strongly_basic
    assert report.witness is not None and len(report.witness) == 3


def test_quality_rejects_duplicates():
    with pytest.raises(ValueError):
        exponent_set_quality([0, 1, 1])


def test_quality_with_origin():
    assert simplex_quality([1, 1j], COMPLEXIFIED, extra_point=0) > 0.1
    assert simplex_quality([0, 1], COMPLEXIFIED, extra_point=0) == 0.0


def test_cutoff_limits_enumeration():
    points = np.array([0, 1, 1j, 10, 11, 10 + 1j])
    local = exponent_set_quality(points, cutoff=1.5)
    # two unit triangles, each with three pairs and one triangle
    assert local.simplex_count == 8
    assert local.delta_set == pytest.approx(0.5)


def test_classify_triangle(triangle):
    result = classify_sum(triangle, Box.planar(-3, -3, 3, 3))
    assert result.strongly
    assert result.basic
    assert result.strictly
    assert len(result.catalog) == 3
    assert not result.catalog.nongeneric


def test_classify_two_terms(two_terms):
    result = classify_sum(two_terms, Box.planar(-2, -2, 2, 2))
    assert result.strongly
    assert result.strictly
    assert len(result.catalog) == 1


def test_find_shift_meets_target(triangle):
    m = find_shift(triangle, anchor=0, radius=0.3, target=0.05, seed=1, window=Box.planar(-3, -3, 3, 3))
    assert abs(m[0]) <= 0.3 + 1e-12
    catalog = classify_sum(triangle, Box.planar(-3, -3, 3, 3)).catalog
    assert shift_margin(catalog.filtered(2), m) >= 0.05


def test_find_shift_exhausted(triangle):
    with pytest.raises(SearchExhaustedError) as info:
        find_shift(triangle, anchor=0, radius=0.01, target=0.9, max_tries=20, window=Box.planar(-3, -3, 3, 3))
    assert info.value.best_margin < 0.9


def test_catalog_from_skeleton_pairs_adjacent_cells(triangle):
    skeleton = build_skeleton_2d(triangle, Box.planar(-3, -3, 3, 3))
    catalog = catalog_from_skeleton(triangle, skeleton)
    assert sorted(catalog.index_sets) == [(0, 1), (0, 2), (1, 2)]
    assert catalog.nongeneric == []


def _qr_quality(face, complexified):
    edges = face[1:] - face[0]
    if complexified:
        edges = np.concatenate([edges, 1j * edges])
    frame = np.concatenate([edges.real, edges.imag], axis=1)
    dim = len(face) - 1
    order = 2 * dim if complexified else dim
    vol = float(np.abs(np.diag(np.linalg.qr(frame.T, mode='r'))).prod()) / math.factorial(order)
    return 0.0 if vol < 1e-10 else vol ** (1.0 / order)


def _brute_force_deltas(pts):
    count, n = pts.shape
    delta_r = delta_c = 1.0
    for size in range(2, min(n + 2, count) + 1):
        for subset in itertools.combinations(range(count), size):
            verts = pts[list(subset)]
            diam = max(np.linalg.norm(a - b) for a, b in itertools.combinations(verts, 2))
            scaled = (verts - verts[0]) / diam
            for face_size in range(2, size + 1):
                for face in itertools.combinations(range(size), face_size):
                    delta_r = min(delta_r, _qr_quality(scaled[list(face)], False))
                    if size <= n + 1:
                        delta_c = min(delta_c, _qr_quality(scaled[list(face)], True))
    return delta_r, delta_c


def _random_exponents(rng, n):
    count = int(rng.integers(3, 9 if n == 1 else 7))
    return rng.uniform(-2, 2, (count, n)) + 1j * rng.uniform(-2, 2, (count, n))


@pytest.mark.slow
def test_quality_matches_brute_force_volumes(rng):
    for trial in range(200):
        pts = _random_exponents(rng, 1 + trial % 2)
        report = exponent_set_quality(pts)
        delta_r, delta_c = _brute_force_deltas(pts)
        assert report.delta_r == pytest.approx(delta_r, rel=1e-9)
        assert report.delta_c == pytest.approx(delta_c, rel=1e-9)
        assert report.strongly_basic == (min(delta_r, delta_c) > 1e-10)


def test_quality_is_scale_invariant(rng):
    for trial in range(20):
        pts = _random_exponents(rng, 1 + trial % 2)
        report = exponent_set_quality(pts)
        for factor in (1e-3, 0.5, 7.0, 1e3):
            scaled = exponent_set_quality(factor * pts)
            assert scaled.delta_r == pytest.approx(report.delta_r, rel=1e-10)
            assert scaled.delta_c == pytest.approx(report.delta_c, rel=1e-10)


@pytest.mark.slow
def test_strongly_basic_planar_sums_are_basic(rng):
    window = Box.planar(-5, -5, 5, 5)
    checked = 0
    while checked < 200:
        size = int(rng.integers(3, 7))
        exponents = rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)
        sum_ = ExpSum(rng.uniform(-1, 1, size) + 1j * rng.uniform(-np.pi, np.pi, size), exponents)
        classification = classify_sum(sum_, window)
        if not classification.strongly:
            continue
        checked += 1
        assert classification.basic
        assert classification.strictly == classification.basic
