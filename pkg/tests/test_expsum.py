import numpy as np
import pytest

from src.core.box import Box, as_box
from src.core.errors import ExpSumOverflowError
from src.core.expsum import ExpSum, dominance, evaluate_jet, normalized_c1, transform


def test_log_jet_at_origin(two_terms):
    b, value, gradient, hessian = two_terms.log_jet([0j], order=2)
    assert b[0] == 0.0
    assert value[0] == pytest.approx(2.0)
    assert gradient[0, 0] == pytest.approx(1.0)
    assert hessian[0, 0, 0] == pytest.approx(1.0)


def test_log_jet_far_right_drops_underflowing_term(two_terms):
    b, value, gradient, _ = two_terms.log_jet([1000.0 + 0j])
    assert b[0] == pytest.approx(1000.0)
    assert value[0] == 1.0
    assert gradient[0, 0] == 1.0


def test_evaluate_jet_matches_closed_form(two_terms):
    z = 0.3 + 0.7j
    value, gradient, hessian = evaluate_jet(two_terms, z)
    assert value == pytest.approx(1 + np.exp(z))
    assert gradient[0] == pytest.approx(np.exp(z))
    assert hessian[0, 0] == pytest.approx(np.exp(z))


def test_evaluate_jet_overflow(two_terms):
    with pytest.raises(ExpSumOverflowError):
        evaluate_jet(two_terms, 800.0)
    b, value, _, _ = evaluate_jet(two_terms, 800.0, normalized=True)
    assert b == pytest.approx(800.0)
    assert value == pytest.approx(1.0)


def test_duplicate_exponents_merge():
    s = ExpSum([0, 0], [1, 1])
    assert s.size == 1
    assert s.merged == 1
    assert s.alphas[0] == pytest.approx(np.log(2))


def test_exact_cancellation_drops_term():
    s = ExpSum([0, 1j * np.pi, 0], [1, 1, 0])
    assert s.size == 1
    assert s.exponents[0, 0] == 0


def test_total_cancellation_raises():
    with pytest.raises(ValueError):
        ExpSum([0, 1j * np.pi], [1, 1])


def test_constructor_rejects_bad_input():
    with pytest.raises(ValueError):
        ExpSum([], np.zeros((0, 1)))
    with pytest.raises(ValueError):
        ExpSum([0, 0], [[0, 1]])
    with pytest.raises(ValueError):
        ExpSum([np.inf], [0])


def test_from_coefficients_drops_zeros():
    s = ExpSum.from_coefficients([1, 0, -2], [0, 1, 2])
    assert s.size == 2
    z = 0.2 - 0.4j
    value, _, _ = evaluate_jet(s, z, order=0)
    assert value == pytest.approx(1 - 2 * np.exp(2 * z))


def test_restrict(triangle):
    sub = triangle.restrict([2, 0])
    assert sub.size == 2
    np.testing.assert_allclose(sub.exponents[:, 0], [0, 1j])


def test_dominance_sets(triangle):
    d = dominance(triangle, 0.5, c=1.0)
    # real parts 0, 0.5, 0
    assert d.b == pytest.approx(0.5)
    assert d.argmax_set == (1,)
    assert d.near_set == (0, 1, 2)
    np.testing.assert_allclose(d.gap_list, [0, 0.5, 0.5])

    tie = dominance(triangle, 0.0, c=0.0)
    assert tie.argmax_set == (0, 1, 2)


def test_normalized_c1(two_terms):
    assert normalized_c1(two_terms, 0, 0) == pytest.approx(3.0)
    assert normalized_c1(two_terms, 0, 1.0) == pytest.approx(3.0 / np.e)


def test_transform_recenter(triangle):
    q = 0.4 - 0.3j
    z = 0.1 + 0.2j
    moved = transform(triangle, recenter=q)
    assert moved.alphas.real.max() == pytest.approx(0.0)
    expected, _, _ = evaluate_jet(triangle, q + z, order=0)
    value, _, _ = evaluate_jet(moved, z, order=0)
    assert value == pytest.approx(np.exp(-triangle.b(q)) * expected)


def test_transform_shift(triangle):
    z = -0.2 + 0.5j
    shifted = transform(triangle, shift=1.0)
    expected, _, _ = evaluate_jet(triangle, z, order=0)
    value, _, _ = evaluate_jet(shifted, z, order=0)
    assert value == pytest.approx(np.exp(-z) * expected)
    with pytest.raises(ValueError):
        transform(triangle)


def test_box_parsing_and_grid():
    box = as_box("-1,-2,3,4")
    assert box == Box.planar(-1, -2, 3, 4)
    assert as_box({'x0': -1, 'y0': -2, 'x1': 3, 'y1': 4}) == box
    assert as_box({'lower': [-1, -2], 'upper': [3, 4]}) == box
    assert box.area == pytest.approx(24.0)
    assert box.grid(5).shape == (25,)
    assert box.contains(np.array([0j, 10j])[:, None]).tolist() == [True, False]
    with pytest.raises(ValueError):
        as_box("1,2,3")
    with pytest.raises(ValueError):
        Box.planar(1, 0, 0, 1)


def test_tropical_max_ignores_term_order(rng):
    for _ in range(20):
        size = int(rng.integers(2, 7))
        alphas = rng.uniform(-2, 2, size) + 1j * rng.uniform(-np.pi, np.pi, size)
        exponents = rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)
        order = rng.permutation(size)
        sum_, shuffled = ExpSum(alphas, exponents), ExpSum(alphas[order], exponents[order])
        z = rng.uniform(-5, 5, 50) + 1j * rng.uniform(-5, 5, 50)
        b, value, _, _ = sum_.log_jet(z)
        b_shuffled, value_shuffled, _, _ = shuffled.log_jet(z)
        np.testing.assert_allclose(b_shuffled, b, rtol=0, atol=1e-12)
        np.testing.assert_allclose(value_shuffled, value, rtol=1e-12, atol=1e-12)
        for point in z[:5]:
            first, second = dominance(sum_, point, c=0.5), dominance(shuffled, point, c=0.5)
            assert sorted(order[list(second.near_set)]) == list(first.near_set)
            assert set(first.argmax_set) <= set(first.near_set)
