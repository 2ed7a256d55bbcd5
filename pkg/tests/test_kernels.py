import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from vmlattice.errors import DimensionError
from vmlattice.kernels import (
    KERNEL_FUNCTIONS,
    Kernel,
    ProductWeights,
    gram_minus_one,
    korobov1_kernel,
    multilinear_kernel,
    prod_minus_one,
    usobolev1_kernel,
)

ONE = ProductWeights.ones(1)
TWO = ProductWeights.ones(2)


def random_rational_points(rng, count, s, denominator=1009):
    return [tuple(Fraction(int(n), denominator) for n in rng.integers(0, denominator + 1, size=s)) for _ in range(count)]


def test_product_weights():
    gamma = ProductWeights(gamma=(1.0, 0.5, 0.25))
    assert gamma.s == 3
    assert gamma.subset([0, 2]) == 0.25
    assert gamma.subset([]) == 1.0
    assert gamma.scaled(4.0).gamma == (4.0, 2.0, 1.0)
    assert ProductWeights.broadcast(2.0, 3).gamma == (2.0, 2.0, 2.0)
    assert ProductWeights.broadcast([3.0], 2).gamma == (3.0, 3.0)


def test_product_weights_validation():
    with pytest.raises(ValidationError):
        ProductWeights(gamma=(1.0, 0.0))
    with pytest.raises(ValidationError):
        ProductWeights(gamma=())
    with pytest.raises(DimensionError):
        ProductWeights.broadcast([1.0, 2.0], 3)
    with pytest.raises(DimensionError):
        korobov1_kernel((0.1, 0.2), (0.3, 0.4), ONE)


@pytest.mark.parametrize(
    "x, y, gamma, expected",
    [
        ((0.3,), (0.3,), ONE, 1 + math.pi**2 / 3),
        ((Fraction(3, 4),), (Fraction(1, 4),), ONE, 1 - math.pi**2 / 6),
        ((0, 0), (0, 0), TWO, (1 + math.pi**2 / 3) ** 2),
    ],
)
def test_korobov1_kernel(x, y, gamma, expected):
    assert korobov1_kernel(x, y, gamma) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "x, y, gamma, expected",
    [
        ((0.5, 0.5, 0.5), (0.5, 0.5, 0.5), ProductWeights.ones(3), 1.0),
        ((0,), (0,), ONE, 4.0),
        ((0,), (1,), ONE, -2.0),
    ],
)
def test_multilinear_kernel(x, y, gamma, expected):
    assert multilinear_kernel(x, y, gamma) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "x, y, gamma, expected",
    [
        ((0.5,), (0.5,), ONE, 13 / 12),
        ((0,), (0,), ONE, 4 / 3),
        ((0.5, 0.5), (0.5, 0.5), TWO, (13 / 12) ** 2),
    ],
)
def test_usobolev1_kernel(x, y, gamma, expected):
    assert usobolev1_kernel(x, y, gamma) == pytest.approx(expected, rel=1e-15)


def test_korobov_wraps_exactly_on_rationals():
    # {0 - 1} = 0 and {1/3 - 2/3} = 2/3
    assert korobov1_kernel((0,), (1,), ONE) == korobov1_kernel((0,), (0,), ONE)
    assert korobov1_kernel((Fraction(1, 3),), (Fraction(2, 3),), ONE) == korobov1_kernel(
        (Fraction(2, 3),), (Fraction(1, 3),), ONE
    )


@pytest.mark.parametrize("kernel", list(KERNEL_FUNCTIONS.values()))
def test_symmetry(kernel):
    rng = np.random.default_rng(7)
    for s in (1, 2, 3):
        gamma = ProductWeights(gamma=tuple(rng.uniform(0.1, 2.0, size=s)))
        xs = random_rational_points(rng, 1000 // 3, s)
        ys = random_rational_points(rng, 1000 // 3, s)
        for x, y in zip(xs, ys):
            assert abs(kernel(x, y, gamma) - kernel(y, x, gamma)) <= 1e-15
        for x, y in zip(rng.random((50, s)), rng.random((50, s))):
            assert kernel(x, y, gamma) == pytest.approx(kernel(y, x, gamma), rel=1e-14, abs=1e-13)


def test_normalisation_on_midpoint_grids():
    deviation = {}
    for kernel in Kernel:
        previous = math.inf
        for L in (8, 16, 32):
            midpoints = (2 * np.arange(L) + 1)[:, None]
            mean = gram_minus_one(kernel, midpoints, 2 * L, ONE).mean()
            if kernel is Kernel.multilinear:
                assert abs(mean) < 1e-14
            else:
                assert abs(mean) < previous
                previous = abs(mean)
        deviation[kernel] = previous
    assert deviation[Kernel.korobov1] == pytest.approx(2 * math.pi**2 / (6 * 32**2), rel=1e-9)


def test_sobolev_expansion_term_by_term():
    rng = np.random.default_rng(11)
    for s in (1, 2, 3):
        gamma = ProductWeights(gamma=tuple(rng.uniform(0.2, 1.5, size=s)))
        for x, y in zip(rng.random((20, s)), rng.random((20, s))):
            linear = [gamma[j] * (x[j] - 0.5) * (y[j] - 0.5) for j in range(s)]
            d = (x - y) % 1.0
            periodic = [gamma[j] * (d[j] ** 2 - d[j] + 1 / 6) / 2 for j in range(s)]
            expansion = 1.0
            for u_size in range(1, s + 1):
                for u in itertools.combinations(range(s), u_size):
                    expansion += math.prod(linear[j] for j in u)
                    expansion += math.prod(periodic[j] for j in u)
                    for v_size in range(1, u_size):
                        for v in itertools.combinations(u, v_size):
                            rest = [j for j in u if j not in v]
                            expansion += math.prod(linear[j] for j in rest) * math.prod(periodic[j] for j in v)
            assert usobolev1_kernel(x, y, gamma) == pytest.approx(expansion, rel=1e-13)


@pytest.mark.parametrize("kernel", list(Kernel))
def test_gram_matrix_is_positive_semidefinite(kernel):
    rng = np.random.default_rng(3)
    for s in (1, 2, 3):
        points = rng.integers(0, 997, size=(20, s))
        gram = gram_minus_one(kernel, points, 997, ProductWeights.ones(s)) + 1.0
        assert np.linalg.eigvalsh(gram).min() >= -1e-10


@pytest.mark.parametrize("kernel", list(Kernel))
def test_gram_matches_scalar_kernel(kernel):
    rng = np.random.default_rng(5)
    gamma = ProductWeights(gamma=(0.7, 1.3))
    numerators = rng.integers(0, 32, size=(12, 2))
    gram = gram_minus_one(kernel, numerators, 31, gamma) + 1.0
    points = [tuple(Fraction(int(n), 31) for n in row) for row in numerators]
    scalar = np.array([[KERNEL_FUNCTIONS[kernel](x, y, gamma) for y in points] for x in points])
    np.testing.assert_allclose(gram, scalar, rtol=1e-13, atol=1e-13)


def test_gram_on_row_blocks():
    rng = np.random.default_rng(9)
    numerators = rng.integers(0, 50, size=(30, 3))
    gamma = ProductWeights.ones(3)
    full = gram_minus_one(Kernel.usobolev1, numerators, 50, gamma)
    block = gram_minus_one(Kernel.usobolev1, numerators[5:9], 50, gamma, numerators)
    np.testing.assert_array_equal(block, full[5:9])


def test_prod_minus_one():
    terms = np.array([[0.5, -0.25, 2.0], [1e-20, 1e-20, 1e-20]])
    result = prod_minus_one(terms)
    assert result[0] == pytest.approx(1.5 * 0.75 * 3.0 - 1.0, rel=1e-15)
    assert result[1] == pytest.approx(3e-20, rel=1e-12)
