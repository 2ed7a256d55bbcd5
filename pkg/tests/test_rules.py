import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from vmlattice.config import Scheme
from vmlattice.errors import InvalidRule
from vmlattice.numtheory import gcd
from vmlattice.rules import (
    LatticeRule,
    WeightedRule,
    apply_rule,
    build_rule,
    corner,
    lattice_points,
    optimal_vertex_weights,
    trapezoidal_weights,
)


def coprime_generators(N, s, rng, count):
    units = [z for z in range(1, N) if gcd(z, N) == 1] or [1]
    return [tuple([1] + list(rng.choice(units, size=s - 1))) for _ in range(count)]


def test_lattice_points():
    assert lattice_points(LatticeRule(z=(1,), N=4)) == [(Fraction(k, 4),) for k in range(4)]
    assert lattice_points(LatticeRule(z=(1, 2), N=5))[3] == (Fraction(3, 5), Fraction(1, 5))
    assert lattice_points(LatticeRule(z=(1, 8), N=13))[2] == (Fraction(2, 13), Fraction(3, 13))


def test_generator_is_reduced():
    rule = LatticeRule(z=(14, -5), N=13)
    assert rule.z == (1, 8)
    assert rule.s == 2


@pytest.mark.parametrize("z, N", [((2,), 10), ((1, 6), 9), ((0,), 7)])
def test_non_coprime_generator_is_rejected(z, N):
    with pytest.raises(InvalidRule, match="z_"):
        LatticeRule(z=z, N=N)


def test_invalid_modulus():
    with pytest.raises(InvalidRule):
        LatticeRule(z=(1,), N=0)
    with pytest.raises(InvalidRule):
        LatticeRule(z=(), N=5)


def test_corner_order():
    assert [corner(code, 2) for code in range(4)] == [(0, 0), (1, 0), (0, 1), (1, 1)]


@pytest.mark.parametrize("s, N, expected", [(1, 10, 1 / 20), (2, 5, 1 / 20), (3, 7, 1 / 56)])
def test_trapezoidal_weights(s, N, expected):
    weights = trapezoidal_weights(s, N)
    assert len(weights.weights) == 2**s
    assert all(w == pytest.approx(expected, rel=1e-15) for w in weights.weights)


@pytest.mark.parametrize("N", [1, 2, 4, 10, 97])
def test_optimal_weights_one_dimension(N):
    weights = optimal_vertex_weights(LatticeRule(z=(1,), N=N))
    assert weights[(0,)] == pytest.approx(1 / (2 * N), rel=1e-15)
    assert weights[(1,)] == pytest.approx(1 / (2 * N), rel=1e-15)
    assert weights.weights == trapezoidal_weights(1, N).weights


def test_optimal_weights_solve_the_exactness_system():
    N = 3
    rule = LatticeRule(z=(1, 1), N=N)
    interior = [tuple(float(x) for x in p) for p in lattice_points(rule)[1:]]
    subsets = [u for size in range(3) for u in itertools.combinations(range(2), size)]
    corners = [corner(code, 2) for code in range(4)]
    A = np.array([[math.prod(a[j] for j in u) for a in corners] for u in subsets], dtype=float)
    b = np.array(
        [0.5 ** len(u) - sum(math.prod(x[j] for j in u) for x in interior) / N for u in subsets]
    )
    expected = np.linalg.solve(A, b)
    np.testing.assert_allclose(optimal_vertex_weights(rule).weights, expected, atol=1e-15)


def test_optimal_weights_sum():
    rng = np.random.default_rng(1)
    for N in (5, 13, 17, 37, 64, 101):
        for s in (1, 2, 3):
            for z in coprime_generators(N, s, rng, 3):
                total = optimal_vertex_weights(LatticeRule(z=z, N=N)).total
                assert total == pytest.approx(1 / N, abs=1e-14)


def test_negative_optimal_weights_are_reported(caplog):
    # w(0,0,0) = w(1,1,1) = 1/8 - 441/2401
    weights = optimal_vertex_weights(LatticeRule(z=(1, 1, 1), N=7))
    assert weights.negative_corners() == [(0, 0, 0), (1, 1, 1)]
    assert weights[(0, 0, 0)] == pytest.approx(1 / 8 - 441 / 2401, rel=1e-14)
    assert "negative" in caplog.text
    assert weights.total == pytest.approx(1 / 7, abs=1e-14)


def test_build_rule_plain():
    rule = build_rule(LatticeRule(z=(1,), N=5), Scheme.plain)
    assert rule.M == 5
    assert rule.weights == (0.2,) * 5
    assert rule.vertex_weights is None


def test_build_rule_vertex_modified():
    rule = build_rule(LatticeRule(z=(1, 2), N=5), "trapezoidal")
    assert rule.M == 2**2 + 5 - 1
    assert rule.weight_sum == pytest.approx(1.0, abs=1e-14)
    assert rule.weights[4:] == (0.2,) * 4
    assert rule.numerators[:4] == ((0, 0), (5, 0), (0, 5), (5, 5))


def test_build_rule_optimal_is_composite_trapezoid():
    rule = build_rule(LatticeRule(z=(1,), N=4), "optimal")
    nodes = sorted(zip(rule.nodes, rule.weights))
    assert [x[0] for x, _ in nodes] == [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1]
    np.testing.assert_allclose([w for _, w in nodes], [1 / 8, 1 / 4, 1 / 4, 1 / 4, 1 / 8], rtol=1e-15)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_constants_are_integrated_exactly(scheme):
    rule = build_rule(LatticeRule(z=(1, 8), N=13), scheme)
    assert apply_rule(rule, lambda x: 1.0) == pytest.approx(1.0, abs=1e-14)


def test_apply_rule():
    plain = build_rule(LatticeRule(z=(1,), N=4), "plain")
    assert apply_rule(plain, lambda x: x[0]) == pytest.approx(3 / 8, abs=1e-15)
    optimal = build_rule(LatticeRule(z=(1, 8), N=13), "optimal")
    assert apply_rule(optimal, lambda x: x[0]) == pytest.approx(0.5, abs=1e-13)
    assert apply_rule(optimal, lambda x: x[0] * x[1]) == pytest.approx(0.25, abs=1e-13)


def test_optimal_rule_integrates_multilinear_monomials():
    rng = np.random.default_rng(2)
    for N in (2, 3, 5, 8, 13, 31, 55, 89, 101):
        for s in (1, 2, 3):
            for z in coprime_generators(N, s, rng, 2):
                rule = build_rule(LatticeRule(z=z, N=N), "optimal")
                for size in range(s + 1):
                    for u in itertools.combinations(range(s), size):
                        value = apply_rule(rule, lambda x: math.prod(x[j] for j in u))
                        assert value == pytest.approx(0.5**size, abs=1e-13)


def test_trapezoidal_equals_optimal_in_one_dimension():
    for N in (3, 8, 21):
        lattice = LatticeRule(z=(1,), N=N)
        assert build_rule(lattice, "trapezoidal").weights == pytest.approx(build_rule(lattice, "optimal").weights, abs=1e-16)


def test_difference_set_property():
    for N in range(2, 32):
        for z in (1, N - 1, 3):
            if gcd(z, N) != 1:
                continue
            rule = LatticeRule(z=(1, z), N=N)
            nodes = set(lattice_points(rule))
            for x, y in itertools.product(nodes, repeat=2):
                assert tuple((a - b) % 1 for a, b in zip(x, y)) in nodes


def test_weighted_rule_from_points():
    rule = WeightedRule.from_points([(Fraction(1, 2), Fraction(1, 2))], [1.0])
    assert rule.denominator == 2
    assert rule.numerators == ((1, 1),)
    with pytest.raises(InvalidRule):
        WeightedRule.from_points([(0.5,), (0.25,)], [1.0])


def test_weighted_rule_json():
    payload = json.loads(build_rule(LatticeRule(z=(1, 8), N=13), "optimal").to_json())
    assert set(payload) == {"N", "s", "z", "scheme", "vertex_weights"}
    assert payload["N"] == 13 and payload["z"] == [1, 8] and payload["scheme"] == "optimal"
    assert [v["corner"] for v in payload["vertex_weights"]] == [[0, 0], [1, 0], [0, 1], [1, 1]]
    assert math.fsum(v["w"] for v in payload["vertex_weights"]) == pytest.approx(1 / 13, abs=1e-15)
