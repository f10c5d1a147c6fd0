import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from vancycles.algebra import (
    GF, QQ, Ideal, PolynomialSyntaxError, Ring, UnluckyPrime, eliminate, field_from_string,
    ideal_quotient, intersect, krull_dim, local_multiplicity, saturate, standard_monomials,
    vs_dim, zero_dim_radical,
)

from conftest import symbols_of, to_sympy

R2 = Ring(["x", "y"])
R3 = Ring(["x", "y", "z"])


def sympy_basis(ideal):
    gens = [to_sympy(g) for g in ideal.gens]
    return sympy.groebner(gens, *symbols_of(ideal.ring), order="grevlex", domain="QQ")


@pytest.mark.parametrize("gens", [
    ["x^2 - y*z", "x*y^3 + 2/3*z"],
    ["x^3 - y", "y^2 - z", "x*z - 1"],
    ["x*y - z", "y*z - x", "x*z - y"],
    ["x^2 + y^2 + z^2 - 1", "x - y", "z^3"],
])
def test_groebner_matches_sympy(gens):
    I = Ideal.parse(R3, gens)
    ours = sympy.groebner([to_sympy(g) for g in I.groebner()], *symbols_of(R3), order="grevlex", domain="QQ")
    assert ours.exprs == sympy_basis(I).exprs


def test_parse_rejects_garbage():
    with pytest.raises(PolynomialSyntaxError):
        R2.parse("x + * y")
    with pytest.raises(PolynomialSyntaxError):
        R2.parse("w")


def test_field_strings():
    assert field_from_string("rationals") == QQ
    assert field_from_string("modular:32003") == GF(32003)
    with pytest.raises(ValueError):
        field_from_string("modular:32004")


def test_prime_field_residues_print_symmetric():
    R = Ring(["x"], GF(7))
    assert str(R.parse("x - 2")) == "x - 2"
    assert str(R.parse("5*x")) == "-2*x"


def test_unlucky_prime_on_denominator():
    R = Ring(["x"], GF(3))
    with pytest.raises(UnluckyPrime):
        R.constant(Fraction(1, 3))


def test_elimination_twisted_cubic():
    R = Ring(["t", "x", "y", "z"])
    I = Ideal.parse(R, ["x - t", "y - t^2", "z - t^3"])
    E = eliminate(I, ["t"])
    for g in ["y - x^2", "z - x*y", "x*z - y^2"]:
        assert E.contains(R.parse(g))
    assert not E.contains(R.parse("x"))


def test_intersection_and_quotient():
    I = Ideal.parse(R2, ["x"])
    J = Ideal.parse(R2, ["y"])
    assert intersect(I, J) == Ideal.parse(R2, ["x*y"])
    assert ideal_quotient(Ideal.parse(R2, ["x*y"]), I) == J


def test_saturation_removes_embedded_point():
    I = Ideal.parse(R2, ["x^2", "x*y"])
    assert saturate(I, Ideal.parse(R2, ["x", "y"])) == Ideal.parse(R2, ["x"])


def test_krull_dim_and_vs_dim():
    assert krull_dim(Ideal.parse(R3, ["x*y", "z"])) == 1
    assert vs_dim(Ideal.parse(R3, ["x*y", "z"])) == math.inf
    assert vs_dim(Ideal.parse(R3, ["x^2", "y^3", "z"])) == 6
    assert vs_dim(Ideal.parse(R3, ["1"])) == 0


def test_staircase_shape():
    assert sorted(standard_monomials(Ideal.parse(R2, ["x^2", "x*y", "y^2"]))) == [(0, 0), (0, 1), (1, 0)]


def test_radical_of_fat_point():
    I = Ideal.parse(R2, ["x^2", "y^3"])
    assert zero_dim_radical(I) == Ideal.parse(R2, ["x", "y"])
    # reduced ideals are left alone
    P = Ideal.parse(R2, ["x^2 - 1", "y"])
    assert zero_dim_radical(P) == P


def _fixtures():
    """Zero-dimensional ideals with all points rational, with the expected points."""
    out = [
        (["x^2", "y^3"], [(0, 0)]),
        (["x*(x-1)", "y*(y+2)"], [(0, 0), (0, -2), (1, 0), (1, -2)]),
        (["x^2*(x-1)", "y - x"], [(0, 0), (1, 1)]),
        (["x^2 + y^3", "2*x", "3*y^2"], [(0, 0)]),
        (["x*y", "x + y", "y^3 - y"], [(0, 0)]),
        (["(x-1)^3", "(y-2)^2"], [(1, 2)]),
        (["x^2 - y", "y^2 - y"], [(0, 0), (1, 1), (-1, 1)]),
        (["x^3 - x", "y^2"], [(0, 0), (1, 0), (-1, 0)]),
        (["x*(x-1)*(x-2)", "(y-x)^2"], [(0, 0), (1, 1), (2, 2)]),
        (["x^2", "x*y", "y^2"], [(0, 0)]),
        (["x^2 - 2*x + 1", "y^3 - 3*y^2 + 3*y - 1"], [(1, 1)]),
        (["x*y - 1", "x + y - 2"], [(1, 1)]),
        (["x^4", "y - x^2"], [(0, 0)]),
        (["x^2*(x+1)^3", "y*(y-1)"], [(0, 0), (0, 1), (-1, 0), (-1, 1)]),
        (["(x - y)^2", "x*(x - 3)"], [(0, 0), (3, 3)]),
        (["x^3", "y^3", "x*y"], [(0, 0)]),
        (["y^2 - x^3", "x^2 - y"], [(0, 0), (1, 1)]),
        (["x^2 - 1/4", "2*y - 1"], [(Fraction(1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(1, 2))]),
        (["x*(x - 1)", "y^2 - x"], [(0, 0), (1, 1), (1, -1)]),
        (["x^5", "y^2 - x^3"], [(0, 0)]),
        (["(x + 1)^2*(x - 1)", "y*(y - x)"], [(-1, 0), (-1, -1), (1, 0), (1, 1)]),
        (["x^2 + y^2", "x*y"], [(0, 0)]),
    ]
    return out


@pytest.mark.parametrize("gens,points", _fixtures())
def test_local_multiplicities_sum_to_vs_dim(gens, points):
    I = Ideal.parse(R2, gens)
    total = sum(local_multiplicity(I, p) for p in points)
    assert total == vs_dim(I)
    # oracle: sympy's basis gives the same staircase size
    assert len(_sympy_staircase(I)) == total


def _sympy_staircase(I):
    G = sympy_basis(I)
    gens = symbols_of(I.ring)
    lms = [sympy.Poly(g, *gens).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(max(m) for m in lms) + 1
    from itertools import product
    return [m for m in product(range(bound), repeat=len(gens))
            if not any(all(a <= b for a, b in zip(lm, m)) for lm in lms)]


def test_local_multiplicity_off_the_variety_is_zero():
    assert local_multiplicity(Ideal.parse(R2, ["x", "y"]), (1, 1)) == 0


def test_local_multiplicity_needs_zero_dim():
    with pytest.raises(ValueError):
        local_multiplicity(Ideal.parse(R2, ["x"]), (0, 0))
    # a non-strict call accepts an isolated point of a positive-dimensional set
    I = Ideal.parse(R2, ["x*(x - 1)", "x*y"])
    assert local_multiplicity(I, (1, 0), strict=False) == 1


monomials = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))
terms = st.lists(st.tuples(st.integers(-5, 5), monomials), min_size=1, max_size=4)


def _poly(ring, ts):
    out = ring.zero()
    for c, (a, b, e) in ts:
        out = out + ring.constant(c) * ring.var("x") ** a * ring.var("y") ** b * ring.var("z") ** e
    return out


BASE = Ideal.parse(R3, ["x^2 - y*z", "y^3 - x*z + 1", "x*y*z - z^2"])


@settings(max_examples=40, deadline=None)
@given(st.lists(terms, min_size=3, max_size=3), terms)
def test_membership_sound_on_combinations(multipliers, extra):
    combo = R3.zero()
    for m, g in zip(multipliers, BASE.gens):
        combo = combo + _poly(R3, m) * g
    assert BASE.contains(combo)
    # an element plus a non-member is not a member (oracle: sympy reduction)
    other = _poly(R3, extra)
    expected = sympy_basis(BASE).contains(to_sympy(combo + other))
    assert BASE.contains(combo + other) == expected


def test_modular_and_rational_agree_on_multiplicities():
    rng = random.Random(5)
    for gens, points in _fixtures():
        if any(isinstance(c, Fraction) and c.denominator != 1 for p in points for c in p):
            continue
        q = Ideal.parse(R2, gens)
        m = Ideal.parse(Ring(["x", "y"], GF(32003)), gens)
        assert vs_dim(q) == vs_dim(m)
        p = rng.choice(points)
        assert local_multiplicity(q, p) == local_multiplicity(m, p)
