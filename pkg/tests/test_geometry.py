"""Cycles, conormal varieties, relative conormals and polar curves."""

import pytest

from vancycles.algebra import Ideal, Ring, eliminate
from vancycles.conormal import (
    ConormalError, conormal_ideal, cotangent_ring, covector_ring, fiber_at, fiber_contained,
    is_constant_on, relative_conormal_ideal, whitney_a_at,
)
from vancycles.cycles import Cycle, UnregisteredComponent, Variety, coefficient_of, restrict_within, support
from vancycles.polar import (
    ConstantOnStratum, GenericLinear, GenericityError, certified_point_coefficient, intersection_number,
    milnor_number_by_polar, pick_generic_linear, point_coefficient, polar_curve,
)

R = Ring(["x", "y"])
T = cotangent_ring(R)
W = covector_ring(R)


def V(*gens, name=None):
    return Variety(Ideal.parse(R, list(gens)), name)


# -- cycles -------------------------------------------------------------------

def test_cycle_lookup_and_cancellation():
    C = Cycle.from_pairs([(2, V("x")), (3, V("y"))])
    assert coefficient_of(C, V("x")) == 2
    assert coefficient_of(C, V("x + y")) == 0
    D = Cycle.from_pairs([(2, V("x"))]) - Cycle.from_pairs([(2, V("x"))])
    assert D.is_zero() and support(D) == set()
    assert support(C + (-C)) == set()
    assert support(5 * Cycle.from_pairs([(1, V("x"))])) == {V("x")}


def test_cycle_equality_is_ideal_equality():
    assert V("x^2 + x*y", "x") == V("x")


def test_restrict_within():
    top, pt = conormal_ideal(V()).variety, conormal_ideal(V("x", "y")).variety
    base_of = {top: V(), pt: V("x", "y")}
    C = Cycle.from_pairs([(1, top), (1, pt)])
    assert restrict_within(C, Ideal.parse(R, ["x", "y"]), base_of) == Cycle.from_pairs([(1, pt)])
    assert restrict_within(C, Ideal.parse(R, []), base_of) == C
    with pytest.raises(UnregisteredComponent):
        restrict_within(C, Ideal.parse(R, ["x"]), {})


# -- conormal -----------------------------------------------------------------

def test_conormal_of_plane_and_point():
    assert conormal_ideal(V()).total == Ideal.parse(T, ["w_x", "w_y"])
    assert conormal_ideal(V("x", "y")).total == Ideal.parse(T, ["x", "y"])


def test_conormal_of_parabola_matches_parametrization():
    # oracle: (t, t^2) with covectors killing (1, 2t), i.e. s*(-2t, 1), then eliminate t and s
    P = Ring(["t", "s"] + list(T.names))
    graph = Ideal.parse(P, ["x - t", "y - t^2", "w_x + 2*t*s", "w_y - s"])
    oracle = eliminate(graph, ["t", "s"]).to_ring(T)
    got = conormal_ideal(V("y - x^2")).total
    assert got == oracle == Ideal.parse(T, ["y - x^2", "w_x + 2*x*w_y"])


def test_relative_conormal_examples():
    f = R.parse("x")
    assert relative_conormal_ideal(V(), f).total == Ideal.parse(T, ["w_y"])
    assert relative_conormal_ideal(V("y"), f).total == Ideal.parse(T, ["y"])
    # f constant on M: the ordinary conormal
    assert relative_conormal_ideal(V("x"), f).total == conormal_ideal(V("x")).total
    with pytest.raises(ConormalError):
        relative_conormal_ideal(V("x"), f, constant_fallback=False)
    assert is_constant_on(V("x"), f) and not is_constant_on(V(), f)


def test_fibers():
    zero = fiber_at(conormal_ideal(V()), (3, 4))
    assert zero.ideal == Ideal.parse(W, ["w_x", "w_y"])
    everything = fiber_at(conormal_ideal(V("x", "y")), (0, 0))
    assert everything.is_everything()
    parab = fiber_at(conormal_ideal(V("y - x^2")), (0, 0))
    assert parab.ideal == Ideal.parse(W, ["w_x"])
    assert fiber_contained(fiber_at(conormal_ideal(V()), (0, 0)), parab)
    assert fiber_contained(parab, everything)
    span_dx = fiber_at(conormal_ideal(V("x")), (0, 0))
    assert not fiber_contained(parab, span_dx)
    with pytest.raises(ConormalError):
        fiber_at(conormal_ideal(V("x")), (1, 0))


def test_whitney_examples():
    assert whitney_a_at(V("y - x^2"), V("x", "y"), (0, 0))
    assert whitney_a_at(V("y - x^2"), V("y"), (0, 0))
    assert not whitney_a_at(V("y - x^2"), V("x"), (0, 0))


def test_whitney_umbrella_fails_along_z_axis():
    R3 = Ring(["x", "y", "z"])
    umb = Variety(Ideal.parse(R3, ["x^2 - z*y^2"]))
    axis = Variety(Ideal.parse(R3, ["x", "y"]))
    assert not whitney_a_at(umb, axis, (0, 0, 0))
    assert whitney_a_at(umb, axis, (0, 0, 1))


# -- polar curves -------------------------------------------------------------

def test_generic_linear_is_deterministic():
    a, b = pick_generic_linear(R, 7), pick_generic_linear(R, 7)
    assert a.form == b.form
    assert pick_generic_linear(R, 7, retry=1).form != a.form
    assert pick_generic_linear(R, 7, stream="L-check").form != a.form


def _fixed(text):
    return GenericLinear(R.parse(text), seed=None, retry=0, stream="fixed")


def test_polar_curve_examples():
    assert polar_curve(R.parse("x"), V(), _fixed("x + 2*y")).is_empty
    cusp = polar_curve(R.parse("x^2 + y^3"), V(), _fixed("x"))
    assert cusp.ideal == Ideal.parse(R, ["y^2"])
    node = polar_curve(R.parse("x*y"), V(), _fixed("x - y"))
    assert node.ideal == Ideal.parse(R, ["x + y"])
    with pytest.raises(ConstantOnStratum):
        polar_curve(R.parse("x"), V("x"), _fixed("y"))


def test_intersection_numbers_on_cusp_polar():
    curve = polar_curve(R.parse("x^2 + y^3"), V(), _fixed("x"))
    assert intersection_number(curve, R.parse("x^2 + y^3"), (0, 0)) == 4
    assert intersection_number(curve, R.parse("x"), (0, 0)) == 2
    empty = polar_curve(R.parse("x"), V(), _fixed("y"))
    assert intersection_number(empty, R.parse("x"), (0, 0)) == 0


@pytest.mark.parametrize("f,mu", [("x^2 + y^3", 2), ("x*y", 1), ("x", 0), ("x^2 + y^2", 1)])
def test_point_coefficient(f, mu):
    assert point_coefficient(R.parse(f), V(), (0, 0), seed=0) == mu


def test_certificate_uses_two_streams():
    cert = certified_point_coefficient(R.parse("x^2 + y^3"), V(), (0, 0), seed=3)
    assert cert.value == 2
    assert {d["stream"] for d in cert.draws} >= {"L", "L-check"}


def test_point_coefficient_preconditions():
    with pytest.raises(ValueError):
        point_coefficient(R.parse("x + 1"), V(), (0, 0), seed=0)
    # point off the stratum contributes nothing
    assert point_coefficient(R.parse("x*y"), V("x - 1"), (0, 0), seed=0) == 0


def test_no_retries_is_a_genericity_failure():
    with pytest.raises(GenericityError):
        certified_point_coefficient(R.parse("x*y"), V(), (0, 0), seed=0, retries=0)


def test_milnor_by_polar_three_variables():
    R3 = Ring(["x", "y", "z"])
    assert milnor_number_by_polar(R3.parse("x^2 + y^2 + z^3"), seed=1) == 2
