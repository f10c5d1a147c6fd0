"""Relative polar curves and the point coefficient of the exceptional divisor.

The coefficient of P(T*_0 U) in pi(E_S) equals
``(Gamma . V(f))_0 - (Gamma . V(L))_0`` for the relative polar curve Gamma
of f|S with respect to a generic linear form L.  Genericity of L is not
decided up front: a draw is rejected if the polar scheme has a component
of dimension >= 2 or meets V(f) or V(L) improperly, and every accepted
value is confirmed by a second independent draw.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .algebra import Ideal, Poly, Ring, krull_dim, local_multiplicity, point_on, saturate
from .algebra.ideals import determinant, minor_ideal
from .conormal import codimension, conormal_ideal, critical_minors, is_constant_on, jacobian, singular_locus_ideal
from .cycles import Cycle, Variety

DEFAULT_RETRIES = 8


class GenericityError(RuntimeError):
    """A random choice was not generic enough, and the retry budget ran out."""


class ImproperIntersection(GenericityError):
    pass


class ConstantOnStratum(ValueError):
    """f is constant on the stratum, so it has no relative polar curve."""


def nonzero_coefficient(rng: random.Random, field) -> int:
    """Random integer in [-40, 40] that stays nonzero in ``field``."""
    mod = field.modulus
    while True:
        c = rng.randint(-40, 40)
        if c and not (mod and c % mod == 0):
            return c


@dataclass(frozen=True)
class GenericLinear:
    form: Poly
    seed: int
    retry: int
    stream: str = "L"

    @property
    def coefficients(self) -> list[int]:
        ring = self.form.ring
        return [int(self.form.ring.field.to_fraction(self.form.diff(v).constant_coefficient()))
                for v in ring.names]

    def to_json(self) -> dict:
        return {"form": str(self.form), "retry": self.retry, "stream": self.stream}


def seeded_rng(seed, *labels) -> random.Random:
    return random.Random(":".join([str(seed)] + [str(x) for x in labels]))


def pick_generic_linear(ring: Ring, seed, retry: int = 0, stream: str = "L") -> GenericLinear:
    """Linear form with nonzero integer coefficients drawn from a seeded stream."""
    rng = seeded_rng(seed, "linear", stream, retry)
    form = ring.zero()
    for v in ring.names:
        form = form + ring.var(v).scale(nonzero_coefficient(rng, ring.field))
    return GenericLinear(form, seed, retry, stream)


@dataclass(frozen=True, eq=False)
class PolarCurve:
    ideal: Ideal
    stratum: Variety
    linear: GenericLinear
    f: Poly

    def is_empty(self) -> bool:
        return self.ideal.is_unit()

    @property
    def cycle(self) -> Cycle:
        # Multiplicities stay inside the (possibly nonreduced) saturated ideal.
        if self.is_empty():
            return Cycle.zero()
        return Cycle.from_pairs([(1, Variety(self.ideal))])


def _minors_with_rows(matrix, required, size):
    others = [r for r in range(len(matrix)) if r not in required]
    if size > len(matrix[0]) or size < len(required):
        return []
    out = []
    for rows in combinations(others, size - len(required)):
        chosen = sorted(rows + tuple(required))
        for cols in combinations(range(len(matrix[0])), size):
            d = determinant([[matrix[r][c] for c in cols] for r in chosen])
            if d:
                out.append(d)
    return out


def critical_locus(f: Poly, stratum: Variety) -> Ideal:
    """Critical locus of f on the regular part of the stratum closure."""
    crit = stratum.ideal + critical_minors(stratum, f)
    return saturate(crit, singular_locus_ideal(stratum))


def polar_curve(f: Poly, stratum: Variety, linear: GenericLinear) -> PolarCurve:
    if is_constant_on(stratum, f):
        raise ConstantOnStratum("f is constant on the stratum; use the constant-stratum rule")
    ring = stratum.ring
    c = codimension(stratum)
    basis = list(stratum.ideal.basis)
    matrix = jacobian(basis + [f, linear.form], ring)
    n = len(matrix)
    gamma = stratum.ideal + Ideal(ring, _minors_with_rows(matrix, (n - 2, n - 1), c + 2))
    gamma = saturate(gamma, critical_locus(f, stratum))
    gamma = saturate(gamma, singular_locus_ideal(stratum))
    if krull_dim(gamma) >= 2:
        raise GenericityError(f"polar scheme of dimension {krull_dim(gamma)} for L = {linear.form}")
    return PolarCurve(gamma, stratum, linear, f)


def intersection_number(curve: PolarCurve, g: Poly, point) -> int:
    """Local intersection multiplicity at ``point`` of the polar scheme with V(g - g(point))."""
    if curve.is_empty():
        return 0
    ring = curve.ideal.ring
    point = tuple(point)
    value = g.evaluate(dict(zip(ring.names, point)))
    J = curve.ideal + Ideal(ring, [g - ring.constant(value)])
    if not point_on(J, point):
        return 0
    try:
        return local_multiplicity(J, point, strict=False)
    except ValueError:
        raise ImproperIntersection(f"polar curve meets V({g}) improperly at {point}") from None


@dataclass
class CoefficientCertificate:
    value: int
    draws: list = field(default_factory=list)
    rejected: int = 0

    def to_json(self) -> dict:
        return {"value": self.value, "draws": self.draws, "rejected": self.rejected}


def _one_draw(f, stratum, point, linear):
    curve = polar_curve(f, stratum, linear)
    shifted = linear.form - stratum.ring.constant(linear.form.evaluate(dict(zip(stratum.ring.names, point))))
    with_f = intersection_number(curve, f, point)
    with_l = intersection_number(curve, shifted, point)
    return with_f, with_l


def certified_point_coefficient(f: Poly, stratum: Variety, point, seed,
                                retries: int = DEFAULT_RETRIES) -> CoefficientCertificate:
    """Polar-curve coefficient at ``point``, confirmed by two independent linear forms."""
    point = tuple(point)
    ring = stratum.ring
    if f.evaluate(dict(zip(ring.names, point))) != 0:
        raise ValueError(f"f does not vanish at {point}")
    cert = CoefficientCertificate(0)
    if not point_on(stratum.ideal, point):
        return cert
    accepted = []
    for retry in range(retries):
        for stream in ("L", "L-check"):
            if len(accepted) == 2:
                break
            if any(d["stream"] == stream for d in accepted):
                continue
            linear = pick_generic_linear(ring, seed, retry, stream)
            try:
                with_f, with_l = _one_draw(f, stratum, point, linear)
            except GenericityError:
                cert.rejected += 1
                continue
            accepted.append({**linear.to_json(), "gamma_dot_f": with_f, "gamma_dot_l": with_l,
                             "value": with_f - with_l})
        if len(accepted) == 2:
            break
    if len(accepted) < 2:
        raise GenericityError(f"no generic linear form found in {retries} retries")
    if accepted[0]["value"] != accepted[1]["value"]:
        raise GenericityError(
            f"independent linear forms disagree: {accepted[0]['value']} vs {accepted[1]['value']}")
    cert.value = accepted[0]["value"]
    cert.draws = accepted
    return cert


def point_coefficient(f: Poly, stratum: Variety, point, seed, retries: int = DEFAULT_RETRIES) -> int:
    return certified_point_coefficient(f, stratum, point, seed, retries).value


def constant_stratum_exceptional(stratum: Variety, f: Poly) -> Cycle:
    """1 * [P(conormal of the stratum)] for a stratum on which f vanishes identically."""
    if not stratum.ideal.contains(f):
        raise ValueError(f"f = {f} does not vanish identically on {stratum}")
    return Cycle.from_pairs([(1, conormal_ideal(stratum).variety)])


def milnor_number_by_polar(f: Poly, seed=0) -> int:
    """Point coefficient of f on the whole ambient space at the origin."""
    ring = f.ring
    return point_coefficient(f, Variety(Ideal(ring, [])), (0,) * ring.nvars, seed)


__all__ = [
    "GenericityError", "ImproperIntersection", "ConstantOnStratum", "nonzero_coefficient", "GenericLinear", "PolarCurve",
    "CoefficientCertificate", "pick_generic_linear", "polar_curve", "critical_locus",
    "intersection_number", "certified_point_coefficient", "point_coefficient",
    "constant_stratum_exceptional", "milnor_number_by_polar", "minor_ideal",
]
