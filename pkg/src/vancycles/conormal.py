"""Conormal and relative conormal varieties in T*U = U x C^{n+1}.

Coordinates on the cotangent space are the ambient variables ``z`` followed
by one covector variable ``w_<z>`` per ambient variable.  Closures over the
regular part are taken scheme-theoretically by saturating along Jacobian
minor ideals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .algebra import Ideal, Poly, Ring, minor_ideal, point_on, saturate
from .algebra.ideals import determinant
from .cycles import Variety


class ConormalError(ValueError):
    pass


def covector_names(ring: Ring) -> list[str]:
    return [f"w_{v}" for v in ring.names]


def cotangent_ring(ring: Ring) -> Ring:
    return Ring(ring.names + tuple(covector_names(ring)), ring.field)


def covector_ring(ring: Ring) -> Ring:
    return Ring(covector_names(ring), ring.field)


def codimension(variety: Variety) -> int:
    return variety.ring.nvars - variety.dimension


def jacobian(polys, ring: Ring, target: Ring | None = None):
    """Rows of partial derivatives with respect to the variables of ``ring``."""
    target = ring if target is None else target
    return [[p.diff(v).to_ring(target) for v in ring.names] for p in polys]


def minors_through_last_row(matrix, size: int):
    """``size``-minors that use the last row of ``matrix``."""
    if size <= 0 or size > len(matrix) or size > len(matrix[0]):
        return []
    last = len(matrix) - 1
    out = []
    for rows in combinations(range(last), size - 1):
        for cols in combinations(range(len(matrix[0])), size):
            d = determinant([[matrix[r][c] for c in cols] for r in rows + (last,)])
            if d:
                out.append(d)
    return out


@dataclass(frozen=True, eq=False)
class ConormalVariety:
    total: Ideal
    base: Variety
    kind: str = "absolute"

    @property
    def variety(self) -> Variety:
        return Variety(self.total)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "base_generators": list(self.base.generators),
            "generators": self.total.texts(),
        }


@dataclass(frozen=True, eq=False)
class CovectorFiber:
    ideal: Ideal
    point: tuple

    def is_everything(self) -> bool:
        return self.ideal.is_zero() or not self.ideal.basis

    def __repr__(self):
        return f"CovectorFiber({self.ideal.texts() or ['0']} at {self.point})"


def singular_locus_ideal(variety: Variety, target: Ring | None = None) -> Ideal:
    """Ideal of c x c Jacobian minors (c = codimension); unit for the ambient space."""
    target = variety.ring if target is None else target
    c = codimension(variety)
    jac = jacobian(variety.ideal.basis, variety.ring, target)
    if c == 0:
        return Ideal(target, [target.one()])
    return minor_ideal(target, jac, c)


@lru_cache(maxsize=512)
def conormal_ideal(variety: Variety) -> ConormalVariety:
    """Closure of the conormal bundle over the regular part of ``variety``."""
    if variety.is_empty():
        raise ConormalError("the empty variety has no conormal")
    ring = variety.ring
    tw = cotangent_ring(ring)
    c = codimension(variety)
    gens = [g.to_ring(tw) for g in variety.ideal.basis]
    matrix = jacobian(variety.ideal.basis, ring, tw) + [[tw.var(w) for w in covector_names(ring)]]
    total = Ideal(tw, gens + minors_through_last_row(matrix, c + 1))
    total = saturate(total, singular_locus_ideal(variety, tw))
    return ConormalVariety(total, variety, "absolute")


def critical_minors(variety: Variety, f: Poly, target: Ring | None = None) -> Ideal:
    """(c+1)-minors of the Jacobian stacked on df; they cut out the critical locus of f on the variety."""
    target = variety.ring if target is None else target
    c = codimension(variety)
    rows = jacobian(list(variety.ideal.basis) + [f], variety.ring, target)
    return minor_ideal(target, rows, c + 1)


def is_constant_on(variety: Variety, f: Poly) -> bool:
    """Whether f is locally constant on the regular part of every component."""
    crit = critical_minors(variety, f)
    return all(variety.ideal.contains(g) for g in crit.gens)


@lru_cache(maxsize=512)
def relative_conormal_ideal(variety: Variety, f: Poly, constant_fallback: bool = True) -> ConormalVariety:
    """Closure of covectors killing ``T_x M ∩ ker d_x f`` over the regular, noncritical part."""
    if variety.is_empty():
        raise ConormalError("the empty variety has no conormal")
    if is_constant_on(variety, f):
        if not constant_fallback:
            raise ConormalError("f is constant on the variety")
        base = conormal_ideal(variety)
        return ConormalVariety(base.total, variety, "relative")
    ring = variety.ring
    tw = cotangent_ring(ring)
    c = codimension(variety)
    gens = [g.to_ring(tw) for g in variety.ideal.basis]
    matrix = jacobian(list(variety.ideal.basis) + [f], ring, tw) + [[tw.var(w) for w in covector_names(ring)]]
    total = Ideal(tw, gens + minors_through_last_row(matrix, c + 2))
    total = saturate(total, singular_locus_ideal(variety, tw))
    total = saturate(total, critical_minors(variety, f, tw))
    return ConormalVariety(total, variety, "relative")


def fiber_at(conormal: ConormalVariety, point) -> CovectorFiber:
    base = conormal.base
    point = tuple(point)
    if not point_on(base.ideal, point):
        raise ConormalError(f"point {point} is not on the base {base}")
    ring = base.ring
    wr = covector_ring(ring)
    values = {v: wr.constant(x) for v, x in zip(ring.names, point)}
    return CovectorFiber(conormal.total.substitute(values, wr), point)


def fiber_contained(small: CovectorFiber, big: CovectorFiber) -> bool:
    """Set containment V(small) ⊆ V(big), tested by radical membership."""
    return fiber_violation(small, big) is None


def fiber_violation(small: CovectorFiber, big: CovectorFiber):
    """A generator of ``big`` not vanishing on V(small), or None if contained."""
    if small.point != big.point:
        raise ConormalError("fibers over different points")
    for g in big.ideal.basis:
        if not small.ideal.radical_contains(g):
            return g
    return None


def find_covector(fiber: CovectorFiber, nonvanishing: Poly, bound: int = 3):
    """Small integer covector on V(fiber) where ``nonvanishing`` is nonzero, if one exists."""
    ring = fiber.ideal.ring
    rng = sorted(range(-bound, bound + 1), key=lambda k: (abs(k), -k))
    for vec in product(rng, repeat=ring.nvars):
        if not any(vec):
            continue
        values = dict(zip(ring.names, vec))
        if all(g.evaluate(values) == 0 for g in fiber.ideal.gens) and nonvanishing.evaluate(values) != 0:
            return vec
    return None


def matrix_rank(rows, field) -> int:
    """Rank of a matrix of field elements by Gaussian elimination."""
    mod = field.modulus
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = field.inv(rows[rank][col])
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                k = rows[r][col] * inv
                rows[r] = [a - k * b for a, b in zip(rows[r], rows[rank])]
                if mod:
                    rows[r] = [a % mod for a in rows[r]]
        rank += 1
    return rank


def jacobian_rank_at(variety: Variety, point) -> int:
    values = dict(zip(variety.ring.names, point))
    rows = [[d.evaluate(values) for d in row] for row in jacobian(variety.ideal.basis, variety.ring)]
    return matrix_rank(rows, variety.ring.field)


def whitney_a_at(big: Variety, small: Variety, point) -> bool:
    """Conormal-fiber form of Whitney's condition a for (big_reg, small) at ``point``."""
    point = tuple(point)
    if not point_on(small.ideal, point):
        raise ConormalError(f"point {point} is not on {small}")
    if jacobian_rank_at(small, point) != codimension(small):
        raise ConormalError(f"{small} is not smooth at {point}")
    if not point_on(big.ideal, point):
        return True
    return fiber_contained(fiber_at(conormal_ideal(big), point), fiber_at(conormal_ideal(small), point))


def covector_of_point(f: Poly, point) -> tuple:
    """Coordinates of (x, d_x f) in the cotangent ring."""
    values = dict(zip(f.ring.names, point))
    return tuple(point) + tuple(f.ring.field.to_fraction(f.diff(v).evaluate(values)) for v in f.ring.names)
