"""Ideals and the standard constructions on them.

Everything here reduces to Gröbner bases under global orders: quotients and
intersections go through elimination of an auxiliary variable, and the
local multiplicity at a point uses the double colon ``J : (J : m^inf)``
instead of a local ordering.
"""

from __future__ import annotations

import math
from functools import cached_property
from itertools import combinations, product

from .groebner import groebner_basis, leading_monomials, normal_form
from .polynomial import GREVLEX, MonomialOrder, Poly, Ring, elimination_order


class Ideal:
    """Finitely generated ideal.  Zero generators are dropped on construction."""

    def __init__(self, ring: Ring, gens=()):
        self.ring = ring
        cleaned = []
        for g in gens:
            if not isinstance(g, Poly):
                g = ring.parse(g) if isinstance(g, str) else ring.constant(g)
            if g.ring != ring:
                g = g.to_ring(ring)
            if g:
                cleaned.append(g)
        self.gens = tuple(cleaned)
        self._gb = {}

    @classmethod
    def parse(cls, ring: Ring, texts) -> "Ideal":
        return cls(ring, [ring.parse(t) for t in texts])

    def groebner(self, order: MonomialOrder = GREVLEX) -> list[Poly]:
        if order not in self._gb:
            self._gb[order] = groebner_basis(self.ring, self.gens, order)
        return self._gb[order]

    @cached_property
    def basis(self) -> tuple[Poly, ...]:
        """Reduced grevlex basis; the canonical representative of the ideal."""
        return tuple(self.groebner(GREVLEX))

    def reduce(self, p: Poly) -> Poly:
        if p.ring != self.ring:
            p = p.to_ring(self.ring)
        return normal_form(p, self.basis, GREVLEX)

    def contains(self, p) -> bool:
        if isinstance(p, Ideal):
            return all(self.contains(g) for g in p.gens)
        if not isinstance(p, Poly):
            p = self.ring.parse(p) if isinstance(p, str) else self.ring.constant(p)
        return self.reduce(p).is_zero()

    __contains__ = contains

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def is_zero(self) -> bool:
        return not self.gens

    def radical_contains(self, p: Poly) -> bool:
        """Whether ``p`` vanishes on V(self) (Rabinowitsch membership test)."""
        if p.ring != self.ring:
            p = p.to_ring(self.ring)
        if self.contains(p):
            return True
        t = self.ring.fresh_name("r")
        big = self.ring.extend([t])
        gens = [g.to_ring(big) for g in self.gens] + [big.one() - big.var(t) * p.to_ring(big)]
        return Ideal(big, gens).is_unit()

    def __add__(self, other):
        if isinstance(other, Ideal):
            return Ideal(self.ring, self.gens + tuple(g.to_ring(self.ring) for g in other.gens))
        return Ideal(self.ring, self.gens + tuple(other))

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b.to_ring(self.ring) for a in self.gens for b in other.gens])

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.basis == other.basis

    def __hash__(self):
        return hash((self.ring, self.basis))

    def to_ring(self, ring: Ring) -> "Ideal":
        return Ideal(ring, [g.to_ring(ring) for g in self.gens])

    def substitute(self, values: dict, target: Ring) -> "Ideal":
        return Ideal(target, [g.substitute(values, target) for g in self.gens])

    def texts(self) -> list[str]:
        return [str(g) for g in self.basis]

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens) or '0'})"


def unit_ideal(ring: Ring) -> Ideal:
    return Ideal(ring, [ring.one()])


def groebner(ideal: Ideal, order: MonomialOrder = GREVLEX) -> list[Poly]:
    return ideal.groebner(order)


def eliminate(ideal: Ideal, variables) -> Ideal:
    """Intersection of ``ideal`` with the subring in the remaining variables."""
    variables = [v for v in variables if v in ideal.ring]
    sub = ideal.ring.drop(variables)
    if not variables:
        return Ideal(sub, ideal.gens)
    basis = ideal.groebner(elimination_order(variables))
    idx = [ideal.ring.index(v) for v in variables]
    kept = [g for g in basis if all(m[i] == 0 for m in g.terms for i in idx)]
    return Ideal(sub, [g.to_ring(sub) for g in kept])


def intersect(a: Ideal, b: Ideal) -> Ideal:
    ring = a.ring
    if a.is_zero() or b.is_zero():
        return Ideal(ring, [])
    if a.is_unit():
        return b
    if b.is_unit():
        return a
    t = ring.fresh_name("t")
    big = ring.extend([t])
    tv = big.var(t)
    gens = [tv * g.to_ring(big) for g in a.gens] + [(big.one() - tv) * g.to_ring(big) for g in b.gens]
    return eliminate(Ideal(big, gens), [t]).to_ring(ring)


def intersect_all(ideals) -> Ideal:
    ideals = list(ideals)
    out = ideals[0]
    for other in ideals[1:]:
        out = intersect(out, other)
    return out


def exact_divide(p: Poly, g: Poly) -> Poly:
    """Quotient of ``p`` by ``g``; raises if the division is not exact."""
    ring = p.ring
    lm, lc = g.leading_term()
    inv = ring.field.inv(lc)
    q = ring.zero()
    r = p
    while r:
        m, c = r.leading_term()
        if any(a < b for a, b in zip(m, lm)):
            raise ArithmeticError(f"{g} does not divide {p}")
        u = tuple(a - b for a, b in zip(m, lm))
        coef = c * inv
        q = q + Poly(ring, {u: ring.field.convert(coef)})
        r = r - g.mul_term(u, coef)
    return q


def _quotient_principal(ideal: Ideal, g: Poly) -> Ideal:
    ring = ideal.ring
    if ideal.is_unit():
        return ideal
    if g.is_constant():
        return ideal
    if ideal.contains(g):
        return unit_ideal(ring)
    inter = intersect(ideal, Ideal(ring, [g]))
    return Ideal(ring, [exact_divide(h, g) for h in inter.basis])


def ideal_quotient(ideal: Ideal, divisor: Ideal) -> Ideal:
    """``I : J = {p : pJ ⊆ I}``."""
    gens = [g.to_ring(ideal.ring) for g in divisor.gens]
    if not gens:
        return unit_ideal(ideal.ring)
    return intersect_all([_quotient_principal(ideal, g) for g in gens])


def _saturate_principal(ideal: Ideal, g: Poly) -> Ideal:
    ring = ideal.ring
    if g.is_constant() or ideal.is_unit():
        return ideal
    t = ring.fresh_name("s")
    big = ring.extend([t])
    gens = [h.to_ring(big) for h in ideal.gens] + [big.one() - big.var(t) * g.to_ring(big)]
    return eliminate(Ideal(big, gens), [t]).to_ring(ring)


def saturate(ideal: Ideal, divisor: Ideal) -> Ideal:
    """``I : J^inf`` as the intersection of the saturations by each generator of J."""
    gens = [g.to_ring(ideal.ring) for g in divisor.gens]
    if not gens:
        # I : (0)^inf is the whole ring
        return unit_ideal(ideal.ring)
    if any(g.is_constant() for g in gens):
        return ideal
    return intersect_all([_saturate_principal(ideal, g) for g in gens])


def _independent_dimension(lms, n: int) -> int:
    supports = [frozenset(i for i, k in enumerate(m) if k) for m in lms]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return size
    return 0


def krull_dim(ideal: Ideal) -> int:
    """Dimension of V(I); -1 for the unit ideal."""
    if ideal.is_unit():
        return -1
    return _independent_dimension(leading_monomials(list(ideal.basis)), ideal.ring.nvars)


def standard_monomials(ideal: Ideal) -> list[tuple]:
    """Monomials outside the leading-term ideal (finite for zero-dim ideals)."""
    if krull_dim(ideal) > 0:
        raise ValueError("ideal is not zero-dimensional")
    if ideal.is_unit():
        return []
    lms = leading_monomials(list(ideal.basis))
    n = ideal.ring.nvars
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and all(m[j] == 0 for j in range(n) if j != i)]
        bounds.append(min(pure))
    return [m for m in product(*(range(b) for b in bounds))
            if not any(all(a <= b for a, b in zip(lm, m)) for lm in lms)]


def vs_dim(ideal: Ideal):
    """Vector-space dimension of the quotient algebra; ``math.inf`` if infinite."""
    if ideal.is_unit():
        return 0
    if krull_dim(ideal) > 0:
        return math.inf
    return len(standard_monomials(ideal))


def _translate(ideal: Ideal, point) -> Ideal:
    ring = ideal.ring
    shift = {v: ring.var(v) + ring.constant(c) for v, c in zip(ring.names, point)}
    return Ideal(ring, [g.substitute(shift) for g in ideal.gens])


def maximal_ideal(ring: Ring, point=None) -> Ideal:
    if point is None:
        return Ideal(ring, ring.gens())
    return Ideal(ring, [ring.var(v) - ring.constant(c) for v, c in zip(ring.names, point)])


def local_multiplicity(ideal: Ideal, point, strict: bool = True) -> int:
    """Length of the local algebra of ``ideal`` at the rational ``point``.

    With ``strict`` the ideal must be zero-dimensional.  Otherwise only the
    component at ``point`` has to be zero-dimensional, i.e. the point must be
    isolated in V(ideal).
    """
    if len(point) != ideal.ring.nvars:
        raise ValueError("point has the wrong number of coordinates")
    if strict and krull_dim(ideal) > 0:
        raise ValueError("local_multiplicity needs a zero-dimensional ideal")
    if not point_on(ideal, point):
        return 0
    J = _translate(ideal, point)
    m = maximal_ideal(J.ring)
    away = saturate(J, m)
    local = ideal_quotient(J, away)
    d = vs_dim(local)
    if d == math.inf:
        raise ValueError("point is not isolated in the zero set")
    return d


def point_on(ideal: Ideal, point) -> bool:
    values = dict(zip(ideal.ring.names, point))
    return all(g.evaluate(values) == 0 for g in ideal.gens)


def minors(matrix, size: int):
    """All ``size`` x ``size`` minors of a matrix of polynomials (list of rows)."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    if size == 0:
        return None  # empty minor: determinant 1
    out = []
    for rs in combinations(range(rows), size):
        for cs in combinations(range(cols), size):
            d = determinant([[matrix[r][c] for c in cs] for r in rs])
            if d:
                out.append(d)
    return out


def determinant(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        sub = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0].ring.zero()


def minor_ideal(ring: Ring, matrix, size: int) -> Ideal:
    """Ideal of ``size``-minors; unit ideal for size 0, zero ideal when size exceeds the shape."""
    if size <= 0:
        return unit_ideal(ring)
    if size > len(matrix) or (matrix and size > len(matrix[0])):
        return Ideal(ring, [])
    return Ideal(ring, minors(matrix, size))


def _squarefree_part(p: Poly) -> Poly:
    import sympy

    ring = p.ring
    (v,) = p.variables()
    sym = sympy.Symbol(v)
    expr = sympy.sympify(str(p).replace("^", "**"), locals={v: sym})
    opts = {"modulus": ring.field.modulus} if ring.field.modulus else {}
    part = sympy.Poly(expr, sym, **opts).sqf_part()
    return ring.parse(str(part.as_expr()).replace("**", "^"))


def zero_dim_radical(ideal: Ideal) -> Ideal:
    """Radical of a zero-dimensional ideal; other ideals are returned unchanged.

    Adds the squarefree part of the univariate eliminant in every variable,
    which is valid in characteristic 0 and for primes above the degree.
    """
    if ideal.is_unit() or krull_dim(ideal) != 0:
        return ideal
    extra = []
    for v in ideal.ring.names:
        others = [u for u in ideal.ring.names if u != v]
        uni = eliminate(ideal, others)
        g = uni.basis[0].to_ring(ideal.ring)
        if not g.variables():
            continue
        if ideal.ring.field.modulus and ideal.ring.field.modulus <= g.total_degree():
            return ideal
        extra.append(_squarefree_part(g))
    return ideal + Ideal(ideal.ring, extra)
