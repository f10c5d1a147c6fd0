"""Exceptional divisors of blown-up conormals and the transfer of normal data to phi_f.

For each visible stratum S_alpha the conormal variety is blown up along the
image of df.  The projection of the exceptional divisor to U x P^n is a
combination of projectivized conormals of a partition {W_beta} of V(f), and
its coefficients turn the normal-data tables of F into those of phi_f[-1]F.

Tables of phi_f[-1]F are keyed by normal-data degree: an input entry in
degree j on S_alpha lands in degree ``j + d_alpha - d_beta`` on W_beta.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Ideal, Poly, Ring, eliminate, intersect, krull_dim, point_on, saturate
from .charcycle import (
    ZERO_IDEAL,
    CharacteristicCycle,
    StratifiedSheafData,
    StratumSpec,
    betti_b,
    c_p,
    m_alpha,
)
from .conormal import conormal_ideal, cotangent_ring, covector_names, is_constant_on, singular_locus_ideal
from .cycles import Cycle, Variety, coefficient_of
from .polar import (
    DEFAULT_RETRIES,
    ConstantOnStratum,
    GenericityError,
    certified_point_coefficient,
    critical_locus,
    nonzero_coefficient,
    seeded_rng,
)

log = logging.getLogger(__name__)


class NormalityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class VfStratum:
    name: str
    closure: Variety
    dim: int
    witness: tuple | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "generators": list(self.closure.generators), "dim": self.dim}
        if self.witness is not None:
            out["witness"] = [str(Fraction(c)) for c in self.witness]
        return out


def rational_point_of(variety: Variety):
    """The point of a variety cut out by ``z_k - c_k`` for every variable, else None."""
    ring = variety.ring
    point = []
    for v in ring.names:
        g = ring.var(v)
        r = variety.ideal.reduce(g)
        if r.variables():
            return None
        point.append(ring.field.to_fraction(r.constant_coefficient()))
    if not point_on(variety.ideal, point):
        return None
    return tuple(point)


class VfPartition:
    """Partition of V(f) into strata with optional rational witness points."""

    def __init__(self, f: Poly, strata):
        self.f = f
        self.strata = []
        for s in strata:
            if not s.closure.ideal.contains(f):
                raise ValueError(f"stratum {s.name} is not contained in V(f)")
            if s.closure.dimension != s.dim:
                raise ValueError(f"stratum {s.name}: declared dim {s.dim}, "
                                 f"closure has dimension {s.closure.dimension}")
            witness = s.witness
            if witness is None and s.dim == 0:
                witness = rational_point_of(s.closure)
            if witness is not None:
                witness = tuple(Fraction(c) for c in witness)
                if not point_on(s.closure.ideal, witness):
                    raise ValueError(f"witness {witness} is not on stratum {s.name}")
            self.strata.append(VfStratum(s.name, s.closure, s.dim, witness))

    def __iter__(self):
        return iter(self.strata)

    def __len__(self):
        return len(self.strata)

    def closures(self) -> list[Variety]:
        return [s.closure for s in self.strata]

    @property
    def dim(self) -> int:
        return max((s.dim for s in self.strata), default=-1)


# -- critical values ---------------------------------------------------------

@dataclass
class CriticalValues:
    values: list
    nonrational: bool = False
    constant_on: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"values": [str(v) for v in self.values], "nonrational": self.nonrational,
                "constant_on": list(self.constant_on)}


def _univariate_roots(p: Poly):
    """Roots of linear factors (as Fractions, or residues mod p) and a flag for other factors."""
    import sympy

    (v,) = p.variables()
    mod = p.ring.field.modulus
    sym = sympy.Symbol(v)
    expr = sympy.sympify(str(p).replace("^", "**"), locals={v: sym})
    opts = {"modulus": mod} if mod else {}
    roots, nonrational = [], False
    for factor, _ in sympy.factor_list(expr, **opts)[1]:
        fp = sympy.Poly(factor, sym, **opts)
        if fp.degree() == 1:
            a, b = (int(c) for c in fp.all_coeffs()) if mod else fp.all_coeffs()
            if mod:
                roots.append(Fraction(-b * pow(a, -1, mod) % mod))
            else:
                r = sympy.Rational(-b, a)
                roots.append(Fraction(int(r.p), int(r.q)))
        elif fp.degree() > 1:
            nonrational = True
    return roots, nonrational


def critical_values(f: Poly, F: StratifiedSheafData) -> CriticalValues:
    ring = f.ring
    t = ring.fresh_name("t")
    big = ring.extend([t])
    found: set = set()
    out = CriticalValues([])
    for s in F.visible_strata():
        if is_constant_on(s.closure, f):
            out.constant_on.append(s.name)
            if s.dim > 0:
                continue
        crit = critical_locus(f, s.closure)
        if crit.is_unit():
            continue
        J = crit.to_ring(big) + Ideal(big, [big.var(t) - f.to_ring(big)])
        uni = eliminate(J, ring.names)
        if uni.is_zero():
            out.nonrational = True
            continue
        if uni.is_unit():
            continue
        roots, nonrational = _univariate_roots(uni.basis[0])
        found.update(roots)
        out.nonrational |= nonrational
    out.values = sorted(found)
    return out


# -- exceptional coefficients -------------------------------------------------

@dataclass
class CoefficientRecord:
    alpha: str
    beta: str
    value: int
    rule: str
    draws: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "value": self.value, "rule": self.rule}


def _slice(ring: Ring, point, k: int, seed, retry: int, stream: str) -> list[Poly]:
    rng = seeded_rng(seed, "slice", stream, retry)
    values = dict(zip(ring.names, point))
    eqs = []
    for _ in range(k):
        form = ring.zero()
        for v in ring.names:
            form = form + ring.var(v).scale(nonzero_coefficient(rng, ring.field))
        eqs.append(form - ring.constant(form.evaluate(values)))
    return eqs


def exceptional_base(f: Poly, S: Variety) -> Ideal:
    """Ideal of Crit(f on S_reg) together with Sing S.

    Over a smooth point of S the divisor only lies above critical points of
    f, so the projection of E_alpha to U is contained in this locus.
    """
    crit = critical_locus(f, S)
    sing = S.ideal + singular_locus_ideal(S)
    return intersect(crit, sing)


def _inside(W: Variety, locus: Ideal) -> bool:
    return all(W.ideal.radical_contains(g) for g in locus.basis)


def exceptional_record(f: Poly, stratum: StratumSpec, target: VfStratum, seed,
                       retries: int = DEFAULT_RETRIES) -> CoefficientRecord:
    """Coefficient of P(T*_{W_beta}) in pi(E_alpha), with the rule that produced it."""
    S = stratum.closure
    W = target.closure
    if stratum.closure.ideal.contains(f):
        return CoefficientRecord(stratum.name, target.name, 1 if S == W else 0, "constant-stratum")
    if not _inside(W, exceptional_base(f, S)):
        return CoefficientRecord(stratum.name, target.name, 0, "off-support")
    if target.witness is None:
        raise ValueError(f"stratum {target.name} needs a rational witness point")
    point = target.witness
    if not point_on(S.ideal, point):
        return CoefficientRecord(stratum.name, target.name, 0, "disjoint")
    label = f"{seed}:{stratum.name}:{target.name}"
    if target.dim == 0:
        cert = certified_point_coefficient(f, S, point, label, retries)
        return CoefficientRecord(stratum.name, target.name, cert.value, "polar", cert.draws)
    accepted = []
    rejected = 0
    for retry in range(retries):
        for stream in ("slice", "slice-check"):
            if len(accepted) == 2 or any(a[0] == stream for a in accepted):
                continue
            cut = _slice(S.ring, point, target.dim, seed, retry, stream)
            sliced = Variety(S.ideal + Ideal(S.ring, cut))
            try:
                if krull_dim(sliced.ideal) != S.dimension - target.dim:
                    raise GenericityError("slice is not transverse")
                cert = certified_point_coefficient(f, sliced, point, f"{label}:{stream}:{retry}", retries)
            except (GenericityError, ConstantOnStratum):
                rejected += 1
                continue
            accepted.append((stream, cert, [str(c) for c in cut]))
        if len(accepted) == 2:
            break
    if len(accepted) < 2:
        raise GenericityError(f"no transverse slice through {point} for {stratum.name}/{target.name}")
    if accepted[0][1].value != accepted[1][1].value:
        raise GenericityError(f"slices disagree for {stratum.name}/{target.name}: "
                              f"{accepted[0][1].value} vs {accepted[1][1].value}")
    draws = [{"slice": cut, "draws": cert.draws} for _, cert, cut in accepted]
    return CoefficientRecord(stratum.name, target.name, accepted[0][1].value, "sliced-polar", draws)


def exceptional_coefficient(f: Poly, stratum: StratumSpec, target: VfStratum, seed,
                            retries: int = DEFAULT_RETRIES) -> int:
    return exceptional_record(f, stratum, target, seed, retries).value


# -- exceptional supports -----------------------------------------------------

def _blowup_names(ring: Ring):
    used = set(ring.names) | set(covector_names(ring))
    u = [f"u_{v}" for v in ring.names]
    a = [f"a_{v}" for v in ring.names]
    if used & (set(u) | set(a)):
        raise ValueError("variable names collide with blow-up coordinates")
    return u, a


def exceptional_support(f: Poly, stratum: StratumSpec | Variety) -> Variety:
    """|pi(E_alpha)| inside V(f), as a cone in the cotangent ring (w homogeneous)."""
    S = stratum.closure if isinstance(stratum, StratumSpec) else stratum
    ring = S.ring
    tw = cotangent_ring(ring)
    conormal = conormal_ideal(S).total
    if S.ideal.contains(f):
        return Variety(conormal)
    u, a = _blowup_names(ring)
    big = Ring(ring.names + tuple(u) + tuple(a), ring.field)
    # coordinates u = w - df, so the blow-up centre is u = 0
    shift = {w: big.var(uk) + f.diff(v).to_ring(big)
             for v, w, uk in zip(ring.names, covector_names(ring), u)}
    for v in ring.names:
        shift[v] = big.var(v)
    C = conormal.substitute(shift, big)
    minors = []
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            minors.append(big.var(a[i]) * big.var(u[j]) - big.var(a[j]) * big.var(u[i]))
    graph = C + Ideal(big, minors)
    graph = saturate(graph, Ideal(big, [big.var(x) for x in a]))
    graph = saturate(graph, Ideal(big, [big.var(x) for x in u]))
    divisor = graph + Ideal(big, [big.var(x) for x in u] + [f.to_ring(big)])
    image = eliminate(divisor, u)
    rename = {ak: tw.var(w) for ak, w in zip(a, covector_names(ring))}
    for v in ring.names:
        rename[v] = tw.var(v)
    return Variety(image.substitute(rename, tw))


def cone_contained_in_union(small: Ideal, bigs) -> bool:
    """Whether P(V(small)) lies in the union of the P(V(big)) (cones in the w variables)."""
    ring = small.ring
    base = [ring.var(w) for w in ring.names if w.startswith("w_")]
    rest = saturate(small, Ideal(ring, base))
    for big in bigs:
        if rest.is_unit():
            break
        rest = saturate(rest, big)
    return rest.is_unit()


def phi_normality_check(f: Poly, F: StratifiedSheafData, W: VfPartition, seed=None) -> bool:
    conormals = [conormal_ideal(s.closure).total for s in W]
    for s in F.visible_strata():
        supp = exceptional_support(f, s)
        if supp.is_empty():
            continue
        if not cone_contained_in_union(supp.ideal, conormals):
            return False
    return True


# -- transfer -----------------------------------------------------------------

@dataclass
class TransferResult:
    strata: list
    coefficients: dict
    b: dict
    c: dict
    records: list = field(default_factory=list)

    def coefficient(self, alpha: str, beta: str) -> int:
        return self.coefficients.get((alpha, beta), 0)

    def table(self, beta: str) -> dict:
        return self.b.get(beta, {})

    def visible(self, beta: str) -> bool:
        return any(self.b.get(beta, {}).values()) or any(
            any(per.get(beta, {}).values()) for per in self.c.values())

    def results_json(self) -> dict:
        matrix = [{"alpha": a, "beta": b, "value": v} for (a, b), v in sorted(self.coefficients.items())]
        return {
            "coefficients": matrix,
            "b": {beta: {str(j): v for j, v in sorted(tab.items())} for beta, tab in self.b.items()},
            "c": {str(p): {beta: {str(j): v for j, v in sorted(tab.items())} for beta, tab in per.items()}
                  for p, per in sorted(self.c.items())},
        }

    def diagnostics_json(self) -> list:
        return [{"alpha": r.alpha, "beta": r.beta, "rule": r.rule, "draws": r.draws} for r in self.records]


def _shift_sum(tables, coefficient, dims, d_beta, value_of):
    out: dict = {}
    for name, table in tables:
        k = coefficient(name)
        if not k:
            continue
        for j in set(table) | {j - 1 for j in table}:
            v = value_of(table, j)
            if v:
                key = j + dims[name] - d_beta
                out[key] = out.get(key, 0) + v * k
    return {j: v for j, v in sorted(out.items()) if v}


def betti_transfer(f: Poly, F: StratifiedSheafData, W: VfPartition, seed,
                   retries: int = DEFAULT_RETRIES, check_normality: bool = False) -> TransferResult:
    if check_normality and not phi_normality_check(f, F, W):
        raise NormalityError("the partition of V(f) is not phi-normal for F")
    visible = F.visible_strata()
    records = []
    coeffs = {}
    for s in visible:
        for w in W:
            rec = exceptional_record(f, s, w, seed, retries)
            records.append(rec)
            if rec.value:
                coeffs[(s.name, w.name)] = rec.value
    dims = {s.name: s.dim for s in visible}
    tables = [(s.name, s.table) for s in visible]
    b, c = {}, {}
    for w in W:
        coef = lambda a, _w=w.name: coeffs.get((a, _w), 0)
        b[w.name] = _shift_sum(tables, coef, dims, w.dim, betti_b)
        for p in F.primes:
            if p == ZERO_IDEAL:
                continue
            c.setdefault(p, {})[w.name] = _shift_sum(
                tables, coef, dims, w.dim, lambda t, j, _p=p: c_p(t, j, _p))
    return TransferResult([w.name for w in W], coeffs, b, c, records)


def phi_characteristic_cycle(result: TransferResult, W: VfPartition) -> CharacteristicCycle:
    """Ch(phi_f[-1]F) read off the transferred Betti tables."""
    d_phi = W.dim
    terms, base_of = [], {}
    for w in W:
        chi = sum((-1) ** (j % 2) * v for j, v in result.table(w.name).items())
        coeff = (-1) ** ((d_phi + w.dim) % 2) * chi
        if coeff:
            comp = conormal_ideal(w.closure).variety
            base_of[comp] = w.closure
            terms.append((coeff, comp))
    return CharacteristicCycle(Cycle.from_pairs(terms), base_of)


def phi_support_cycle(result: TransferResult, W: VfPartition) -> CharacteristicCycle:
    """Union of the supports of all perverse pieces of phi_f[-1]F, as a positive cycle."""
    terms, base_of = [], {}
    for w in W:
        if result.visible(w.name):
            total = sum(result.table(w.name).values()) + sum(
                sum(per.get(w.name, {}).values()) for per in result.c.values())
            comp = conormal_ideal(w.closure).variety
            base_of[comp] = w.closure
            terms.append((total, comp))
    return CharacteristicCycle(Cycle.from_pairs(terms), base_of)


@dataclass
class IndexCheck:
    supports_agree: bool
    coefficients_agree: bool
    exceptional: dict
    phi_side: dict
    sign: int
    nonrational: bool = False

    @property
    def ok(self) -> bool:
        return self.supports_agree and self.coefficients_agree

    def to_json(self) -> dict:
        return {"ok": self.ok, "supports_agree": self.supports_agree,
                "coefficients_agree": self.coefficients_agree, "sign": self.sign,
                "exceptional": dict(sorted(self.exceptional.items())),
                "phi_side": dict(sorted(self.phi_side.items())), "nonrational_critical_values": self.nonrational}


def vanishing_index_check(f: Poly, F: StratifiedSheafData, W: VfPartition, seed,
                          retries: int = DEFAULT_RETRIES, result: TransferResult | None = None) -> IndexCheck:
    """Compare the blow-up route with the transferred-table route at the critical value 0."""
    if result is None:
        result = betti_transfer(f, F, W, seed, retries)
    crit = critical_values(f, F)
    # supports: union of exceptional supports = union of visible phi conormals
    supports = [exceptional_support(f, s).ideal for s in F.visible_strata()]
    supports = [s for s in supports if not s.is_unit()]
    seen = [conormal_ideal(w.closure).total for w in W if result.visible(w.name)]
    forward = all(cone_contained_in_union(s, seen) for s in supports)
    backward = all(cone_contained_in_union(c, supports) for c in seen)
    # coefficients: sum_alpha m_alpha [pi(E_alpha)] = (-1)^(d - dhat) P(Ch(phi_f F))
    d_hat = 1 + W.dim
    sign = (-1) ** ((F.d - d_hat) % 2)
    chphi = phi_characteristic_cycle(result, W)
    exc, phi_side = {}, {}
    for w in W:
        exc[w.name] = sum(m_alpha(s.table, F.d, s.dim) * result.coefficient(s.name, w.name)
                          for s in F.visible_strata())
        comp = conormal_ideal(w.closure).variety
        # Ch(phi_f F) = -Ch(phi_f[-1] F)
        phi_side[w.name] = sign * -coefficient_of(chphi.cycle, comp)
    return IndexCheck(forward and backward, exc == phi_side, exc, phi_side, sign, crit.nonrational)


__all__ = [
    "NormalityError", "VfStratum", "VfPartition", "rational_point_of", "CriticalValues",
    "critical_values", "CoefficientRecord", "exceptional_record", "exceptional_coefficient",
    "exceptional_support", "cone_contained_in_union", "phi_normality_check", "TransferResult",
    "betti_transfer", "phi_characteristic_cycle", "phi_support_cycle", "IndexCheck",
    "vanishing_index_check",
]
