"""Normal-data tables and the characteristic-cycle calculus built on them.

A stratum carries a table ``j -> H^j`` of finitely generated abelian groups
(the hypercohomology of a normal slice relative to the complex link).  All
degree shifts are index arithmetic; nothing shifted is ever stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .algebra import Ideal, Poly, Ring, intersect_all, point_on, zero_dim_radical
from .conormal import conormal_ideal, covector_names
from .cycles import Cycle, Variety

ZERO_IDEAL = 0


def _prime_powers(n: int) -> dict:
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


@dataclass(frozen=True)
class FinAbGroup:
    """``Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`` with d_1 | d_2 | ... and every d_i >= 2."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        object.__setattr__(self, "torsion", tuple(invariant_factors(self.torsion)))

    @classmethod
    def from_relations(cls, generators: int, relations) -> "FinAbGroup":
        """Cokernel of the integer matrix ``relations`` (rows are relations)."""
        from sympy import Matrix, ZZ
        from sympy.matrices.normalforms import smith_normal_form

        rows = [list(r) for r in relations if any(r)]
        if not rows:
            return cls(generators)
        snf = smith_normal_form(Matrix(rows), domain=ZZ)
        diag = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
        nonzero = [d for d in diag if d]
        return cls(generators - len(nonzero), tuple(d for d in nonzero if d > 1))

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def p_torsion_count(self, p: int) -> int:
        """Number of invariant factors divisible by p, i.e. dim of (torsion ⊗ F_p)."""
        return sum(1 for d in self.torsion if d % p == 0)

    def __add__(self, other: "FinAbGroup") -> "FinAbGroup":
        return FinAbGroup(self.rank + other.rank, self.torsion + other.torsion)

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data) -> "FinAbGroup":
        if isinstance(data, int):
            return cls(data)
        return cls(int(data.get("rank", 0)), tuple(int(t) for t in data.get("torsion", ())))

    def __str__(self):
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def invariant_factors(divisors) -> list[int]:
    """Canonical divisibility chain for ``⊕ Z/d``; units are dropped."""
    powers: dict = {}
    for d in divisors:
        d = int(d)
        if d == 0:
            raise ValueError("torsion divisor 0 is not allowed; use rank")
        for p, e in _prime_powers(abs(d)).items():
            powers.setdefault(p, []).append(p ** e)
    if not powers:
        return []
    length = max(len(v) for v in powers.values())
    chain = [1] * length
    for p, vals in powers.items():
        vals.sort()
        for k, v in enumerate(vals):
            chain[length - len(vals) + k] *= v
    return chain


def normalize_table(table) -> dict:
    """Drop zero entries; accept FinAbGroup values or their JSON form."""
    out = {}
    for j, g in dict(table).items():
        g = g if isinstance(g, FinAbGroup) else FinAbGroup.from_json(g)
        if not g.is_zero():
            out[int(j)] = g
    return dict(sorted(out.items()))


def euler_char(table) -> int:
    return sum((-1) ** (j % 2) * g.rank for j, g in table.items())


def m_alpha(table, d: int, d_alpha: int) -> int:
    return (-1) ** ((d - d_alpha) % 2) * euler_char(table)


def betti_b(table, j: int) -> int:
    g = table.get(j)
    return g.rank if g else 0


def c_p(table, j: int, p: int) -> int:
    """Dimension of ``H^j ⊗ k_p`` plus ``Tor(H^{j+1}, k_p)``; p = 0 means the rationals."""
    if p == ZERO_IDEAL:
        return betti_b(table, j)
    here = table.get(j)
    above = table.get(j + 1)
    out = 0
    if here:
        out += here.rank + here.p_torsion_count(p)
    if above:
        out += above.p_torsion_count(p)
    return out


def visible(table) -> bool:
    return any(not g.is_zero() for g in table.values())


@dataclass(frozen=True, eq=False)
class StratumSpec:
    name: str
    closure: Variety
    dim: int
    table: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "table", normalize_table(self.table))
        if self.closure.dimension != self.dim:
            raise ValueError(f"stratum {self.name}: declared dim {self.dim}, "
                             f"closure has dimension {self.closure.dimension}")

    @property
    def visible(self) -> bool:
        return visible(self.table)

    def with_table(self, table) -> "StratumSpec":
        return StratumSpec(self.name, self.closure, self.dim, table)

    def to_json(self) -> dict:
        return {"name": self.name, "generators": list(self.closure.generators), "dim": self.dim,
                "table": {str(j): g.to_json() for j, g in self.table.items()}}


@dataclass(frozen=True, eq=False)
class StratifiedSheafData:
    ring: Ring
    strata: tuple
    primes: tuple = (ZERO_IDEAL,)

    def __post_init__(self):
        object.__setattr__(self, "strata", tuple(self.strata))
        primes = sorted({int(p) for p in self.primes} | {ZERO_IDEAL})
        for p in primes:
            if p and not _is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "primes", tuple(primes))
        seen = set()
        for s in self.strata:
            if s.closure in seen:
                raise ValueError(f"duplicate stratum closure {s.closure}")
            seen.add(s.closure)

    @property
    def ambient_dim(self) -> int:
        return self.ring.nvars

    @cached_property
    def d(self) -> int:
        return max((s.dim for s in self.strata), default=0)

    def visible_strata(self):
        return [s for s in self.strata if s.visible]

    def with_tables(self, tables) -> "StratifiedSheafData":
        """Same strata with the tables replaced (``tables`` keyed by stratum name)."""
        return StratifiedSheafData(self.ring, [s.with_table(tables.get(s.name, {})) for s in self.strata],
                                   self.primes)

    def to_json(self) -> dict:
        return {"variables": list(self.ring.names), "primes": [p for p in self.primes if p],
                "strata": [s.to_json() for s in self.strata]}


def _is_prime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


@dataclass(frozen=True)
class CharacteristicCycle:
    cycle: Cycle
    base_of: dict

    def to_json(self) -> list[dict]:
        return self.cycle.to_json(self.base_of)

    def support(self) -> set:
        return set(self.cycle.components())


def _assemble(pairs) -> CharacteristicCycle:
    base_of = {}
    terms = []
    for coeff, stratum in pairs:
        if coeff:
            comp = conormal_ideal(stratum.closure).variety
            base_of[comp] = stratum.closure
            terms.append((coeff, comp))
    return CharacteristicCycle(Cycle.from_pairs(terms), base_of)


def ch(F: StratifiedSheafData) -> CharacteristicCycle:
    return _assemble((m_alpha(s.table, F.d, s.dim), s) for s in F.strata)


def ch_perverse(F: StratifiedSheafData, i: int, p: int = ZERO_IDEAL) -> CharacteristicCycle:
    sign = -1 if F.d % 2 else 1
    return _assemble((sign * c_p(s.table, i - s.dim, p), s) for s in F.strata)


def perverse_degrees(F: StratifiedSheafData) -> range:
    """Degrees i outside of which every ``ch_perverse(F, i, p)`` vanishes."""
    idx = [j + s.dim for s in F.strata for j in s.table]
    if not idx:
        return range(0)
    return range(min(idx) - 1, max(idx) + 1)


def alternating_sum_check(F: StratifiedSheafData) -> bool:
    total = Cycle.zero()
    for i in perverse_degrees(F):
        piece = ch_perverse(F, i).cycle
        total = total + (piece if i % 2 == 0 else -piece)
    return total == ch(F).cycle


def is_normal_partitioning(F: StratifiedSheafData, W) -> bool:
    allowed = {conormal_ideal(w).variety for w in W}
    for p in F.primes:
        for i in perverse_degrees(F):
            if not ch_perverse(F, i, p).support() <= allowed:
                return False
    return True


def covector_of(f: Poly, target: Ring | None = None) -> dict:
    """Substitution ``w_k -> df/dz_k`` into the cotangent ring."""
    ring = f.ring
    target = ring if target is None else target
    subs = {v: target.var(v) for v in ring.names}
    for v, w in zip(ring.names, covector_names(ring)):
        subs[w] = f.diff(v).to_ring(target)
    return subs


def phi_support_components(F: StratifiedSheafData, f: Poly) -> list[Variety]:
    """Per visible stratum: points x where (x, d_x f) lies on its conormal (maybe empty)."""
    subs = covector_of(f)
    out = []
    for s in F.visible_strata():
        total = conormal_ideal(s.closure).total
        out.append(Variety(total.substitute(subs, f.ring), s.name))
    return out


def phi_support_locus(F: StratifiedSheafData, f: Poly) -> Variety:
    comps = [c for c in phi_support_components(F, f) if not c.is_empty()]
    if not comps:
        return Variety(Ideal(f.ring, [f.ring.one()]))
    return Variety(zero_dim_radical(intersect_all([c.ideal for c in comps])))


def phi_point_membership(F: StratifiedSheafData, f: Poly, point) -> bool:
    return any(point_on(c.ideal, point) for c in phi_support_components(F, f))


__all__ = [
    "ZERO_IDEAL", "FinAbGroup", "invariant_factors", "normalize_table", "euler_char", "m_alpha",
    "betti_b", "c_p", "visible", "StratumSpec", "StratifiedSheafData", "CharacteristicCycle",
    "ch", "ch_perverse", "perverse_degrees", "alternating_sum_check", "is_normal_partitioning",
    "covector_of", "phi_support_components", "phi_support_locus", "phi_point_membership",
]
