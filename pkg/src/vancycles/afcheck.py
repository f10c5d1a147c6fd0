"""Thom's a_f condition: direct checks and the vanishing-cycle criterion.

Verdicts are pointwise.  "a_f holds along N" in a report always means "at
every point listed for N", never a statement about all of N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Ideal, Poly, point_on
from .charcycle import CharacteristicCycle, StratifiedSheafData, StratumSpec, is_normal_partitioning
from .conormal import (
    ConormalError,
    codimension,
    conormal_ideal,
    covector_of_point,
    covector_ring,
    fiber_at,
    fiber_violation,
    find_covector,
    is_constant_on,
    jacobian_rank_at,
    relative_conormal_ideal,
    singular_locus_ideal,
    whitney_a_at,
)
from .cycles import Cycle, Variety, restrict_within, support
from .polar import DEFAULT_RETRIES
from .vanishing import (
    VfPartition,
    VfStratum,
    betti_transfer,
    cone_contained_in_union,
    exceptional_support,
    phi_normality_check,
    phi_support_cycle,
)


class HypothesisNotMet(ValueError):
    """A precondition of a criterion fails, so the criterion says nothing."""


def _point_json(point):
    return [str(Fraction(c)) for c in point]


@dataclass
class AfVerdict:
    pair: tuple
    point: tuple
    verdict: bool | None
    method: str
    witness: str | None = None
    covector: tuple | None = None
    note: str = ""

    @property
    def skipped(self) -> bool:
        return self.verdict is None

    def to_json(self) -> dict:
        out = {"pair": list(self.pair), "point": _point_json(self.point), "method": self.method,
               "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.covector is not None:
            out["covector"] = list(self.covector)
        if self.note:
            out["note"] = self.note
        return out


def _names(big, small):
    return (getattr(big, "name", None) or str(big), getattr(small, "name", None) or str(small))


def af_pair_check(M: Variety, f: Poly, N: Variety, point) -> AfVerdict:
    """Limits of relative conormal covectors of M at ``point`` lie in the conormal of N."""
    point = tuple(point)
    if not point_on(N.ideal, point):
        raise ConormalError(f"point {point} is not on {N}")
    if not is_constant_on(N, f):
        raise ValueError("f is not constant on N")
    pair = _names(M, N)
    if not point_on(M.ideal, point):
        return AfVerdict(pair, point, True, "direct", note="point not on the closure of M")
    big = fiber_at(relative_conormal_ideal(M, f), point)
    small = fiber_at(conormal_ideal(N), point)
    bad = fiber_violation(big, small)
    if bad is None:
        return AfVerdict(pair, point, True, "direct")
    return AfVerdict(pair, point, False, "direct", str(bad), find_covector(big, bad))


def _exceptional_fiber(f: Poly, X: Variety, point) -> Ideal:
    supp = exceptional_support(f, X)
    ring = X.ring
    wr = covector_ring(ring)
    values = {v: wr.constant(c) for v, c in zip(ring.names, point)}
    return supp.ideal.substitute(values, wr)


def prop43_check(f: Poly, X: Variety, N: Variety, point, seed=None) -> tuple[bool, bool]:
    """(fiber containment of pi(E) in P(T*_N), a_f verdict) at ``point``.

    Raises HypothesisNotMet when (X_reg, N) fails Whitney a at the point, when
    d(f|N) does not vanish there, or when f is constant on X.
    """
    point = tuple(point)
    if is_constant_on(X, f):
        raise HypothesisNotMet("f is constant on X")
    if not whitney_a_at(X, N, point):
        raise HypothesisNotMet(f"(X_reg, N) fails Whitney a at {point}")
    if not point_on(conormal_ideal(N).total, covector_of_point(f, point)):
        raise HypothesisNotMet(f"d(f|N) does not vanish at {point}")
    fib = _exceptional_fiber(f, X, point)
    target = fiber_at(conormal_ideal(N), point).ideal
    containment = cone_contained_in_union(fib, [target])
    return containment, bool(af_pair_check(X, f, N, point).verdict)


def af_via_vanishing(chphi: CharacteristicCycle, M: Variety, point, f: Poly) -> AfVerdict:
    """Every component of |Ch(phi_f[-1]P)| over ``point`` lies in the conormal fiber of M."""
    point = tuple(point)
    if not M.ideal.contains(f):
        raise ValueError("M is not contained in V(f)")
    if not point_on(M.ideal, point):
        raise ConormalError(f"point {point} is not on {M}")
    target = fiber_at(conormal_ideal(M), point)
    for comp in sorted(support(chphi.cycle), key=lambda v: v.sort_key()):
        base = chphi.base_of[comp]
        if not point_on(base.ideal, point):
            continue
        fib = fiber_at(conormal_ideal(base), point)
        bad = fiber_violation(fib, target)
        if bad is not None:
            return AfVerdict(("phi", M.name or str(M)), point, False, "via-vanishing", str(bad),
                             find_covector(fib, bad))
    return AfVerdict(("phi", M.name or str(M)), point, True, "via-vanishing")


TRIANGLE_DIRECTIONS = ("phi_from_psi", "psi_from_phi", "ishriek_from_p", "p_from_parts")


def triangle_ch(first: Cycle, second: Cycle, direction: str) -> Cycle:
    """Characteristic-cycle arithmetic of the two distinguished triangles.

    phi_from_psi:   Ch(phi_f[-1]P) = Ch(psi_f[-1]P) - Ch(j*P[-1])   (first=psi, second=j*)
    psi_from_phi:   Ch(psi_f[-1]P) = Ch(phi_f[-1]P) + Ch(j*P[-1])   (first=phi, second=j*)
    ishriek_from_p: Ch(i_!i^!P) = Ch(P) - Ch(j_*j^*P)                (first=P, second=j_*j^*)
    p_from_parts:   Ch(P) = Ch(i_!i^!P) + Ch(j_*j^*P)                (first=i_!i^!, second=j_*j^*)
    """
    if direction in ("phi_from_psi", "ishriek_from_p"):
        return first - second
    if direction in ("psi_from_phi", "p_from_parts"):
        return first + second
    raise ValueError(f"unknown direction {direction!r}; expected one of {TRIANGLE_DIRECTIONS}")


def ishriek_psi_support_check(ishriek: CharacteristicCycle, psi: Cycle, f: Poly) -> bool:
    """|Ch(i_!i^!P)| restricted over V(f) equals |Ch(psi_f[-1]P)|, both supplied by the caller."""
    inside = restrict_within(ishriek.cycle, Ideal(f.ring, [f]), ishriek.base_of)
    return support(inside) == support(psi)


# -- the stratification pipeline ----------------------------------------------

@dataclass(frozen=True, eq=False)
class PartitionStratum:
    name: str
    closure: Variety
    dim: int
    points: tuple = ()

    @property
    def witness(self):
        return self.points[0] if self.points else None


@dataclass
class ScenarioReport:
    verdicts: list = field(default_factory=list)
    hypotheses: list = field(default_factory=list)
    normality: dict = field(default_factory=dict)
    transfers: dict = field(default_factory=dict)

    @property
    def all_true(self) -> bool:
        return all(v.verdict for v in self.verdicts if not v.skipped)

    def to_json(self) -> dict:
        return {
            "verdicts": [v.to_json() for v in self.verdicts],
            "hypotheses": self.hypotheses,
            "normality": self.normality,
            "transfers": self.transfers,
            "quantifier": "verdicts hold at the listed points only",
        }


def constant_shadow(stratum: PartitionStratum) -> dict:
    """Tables of the constant sheaf on a smooth stratum closure: {0: Z} on the stratum itself."""
    return {stratum.name: {0: {"rank": 1}}}


def is_smooth(V: Variety) -> bool:
    return (V.ideal + singular_locus_ideal(V)).is_unit()


def _is_smooth_at(V: Variety, point) -> bool:
    return jacobian_rank_at(V, point) == codimension(V)


def _whitney_at(strata, beta: PartitionStratum, point):
    """Whitney a for every pair (W_gamma reg, W_beta) with W_beta in the closure of W_gamma."""
    failures = []
    for gamma in strata:
        if gamma is beta or gamma.dim <= beta.dim:
            continue
        if not gamma.closure.contains_variety(beta.closure):
            continue
        if not whitney_a_at(gamma.closure, beta.closure, point):
            failures.append(gamma.name)
    return failures


def cor48_scenario(f: Poly, strata, shadows: dict | None = None, seed=0,
                   retries: int = DEFAULT_RETRIES) -> ScenarioReport:
    """a_f verdicts for ((closure W_alpha)_reg, W_beta), W_beta in V(f), by both routes.

    ``shadows`` maps a stratum name W_alpha to the normal-data tables (keyed by
    stratum name) of the perverse sheaf built from it; by default every
    stratum with a smooth closure gets the constant shadow.
    """
    strata = list(strata)
    ring = f.ring
    in_vf = [s for s in strata if s.closure.ideal.contains(f)]
    vf = VfPartition(f, [VfStratum(s.name, s.closure, s.dim, s.witness) for s in in_vf])
    report = ScenarioReport()
    for beta in in_vf:
        for x in beta.points:
            if not _is_smooth_at(beta.closure, x):
                raise ValueError(f"point {x} is not a smooth point of {beta.name}")
            fails = _whitney_at(strata, beta, x)
            report.hypotheses.append({"stratum": beta.name, "point": _point_json(x),
                                      "whitney_a": not fails, "failing": fails})
    whitney_ok = {(h["stratum"], tuple(h["point"])): h["whitney_a"] for h in report.hypotheses}
    if shadows is None:
        shadows = {s.name: constant_shadow(s) for s in strata if is_smooth(s.closure)}
    closures = [s.closure for s in strata]
    for alpha_name in sorted(shadows):
        alpha = next(s for s in strata if s.name == alpha_name)
        tables = shadows[alpha_name]
        F = StratifiedSheafData(ring, [StratumSpec(s.name, s.closure, s.dim, tables.get(s.name, {}))
                                       for s in strata])
        normal = is_normal_partitioning(F, closures) and phi_normality_check(f, F, vf)
        report.normality[alpha_name] = normal
        result = betti_transfer(f, F, vf, seed, retries)
        report.transfers[alpha_name] = result.results_json()
        chphi = phi_support_cycle(result, vf)
        for beta in in_vf:
            for x in beta.points:
                direct = af_pair_check(alpha.closure, f, beta.closure, x)
                direct.pair = (alpha.name, beta.name)
                report.verdicts.append(direct)
                reasons = []
                if not whitney_ok[(beta.name, tuple(_point_json(x)))]:
                    reasons.append("Whitney a fails at this point")
                if not normal:
                    reasons.append("partition is not normal")
                if reasons:
                    report.verdicts.append(AfVerdict((alpha.name, beta.name), tuple(x), None, "via-vanishing",
                                                     note="; ".join(reasons)))
                    continue
                via = af_via_vanishing(chphi, beta.closure, x, f)
                via.pair = (alpha.name, beta.name)
                report.verdicts.append(via)
    return report


__all__ = [
    "HypothesisNotMet", "AfVerdict", "af_pair_check", "prop43_check", "af_via_vanishing",
    "TRIANGLE_DIRECTIONS", "triangle_ch", "ishriek_psi_support_check", "PartitionStratum",
    "ScenarioReport", "constant_shadow", "cor48_scenario",
]
