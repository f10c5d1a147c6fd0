"""Formal integer combinations of affine varieties."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .algebra import Ideal, krull_dim


class Variety:
    """An affine variety given by a (trusted reduced) defining ideal.

    Two varieties are equal exactly when their reduced grevlex bases agree,
    so equality does not depend on the generating set used to build them.
    """

    def __init__(self, ideal: Ideal, name: str | None = None):
        self.ideal = ideal
        self.name = name

    @classmethod
    def parse(cls, ring, texts, name=None) -> "Variety":
        return cls(Ideal.parse(ring, texts), name)

    @property
    def ring(self):
        return self.ideal.ring

    @cached_property
    def dimension(self) -> int:
        return krull_dim(self.ideal)

    @cached_property
    def generators(self) -> tuple[str, ...]:
        return tuple(self.ideal.texts())

    def is_empty(self) -> bool:
        return self.ideal.is_unit()

    def contains_variety(self, other: "Variety") -> bool:
        """Set containment ``other ⊆ self``, read off from ideal inclusion."""
        return all(other.ideal.contains(g) for g in self.ideal.gens)

    def sort_key(self):
        return (self.ring.names, self.dimension, self.generators)

    def __eq__(self, other):
        if not isinstance(other, Variety):
            return NotImplemented
        return self.ring == other.ring and self.ideal.basis == other.ideal.basis

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"V({label}{', '.join(self.generators) or '0'})"

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "dimension": self.dimension}


@dataclass(frozen=True)
class Cycle:
    """Sorted tuple of ``(coefficient, Variety)`` pairs with nonzero coefficients."""

    terms: tuple = ()

    @classmethod
    def from_pairs(cls, pairs) -> "Cycle":
        acc: dict = {}
        for coeff, var in pairs:
            acc[var] = acc.get(var, 0) + int(coeff)
        items = [(c, v) for v, c in acc.items() if c]
        items.sort(key=lambda cv: cv[1].sort_key())
        return cls(tuple(items))

    @classmethod
    def zero(cls) -> "Cycle":
        return cls(())

    def __add__(self, other: "Cycle") -> "Cycle":
        return Cycle.from_pairs(self.terms + other.terms)

    def __neg__(self) -> "Cycle":
        return Cycle(tuple((-c, v) for c, v in self.terms))

    def __sub__(self, other: "Cycle") -> "Cycle":
        return self + (-other)

    def __rmul__(self, k: int) -> "Cycle":
        return Cycle.from_pairs((k * c, v) for c, v in self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def components(self) -> list[Variety]:
        return [v for _, v in self.terms]

    def to_json(self, base_of=None) -> list[dict]:
        out = []
        for c, v in self.terms:
            entry = {"coefficient": c, "generators": list(v.generators), "dimension": v.dimension}
            if base_of is not None and v in base_of:
                entry["base_generators"] = list(base_of[v].generators)
            out.append(entry)
        return out


def coefficient_of(cycle: Cycle, variety: Variety) -> int:
    for c, v in cycle.terms:
        if v == variety:
            return c
    return 0


def support(cycle: Cycle) -> set[Variety]:
    return {v for c, v in cycle.terms if c}


class UnregisteredComponent(KeyError):
    pass


def restrict_within(cycle: Cycle, locus: Ideal, base_of) -> Cycle:
    """Keep the components whose registered base variety lies inside V(locus)."""
    kept = []
    for c, v in cycle.terms:
        try:
            base = base_of[v]
        except KeyError:
            raise UnregisteredComponent(f"component {v} has no registered base") from None
        if all(base.ideal.contains(g.to_ring(base.ring)) for g in locus.gens):
            kept.append((c, v))
    return Cycle.from_pairs(kept)
