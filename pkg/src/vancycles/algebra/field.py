"""Coefficient fields: the rationals (backed by gmpy2) and prime fields."""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import is_prime, mpq


class UnluckyPrime(ArithmeticError):
    """A rational coefficient has a denominator divisible by the modulus."""


class RationalField:
    modulus = 0
    name = "QQ"

    def convert(self, value):
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            return mpq(value.numerator, value.denominator)
        return mpq(value)

    def inv(self, c):
        return 1 / c

    def to_fraction(self, c) -> Fraction:
        return Fraction(int(c.numerator), int(c.denominator))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    def __init__(self, p: int):
        p = int(p)
        if p < 2 or not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.modulus = p
        self.name = f"GF({p})"

    def convert(self, value):
        p = self.modulus
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int):
            return value % p
        num, den = int(value.numerator), int(value.denominator)
        if den % p == 0:
            raise UnluckyPrime(f"denominator {den} vanishes modulo {p}")
        return num * pow(den, -1, p) % p

    def inv(self, c):
        return pow(int(c), -1, self.modulus)

    def to_fraction(self, c) -> Fraction:
        return Fraction(int(c))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("GF", self.modulus))

    def __repr__(self):
        return self.name


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_string(text: str):
    """Parse ``rationals`` / ``QQ`` or ``modular:p`` / ``GF(p)``."""
    t = text.strip()
    if t in ("rationals", "QQ", "Q"):
        return QQ
    if t.startswith("modular:"):
        return PrimeField(int(t.split(":", 1)[1]))
    if t.startswith("GF(") and t.endswith(")"):
        return PrimeField(int(t[3:-1]))
    raise ValueError(f"unknown field {text!r}")
