"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a mapping from exponent tuples to nonzero field elements.
Term order only matters for printing and for Gröbner computations, so it is
supplied by the caller instead of being baked into the ring.
"""

from __future__ import annotations

import re
from fractions import Fraction
from operator import add

from .field import QQ


class MonomialOrder:
    """A global monomial order, optionally an elimination (block) order.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"elim"``.  For ``"elim"`` the
    variables named in ``eliminate`` form the first block; both blocks are
    compared by graded reverse lexicographic order.
    """

    __slots__ = ("kind", "eliminate")

    def __init__(self, kind: str = "grevlex", eliminate=()):
        if kind not in ("lex", "grevlex", "elim"):
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "elim" and not eliminate:
            raise ValueError("elimination order needs variables to eliminate")
        self.kind = kind
        self.eliminate = tuple(sorted(eliminate)) if kind == "elim" else ()

    def key_function(self, ring: "Ring"):
        """Return ``key(exponents) -> flat int tuple``; larger tuple = larger monomial."""
        n = ring.nvars
        if self.kind == "lex":
            return tuple
        if self.kind == "grevlex":
            rev = tuple(range(n - 1, -1, -1))
            return lambda e: (sum(e),) + tuple([-e[i] for i in rev])
        missing = set(self.eliminate) - set(ring.names)
        if missing:
            raise ValueError(f"variables {sorted(missing)} not in ring")
        first = [ring.index(v) for v in self.eliminate]
        first.sort()
        rest = [i for i in range(n) if i not in first]
        rf = tuple(reversed(first))
        rr = tuple(reversed(rest))

        def key(e):
            return ((sum([e[i] for i in first]),) + tuple([-e[i] for i in rf])
                    + (sum([e[i] for i in rest]),) + tuple([-e[i] for i in rr]))

        return key

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and other.kind == self.kind
                and other.eliminate == self.eliminate)

    def __hash__(self):
        return hash((self.kind, self.eliminate))

    def __repr__(self):
        if self.kind == "elim":
            return f"elim({','.join(self.eliminate)})"
        return self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def elimination_order(variables) -> MonomialOrder:
    return MonomialOrder("elim", tuple(variables))


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Ring:
    """Polynomial ring over a field with an ordered tuple of variable names."""

    __slots__ = ("names", "field", "_index", "_hash")

    def __init__(self, names, field=QQ):
        names = tuple(names)
        for v in names:
            if not _IDENT.match(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self.field = field
        self._index = {v: i for i, v in enumerate(names)}
        self._hash = hash((names, field))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return (isinstance(other, Ring) and other.names == self.names
                and other.field == self.field)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ring({', '.join(self.names)}; {self.field!r})"

    # construction helpers
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        c = self.field.convert(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): self.field.convert(1)})

    def gens(self) -> list["Poly"]:
        return [self.var(v) for v in self.names]

    def parse(self, text: str) -> "Poly":
        return parse_polynomial(text, self)

    def extend(self, names) -> "Ring":
        """Ring with ``names`` appended (names already present are skipped)."""
        extra = [v for v in names if v not in self._index]
        return Ring(self.names + tuple(extra), self.field)

    def drop(self, names) -> "Ring":
        names = set(names)
        return Ring(tuple(v for v in self.names if v not in names), self.field)

    def with_field(self, field) -> "Ring":
        return Ring(self.names, field)

    def fresh_name(self, stem: str = "t") -> str:
        name = f"_{stem}"
        k = 0
        while name in self._index:
            k += 1
            name = f"_{stem}{k}"
        return name


class Poly:
    """Immutable polynomial.  ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # basic predicates
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coefficient(self):
        return self.terms.get((0,) * self.ring.nvars, 0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ring.names[i])
        return used

    def is_homogeneous_in(self, names) -> bool:
        idx = [self.ring.index(v) for v in names]
        degs = {sum(e[i] for i in idx) for e in self.terms}
        return len(degs) <= 1

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        mod = self.ring.field.modulus
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if mod:
                v %= mod
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.field.modulus
        if mod:
            return Poly(self.ring, {m: (-c) % mod for m, c in self.terms.items()})
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        mod = self.ring.field.modulus
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        if mod:
            out = {m: c % mod for m, c in out.items()}
        return Poly(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        c = self.ring.field.convert(c)
        mod = self.ring.field.modulus
        if mod:
            return Poly(self.ring, {m: v * c % mod for m, v in self.terms.items() if v * c % mod})
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono, c):
        mod = self.ring.field.modulus
        out = {}
        for m, v in self.terms.items():
            w = v * c
            if mod:
                w %= mod
            if w:
                out[tuple(map(add, m, mono))] = w
        return Poly(self.ring, out)

    def diff(self, name: str) -> "Poly":
        i = self.ring.index(name)
        mod = self.ring.field.modulus
        out = {}
        for m, c in self.terms.items():
            k = m[i]
            if k:
                v = c * k
                if mod:
                    v %= mod
                if v:
                    e = list(m)
                    e[i] -= 1
                    out[tuple(e)] = v
        return Poly(self.ring, out)

    def gradient(self, names=None) -> list["Poly"]:
        names = self.ring.names if names is None else names
        return [self.diff(v) for v in names]

    def evaluate(self, values: dict):
        """Substitute field values for *all* variables and return a scalar."""
        field = self.ring.field
        vals = [field.convert(values[v]) for v in self.ring.names]
        mod = field.modulus
        total = field.convert(0)
        for m, c in self.terms.items():
            t = c
            for x, k in zip(vals, m):
                if k:
                    t = t * (pow(x, k, mod) if mod else x ** k)
            total = total + t
            if mod:
                total %= mod
        return total

    def substitute(self, values: dict, target: Ring | None = None) -> "Poly":
        """Substitute scalars or polynomials for some variables.

        The result lives in ``target`` (default: the same ring).  Polynomial
        values must already live in ``target``; remaining variables are
        mapped to ``target`` by name.
        """
        target = self.ring if target is None else target
        field = target.field
        images = []
        for v in self.ring.names:
            if v in values:
                val = values[v]
                images.append(val if isinstance(val, Poly) else target.constant(val))
            else:
                images.append(target.var(v))
        result = target.zero()
        cache: dict = {}
        for m, c in self.terms.items():
            term = target.constant(field.convert(self.ring.field.to_fraction(c))
                                   if self.ring.field != field else c)
            for i, k in enumerate(m):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def to_ring(self, ring: Ring) -> "Poly":
        """Re-embed into a ring whose variables include all used variables."""
        if ring == self.ring:
            return self
        pos = []
        for i, v in enumerate(self.ring.names):
            pos.append(ring.index(v) if v in ring else None)
        n = ring.nvars
        out = {}
        convert = ring.field != self.ring.field
        for m, c in self.terms.items():
            e = [0] * n
            for i, k in enumerate(m):
                if k:
                    if pos[i] is None:
                        raise ValueError(f"variable {self.ring.names[i]} not in {ring}")
                    e[pos[i]] = k
            if convert:
                c = ring.field.convert(self.ring.field.to_fraction(c))
                if not c:
                    continue
            out[tuple(e)] = c
        return Poly(ring, out)

    # ordering helpers
    def sorted_terms(self, order: MonomialOrder = None):
        key = (order or GREVLEX).key_function(self.ring)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = None):
        key = (order or GREVLEX).key_function(self.ring)
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def monic(self, order: MonomialOrder = None) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading_term(order)
        return self.scale(self.ring.field.inv(c))

    # identity
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Poly({format_polynomial(self)!r})"


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

def _format_coeff(ring: Ring, c) -> str:
    mod = ring.field.modulus
    if mod:
        # symmetric residues, so small integers print the same as over QQ
        c = int(c)
        return str(c - mod if c > mod // 2 else c)
    f = ring.field.to_fraction(c)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_polynomial(p: Poly, order: MonomialOrder = None) -> str:
    """Canonical text: terms in descending order (grevlex unless given)."""
    if not p.terms:
        return "0"
    parts = []
    for m, c in p.sorted_terms(order):
        mono = "*".join(
            name if k == 1 else f"{name}^{k}"
            for name, k in zip(p.ring.names, m) if k
        )
        coeff = _format_coeff(p.ring, c)
        neg = coeff.startswith("-")
        if neg:
            coeff = coeff[1:]
        if mono:
            body = mono if coeff == "1" else f"{coeff}*{mono}"
        else:
            body = coeff
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class PolynomialSyntaxError(ValueError):
    pass


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            tokens.append(("id", ident))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok != ("op", op):
            raise PolynomialSyntaxError(f"expected {op!r}, got {tok[1]!r}")

    def parse(self):
        if not self.tokens:
            raise PolynomialSyntaxError("empty polynomial")
        p = self.expr()
        if self.i != len(self.tokens):
            raise PolynomialSyntaxError(f"trailing input at token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise PolynomialSyntaxError("division only by nonzero constants")
                p = p.scale(self.ring.field.inv(q.constant_coefficient()))
        return p

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise PolynomialSyntaxError("exponent must be a nonnegative integer")
            return base ** val
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.constant(val)
        if kind == "id":
            if val not in self.ring:
                raise PolynomialSyntaxError(f"unknown variable {val!r} (ring has {self.ring.names})")
            return self.ring.var(val)
        if (kind, val) == ("op", "("):
            p = self.expr()
            self.expect(")")
            return p
        raise PolynomialSyntaxError(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring: Ring) -> Poly:
    return _Parser(text, ring).parse()
