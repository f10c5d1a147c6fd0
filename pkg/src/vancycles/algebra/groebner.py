"""Buchberger's algorithm with the normal selection strategy.

Pairs are pruned with the Gebauer-Moeller installation of Buchberger's
product and chain criteria.  Basis elements are kept monic, so over the
rationals every reduction step works with normalized coefficients.
"""

from __future__ import annotations

import hashlib
import logging
from heapq import heapify, heappop, heappush
from operator import add, sub

from .polynomial import GREVLEX, MonomialOrder, Poly, format_polynomial

log = logging.getLogger(__name__)

_MEMO: dict = {}
_MEMO_LIMIT = 20000
_DISK_CACHE = None


def set_groebner_cache(cache) -> None:
    """Install an object with ``get(key) -> list[str] | None`` and ``put(key, list[str])``."""
    global _DISK_CACHE
    _DISK_CACHE = cache


def get_groebner_cache():
    return _DISK_CACHE


def clear_memo() -> None:
    _MEMO.clear()


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(map(max, a, b))


def _disjoint(a, b) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _reduce(work: dict, basis, key, mod) -> dict:
    """Fully reduce ``work`` (consumed) by monic ``basis`` entries ``(lm, tail)``."""
    heap = [(tuple([-k for k in key(m)]), m) for m in work]
    heapify(heap)
    rem = {}
    while heap:
        _, m = heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        for lm, tail in basis:
            if _divides(lm, m):
                u = tuple(map(sub, m, lm))
                for tm, tc in tail:
                    mm = tuple(map(add, tm, u))
                    old = work.get(mm)
                    v = (0 if old is None else old) - c * tc
                    if mod:
                        v %= mod
                    if v:
                        if old is None:
                            heappush(heap, (tuple([-k for k in key(mm)]), mm))
                        work[mm] = v
                    elif old is not None:
                        del work[mm]
                break
        else:
            rem[m] = c
    return rem


def _make_monic(terms: dict, key, field):
    lm = max(terms, key=key)
    inv = field.inv(terms[lm])
    mod = field.modulus
    tail = []
    for m, c in terms.items():
        if m != lm:
            v = c * inv
            if mod:
                v %= mod
            tail.append((m, v))
    tail.sort(key=lambda t: key(t[0]), reverse=True)
    return lm, tail


def _spoly(g1, g2, mod):
    lm1, tail1 = g1
    lm2, tail2 = g2
    lcm = _lcm(lm1, lm2)
    u1 = tuple(map(sub, lcm, lm1))
    u2 = tuple(map(sub, lcm, lm2))
    out = {}
    for m, c in tail1:
        out[tuple(map(add, m, u1))] = c
    for m, c in tail2:
        mm = tuple(map(add, m, u2))
        v = out.get(mm, 0) - c
        if mod:
            v %= mod
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def _buchberger(ring, polys, order: MonomialOrder):
    key = order.key_function(ring)
    field = ring.field
    mod = field.modulus
    G = []          # (lm, tail)
    active = []     # indices into G
    B = []          # pairs (i, j)

    def update(h):
        lmh = G[h][0]
        C = list(active)
        D = []
        while C:
            g1 = C.pop(0)
            lcm1 = _lcm(G[g1][0], lmh)
            if _disjoint(G[g1][0], lmh):
                D.append(g1)
                continue
            if any(_divides(_lcm(G[g2][0], lmh), lcm1) for g2 in C) or \
               any(_divides(_lcm(G[g2][0], lmh), lcm1) for g2 in D):
                continue
            D.append(g1)
        E = [(g, h) for g in D if not _disjoint(G[g][0], lmh)]
        keep = []
        for (i, j) in B:
            lij = _lcm(G[i][0], G[j][0])
            if (_divides(lmh, lij) and _lcm(G[i][0], lmh) != lij
                    and _lcm(G[j][0], lmh) != lij):
                continue
            keep.append((i, j))
        B[:] = keep + E
        active[:] = [g for g in active if not _divides(lmh, G[g][0])] + [h]

    def insert(terms):
        rem = _reduce(dict(terms), [G[i] for i in active], key, mod)
        if not rem:
            return
        if len(rem) == 1 and not any(next(iter(rem))):
            raise _UnitIdeal
        G.append(_make_monic(rem, key, field))
        update(len(G) - 1)

    try:
        for p in sorted(polys, key=lambda q: key(max(q.terms, key=key))):
            insert(p.terms)
        while B:
            best = min(range(len(B)), key=lambda t: (key(_lcm(G[B[t][0]][0], G[B[t][1]][0])), B[t]))
            i, j = B.pop(best)
            s = _spoly(G[i], G[j], mod)
            if s:
                insert(s)
    except _UnitIdeal:
        return [ring.one()]

    # active is a minimal basis; interreduce tails
    basis = [G[i] for i in active]
    reduced = []
    for k, (lm, tail) in enumerate(basis):
        others = basis[:k] + basis[k + 1:]
        rem = _reduce(dict(tail), others, key, mod)
        rem[lm] = field.convert(1)
        reduced.append(Poly(ring, rem))
    reduced.sort(key=lambda p: key(max(p.terms, key=key)), reverse=True)
    return reduced


class _UnitIdeal(Exception):
    pass


def canonical_key(ring, gens, order: MonomialOrder) -> str:
    texts = sorted({format_polynomial(g.monic()) for g in gens if g})
    blob = "|".join([repr(ring.field), ",".join(ring.names), repr(order)] + texts)
    return hashlib.sha256(blob.encode()).hexdigest()


def groebner_basis(ring, gens, order: MonomialOrder = GREVLEX) -> list[Poly]:
    """Return the reduced Gröbner basis (monic, sorted descending) of ``gens``."""
    gens = [g for g in gens if g]
    if not gens:
        return []
    k = canonical_key(ring, gens, order)
    hit = _MEMO.get(k)
    if hit is not None:
        return hit
    basis = None
    if _DISK_CACHE is not None:
        texts = _DISK_CACHE.get(k)
        if texts is not None:
            basis = [ring.parse(t) for t in texts]
    if basis is None:
        basis = _buchberger(ring, gens, order)
        if _DISK_CACHE is not None:
            _DISK_CACHE.put(k, [format_polynomial(b) for b in basis])
    if len(_MEMO) > _MEMO_LIMIT:
        _MEMO.clear()
    _MEMO[k] = basis
    return basis


def normal_form(p: Poly, basis, order: MonomialOrder = GREVLEX) -> Poly:
    """Remainder of ``p`` on division by a Gröbner basis ``basis``."""
    ring = p.ring
    key = order.key_function(ring)
    prepared = [_make_monic(b.terms, key, ring.field) for b in basis if b]
    return Poly(ring, _reduce(dict(p.terms), prepared, key, ring.field.modulus))


def leading_monomials(basis, order: MonomialOrder = GREVLEX):
    if not basis:
        return []
    key = order.key_function(basis[0].ring)
    return [max(b.terms, key=key) for b in basis]
