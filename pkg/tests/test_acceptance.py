"""Acceptance suite: one PASS/FAIL line per criterion, printed to the terminal.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even without -s)
or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction
from itertools import product

import pytest

from vancycles.afcheck import af_pair_check, cor48_scenario, prop43_check
from vancycles.algebra import Ideal, Ring, local_multiplicity, vs_dim
from vancycles.charcycle import (
    FinAbGroup, StratifiedSheafData, StratumSpec, alternating_sum_check, betti_b, c_p,
)
from vancycles.cli import build_report, main, reset_caches
from vancycles.cycles import Variety
from vancycles.polar import _one_draw, pick_generic_linear, point_coefficient
from vancycles.problem import Problem, bundled_names
from vancycles.vanishing import VfPartition, VfStratum, betti_transfer, vanishing_index_check

R = Ring(["x", "y"])
_capture = None


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


@pytest.fixture(autouse=True)
def _terminal(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def V(*gens, ring=R):
    return Variety(Ideal.parse(ring, list(gens)))


def plane_shadow(ring=R):
    return StratifiedSheafData(ring, [StratumSpec("open", Variety(Ideal(ring, [])), ring.nvars,
                                                  {0: FinAbGroup(1)})])


# -- criterion 1 -------------------------------------------------------------------
# Independent oracle: dimension of C[x,y]/J by Macaulay-matrix linear algebra over QQ.
# Rows are monomial multiples of the generators up to degree D; the quotient of the
# degree-<=D polynomials by their span stabilizes to dim C[x,y]/J once D is large.

def _derivatives(a, b):
    # d/dx (x^a + y^b) = a x^(a-1), d/dy = b y^(b-1), as {exponent: coefficient}
    return [{(a - 1, 0): Fraction(a)}, {(0, b - 1): Fraction(b)}]


def _rank(rows):
    rank = 0
    pivots = {}
    for r in rows:
        r = dict(r)
        while r:
            lead = min(r)
            if lead in pivots:
                p = pivots[lead]
                k = r[lead] / p[lead]
                for c, v in p.items():
                    r[c] = r.get(c, 0) - k * v
                    if r[c] == 0:
                        del r[c]
            else:
                pivots[lead] = r
                rank += 1
                break
    return rank


def staircase_dim(gens, nvars=2):
    previous = None
    degree = max(sum(m) for g in gens for m in g)
    D = degree
    while True:
        monos = [m for m in product(range(D + 1), repeat=nvars) if sum(m) <= D]
        index = {m: k for k, m in enumerate(monos)}
        rows = []
        for g in gens:
            gdeg = max(sum(m) for m in g)
            for m in monos:
                if sum(m) + gdeg <= D:
                    rows.append({index[tuple(a + b for a, b in zip(m, e))]: c for e, c in g.items()})
        dim = len(monos) - _rank(rows)
        if dim == previous:
            return dim
        previous = dim
        D += 1


def test_criterion_1_milnor_numbers():
    start = time.perf_counter()
    bad = []
    for a in range(2, 6):
        for b in range(2, 6):
            f = R.parse(f"x^{a} + y^{b}")
            oracle = staircase_dim(_derivatives(a, b))
            got = point_coefficient(f, V(), (0, 0), seed=0)
            if not (got == oracle == (a - 1) * (b - 1)):
                bad.append((a, b, got, oracle))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    assert report(1, ok, f"16 Brieskorn curves, mismatches {bad}, {elapsed:.1f}s"), bad


# -- criterion 2 -------------------------------------------------------------------

def test_criterion_2_transfer_corpus():
    xy = Problem.load("bundled:xy").build()
    r = betti_transfer(xy.f, xy.F, xy.W, seed=0)
    cusp = Problem.load("bundled:cusp").build()
    s = betti_transfer(cusp.f, cusp.F, cusp.W, seed=0)
    ok = (r.table("origin") == {2: 1} and r.table("xaxis") == {} and r.table("yaxis") == {}
          and s.table("origin") == {2: 2} and s.table("curve") == {})
    assert report(2, ok, f"xy origin {r.table('origin')}, axes {r.table('xaxis')} {r.table('yaxis')}; "
                         f"cusp origin {s.table('origin')}")


# -- criterion 3 -------------------------------------------------------------------

def _brieskorn(a, b):
    f = R.parse(f"x^{a} + y^{b}")
    return f, plane_shadow(), VfPartition(f, [VfStratum("curve", V(f"x^{a} + y^{b}"), 1),
                                              VfStratum("origin", V("x", "y"), 0)])


def test_criterion_3_route_consistency():
    cases = {}
    for name in ("xy", "cusp", "smooth_x", "line_zero", "umbrella_whitney"):
        P = Problem.load(f"bundled:{name}").build()
        cases[name] = (P.f, P.F, P.W)
    for a in range(2, 6):
        for b in range(2, 6):
            cases[f"brieskorn_{a}_{b}"] = _brieskorn(a, b)
    failed = [k for k, (f, F, W) in cases.items() if not vanishing_index_check(f, F, W, seed=0).ok]
    assert report(3, not failed, f"{len(cases)} instances, failing {failed}")


# -- criterion 4 -------------------------------------------------------------------

CLOSURES = [((), 2), (("y",), 1), (("x",), 1), (("y - x^2",), 1), (("x", "y"), 0),
            (("x - 1", "y - 1"), 0), (("x*y - 1",), 1), (("x - 2",), 1)]


def _random_sheaf(rng):
    picked = rng.sample(CLOSURES, rng.randint(1, len(CLOSURES)))
    strata = []
    for k, (gens, dim) in enumerate(picked):
        table = {}
        for j in range(-2, 3):
            if rng.random() < 0.45:
                table[j] = FinAbGroup(rng.randint(0, 3), tuple(rng.sample([2, 3, 4, 6, 9], rng.randint(0, 2))))
        strata.append(StratumSpec(f"s{k}", V(*gens), dim, table))
    return StratifiedSheafData(R, strata, primes=[2, 3, 5])


def test_criterion_4_calculus_identities():
    rng = random.Random(20240)
    trials = 150
    alt_bad = 0
    cp_bad = 0
    for _ in range(trials):
        F = _random_sheaf(rng)
        alt_bad += not alternating_sum_check(F)
        for s in F.strata:
            for j in range(-4, 4):
                if c_p(s.table, j, 0) != betti_b(s.table, j):
                    cp_bad += 1
                cp_bad += sum(c_p(s.table, j, p) < betti_b(s.table, j) for p in F.primes)
    inert_bad = []
    for name in ("xy", "cusp", "umbrella_whitney"):
        P = Problem.load(f"bundled:{name}").build()
        ghost = [StratumSpec("ghost", Variety(Ideal(P.ring, [P.ring.parse(v) - P.ring.constant(5)
                                                             for v in P.ring.names])), 0, {})]
        G = StratifiedSheafData(P.ring, list(P.F.strata) + ghost, P.F.primes)
        if betti_transfer(P.f, P.F, P.W, 0).results_json() != betti_transfer(P.f, G, P.W, 0).results_json():
            inert_bad.append(name)
    ok = not alt_bad and not cp_bad and not inert_bad
    assert report(4, ok, f"{trials} random sheaves: alternating-sum failures {alt_bad}, "
                         f"c_p/b violations {cp_bad}, inertness failures {inert_bad}")


# -- criterion 5 -------------------------------------------------------------------

def test_criterion_5_af_agreement():
    problems = []
    compared = 0
    R3 = Ring(["x", "y", "z"])
    f = R3.parse("x^2 - z*y^2")
    umb = af_pair_check(V(ring=R3), f, V("x", "y", ring=R3), (0, 0, 0))
    umb_ok = umb.verdict is False and umb.covector is not None and umb.covector[2] != 0
    if not umb_ok:
        problems.append(f"umbrella direct verdict {umb.to_json()}")
    if prop43_check(f, V(ring=R3), V("x", "y", ring=R3), (0, 0, 0)) != (False, False):
        problems.append("umbrella prop43")
    # the non-Whitney partition: direct route fails at 0, via-vanishing makes no claim there
    P = Problem.load("bundled:umbrella").build()
    rep = cor48_scenario(P.f, P.partition())
    at0 = [v for v in rep.verdicts if v.point == (0, 0, 0) and v.pair == ("open", "zaxis")]
    if not any(v.method == "direct" and v.verdict is False for v in at0):
        problems.append("non-Whitney umbrella: no false direct verdict at 0")
    # Whitney-refined partitions: all true, and the two routes agree point by point
    for name in ("xy", "cusp", "smooth_x", "umbrella_whitney"):
        P = Problem.load(f"bundled:{name}").build()
        rep = cor48_scenario(P.f, P.partition())
        by_key = {}
        for v in rep.verdicts:
            by_key.setdefault((v.pair, v.point), {})[v.method] = v.verdict
        for key, m in by_key.items():
            if m.get("via-vanishing") is None or m["direct"] != m["via-vanishing"]:
                problems.append(f"{name} {key}: {m}")
        if not rep.all_true:
            problems.append(f"{name}: not all true")
        for s in P.partition():
            if s.closure.ideal.contains(P.f) and s.points:
                for x in s.points:
                    try:
                        pair = prop43_check(P.f, Variety(Ideal(P.ring, [])), s.closure, x)
                    except ValueError:
                        continue
                    compared += 1
                    if pair[0] != pair[1]:
                        problems.append(f"{name} prop43 at {x}: {pair}")
    assert report(5, not problems, f"umbrella witness covector {umb.covector}; {compared} prop43 pairs; "
                         f"problems {problems}")


# -- criterion 6 -------------------------------------------------------------------

def test_criterion_6_algebra_engine():
    from test_algebra import _fixtures

    problems = []
    fixtures = _fixtures()
    for gens, points in fixtures:
        I = Ideal.parse(R, gens)
        if sum(local_multiplicity(I, p) for p in points) != vs_dim(I):
            problems.append(f"multiplicity sum {gens}")
    rng = random.Random(6)
    R3 = Ring(["x", "y", "z"])
    base = Ideal.parse(R3, ["x^2 - y*z", "y^3 - x*z + 1", "x*y*z - z^2"])
    monos = [R3.parse(m) for m in ("1", "x", "y", "z", "x*y", "y*z", "x^2", "z^3")]
    unsound = 0
    for _ in range(100):
        combo = R3.zero()
        for g in base.gens:
            mult = R3.zero()
            for m in rng.sample(monos, 3):
                mult = mult + m.scale(rng.randint(-9, 9))
            combo = combo + mult * g
        unsound += not base.contains(combo)
        unsound += base.contains(combo + R3.parse("x"))
    if unsound:
        problems.append(f"{unsound} membership errors")
    disagreements = []
    for name in bundled_names():
        p = Problem.load(f"bundled:{name}")
        reset_caches()
        q = build_report(p)["results"]
        reset_caches()
        m = build_report(p, field_text="modular:32003", confirm=False)["results"]
        if q != m:
            disagreements.append(name)
    if disagreements:
        problems.append(f"modular/rational disagreement {disagreements}")
    assert report(6, not problems, f"{len(fixtures)} multiplicity fixtures, 200 membership probes, "
                                   f"{len(bundled_names())} corpus entries mod 32003; problems {problems}")


# -- criterion 7 -------------------------------------------------------------------

def _results_bytes(tmp_path, name, *extra):
    out = tmp_path / "out.json"
    reset_caches()
    code = main(["run", name, "--out", str(out), "--results-only", *extra])
    return code, out.read_bytes()


def test_criterion_7_determinism(tmp_path):
    problems = []
    for name in bundled_names():
        seeds = {_results_bytes(tmp_path, name, "--no-cache", "--seed", str(s)) for s in (0, 17, 90210)}
        if len(seeds) != 1:
            problems.append(f"{name}: seeds")
        cache = tmp_path / f"cache-{name}"
        states = [_results_bytes(tmp_path, name, "--no-cache"),
                  _results_bytes(tmp_path, name, "--cache-dir", str(cache)),
                  _results_bytes(tmp_path, name, "--cache-dir", str(cache))]
        for k, path in enumerate(sorted(cache.rglob("*.json"))):
            if k % 2 == 0:
                path.write_text("{\"format\": 1, \"key\": \"truncated")
        states.append(_results_bytes(tmp_path, name, "--cache-dir", str(cache)))
        if len(set(states)) != 1:
            problems.append(f"{name}: cache states")
    # two independent generic linear forms give the same coefficient at every corpus point
    draws = 0
    for name in bundled_names():
        P = Problem.load(f"bundled:{name}").build()
        for s in P.F.visible_strata():
            if s.closure.ideal.contains(P.f):
                continue
            for w in P.W:
                if w.dim != 0 or not all(g.evaluate(dict(zip(P.ring.names, w.witness))) == 0
                                         for g in s.closure.ideal.gens):
                    continue
                values = set()
                for seed in ("first", "second"):
                    L = pick_generic_linear(P.ring, seed)
                    with_f, with_l = _one_draw(P.f, s.closure, w.witness, L)
                    values.add(with_f - with_l)
                    draws += 1
                if len(values) != 1:
                    problems.append(f"{name} {s.name}/{w.name}: draws disagree {values}")
    assert report(7, not problems, f"{len(bundled_names())} corpus entries x (3 seeds, 4 cache states), "
                                   f"{draws} independent L draws; problems {problems}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
