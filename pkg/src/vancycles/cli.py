"""Command-line front end.

``vancycles run PROBLEM`` executes the commands listed in a problem file and
writes a JSON report.  Certified values live under ``results``; everything
that depends on the random draws (linear forms, slices) lives under
``diagnostics``, so two seeds give identical ``results``.

Exit codes: 0 success, 1 invalid input, 2 genericity budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .afcheck import HypothesisNotMet, af_pair_check, cor48_scenario, prop43_check
from .algebra import QQ, Ideal, PolynomialSyntaxError, Ring, UnluckyPrime, field_from_string, set_groebner_cache
from .algebra.groebner import clear_memo
from .cache import DiskCache
from .charcycle import (
    alternating_sum_check,
    ch,
    ch_perverse,
    is_normal_partitioning,
    m_alpha,
    perverse_degrees,
    phi_support_locus,
)
from .conormal import ConormalError, conormal_ideal, relative_conormal_ideal
from .cycles import Variety
from .polar import (
    GenericityError,
    GenericLinear,
    certified_point_coefficient,
    intersection_number,
    polar_curve,
)
from .problem import COMMANDS, Problem, ProblemError, bundled_names, resolve_problem_path
from .vanishing import (
    betti_transfer,
    critical_values,
    exceptional_support,
    phi_normality_check,
    vanishing_index_check,
)

log = logging.getLogger("vancycles")

EXIT_OK, EXIT_INVALID, EXIT_GENERICITY = 0, 1, 2


def reset_caches() -> None:
    """Forget every in-process memo (Gröbner bases and conormal constructions)."""
    clear_memo()
    conormal_ideal.cache_clear()
    relative_conormal_ideal.cache_clear()


# -- pipeline -------------------------------------------------------------------

def _prop43_entry(f, s, w, x) -> dict:
    entry = {"pair": [s.name, w.name], "point": [str(Fraction(c)) for c in x]}
    try:
        containment, af = prop43_check(f, s.closure, w.closure, x)
    except HypothesisNotMet as exc:
        entry["skipped"] = str(exc)
        return entry
    entry.update({"containment": containment, "a_f": af, "agree": containment == af})
    return entry


def _run_command(cmd, built, seed, retries):
    F, f, W = built.F, built.f, built.W
    if cmd == "ch":
        return {"cycle": ch(F).to_json(),
                "m": {s.name: m_alpha(s.table, F.d, s.dim) for s in F.strata}}, {}
    if cmd == "perverse":
        pieces = []
        for p in F.primes:
            for i in perverse_degrees(F):
                piece = ch_perverse(F, i, p)
                if not piece.cycle.is_zero():
                    pieces.append({"i": i, "p": p, "cycle": piece.to_json()})
        return {"pieces": pieces, "alternating_sum": alternating_sum_check(F)}, {}
    if cmd == "normality":
        closures = [s.closure for s in F.strata]
        return {"sheaf_normal": is_normal_partitioning(F, closures),
                "phi_normal": phi_normality_check(f, F, W)}, {}
    if cmd == "support":
        exc = {}
        for s in F.visible_strata():
            exc[s.name] = list(exceptional_support(f, s).generators)
        return {"critical_values": critical_values(f, F).to_json(),
                "phi_support": list(phi_support_locus(F, f).generators),
                "exceptional_support": exc}, {}
    if cmd == "transfer":
        result = betti_transfer(f, F, W, seed, retries)
        return result.results_json(), {"draws": result.diagnostics_json()}
    if cmd == "index-check":
        result = betti_transfer(f, F, W, seed, retries)
        return vanishing_index_check(f, F, W, seed, retries, result).to_json(), {}
    if cmd == "afcheck":
        verdicts, prop43 = [], []
        for name, M, N, x in built.afcheck:
            v = af_pair_check(M, f, N, x)
            v.pair = (name, name)
            verdicts.append(v.to_json())
        for s in F.visible_strata():
            for w in W:
                for x in built.points.get(w.name, ()):
                    v = af_pair_check(s.closure, f, w.closure, x)
                    v.pair = (s.name, w.name)
                    verdicts.append(v.to_json())
                    prop43.append(_prop43_entry(f, s, w, x))
        return {"verdicts": verdicts, "prop43": prop43,
                "quantifier": "verdicts hold at the listed points only"}, {}
    if cmd == "cor48":
        shadows = built.shadows
        if shadows is not None:
            shadows = {a: {k: v for k, v in t.items()} for a, t in shadows.items()}
        rep = cor48_scenario(f, built.partition(), shadows, seed, retries)
        return rep.to_json(), {}
    raise ProblemError(f"unknown command {cmd!r}")


def run_problem(problem: Problem, fld=QQ, seed=None, retries=None, commands=None):
    """Execute the commands; returns (results, diagnostics) dictionaries."""
    seed = problem.seed if seed is None else seed
    retries = problem.retries if retries is None else retries
    built = problem.build(fld)
    results, diagnostics = {}, {}
    for cmd in commands or problem.commands:
        res, diag = _run_command(cmd, built, seed, retries)
        results[cmd] = res
        if diag:
            diagnostics[cmd] = diag
    return results, diagnostics


def build_report(problem: Problem, *, seed=None, retries=None, field_text=None, confirm=True,
                 cache: DiskCache | None = None, timing=False, commands=None) -> dict:
    seed = problem.seed if seed is None else seed
    field_text = field_text or problem.field_text
    fld = field_from_string(field_text)
    started = time.perf_counter()
    diagnostics: dict = {}
    try:
        results, diag = run_problem(problem, fld, seed, retries, commands)
    except UnluckyPrime as exc:
        diagnostics["field"] = f"unlucky prime, recomputed over the rationals: {exc}"
        results, diag = run_problem(problem, QQ, seed, retries, commands)
        fld = QQ
    diagnostics.update(diag)
    if fld.modulus:
        if confirm:
            rational, _ = run_problem(problem, QQ, seed, retries, commands)
            if rational != results:
                diagnostics["field"] = f"results modulo {fld.modulus} disagree with the rationals; rational results reported"
                results = rational
            else:
                diagnostics["field"] = f"results modulo {fld.modulus} confirmed over the rationals"
        else:
            diagnostics["field"] = f"results computed modulo {fld.modulus}, not confirmed over the rationals"
    if cache is not None and cache.warnings:
        diagnostics["cache"] = list(cache.warnings)
    if timing:
        diagnostics["seconds"] = round(time.perf_counter() - started, 3)
    return {
        "tool": "vancycles",
        "version": __version__,
        "problem": problem.name,
        "seed": seed,
        "field": field_text,
        "results": results,
        "diagnostics": diagnostics,
    }


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def summary_lines(report) -> list[str]:
    """Human-readable table: command, key, value (tab separated, stable order)."""
    lines = ["command\tkey\tvalue"]
    for cmd, res in report["results"].items():
        if cmd == "transfer":
            for beta, tab in sorted(res["b"].items()):
                lines.append(f"transfer\tb[{beta}]\t{json.dumps(tab, sort_keys=True)}")
            for entry in res["coefficients"]:
                lines.append(f"transfer\tcoef[{entry['alpha']},{entry['beta']}]\t{entry['value']}")
        elif cmd == "index-check":
            lines.append(f"index-check\tok\t{res['ok']}")
        elif cmd in ("afcheck", "cor48"):
            for v in res["verdicts"]:
                lines.append(f"{cmd}\t{v['pair'][0]}->{v['pair'][1]}@({','.join(v['point'])})"
                             f"[{v['method']}]\t{v['verdict']}")
            for e in res.get("prop43", []):
                where = f"{e['pair'][0]}->{e['pair'][1]}@({','.join(e['point'])})[prop43]"
                lines.append(f"{cmd}\t{where}\t{e.get('a_f', 'skipped')}")
        elif cmd == "ch":
            for term in res["cycle"]:
                lines.append(f"ch\t[{', '.join(term.get('base_generators', []))}]\t{term['coefficient']}")
        elif cmd == "normality":
            for k in sorted(res):
                lines.append(f"normality\t{k}\t{res[k]}")
        elif cmd == "perverse":
            lines.append(f"perverse\talternating_sum\t{res['alternating_sum']}")
            lines.append(f"perverse\tpieces\t{len(res['pieces'])}")
        elif cmd == "support":
            lines.append(f"support\tcritical_values\t{','.join(res['critical_values']['values'])}")
            lines.append(f"support\tphi_support\t{', '.join(res['phi_support'])}")
    return lines


# -- argument handling ------------------------------------------------------------

def _ring_for(texts, variables):
    if variables:
        names = [v.strip() for v in variables.split(",") if v.strip()]
    else:
        import re

        names = sorted({tok for t in texts for tok in re.findall(r"[A-Za-z_][A-Za-z_0-9]*", t)})
        if not names:
            names = ["x"]
    return Ring(names)


def _point(text, n):
    coords = [Fraction(c) for c in text.split(",")] if text else [Fraction(0)] * n
    if len(coords) != n:
        raise ProblemError(f"point needs {n} coordinates")
    return tuple(coords)


def _gens(text):
    return [g for g in (text or "").split(",") if g.strip()]


def _configure_cache(args):
    if getattr(args, "no_cache", False):
        set_groebner_cache(None)
        return None
    directory = getattr(args, "cache_dir", None) or os.environ.get("VANCYCLES_CACHE_DIR")
    if not directory:
        set_groebner_cache(None)
        return None
    cache = DiskCache(directory)
    set_groebner_cache(cache)
    return cache


def cmd_run(args) -> int:
    problem = Problem.load(args.problem)
    cache = _configure_cache(args)
    commands = tuple(args.commands.split(",")) if args.commands else None
    if commands:
        for c in commands:
            if c not in COMMANDS:
                raise ProblemError(f"unknown command {c!r}")
    report = build_report(problem, seed=args.seed, retries=args.retries, field_text=args.field,
                          confirm=args.confirm_over_rationals, cache=cache, timing=args.timing,
                          commands=commands)
    body = {"results": report["results"]} if args.results_only else report
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(body))
    print("\n".join(summary_lines(report)))
    return EXIT_OK


def cmd_mu(args) -> int:
    ring = _ring_for([args.f], args.vars)
    f = ring.parse(args.f)
    point = _point(args.point, ring.nvars)
    cert = certified_point_coefficient(f, Variety(Ideal(ring, [])), point, args.seed, args.retries)
    print(cert.value)
    return EXIT_OK


def cmd_polar(args) -> int:
    ring = _ring_for([args.f, args.linear or ""], args.vars)
    f = ring.parse(args.f)
    L = ring.parse(args.linear) if args.linear else None
    if L is None:
        from .polar import pick_generic_linear

        lin = pick_generic_linear(ring, args.seed)
    else:
        lin = GenericLinear(L, args.seed, 0, "user")
    point = _point(args.point, ring.nvars)
    curve = polar_curve(f, Variety(Ideal(ring, [])), lin)
    shifted = lin.form - ring.constant(lin.form.evaluate(dict(zip(ring.names, point))))
    with_f = intersection_number(curve, f, point)
    with_l = intersection_number(curve, shifted, point)
    print(f"L\t{lin.form}")
    print(f"polar\t{', '.join(curve.ideal.texts()) or '0'}")
    print(f"gamma.V(f)\t{with_f}")
    print(f"gamma.V(L)\t{with_l}")
    print(f"coefficient\t{with_f - with_l}")
    return EXIT_OK


def cmd_conormal(args) -> int:
    gens = _gens(args.generators)
    ring = _ring_for(gens, args.vars)
    con = conormal_ideal(Variety(Ideal.parse(ring, gens)))
    for g in con.total.texts():
        print(g)
    return EXIT_OK


def cmd_afpair(args) -> int:
    texts = _gens(args.M) + _gens(args.N) + [args.f]
    ring = _ring_for(texts, args.vars)
    M = Variety(Ideal.parse(ring, _gens(args.M)))
    N = Variety(Ideal.parse(ring, _gens(args.N)))
    v = af_pair_check(M, ring.parse(args.f), N, _point(args.point, ring.nvars))
    print(json.dumps(v.to_json(), sort_keys=True))
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.name:
        print(resolve_problem_path(args.name))
    else:
        print("\n".join(bundled_names()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vancycles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a problem file")
    run.add_argument("problem", help="path to a problem file, or the name of a bundled corpus entry")
    run.add_argument("--out", help="write the JSON report here")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--retries", type=int, default=None)
    run.add_argument("--field", default=None, help="rationals | modular:p")
    run.add_argument("--cache-dir", default=None)
    run.add_argument("--no-cache", action="store_true")
    run.add_argument("--confirm-over-rationals", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--commands", default=None, help="comma-separated subset of commands")
    run.add_argument("--results-only", action="store_true", help="write only the certified results")
    run.add_argument("--timing", action="store_true", help="record wall-clock time in diagnostics")
    run.set_defaults(func=cmd_run)

    def common(p):
        p.add_argument("--vars", default=None, help="comma-separated variable names")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--point", default=None, help="comma-separated coordinates (default origin)")

    mu = sub.add_parser("mu", help="exceptional coefficient of f on the ambient space at a point")
    mu.add_argument("f")
    mu.add_argument("--retries", type=int, default=8)
    common(mu)
    mu.set_defaults(func=cmd_mu)

    polar = sub.add_parser("polar", help="relative polar curve and its intersection numbers")
    polar.add_argument("f")
    polar.add_argument("--linear", default=None)
    common(polar)
    polar.set_defaults(func=cmd_polar)

    con = sub.add_parser("conormal", help="generators of a conormal variety")
    con.add_argument("generators", help="comma-separated generators of the base ideal")
    con.add_argument("--vars", default=None)
    con.set_defaults(func=cmd_conormal)

    af = sub.add_parser("afpair", help="direct a_f check for a pair (M, N) at a point")
    af.add_argument("--M", default="", help="generators of M (empty for the ambient space)")
    af.add_argument("--N", required=True)
    af.add_argument("--f", required=True)
    common(af)
    af.set_defaults(func=cmd_afpair)

    corpus = sub.add_parser("corpus", help="list bundled problem files")
    corpus.add_argument("name", nargs="?")
    corpus.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GenericityError as exc:
        print(f"genericity failure: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except (ProblemError, PolynomialSyntaxError, ConormalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
