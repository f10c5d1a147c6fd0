"""Problem files: JSON documents describing f, a stratified sheaf shadow and a partition of V(f).

Schema (all polynomials are strings in the input grammar)::

    {
      "variables": ["x", "y"],
      "f": "x*y",
      "value": "0",                      # optional critical value v, f is replaced by f - v
      "strata": [{"name", "generators", "dim", "table": {"j": {"rank", "torsion"}}}],
      "vf_partition": [{"name", "generators", "dim", "witness": [..], "points": [[..]]}],
      "primes": [2, 3],
      "seed": 0, "retries": 8, "field": "rationals",
      "commands": ["ch", "perverse", ...],
      "afcheck": [{"M": [..], "N": [..], "point": [..]}],
      "shadows": {"alpha": {"stratum": table}}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .afcheck import PartitionStratum
from .algebra import QQ, Ideal, Ring, field_from_string
from .charcycle import StratifiedSheafData, StratumSpec, normalize_table
from .cycles import Variety
from .vanishing import VfPartition, VfStratum

COMMANDS = ("ch", "perverse", "normality", "support", "transfer", "index-check", "afcheck", "cor48")
DEFAULT_COMMANDS = ("ch", "perverse", "normality", "support", "transfer", "index-check")


class ProblemError(ValueError):
    """The problem file is malformed or fails validation."""


def _point(raw, n, where):
    if not isinstance(raw, (list, tuple)) or len(raw) != n:
        raise ProblemError(f"{where}: expected a point with {n} coordinates")
    try:
        return tuple(Fraction(str(c)) for c in raw)
    except (ValueError, ZeroDivisionError):
        raise ProblemError(f"{where}: bad coordinate in {raw}") from None


def _require(data, key, kind, where="problem"):
    if key not in data:
        raise ProblemError(f"{where}: missing field {key!r}")
    if not isinstance(data[key], kind):
        raise ProblemError(f"{where}: field {key!r} has the wrong type")
    return data[key]


@dataclass
class Problem:
    raw: dict
    variables: tuple
    f_text: str
    value: Fraction = Fraction(0)
    seed: int = 0
    retries: int = 8
    field_text: str = "rationals"
    primes: tuple = ()
    commands: tuple = DEFAULT_COMMANDS
    name: str = ""
    afcheck: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Problem":
        if not isinstance(data, dict):
            raise ProblemError("problem must be a JSON object")
        variables = _require(data, "variables", list)
        if not variables or not all(isinstance(v, str) for v in variables):
            raise ProblemError("variables must be a nonempty list of names")
        f_text = _require(data, "f", str)
        strata = _require(data, "strata", list)
        if not strata:
            raise ProblemError("strata list is empty")
        commands = tuple(data.get("commands", DEFAULT_COMMANDS))
        for c in commands:
            if c not in COMMANDS:
                raise ProblemError(f"unknown command {c!r}")
        primes = data.get("primes", [])
        if not isinstance(primes, list) or not all(isinstance(p, int) and p >= 0 for p in primes):
            raise ProblemError("primes must be a list of nonnegative integers")
        try:
            value = Fraction(str(data.get("value", 0)))
        except ValueError:
            raise ProblemError("bad critical value") from None
        prob = cls(data, tuple(variables), f_text, value, int(data.get("seed", 0)),
                   int(data.get("retries", 8)), str(data.get("field", "rationals")), tuple(primes),
                   commands, name or str(data.get("name", "")), list(data.get("afcheck", [])))
        prob.build(QQ)  # validate eagerly
        return prob

    @classmethod
    def load(cls, source) -> "Problem":
        path = resolve_problem_path(source)
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ProblemError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data, Path(path).stem)

    def build(self, fld=None) -> "BuiltProblem":
        fld = QQ if fld is None else fld
        try:
            return BuiltProblem(self, fld)
        except ProblemError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise ProblemError(str(exc)) from None


class BuiltProblem:
    """A problem with all geometric objects constructed over one coefficient field."""

    def __init__(self, problem: Problem, fld):
        self.problem = problem
        data = problem.raw
        ring = Ring(problem.variables, fld)
        self.ring = ring
        n = ring.nvars
        f = ring.parse(problem.f_text)
        if problem.value:
            f = f - ring.constant(problem.value)
        self.f = f
        specs = []
        self.points = {}
        for k, s in enumerate(data["strata"]):
            where = f"strata[{k}]"
            name = _require(s, "name", str, where)
            gens = _require(s, "generators", list, where)
            dim = _require(s, "dim", int, where)
            table = s.get("table", {})
            if not isinstance(table, dict):
                raise ProblemError(f"{where}: table must be an object")
            closure = Variety(Ideal.parse(ring, gens), name)
            specs.append(StratumSpec(name, closure, dim, normalize_table(table)))
            self.points[name] = tuple(_point(p, n, where) for p in s.get("points", []))
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ProblemError("stratum names must be distinct")
        self.F = StratifiedSheafData(ring, specs, problem.primes)
        vf = []
        for k, s in enumerate(data.get("vf_partition", [])):
            where = f"vf_partition[{k}]"
            name = _require(s, "name", str, where)
            gens = _require(s, "generators", list, where)
            dim = _require(s, "dim", int, where)
            pts = [_point(p, n, where) for p in s.get("points", [])]
            witness = _point(s["witness"], n, where) if "witness" in s else (pts[0] if pts else None)
            if witness is not None and witness not in pts:
                pts.insert(0, witness)
            vf.append(VfStratum(name, Variety(Ideal.parse(ring, gens), name), dim, witness))
            self.points[name] = tuple(pts)
        self.W = VfPartition(f, vf)
        for s in self.W:
            if s.witness is not None and not self.points[s.name]:
                self.points[s.name] = (s.witness,)
        self.afcheck = []
        for k, a in enumerate(problem.afcheck):
            where = f"afcheck[{k}]"
            M = Variety(Ideal.parse(ring, _require(a, "M", list, where)))
            N = Variety(Ideal.parse(ring, _require(a, "N", list, where)))
            self.afcheck.append((a.get("name", f"pair{k}"), M, N, _point(a.get("point"), n, where)))
        self.shadows = data.get("shadows")

    def partition(self) -> list[PartitionStratum]:
        """Strata of X: the sheaf strata off V(f) followed by the partition of V(f)."""
        out = []
        seen = set()
        for s in self.W:
            seen.add(s.closure)
        for s in self.F.strata:
            if s.closure in seen or s.closure.ideal.contains(self.f):
                continue
            out.append(PartitionStratum(s.name, s.closure, s.dim, self.points.get(s.name, ())))
        for s in self.W:
            out.append(PartitionStratum(s.name, s.closure, s.dim, self.points.get(s.name, ())))
        return out


def bundled_names() -> list[str]:
    root = resources.files("vancycles") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_problem_path(source) -> Path:
    path = Path(str(source))
    if path.exists():
        return path
    name = str(source).removeprefix("bundled:")
    if name in bundled_names():
        return Path(str(resources.files("vancycles") / "data" / f"{name}.json"))
    raise ProblemError(f"no such problem file or bundled corpus entry: {source}")


__all__ = ["COMMANDS", "DEFAULT_COMMANDS", "ProblemError", "Problem", "BuiltProblem",
           "bundled_names", "resolve_problem_path", "field_from_string"]
