import json

import pytest

from vancycles.algebra import Ideal, Ring
from vancycles.conormal import cotangent_ring
from vancycles.cli import build_report, dumps, main, reset_caches
from vancycles.problem import Problem, ProblemError, bundled_names


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_corpus_lists_bundled_entries(capsys):
    code, out = run(["corpus"], capsys)
    assert code == 0
    for name in ("xy", "cusp", "umbrella", "umbrella_whitney", "line_zero", "smooth_x"):
        assert name in out.split()


def test_mu(capsys):
    assert run(["mu", "x^2+y^3"], capsys) == (0, "2\n")
    assert run(["mu", "x*y"], capsys) == (0, "1\n")
    assert run(["mu", "x"], capsys) == (0, "0\n")


def test_mu_without_retries_is_a_genericity_exit(capsys):
    code, _ = run(["mu", "x*y", "--retries", "0"], capsys)
    assert code == 2


def test_bad_polynomial_is_invalid_input(capsys):
    code, _ = run(["mu", "x**"], capsys)
    assert code == 1


def test_missing_problem_file(capsys, tmp_path):
    code, _ = run(["run", str(tmp_path / "nope.json")], capsys)
    assert code == 1


def test_empty_strata_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"variables": ["x", "y"], "f": "x*y", "strata": []}))
    code, _ = run(["run", str(p)], capsys)
    assert code == 1
    with pytest.raises(ProblemError):
        Problem.load(p)


def test_invalid_json_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run(["run", str(p)], capsys)[0] == 1


def test_xy_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text = run(["run", "xy", "--out", str(out), "--no-cache"], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    assert report["results"]["transfer"]["b"]["origin"] == {"2": 1}
    assert report["results"]["transfer"]["b"]["xaxis"] == {}
    assert report["results"]["index-check"]["ok"]
    assert "transfer\tb[origin]\t" in text


def _results_bytes(tmp_path, name, *extra):
    out = tmp_path / f"{name}-{abs(hash(extra))}.json"
    reset_caches()
    assert main(["run", name, "--out", str(out), "--results-only", *extra]) == 0
    return out.read_bytes()


@pytest.mark.parametrize("name", ["xy", "cusp"])
def test_results_identical_across_seeds(tmp_path, name, capsys):
    a = _results_bytes(tmp_path, name, "--seed", "1", "--no-cache")
    b = _results_bytes(tmp_path, name, "--seed", "2024", "--no-cache")
    assert a == b


def test_diagnostics_record_the_draws():
    p = Problem.load("bundled:xy")
    r1 = build_report(p, seed=1)
    r2 = build_report(p, seed=2)
    assert r1["results"] == r2["results"]
    assert r1["diagnostics"] != r2["diagnostics"]


def test_results_identical_across_cache_states(tmp_path, capsys):
    cache = tmp_path / "cache"
    none = _results_bytes(tmp_path, "cusp", "--no-cache")
    cold = _results_bytes(tmp_path, "cusp", "--cache-dir", str(cache))
    warm = _results_bytes(tmp_path, "cusp", "--cache-dir", str(cache))
    for p in list(cache.rglob("*.json"))[::3]:
        p.write_text("corrupt")
    broken = _results_bytes(tmp_path, "cusp", "--cache-dir", str(cache))
    assert none == cold == warm == broken


def test_corrupt_cache_warns_in_report(tmp_path, capsys):
    cache = tmp_path / "cache"
    _results_bytes(tmp_path, "xy", "--cache-dir", str(cache))
    for p in cache.rglob("*.json"):
        p.write_text("corrupt")
    out = tmp_path / "full.json"
    reset_caches()
    assert main(["run", "xy", "--cache-dir", str(cache), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["diagnostics"]["cache"]


def test_modular_field_is_confirmed(tmp_path, capsys):
    rational = _results_bytes(tmp_path, "cusp", "--no-cache")
    modular = _results_bytes(tmp_path, "cusp", "--no-cache", "--field", "modular:32003")
    assert rational == modular
    report = build_report(Problem.load("bundled:cusp"), field_text="modular:32003")
    assert "confirmed" in report["diagnostics"]["field"]


def test_timing_is_opt_in():
    p = Problem.load("bundled:smooth_x")
    assert "seconds" not in build_report(p)["diagnostics"]
    assert "seconds" in build_report(p, timing=True)["diagnostics"]


def test_report_is_stable_json():
    p = Problem.load("bundled:smooth_x")
    text = dumps(build_report(p))
    assert text == dumps(json.loads(text))


def test_unknown_command_rejected(capsys):
    assert run(["run", "xy", "--commands", "ch,teleport"], capsys)[0] == 1


def test_every_bundled_problem_runs(capsys):
    for name in bundled_names():
        reset_caches()
        assert main(["run", name, "--no-cache"]) == 0, name


def test_quick_commands(capsys):
    code, out = run(["conormal", "y - x^2"], capsys)
    T = cotangent_ring(Ring(["x", "y"]))
    assert code == 0 and Ideal.parse(T, out.split("\n")[:-1]) == Ideal.parse(T, ["y - x^2", "w_x + 2*x*w_y"])
    code, out = run(["afpair", "--N", "x,y", "--f", "x^2 - z*y^2", "--vars", "x,y,z"], capsys)
    assert code == 0 and "false" in out.lower()
    code, out = run(["polar", "x^2 + y^3", "--linear", "x"], capsys)
    assert code == 0 and "y^2" in out


def test_fiber_criterion_in_afcheck_report(tmp_path, capsys):
    out = tmp_path / "u.json"
    assert main(["run", "umbrella", "--no-cache", "--out", str(out)]) == 0
    entries = json.loads(out.read_text())["results"]["afcheck"]["prop43"]
    at0 = [e for e in entries if e["point"] == ["0", "0", "0"]]
    assert at0 and at0[0]["containment"] is False and at0[0]["a_f"] is False
    assert all(e.get("agree", True) for e in entries)
    assert "[prop43]\tFalse" in capsys.readouterr().out


def test_polynomials_round_trip_on_corpus():
    for name in bundled_names():
        P = Problem.load(f"bundled:{name}").build()
        polys = [P.f] + [g for s in P.F.strata for g in s.closure.ideal.gens]
        polys += [g for w in P.W for g in w.closure.ideal.gens]
        for p in polys:
            assert P.ring.parse(str(p)) == p


def test_full_report_identical_cold_and_warm(tmp_path, capsys):
    cache = tmp_path / "c"
    texts = []
    for _ in range(2):
        out = tmp_path / "full.json"
        reset_caches()
        assert main(["run", "umbrella_whitney", "--cache-dir", str(cache), "--out", str(out)]) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
