"""Acceptance criteria, each run through the CLI pipeline on its frozen
config in configs/criteria at --jobs 1. Every criterion prints one
PASS/FAIL line; criterion 14 replays every run at --jobs 8."""
import json
import os
import time

import pytest

from greedymass import cli
from greedymass.config import load

pytestmark = pytest.mark.acceptance

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CRITERIA = os.path.join(ROOT, "configs", "criteria")
RUNS = {}


@pytest.fixture(scope="session")
def runs_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("criteria")


def run(name, runs_dir):
    """Execute configs/criteria/<name>.json once per session."""
    if name not in RUNS:
        out = str(runs_dir / name)
        config = load(os.path.join(CRITERIA, name + ".json"))
        t0 = time.perf_counter()
        code = cli.execute(config, out, 1)
        elapsed = time.perf_counter() - t0
        with open(os.path.join(out, "report.json")) as fh:
            report = json.load(fh)["result"]
        RUNS[name] = {"code": code, "result": report, "seconds": elapsed, "out": out}
    return RUNS[name]


def verdict(number, title, ok, detail, report_lines):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    report_lines.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def report_lines(request):
    lines = []
    request.config._acceptance_lines = lines
    return lines


def test_c01_oracle_paths(runs_dir, report_lines):
    r = run("c01_oracle_path", runs_dir)
    res = r["result"]
    ok = (res["passed"] and res["instances"] >= 500 and res["max_atoms"] <= 8
          and res["unproven"] == 0 and r["seconds"] <= 120)
    verdict(1, "path oracle equivalence", ok,
            f"{res['instances']} instances, {len(res['mismatches'])} mismatches, "
            f"{r['seconds']:.0f}s", report_lines)


def test_c02_oracle_animals(runs_dir, report_lines):
    r = run("c02_oracle_animal", runs_dir)
    res = r["result"]
    ok = (res["passed"] and res["instances"] >= 300 and res["max_atoms"] <= 12
          and res["unproven"] == 0 and r["seconds"] <= 300)
    verdict(2, "animal oracle equivalence", ok,
            f"{res['instances']} instances, {len(res['mismatches'])} mismatches, "
            f"{r['seconds']:.0f}s", report_lines)


def test_c03_oracle_lattice(runs_dir, report_lines):
    r = run("c03_oracle_lattice", runs_dir)
    res = r["result"]
    ok = res["passed"] and res["instances"] >= 200 and res["unproven"] == 0 and r["seconds"] <= 300
    verdict(3, "lattice oracle equivalence", ok,
            f"{res['instances']} instances, {len(res['mismatches'])} mismatches, "
            f"{r['seconds']:.0f}s", report_lines)


def test_c04_sandwich(runs_dir, report_lines):
    res = run("c04_suite", runs_dir)["result"]
    s = res["rates"]["sandwich"]
    ok = s["instances"] >= 1000 and s["pass_rate"] == 1.0 and res["unproven"] == 0
    verdict(4, "sandwich chain", ok, f"{s['instances']} instances, rate {s['pass_rate']}",
            report_lines)


def test_c05_lattice_reduction(runs_dir, report_lines):
    s = run("c04_suite", runs_dir)["result"]["rates"]["lattice_reduction"]
    ok = s["instances"] >= 200 and s["pass_rate"] == 1.0
    verdict(5, "lattice reduction", ok, f"{s['instances']} instances, rate {s['pass_rate']}",
            report_lines)


def test_c06_layer_identity(runs_dir, report_lines):
    res = run("c04_suite", runs_dir)["result"]
    s = res["rates"]["layer_identity"]
    with open(os.path.join(CRITERIA, "c04_suite.json")) as fh:
        sets = json.load(fh)["sets"]
    n_sets = s["instances"] * sets
    ok = n_sets >= 10 ** 4 and s["pass_rate"] == 1.0
    verdict(6, "layer identity", ok, f"{n_sets} sets, rate {s['pass_rate']}", report_lines)


def test_c07_superadditivity(runs_dir, report_lines):
    res = run("c07_superadditivity", runs_dir)["result"]
    ok = res["checked"] >= 10 ** 4 and not res["violations"]
    verdict(7, "superadditivity of the diamond process", ok,
            f"{res['checked']} tuples checked, {len(res['violations'])} violations", report_lines)


def test_c08_directional_shape(runs_dir, report_lines):
    r = run("c08_directional", runs_dir)
    res = r["result"]
    betas = {abs(g["param"]) for g in res["estimate"]["grid"]}
    reps = min(g["replicas"] for g in res["estimate"]["grid"])
    margins = ", ".join(f"{k['check']} {k['worst_margin']:+.4f}" for k in res["checks"])
    ok = (res["passed"] and {0.0, 0.2, 0.4, 0.6, 0.8} <= betas and reps >= 200
          and r["seconds"] <= 1800)
    verdict(8, "symmetry, concavity, monotonicity of g", ok,
            f"{margins}; {reps} replicas, {r['seconds']:.0f}s", report_lines)


def test_c09_tail_bound(runs_dir, report_lines):
    res = run("c09_tail", runs_dir)["result"]
    alphas = [o["alpha"] for o in res["per_alpha"]]
    worst = max(o["frequency"] - o["bound"] - o["ci"] for o in res["per_alpha"])
    ok = (res["passed"] and res["used"] >= 2000 and sorted(alphas) == [6, 8, 10, 14])
    verdict(9, "tail bound", ok, f"{res['used']} replicas, worst excess {worst:+.4f}",
            report_lines)


def test_c10_maximal_inequality(runs_dir, report_lines):
    res = run("c10_maximal", runs_dir)["result"]
    kinds = {c["process"]["kind"]: c for c in res["cases"]}
    ok = (res["passed"] and kinds["additive"]["exact"] and "diamond" in kinds
          and kinds["diamond"]["time_constant_source"] == "fekete_estimate")
    verdict(10, "maximal inequality", ok,
            ", ".join(f"{k} {'ok' if c['passed'] else 'fails'}" for k, c in kinds.items()),
            report_lines)


def test_c11_few_sweep(runs_dir, report_lines):
    res = run("c11_sweep", runs_dir)["result"]
    ns = {g["n"] for g in res["groups"]}
    ds = {g["d"] for g in res["groups"]}
    worst = max(g["max_ratio"] / g["bound"] for g in res["groups"])
    ok = res["passed"] and ns >= {100, 1000, 10000} and ds >= {2, 3}
    verdict(11, "sweep length bound", ok, f"worst ratio / C5 = {worst:.3f}", report_lines)


def test_c12_moment(runs_dir, report_lines):
    res = run("c12_moment", runs_dir)["result"]
    by = {(c["process"]["kind"], c["mode"]): c for c in res["cases"]}
    poisson = by[("poisson", "equality")]
    dpp = by[("dpp_grid", "bound")]
    control = by[("doubled_poisson", "bound")]
    ok = (poisson["passed"] and len(poisson["pairs"]) >= 20 and dpp["passed"]
          and len(dpp["pairs"]) >= 20 and dpp["C"] == 1.0 and not control["passed"])
    verdict(12, "moment property", ok,
            f"poisson {poisson['passed']}, dpp {dpp['passed']}, clustered control fails "
            f"{not control['passed']}", report_lines)


def test_c13_divergence(runs_dir, report_lines):
    res = run("c13_divergence", runs_dir)["result"]
    got = [(p["kind"], p["classification"]) for p in res["probes"]]
    want_div = [p for p in res["probes"] if p["expect"] == "divergence-consistent"]
    want_pl = [p for p in res["probes"] if p["expect"] == "plateau"]
    ok = res["passed"] and len(want_div) >= 2 and len(want_pl) >= 2
    verdict(13, "divergence probes", ok, ", ".join(f"{k}:{c}" for k, c in got), report_lines)


def test_c14_determinism(runs_dir, report_lines):
    names = sorted(f[:-5] for f in os.listdir(CRITERIA) if f.endswith(".json"))
    bad = []
    for name in names:
        r = run(name, runs_dir)
        if cli.replay(os.path.join(r["out"], "manifest.json"), 8) != 0:
            bad.append(name)
    verdict(14, "replay at jobs 8", not bad,
            f"{len(names) - len(bad)}/{len(names)} reports byte-identical", report_lines)
