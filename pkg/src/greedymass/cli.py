"""Command line entry point: greedymass {generate,solve,estimate,verify,replay}.

Every run writes report.json (canonical JSON, no timestamps), tables/*.csv,
plots/*.svg (when matplotlib is available) and manifest.json recording the
effective config, its hash, the seed, the tool version and the report's
sha256. Exit codes: 0 success, 1 a check failed or a replay mismatched,
2 invalid config or input (or missing manifest), 3 solver budget exhausted
while require_proofs is set.
"""
import argparse
import csv
import hashlib
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from . import config as cfg
from .estimators import (ProcessSpec, SuperadditiveProcessSpec, SuperadditivityViolation,
                         check_concavity, check_monotonicity, check_symmetry, divergence_probe,
                         estimate_directional_limit, estimate_lln_curve, estimate_process_means,
                         few_sweep_check, maximal_inequality_check, mean_superadditivity_check,
                         moment_property_run, oracle_equivalence, sandwich_and_identity_suite,
                         superadditivity_check, tail_bound_check)
from .estimators.processes import default_jobs
from .geometry import InvalidInput, Norm
from .pointproc import rng_for
from .solvers import (PathQuery, bracket_animal, lattice_max_animal, lattice_max_path,
                      max_mass_animal_inf, max_mass_path)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
STREAM_GENERATE = 0
STREAM_SOLVE = 5


def plain(obj):
    """JSON-ready copy: numpy scalars and arrays unwrapped, non-finite
    floats written as strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def _norm(spec, d):
    return Norm(spec if spec is not None else 2.0, d)


def _grid_rows(report, name):
    return [{name: g.param, "mean": g.mean, "ci": g.ci, "replicas": g.replicas, **g.extra}
            for g in report.grid]


# ----------------------------------------------------------------- pipelines
# each returns (result, tables, plots); tables map a name to a list of flat
# dict rows, plots are (name, kind, rows, x, y, err) tuples

def run_generate(c, jobs):
    process = ProcessSpec.from_json(c["process"])
    reals = [process.sample(rng_for(c["seed"], STREAM_GENERATE, i), c["radius"])
             for i in range(c.get("count", 1))]
    rows = [{"realization": i, **{f"x{j}": v for j, v in enumerate(loc)}, "mass": m}
            for i, r in enumerate(reals) for loc, m in zip(r.locations, r.masses)]
    result = {"realizations": [r.to_json() for r in reals],
              "atom_counts": [len(r) for r in reals], "passed": True}
    return result, {"atoms": rows}, [("atoms", "scatter", rows, "x0", "x1", None)]


def _solve_radius(q, process):
    anchors = [np.abs(np.asarray(q[k], dtype=float)).max() for k in ("x", "y") if k in q]
    reach = q.get("ell", q.get("n", 0))
    return max(anchors, default=0.0) + float(reach) + 1.0


def run_solve(c, jobs):
    q = c["query"]
    process = ProcessSpec.from_json(c["process"])
    radius = c.get("radius") or _solve_radius(q, process)
    r = process.sample(rng_for(c["seed"], STREAM_SOLVE), radius)
    d = r.d
    x = np.asarray(q["x"], dtype=float) if "x" in q else np.zeros(d)
    y = np.asarray(q["y"], dtype=float) if "y" in q else None
    norm = _norm(q.get("norm"), d)
    mode = q["mode"]
    kw = {"budget": c["budget"]} if "budget" in c else {}
    if mode in ("path", "animal_inf", "bracket") and "ell" not in q:
        raise InvalidInput("continuum queries need ell")
    if mode in ("lattice_animal", "lattice_path") and "n" not in q:
        raise InvalidInput("lattice queries need n")
    if mode == "path":
        pq = PathQuery(q["ell"], x, y, q.get("restriction", "none"), q.get("delta"))
        res = max_mass_path(r, pq, norm, **kw)
    elif mode == "animal_inf":
        res = max_mass_animal_inf(r, x, q["ell"], y=y, restriction=q.get("restriction", "none"),
                                  delta=q.get("delta"), norm=norm, **kw)
    elif mode == "bracket":
        qq = math.inf if q.get("q", "inf") == "inf" else float(q["q"])
        lo, hi = bracket_animal(r, x, q["ell"], qq, y=y, norm=norm, **kw)
        result = {"realization": r.to_json(), "lower": lo, "upper": hi, "passed": True}
        return result, {"bracket": [{"q": q.get("q", "inf"), "lower": lo, "upper": hi}]}, []
    elif mode == "lattice_animal":
        res = lattice_max_animal(r, q["n"], x, y, **kw)
    else:
        res = lattice_max_path(r, q["n"], q.get("self_avoiding", True), x, **kw)
    out = res.to_json()
    result = {"realization": r.to_json(), "solution": out, "unproven": int(not res.proven_optimal),
              "passed": True}
    rows = []
    cert = out.get("certificate")
    if cert and "vertices" in cert:
        rows = [{"order": i, **{f"x{j}": v for j, v in enumerate(p)}}
                for i, p in enumerate(cert["vertices"])]
    atoms = [{f"x{j}": v for j, v in enumerate(loc)} | {"mass": m}
             for loc, m in zip(r.locations, r.masses)]
    plots = [("atoms", "scatter", atoms, "x0", "x1", None)]
    if rows:
        plots.append(("certificate", "line", rows, "x0", "x1", None))
    return result, {"certificate": rows, "summary": [{"value": res.value,
                                                      "proven_optimal": res.proven_optimal,
                                                      "nodes_explored": res.nodes_explored}]}, plots


def run_estimate(c, jobs):
    process = ProcessSpec.from_json(c["process"])
    norm = _norm(c.get("norm"), process.d)
    budget = c.get("budget")
    kind = c["estimator"]
    if kind == "lln":
        rep = estimate_lln_curve(process, c["mode"], c["ell_grid"], c["replicas"], c["seed"], norm,
                                 budget, jobs)
        rows, x = _grid_rows(rep, "ell"), "ell"
        extra = {}
    elif kind == "directional":
        rep = estimate_directional_limit(process, c["e"], c["betas"], c["delta"], c["ell"],
                                         c["replicas"], c["seed"], c.get("a", 0.0), c.get("b", 1.0),
                                         c.get("mode", "path"), norm, budget, jobs,
                                         ell_ref=c.get("ell_ref"))
        rows, x = _grid_rows(rep, "beta"), "beta"
        extra = {}
    else:
        rep = estimate_process_means(process, c["u"], c["delta"], c["t_grid"], c["replicas"],
                                     c["seed"], c.get("mode", "path"), norm, budget, jobs)
        rows, x = _grid_rows(rep, "t"), "t"
        extra = {"mean_superadditivity": mean_superadditivity_check(rep)}
    result = {**rep.to_json(), **extra, "passed": True}
    return result, {kind: rows}, [(kind, "errorbar", rows, x, "mean", "ci")]


def _table(rows):
    return [{k: v for k, v in r.items() if not isinstance(v, (dict, list))} for r in rows]


def run_verify(c, jobs):
    kind, seed = c["check"], c["seed"]
    tables, plots = {}, []
    if kind == "suite":
        proc = c.get("process")
        res = sandwich_and_identity_suite(c["instances"], seed, proc, c.get("lattice_every", 2),
                                          c.get("sets", 10), None, jobs)
        res["vacuous"] = bool(proc and proc["kind"] == "empty")
        tables["rates"] = [{"check": k, **v} for k, v in sorted(res["rates"].items())]
    elif kind == "oracle":
        res = oracle_equivalence(c["kind"], c["instances"], seed, c.get("max_atoms"), jobs)
        tables["mismatches"] = _table(res["mismatches"])
    elif kind == "superadditivity":
        process = ProcessSpec.from_json(c["process"])
        res = superadditivity_check(process, c["tuples"], seed, _norm(c.get("norm"), process.d),
                                    tuple(c.get("modes", ("path", "animal_inf"))),
                                    c.get("span", 5.0), jobs)
        tables["violations"] = _table(res["violations"])
    elif kind == "directional_shape":
        c2 = dict(c, estimator="directional")
        est, est_tables, plots = run_estimate(c2, jobs)
        checks = [f(_curve(est)) for f in (check_concavity, check_symmetry, check_monotonicity)]
        res = {"estimate": est, "checks": checks, "unproven": est["solver_flags"]["unproven"],
               "passed": all(k["passed"] for k in checks)}
        tables.update(est_tables)
        tables["checks"] = [{"check": k["check"], "passed": k["passed"],
                             "worst_margin": k["worst_margin"]} for k in checks]
    elif kind == "tail_bound":
        res = tail_bound_check(c["alphas"], c["replicas"], seed, c.get("lam", 1.0), c.get("d", 2),
                               c.get("ell_max", 4.0), c.get("C", 1.0), c.get("floor_len", 1.0), jobs)
        tables["tail"] = res["per_alpha"]
        plots.append(("tail", "errorbar", res["per_alpha"], "alpha", "frequency", "ci"))
    elif kind == "maximal_inequality":
        cases = []
        for case in c["cases"]:
            spec = SuperadditiveProcessSpec(**case["process"])
            try:
                cases.append(maximal_inequality_check(spec, case["alphas"], case["n_max"],
                                                      case["replicas"], seed,
                                                      case.get("triples", 100), jobs))
            except SuperadditivityViolation as exc:
                cases.append({"check": "maximal_inequality", "process": spec.to_json(),
                              "violation": exc.triple, "passed": False})
        res = {"cases": cases, "passed": all(k["passed"] for k in cases)}
        tables["maximal"] = [{"case": i, **o} for i, k in enumerate(cases)
                             for o in k.get("per_alpha", [])]
    elif kind == "few_sweep":
        res = few_sweep_check(c["ns"], c["ds"], c["instances"], seed, jobs)
        tables["sweep"] = res["groups"]
    elif kind == "moment":
        cases = []
        for case in c["cases"]:
            r = moment_property_run(case["process"], c["samples"], seed,
                                    c.get("pairs_disjoint", 10), c.get("pairs_same", 10),
                                    case.get("C", 1.0), case["mode"], c.get("radius", 4.0),
                                    c.get("sigmas", 3.0), jobs)
            r["expect_pass"] = case.get("expect_pass", True)
            r["as_expected"] = r["passed"] == r["expect_pass"]
            cases.append(r)
        res = {"cases": cases, "passed": all(k["as_expected"] for k in cases)}
        tables["moment"] = [{"case": i, "process": k["process"]["kind"], "mode": k["mode"],
                             "pair": j, **_table([p])[0]}
                            for i, k in enumerate(cases) for j, p in enumerate(k["pairs"])]
    else:
        probes = []
        for p in c["probes"]:
            params = {k: p[k] for k in ("mark", "lam", "d", "cap") if k in p}
            r = divergence_probe(p["kind"], params, p["windows"], c["replicas"], seed,
                                 tuple(c["thresholds"]), c.get("ell_min", 8.0), jobs)
            r["expect"] = p.get("expect")
            r["as_expected"] = r["expect"] is None or r["classification"] == r["expect"]
            probes.append(r)
        res = {"probes": probes, "passed": all(k["as_expected"] for k in probes)}
        tables["divergence"] = [{"probe": i, "kind": k["kind"], "window": w, "median": m,
                                 "q10": a, "q90": b, "classification": k["classification"]}
                                for i, k in enumerate(probes)
                                for w, m, a, b in zip(k["windows"], k["median"], k["q10"], k["q90"])]
    return res, tables, plots


def _curve(est):
    return [(g["param"], g["mean"], g["ci_half_width"]) for g in est["grid"]]


PIPELINES = {"generate": run_generate, "solve": run_solve, "estimate": run_estimate,
             "verify": run_verify}


# -------------------------------------------------------------------- output

def unproven_count(obj):
    """Solver results flagged as not proven optimal, anywhere in a result."""
    if isinstance(obj, dict):
        n = 0
        for k, v in obj.items():
            if k == "unproven" and isinstance(v, int) and not isinstance(v, bool):
                n += v
            elif k == "proven_optimal" and v is False:
                n += 1
            else:
                n += unproven_count(v)
        return n
    if isinstance(obj, list):
        return sum(unproven_count(v) for v in obj)
    return 0


def build_report(config, result):
    return {"tool": "greedymass", "version": __version__, "experiment": config["experiment"],
            "config_sha256": cfg.config_hash(config), "seed": config["seed"],
            "result": plain(result)}


def report_bytes(report):
    return (json.dumps(report, sort_keys=True, indent=1, allow_nan=False) + "\n").encode()


def write_csv(path, rows):
    rows = plain(rows)
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        w.writerows(rows)


def write_plot(path, kind, rows, x, y, err):
    """SVG via matplotlib when installed; returns False otherwise."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    rows = [r for r in rows if isinstance(r.get(x), (int, float)) and isinstance(r.get(y), (int, float))]
    if not rows:
        return False
    matplotlib.rcParams["svg.hashsalt"] = "greedymass"
    fig, ax = plt.subplots(figsize=(5, 4))
    xs = [r[x] for r in rows]
    ys = [r[y] for r in rows]
    if kind == "scatter":
        ax.scatter(xs, ys, s=8)
        ax.set_aspect("equal")
    elif kind == "line":
        ax.plot(xs, ys, "-o", ms=3)
    else:
        ax.errorbar(xs, ys, yerr=[r.get(err, 0) for r in rows], fmt="o-", capsize=3)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return True


def execute(config, out_dir, jobs):
    """Run a validated config and write all artifacts; returns the exit code."""
    result, tables, plots = PIPELINES[config["experiment"]](config, jobs)
    report = build_report(config, result)
    data = report_bytes(report)
    os.makedirs(os.path.join(out_dir, "tables"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "plots"), exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "wb") as fh:
        fh.write(data)
    table_files, plot_files = [], []
    for name, rows in sorted(tables.items()):
        p = os.path.join("tables", f"{name}.csv")
        write_csv(os.path.join(out_dir, p), rows)
        table_files.append(p)
    for name, kind, rows, x, y, err in plots:
        p = os.path.join("plots", f"{name}.svg")
        if write_plot(os.path.join(out_dir, p), kind, plain(rows), x, y, err):
            plot_files.append(p)
    manifest = {"tool": "greedymass", "version": __version__, "seed": config["seed"],
                "config": config, "config_sha256": cfg.config_hash(config),
                "report": "report.json", "report_sha256": hashlib.sha256(data).hexdigest(),
                "tables": table_files, "plots": plot_files}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    if config.get("require_proofs") and unproven_count(report["result"]) > 0:
        return EXIT_BUDGET
    return EXIT_OK if report["result"].get("passed", True) else EXIT_FAILED


def replay(manifest_path, jobs, seed=None, out_dir=None):
    """Re-run the manifest's config and byte-compare the report."""
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (FileNotFoundError, IsADirectoryError):
        print(f"error: manifest not found: {manifest_path}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: unreadable manifest ({exc})", file=sys.stderr)
        return EXIT_CONFIG
    config = dict(manifest["config"])
    if seed is not None:
        config["seed"] = int(seed)
    try:
        cfg.validate(config)
    except cfg.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with open(os.path.join(os.path.dirname(os.path.abspath(manifest_path)), manifest["report"]),
              "rb") as fh:
        original = fh.read()
    with tempfile.TemporaryDirectory() as tmp:
        target = out_dir or tmp
        execute(config, target, jobs)
        with open(os.path.join(target, "report.json"), "rb") as fh:
            again = fh.read()
    if again == original:
        print("replay: identical")
        return EXIT_OK
    print("replay: MISMATCH", file=sys.stderr)
    return EXIT_FAILED


def _jobs(arg, config=None):
    if arg is not None:
        return max(1, arg)
    if os.environ.get("GREEDYMASS_JOBS"):
        return default_jobs()
    return (config or {}).get("jobs", 1)


def parser():
    p = argparse.ArgumentParser(prog="greedymass", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("generate", "solve", "estimate", "verify"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--seed", type=int)
        s.add_argument("--jobs", type=int)
        s.add_argument("--out")
    s = sub.add_parser("replay")
    s.add_argument("manifest")
    s.add_argument("--seed", type=int)
    s.add_argument("--jobs", type=int)
    s.add_argument("--out")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    if args.command == "replay":
        return replay(args.manifest, _jobs(args.jobs), args.seed, args.out)
    try:
        config = cfg.load(args.config, args.seed)
        if config["experiment"] != args.command:
            raise cfg.ConfigError(f"/experiment: config is for {config['experiment']!r}, "
                                  f"not {args.command!r}")
    except cfg.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or config.get("out") or "greedymass_out"
    try:
        code = execute(config, out, _jobs(args.jobs, config))
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.command}: exit {code}, report at {os.path.join(out, 'report.json')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
