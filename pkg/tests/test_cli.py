import csv
import json
import os

import pytest

from greedymass import cli
from greedymass.config import ConfigError, config_hash, validate

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXAMPLES = os.path.join(ROOT, "configs", "examples")


def write(tmp_path, obj, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def example(name):
    with open(os.path.join(EXAMPLES, name)) as fh:
        return json.load(fh)


def run(*argv):
    return cli.main([str(a) for a in argv])


DIVERGENCE = {"experiment": "verify", "check": "divergence", "seed": 1, "replicas": 3,
              "thresholds": [2, 4, 8],
              "probes": [{"kind": "columnar", "mark": {"kind": "constant", "c": 1.0},
                          "windows": [16, 32], "expect": "plateau"}]}


def test_generate_writes_manifest(tmp_path):
    out = tmp_path / "g"
    assert run("generate", "--config", os.path.join(EXAMPLES, "generate_poisson.json"),
               "--out", out) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == example("generate_poisson.json")["seed"]
    assert man["config_sha256"] == config_hash(man["config"])
    assert (out / "report.json").exists()


@pytest.mark.parametrize("name", sorted(os.listdir(EXAMPLES)))
def test_example_configs_run(tmp_path, name):
    c = example(name)
    assert run(c["experiment"], "--config", os.path.join(EXAMPLES, name), "--out", tmp_path) == 0


def test_lln_table_columns(tmp_path):
    c = dict(example("estimate_lln_poisson.json"), ell_grid=[1, 2], replicas=5)
    assert run("estimate", "--config", write(tmp_path, c), "--out", tmp_path / "o") == 0
    with open(tmp_path / "o" / "tables" / "lln.csv") as fh:
        header = next(csv.reader(fh))
    assert {"ell", "mean", "ci"} <= set(header)
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["result"]["replica_floor_met"] is False


def test_empty_suite_is_vacuous(tmp_path):
    assert run("verify", "--config", os.path.join(EXAMPLES, "verify_empty_suite.json"),
               "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["result"]["vacuous"] and rep["result"]["passed"]


def test_failed_check_exits_1(tmp_path):
    c = json.loads(json.dumps(DIVERGENCE))
    c["probes"][0]["expect"] = "divergence-consistent"
    assert run("verify", "--config", write(tmp_path, c), "--out", tmp_path / "o") == 1
    assert run("verify", "--config", write(tmp_path, DIVERGENCE), "--out", tmp_path / "p") == 0


def test_config_errors_exit_2(tmp_path, capsys):
    c = example("generate_poisson.json")
    del c["seed"]
    assert run("generate", "--config", write(tmp_path, c), "--out", tmp_path) == 2
    c = dict(example("generate_poisson.json"), colour="red")
    assert run("generate", "--config", write(tmp_path, c), "--out", tmp_path) == 2
    c = example("generate_poisson.json")
    c["process"]["lam"] = -1
    assert run("generate", "--config", write(tmp_path, c), "--out", tmp_path) == 2
    assert "/process/lam" in capsys.readouterr().err
    # config for a different subcommand
    assert run("solve", "--config", os.path.join(EXAMPLES, "generate_poisson.json"),
               "--out", tmp_path) == 2
    assert run("generate", "--config", tmp_path / "missing.json", "--out", tmp_path) == 2


def test_validate_messages_point_at_value():
    with pytest.raises(ConfigError, match="^/seed"):
        validate({"experiment": "generate", "seed": -3, "radius": 1.0,
                  "process": {"kind": "empty"}})
    with pytest.raises(ConfigError):
        validate({"experiment": "verify", "seed": 1})
    assert validate(DIVERGENCE) == ("verify", "divergence")


def test_unproven_with_require_proofs_exits_3(tmp_path):
    c = dict(example("solve_lattice_animal.json"), budget=3, require_proofs=True)
    assert run("solve", "--config", write(tmp_path, c), "--out", tmp_path / "a") == 3
    c["require_proofs"] = False
    assert run("solve", "--config", write(tmp_path, c), "--out", tmp_path / "b") == 0


def test_replay_identical_and_mismatch(tmp_path):
    assert run("verify", "--config", write(tmp_path, DIVERGENCE), "--out", tmp_path / "o") == 0
    man = tmp_path / "o" / "manifest.json"
    assert run("replay", man) == 0
    assert run("replay", man, "--jobs", 4) == 0
    assert run("replay", man, "--seed", 2) == 1
    assert run("replay", tmp_path / "nowhere" / "manifest.json") == 2


def test_jobs_do_not_change_report(tmp_path):
    c = dict(example("estimate_lln_poisson.json"), ell_grid=[1, 2], replicas=12)
    path = write(tmp_path, c)
    assert run("estimate", "--config", path, "--out", tmp_path / "a", "--jobs", 1) == 0
    assert run("estimate", "--config", path, "--out", tmp_path / "b", "--jobs", 8) == 0
    assert (tmp_path / "a" / "report.json").read_bytes() == \
        (tmp_path / "b" / "report.json").read_bytes()


def test_jobs_precedence(monkeypatch):
    monkeypatch.delenv("GREEDYMASS_JOBS", raising=False)
    assert cli._jobs(None, {"jobs": 3}) == 3
    assert cli._jobs(None) == 1
    monkeypatch.setenv("GREEDYMASS_JOBS", "5")
    assert cli._jobs(None, {"jobs": 3}) == 5
    assert cli._jobs(2, {"jobs": 3}) == 2
