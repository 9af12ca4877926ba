"""Experiment configuration: JSON schemas and validation.

Validation is two-stage. The base schema fixes the experiment (and, for
estimate/verify, the estimator or check); the schema of that pipeline then
lists every allowed key, so unknown keys are rejected. Errors carry a JSON
pointer to the offending value.
"""
import hashlib
import json

import jsonschema

SEED_MAX = 2 ** 64 - 1

NUM = {"type": "number"}
POS = {"type": "number", "exclusiveMinimum": 0}
INT1 = {"type": "integer", "minimum": 1}
INT0 = {"type": "integer", "minimum": 0}
UNIT = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
POINT = {"type": "array", "items": NUM, "minItems": 1}
NORM = {"oneOf": [{"type": "number", "minimum": 1}, {"enum": ["inf"]}]}
CONT_MODE = {"enum": ["path", "animal_inf"]}
ANY_MODE = {"enum": ["path", "animal_inf", "lattice_animal", "lattice_path", "lattice_path_sa"]}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


def _kinds(field, table):
    """Tagged union: one closed object schema per value of field."""
    return {"type": "object", "required": [field],
            "properties": {field: {"enum": sorted(table)}},
            "allOf": [{"if": {"properties": {field: {"const": k}}},
                       "then": _obj({field: {"const": k}, **props}, req)}
                      for k, (props, req) in sorted(table.items())]}


MARK = _kinds("kind", {
    "constant": ({"c": POS}, ["c"]),
    "bernoulli": ({"p": {"type": "number", "minimum": 0, "maximum": 1}, "scale": POS}, ["p"]),
    "exponential": ({"rate": POS}, ["rate"]),
    "pareto": ({"alpha": POS, "xmin": POS}, ["alpha"]),
    "discrete": ({"values": {"type": "array", "items": POS, "minItems": 1},
                  "probs": {"type": "array", "items": {"type": "number", "minimum": 0},
                            "minItems": 1}}, ["values", "probs"]),
})

REALIZATION = _obj({"window": {"type": ["object", "null"]}, "lattice": {"type": "boolean"},
                    "atoms": {"type": "array", "items": {"type": "array", "items": NUM}}},
                   ["atoms"])

DIM = {"type": "integer", "minimum": 1, "maximum": 8}

PROCESS = _kinds("kind", {
    "poisson": ({"lam": POS, "mark": MARK, "d": DIM}, ["lam", "mark"]),
    "lattice_iid": ({"mark": MARK, "d": DIM}, ["mark"]),
    "lattice_columnar": ({"mark": MARK, "d": {"const": 2}}, ["mark"]),
    "dpp_grid": ({"side": POS, "cells": INT1, "rho": POS, "mark": MARK, "d": DIM},
                 ["side", "cells", "rho"]),
    "doubled_poisson": ({"lam": POS, "offset": POS, "d": DIM}, ["lam"]),
    "empty": ({"d": DIM}, []),
    "fixed": ({"realization": REALIZATION}, ["realization"]),
})

SUPERADDITIVE = _kinds("kind", {
    "additive": ({"c": {"type": "number", "minimum": 0}}, ["c"]),
    "iid_sums": ({"mark": MARK}, ["mark"]),
    "shifted_sums": ({"mark": MARK, "b": {"type": "number", "minimum": 0}}, ["mark", "b"]),
    "diamond": ({"process": PROCESS, "u": POINT, "delta": UNIT, "mode": CONT_MODE},
                ["process", "u", "delta"]),
})

COMMON = {
    "experiment": {"enum": ["generate", "solve", "estimate", "verify"]},
    "seed": {"type": "integer", "minimum": 0, "maximum": SEED_MAX},
    "jobs": INT1,
    "out": {"type": "string"},
    "require_proofs": {"type": "boolean"},
    "note": {"type": "string"},
}

GRID = {"type": "array", "items": NUM, "minItems": 1}

PIPELINES = {
    ("generate", None): ({"process": PROCESS, "radius": POS, "count": INT1},
                         ["process", "radius"]),
    ("solve", None): ({"process": PROCESS, "radius": POS, "budget": INT1, "query": _obj({
        "mode": {"enum": ["path", "animal_inf", "lattice_animal", "lattice_path", "bracket"]},
        "ell": POS, "n": INT0, "x": POINT, "y": POINT,
        "restriction": {"enum": ["none", "diamond", "antidiamond"]}, "delta": UNIT,
        "norm": NORM, "self_avoiding": {"type": "boolean"},
        "q": {"oneOf": [{"type": "number", "minimum": 0}, {"enum": ["inf"]}]}}, ["mode"])},
        ["process", "query"]),
    ("estimate", "lln"): ({"process": PROCESS, "mode": ANY_MODE, "ell_grid": GRID,
                           "replicas": {"type": "integer", "minimum": 2}, "norm": NORM,
                           "budget": INT1}, ["process", "mode", "ell_grid", "replicas"]),
    ("estimate", "directional"): ({"process": PROCESS, "mode": CONT_MODE, "e": POINT,
                                   "betas": GRID, "delta": UNIT, "ell": POS, "a": NUM, "b": NUM,
                                   "ell_ref": POS, "replicas": {"type": "integer", "minimum": 2},
                                   "norm": NORM, "budget": INT1},
                                  ["process", "e", "betas", "delta", "ell", "replicas"]),
    ("estimate", "process_means"): ({"process": PROCESS, "mode": CONT_MODE, "u": POINT,
                                     "delta": UNIT, "t_grid": GRID,
                                     "replicas": {"type": "integer", "minimum": 2},
                                     "norm": NORM, "budget": INT1},
                                    ["process", "u", "delta", "t_grid", "replicas"]),
    ("verify", "suite"): ({"process": PROCESS, "instances": INT1, "sets": INT1,
                           "lattice_every": INT0}, ["instances"]),
    ("verify", "oracle"): ({"kind": {"enum": ["path", "animal", "lattice"]}, "instances": INT1,
                            "max_atoms": INT0}, ["kind", "instances"]),
    ("verify", "superadditivity"): ({"process": PROCESS, "tuples": INT1, "norm": NORM,
                                     "modes": {"type": "array", "items": CONT_MODE,
                                               "minItems": 1}, "span": POS},
                                    ["process", "tuples"]),
    ("verify", "directional_shape"): ({"process": PROCESS, "mode": CONT_MODE, "e": POINT,
                                       "betas": GRID, "delta": UNIT, "ell": POS, "a": NUM,
                                       "b": NUM, "ell_ref": POS,
                                       "replicas": {"type": "integer", "minimum": 2},
                                       "norm": NORM},
                                      ["process", "e", "betas", "delta", "ell", "replicas"]),
    ("verify", "tail_bound"): ({"alphas": {"type": "array", "items": POS, "minItems": 1},
                                "replicas": {"type": "integer", "minimum": 2}, "lam": POS,
                                "d": {"type": "integer", "minimum": 2, "maximum": 4},
                                "ell_max": POS, "C": POS, "floor_len": POS},
                               ["alphas", "replicas"]),
    ("verify", "maximal_inequality"): ({"cases": {"type": "array", "minItems": 1, "items": _obj({
        "process": SUPERADDITIVE, "alphas": {"type": "array", "items": POS, "minItems": 1},
        "n_max": INT1, "replicas": {"type": "integer", "minimum": 2}, "triples": INT0},
        ["process", "alphas", "n_max", "replicas"])}}, ["cases"]),
    ("verify", "few_sweep"): ({"ns": {"type": "array", "items": {"type": "integer", "minimum": 1},
                                      "minItems": 1},
                               "ds": {"type": "array", "items": {"type": "integer", "minimum": 2,
                                                                 "maximum": 6}, "minItems": 1},
                               "instances": INT1}, ["ns", "ds", "instances"]),
    ("verify", "moment"): ({"samples": {"type": "integer", "minimum": 2},
                            "pairs_disjoint": INT0, "pairs_same": INT0, "radius": POS,
                            "sigmas": POS, "cases": {"type": "array", "minItems": 1, "items": _obj({
                                "process": PROCESS, "mode": {"enum": ["bound", "equality"]},
                                "C": POS, "expect_pass": {"type": "boolean"}},
                                ["process", "mode"])}}, ["samples", "cases"]),
    ("verify", "divergence"): ({"replicas": INT1, "ell_min": POS,
                                "thresholds": {"type": "array", "items": POS, "minItems": 1},
                                "probes": {"type": "array", "minItems": 1, "items": _obj({
                                    "kind": {"enum": ["columnar", "poisson"]},
                                    "mark": MARK, "lam": POS, "d": DIM, "cap": INT1,
                                    "windows": {"type": "array", "items": INT1, "minItems": 1},
                                    "expect": {"enum": ["divergence-consistent", "plateau",
                                                        "inconclusive"]}},
                                    ["kind", "mark", "windows"])}},
                               ["replicas", "thresholds", "probes"]),
}

SUBKEY = {"estimate": "estimator", "verify": "check"}
BASE = {"type": "object", "required": ["experiment", "seed"],
        "properties": {"experiment": COMMON["experiment"], "seed": COMMON["seed"],
                       "estimator": {"enum": sorted(k for e, k in PIPELINES if e == "estimate")},
                       "check": {"enum": sorted(k for e, k in PIPELINES if e == "verify")}},
        "allOf": [{"if": {"properties": {"experiment": {"const": e}}, "required": ["experiment"]},
                   "then": {"required": [k]}} for e, k in SUBKEY.items()]}


class ConfigError(ValueError):
    pass


def _message(err):
    where = "/" + "/".join(str(p) for p in err.absolute_path)
    return f"{where}: {err.message}"


def pipeline_schema(experiment, sub):
    props, req = PIPELINES[(experiment, sub)]
    all_props = dict(COMMON)
    if experiment in SUBKEY:
        all_props[SUBKEY[experiment]] = {"const": sub}
    all_props.update(props)
    return _obj(all_props, ["experiment", "seed", *req])


def _check(schema, obj):
    v = jsonschema.Draft202012Validator(schema)
    err = jsonschema.exceptions.best_match(v.iter_errors(obj))
    if err is not None:
        raise ConfigError(_message(err))


def validate(config):
    """Validate a config dict; returns (experiment, sub) or raises ConfigError."""
    if not isinstance(config, dict):
        raise ConfigError("/: config must be a JSON object")
    _check(BASE, config)
    e = config["experiment"]
    sub = config.get(SUBKEY[e]) if e in SUBKEY else None
    _check(pipeline_schema(e, sub), config)
    return e, sub


def load(path, seed=None):
    """Read, override the seed if given, and validate."""
    try:
        with open(path) as fh:
            config = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"/: invalid JSON ({exc})")
    if seed is not None and isinstance(config, dict):
        config["seed"] = int(seed)
    validate(config)
    return config


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config):
    """sha256 of the canonical config without the keys that cannot change
    the report (output directory and parallelism)."""
    core = {k: v for k, v in config.items() if k not in ("out", "jobs")}
    return hashlib.sha256(canonical(core).encode()).hexdigest()
