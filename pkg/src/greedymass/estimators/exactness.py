"""Seeded comparisons of the exact solvers with the exhaustive oracles, and
the certified sweep-length check.

Instances use dyadic marks, so masses are sums of dyadic rationals and
solver and oracle values must agree bit for bit, with no tolerance.
"""
import math

import numpy as np

from ..geometry import Norm
from ..pointproc import MarkDistribution, Window, rng_for, sample_lattice_iid, sample_poisson_marked
from ..solvers.animals import max_mass_animal_inf
from ..solvers.lattice import lattice_max_animal, lattice_max_path
from ..solvers.oracles import (brute_force_animal_oracle, brute_force_path_oracle,
                               lattice_animal_oracle, lattice_path_oracle)
from ..solvers.paths import PathQuery, max_mass_path
from .processes import pmap
from .tsp import few_constant, few_tsp_path

STREAM_ORACLE = 16
STREAM_SWEEP = 17
ORACLE_KINDS = ("path", "animal", "lattice")
DYADIC = MarkDistribution("discrete", values=[0.25, 0.5, 1.0, 2.0, 3.0], probs=[0.2] * 5)
NORMS = (1.0, 2.0, 3.0, math.inf)


def _small_poisson(rng, R, max_atoms, mean_atoms):
    """Poisson process on [-R, R]^2 conditioned on at most max_atoms atoms
    (rejection on the whole realization)."""
    lam = mean_atoms / (2 * R) ** 2
    w = Window.box([-R, -R], [R, R])
    while True:
        r = sample_poisson_marked(lam, DYADIC, w, rng)
        if len(r) <= max_atoms:
            return r


def _two_point(rng, ell, norm):
    ang = rng.uniform(0, 2 * np.pi)
    v = np.array([np.cos(ang), np.sin(ang)])
    return rng.uniform(0.1, 1.0) * ell * v / float(norm(v))


def _oracle_instance(args):
    kind, seed, i, max_atoms = args
    rng = rng_for(seed, STREAM_ORACLE, ORACLE_KINDS.index(kind), i)
    if kind == "lattice":
        return _lattice_instance(rng, i)
    norm = Norm(NORMS[int(rng.integers(len(NORMS)))], 2)
    ell = float(rng.uniform(0.5, 4.0))
    r = _small_poisson(rng, ell, max_atoms, float(rng.uniform(2, max_atoms + 2)))
    x = np.zeros(2)
    y = _two_point(rng, ell, norm) if rng.random() < 0.5 else None
    restriction, delta = "none", None
    if y is not None and rng.random() < 0.5:
        restriction = "diamond" if rng.random() < 0.5 else "antidiamond"
        delta = float(rng.uniform(0.1, 0.9))
    if kind == "path":
        q = PathQuery(ell, x, y, restriction, delta)
        got = max_mass_path(r, q, norm)
        want = brute_force_path_oracle(r, q, norm)
    else:
        got = max_mass_animal_inf(r, x, ell, y=y, restriction=restriction, delta=delta, norm=norm)
        want = brute_force_animal_oracle(r, x, ell, norm, y=y, restriction=restriction, delta=delta)
    return {"index": i, "atoms": len(r), "solver": got.value, "oracle": float(want),
            "proven": got.proven_optimal, "match": got.value == want}


def _lattice_instance(rng, i):
    nu = DYADIC if rng.random() < 0.5 else MarkDistribution("bernoulli", p=0.5, scale=1.0)
    r = sample_lattice_iid(nu, [0, 0], [4, 4], rng)
    sites = r.locations
    x = sites[int(rng.integers(len(sites)))]
    y = sites[int(rng.integers(len(sites)))] if rng.random() < 0.5 else None
    n_animal = int(rng.integers(1, 8))
    n_path = int(rng.integers(0, 9))
    rows = []
    got = lattice_max_animal(r, n_animal, x, y)
    rows.append(("animal", got, lattice_animal_oracle(r, n_animal, x, y)))
    for sa in (True, False):
        got = lattice_max_path(r, n_path, sa, x)
        rows.append((f"path_sa={sa}", got, lattice_path_oracle(r, n_path, sa, x)))
    return {"index": i, "n_animal": n_animal, "n_path": n_path,
            "parts": {k: {"solver": g.value, "oracle": float(w)} for k, g, w in rows},
            "proven": all(g.proven_optimal for _, g, _ in rows),
            "match": all(g.value == w for _, g, w in rows)}


def oracle_equivalence(kind, instances, seed, max_atoms=None, jobs=None):
    """Exact solver against exhaustive oracle on seeded instances.

    kind "path": Poisson instances with at most max_atoms (default 8) atoms,
    from-origin or two-point queries, random restriction and p-norm.
    kind "animal": the same with at most 12 atoms. kind "lattice": iid
    marks on the 5 x 5 box, animals of n <= 7 sites and paths of n <= 8
    steps with and without self-avoidance."""
    if kind not in ORACLE_KINDS:
        raise ValueError(f"unknown oracle kind {kind!r}")
    if max_atoms is None:
        max_atoms = {"path": 8, "animal": 12, "lattice": 0}[kind]
    rows = pmap(_oracle_instance, [(kind, seed, i, max_atoms) for i in range(instances)], jobs)
    mism = [r for r in rows if not r["match"]]
    return {"check": "oracle_equivalence", "kind": kind, "instances": instances,
            "max_atoms": max_atoms, "mismatches": mism,
            "unproven": int(sum(not r["proven"] for r in rows)), "passed": not mism}


def _sweep_instance(args):
    seed, n, d, i = args
    rng = rng_for(seed, STREAM_SWEEP, n, d, i)
    L = float(rng.uniform(0.5, 10.0))
    if i % 2 == 0:
        pts = rng.uniform(0, L, (n, d))
    else:
        # clustered: a few tight blobs, clipped back into the cube
        centres = rng.uniform(0, L, (max(1, n // 100), d))
        pts = centres[rng.integers(len(centres), size=n)] + rng.normal(0, L / 50, (n, d))
        pts = np.clip(pts, 0, L)
    _, ratio = few_tsp_path(pts, L, d, Norm(1.0, d))
    return {"n": n, "d": d, "index": i, "ratio": ratio}


def few_sweep_check(ns, ds, instances, seed, jobs=None):
    """Certified l1 sweep-length ratio against few_constant(d) on uniform
    and clustered instances; the l1 length bounds every p-norm length."""
    args = [(seed, int(n), int(d), i) for n in ns for d in ds for i in range(instances)]
    rows = pmap(_sweep_instance, args, jobs)
    groups = []
    for n in ns:
        for d in ds:
            rs = [r["ratio"] for r in rows if r["n"] == n and r["d"] == d]
            groups.append({"n": int(n), "d": int(d), "instances": len(rs),
                           "max_ratio": float(max(rs)), "bound": few_constant(d),
                           "passed": bool(max(rs) <= few_constant(d))})
    return {"check": "few_sweep", "groups": groups, "passed": all(g["passed"] for g in groups)}
