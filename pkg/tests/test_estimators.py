import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greedymass.estimators import (ProcessSpec, SuperadditiveProcessSpec,
                                   SuperadditivityViolation, check_concavity, check_monotonicity,
                                   check_symmetry, divergence_probe, estimate_directional_limit,
                                   estimate_lln_curve, estimate_process_means,
                                   fekete_time_constant, few_constant, few_sweep_check,
                                   few_tsp_path, frequency_ci, maximal_inequality_check, mean_ci,
                                   mean_superadditivity_check, moment_property_run,
                                   oracle_equivalence, pmap, sandwich_and_identity_suite,
                                   superadditivity_check, tail_bound_check)
from greedymass.estimators.diagnostics import alpha_zero, expectation_bound, tail_bound_constant
from greedymass.geometry import InvalidInput, Norm, path_length

POISSON = {"kind": "poisson", "lam": 1.0, "mark": {"kind": "constant", "c": 1.0}}


# ------------------------------------------------------------------ stats

def test_mean_ci_matches_formula():
    x = [1.0, 2.0, 4.0, 7.0]
    m, h = mean_ci(x)
    assert m == 3.5
    assert h == pytest.approx(1.96 * np.std(x, ddof=1) / 2)
    with pytest.raises(InvalidInput):
        mean_ci([1.0])
    f, fh = frequency_ci([1, 0, 0, 0])
    assert f == 0.25 and fh == pytest.approx(1.96 * math.sqrt(0.25 * 0.75 / 4))


def test_fekete_on_linear_and_single_sample():
    res = fekete_time_constant([(t, 2.5 * t) for t in (1, 2, 3, 4)])
    assert res["estimate"] == 2.5 and not res["superadditive_flags"]
    assert fekete_time_constant([(4.0, 3.0)])["estimate"] == 0.75
    # subadditive means are flagged: m(2) < 2 m(1)
    assert fekete_time_constant([(1, 1.0), (2, 1.5)])["superadditive_flags"] == [(1.0, 1.0)]


def test_shape_checks_on_constant_and_convex_curves():
    flat = [(b, 1.0, 0.0) for b in (-0.8, -0.4, 0.0, 0.4, 0.8)]
    assert check_concavity(flat)["passed"]
    assert check_symmetry(flat)["passed"]
    assert check_monotonicity(flat)["passed"]
    convex = [(b, 1 + b * b, 0.01) for b in (-0.8, -0.4, 0.0, 0.4, 0.8)]
    assert not check_concavity(convex)["passed"]
    assert not check_monotonicity(convex)["passed"]
    skew = [(b, 1 - 0.3 * b, 0.01) for b in (-0.8, 0.0, 0.8)]
    assert not check_symmetry(skew)["passed"]


@given(st.lists(st.floats(0, 10), min_size=2, max_size=6))
def test_concave_curves_pass_concavity(coefs):
    # g(b) = sum c_k (1 - |b|^... ) built from concave pieces: min of lines
    bs = np.linspace(-0.8, 0.8, 9)
    g = np.min([c - k * np.abs(bs) for k, c in enumerate(coefs)], axis=0)
    assert check_concavity([(b, v, 0.0) for b, v in zip(bs, g)], tol=1e-9)["passed"]
    assert check_symmetry([(b, v, 0.0) for b, v in zip(bs, g)], tol=1e-9)["passed"]


# ------------------------------------------------------ proof constants

def test_tail_constants_frozen():
    # 2^(d+1) e C lam alpha^-d at d = 2, alpha = 10: 8 e / 100
    assert tail_bound_constant(2) * 10.0 ** -2 == pytest.approx(0.21746254627, rel=1e-10)
    assert alpha_zero(2) == pytest.approx(math.sqrt(8 * math.e))
    assert expectation_bound(2) == pytest.approx(2 * math.sqrt(8 * math.e))


def test_few_constant_values():
    assert few_constant(2) == 4 and few_constant(3) == 8 and few_constant(4) == 15


# ------------------------------------------------------------ sweep path

def test_sweep_single_point_and_line():
    path, ratio = few_tsp_path([[3.0, 4.0]], 5.0, norm=Norm(1.0))
    assert ratio == pytest.approx(7.0 / 5.0)
    pts = np.column_stack([np.linspace(0, 4, 9), np.full(9, 2.0)])
    path, ratio = few_tsp_path(pts, 4.0, norm=Norm(1.0))
    assert ratio <= few_constant(2)
    assert len(path.vertices) == 10


@given(st.integers(1, 300), st.integers(2, 3), st.integers(0, 2 ** 31))
def test_sweep_bound_property(n, d, seed):
    rng = np.random.default_rng(seed)
    L = float(rng.uniform(0.1, 10))
    pts = rng.uniform(0, L, (n, d))
    path, ratio = few_tsp_path(pts, L, norm=Norm(1.0, d))
    assert ratio <= few_constant(d)
    assert ratio == pytest.approx(path_length(path.vertices, Norm(1.0, d)) / (n ** ((d - 1) / d) * L))
    # every point is visited once
    assert len(path.vertices) == n + 1


def test_few_sweep_check_small():
    out = few_sweep_check([10, 100], [2, 3], 4, seed=1)
    assert out["passed"] and len(out["groups"]) == 4


# ------------------------------------------------------ maximal inequality

def test_maximal_inequality_additive_is_exact():
    out = maximal_inequality_check({"kind": "additive", "c": 1.0}, [2.0, 3.0, 5.0], 10, 50, 0,
                                   triples=10)
    assert out["passed"] and out["exact"]
    # sup_n X(-n,n)/(2n) = 1 < alpha, so every frequency is exactly 0
    assert all(o["frequency"] == 0 for o in out["per_alpha"])


def test_maximal_inequality_iid_sums():
    spec = SuperadditiveProcessSpec("iid_sums", mark={"kind": "exponential", "rate": 1.0})
    out = maximal_inequality_check(spec, [1.5, 3.0, 6.0], 20, 300, 3, triples=20)
    assert out["passed"] and out["time_constant"] == 1.0


def test_maximal_inequality_rejects_non_superadditive():
    class Bad(SuperadditiveProcessSpec):
        def realize(self, rng, n_max):
            return lambda s, t: math.sqrt(t - s)
    with pytest.raises(SuperadditivityViolation):
        maximal_inequality_check(Bad("additive", c=1.0), [1.0], 5, 10, 0, triples=5)


# ----------------------------------------------------- process-level runs

def test_tail_bound_small_run():
    out = tail_bound_check([6.0, 10.0], 60, seed=2, ell_max=3.0)
    assert out["passed"] and out["used"] + out["unproven"] == 60


def test_suite_small_run():
    out = sandwich_and_identity_suite(40, seed=5)
    assert out["passed"]
    assert out["rates"]["lattice_reduction"]["instances"] == 20
    assert all(v["pass_rate"] == 1.0 for v in out["rates"].values())


def test_superadditivity_small_run():
    out = superadditivity_check(POISSON, 40, seed=9)
    assert out["passed"] and out["checked"] + out["unproven"] == 40


def test_oracle_equivalence_small():
    for kind in ("path", "animal", "lattice"):
        assert oracle_equivalence(kind, 6, seed=4)["passed"]
    with pytest.raises(ValueError):
        oracle_equivalence("tree", 1, 0)


def test_moment_property_poisson_equality():
    out = moment_property_run(POISSON, 200, seed=3, n_disjoint=4, n_same=4, mode="equality")
    assert out["passed"] and len(out["pairs"]) == 8


def test_divergence_bounded_marks_plateau():
    out = divergence_probe("columnar", {"mark": {"kind": "constant", "c": 1.0}}, [16, 64], 4,
                           seed=1)
    assert out["classification"] == "plateau"
    assert out["median"][0] == out["median"][1]


def test_lln_constant_lattice_curve_is_flat():
    proc = {"kind": "lattice_iid", "mark": {"kind": "constant", "c": 2.0}}
    rep = estimate_lln_curve(proc, "lattice_animal", [1, 3, 5], 3, seed=0)
    assert list(rep.means) == [2.0, 2.0, 2.0] and list(rep.cis) == [0.0, 0.0, 0.0]
    assert rep.below_floor()


def test_lln_single_atom_curve_decays():
    r = {"atoms": [[0.0, 0.0, 3.0]], "window": None}
    rep = estimate_lln_curve({"kind": "fixed", "realization": r}, "path", [1.0, 2.0, 4.0], 2, 0)
    assert list(rep.means) == [3.0, 1.5, 0.75]


def test_lln_lattice_bernoulli_stabilizes():
    proc = {"kind": "lattice_iid", "mark": {"kind": "bernoulli", "p": 0.2}}
    rep = estimate_lln_curve(proc, "lattice_animal", [10, 14], 60, seed=11)
    a, b = rep.means
    assert abs(b - a) / a < 0.10


def test_lln_grid_validation():
    with pytest.raises(InvalidInput):
        estimate_lln_curve(POISSON, "path", [2.0, 1.0], 5, 0)
    with pytest.raises(InvalidInput):
        estimate_lln_curve(POISSON, "walk", [1.0], 5, 0)


def test_directional_small_run_and_increment():
    rep = estimate_directional_limit(POISSON, [1, 0], [-0.4, 0.0, 0.4], 0.3, 2.0, 8, seed=1,
                                     ell_ref=1.0)
    g = rep.point(0.4)
    assert "diamond_mean" in g.extra and "increment_mean" in g.extra
    assert g.extra["diamond_mean"] <= g.extra["antidiamond_mean"] + 1e-12 <= g.mean + 2e-12
    with pytest.raises(InvalidInput):
        estimate_directional_limit(POISSON, [1, 0], [1.0], 0.3, 2.0, 4, 0)


def test_process_means_superadditive():
    rep = estimate_process_means(POISSON, [0.5, 0.0], 0.3, [1.0, 2.0, 4.0], 30, seed=2)
    assert np.all(np.diff(rep.means) >= 0)
    assert mean_superadditivity_check(rep)["passed"]


def test_process_spec_json_round_trip():
    for obj in (POISSON,
                {"kind": "lattice_columnar", "mark": {"kind": "exponential", "rate": 2.0}},
                {"kind": "dpp_grid", "side": 4.0, "cells": 8, "rho": 0.1},
                {"kind": "doubled_poisson", "lam": 2.0, "offset": 0.01}):
        spec = ProcessSpec.from_json(obj)
        assert ProcessSpec.from_json(spec.to_json()).to_json() == spec.to_json()
    with pytest.raises(InvalidInput):
        ProcessSpec("brownian")


def test_doubled_poisson_has_twins():
    r = ProcessSpec("doubled_poisson", lam=2.0, offset=0.01).sample(4, 3.0)
    d = np.abs(r.locations[:, None, :] - r.locations[None, :, :]).max(axis=2)
    np.fill_diagonal(d, np.inf)
    assert np.mean(d.min(axis=1) <= 0.01 + 1e-12) > 0.9


def _square(x):
    return x * x


def test_pmap_keeps_order():
    items = list(range(37))
    assert pmap(_square, items, jobs=1) == pmap(_square, items, jobs=3) == [i * i for i in items]
