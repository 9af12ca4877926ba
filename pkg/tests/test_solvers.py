import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greedymass.geometry import InvalidInput, Norm, path_length
from greedymass.pointproc import (MarkDistribution, MarkedRealization, Window, rng_for,
                                  sample_lattice_iid, sample_poisson_marked)
from greedymass.solvers import (OutOfWindow, PathQuery, animal_certificate_ok, bracket_animal,
                                brute_force_animal_oracle, brute_force_path_oracle, certificate_ok,
                                lattice_animal_oracle, lattice_max_animal, lattice_max_path,
                                lattice_path_oracle, max_mass_animal_inf, max_mass_path,
                                steiner_ratio_floor, sup_ratio_from_origin)

DYADIC = MarkDistribution("discrete", values=[0.25, 0.5, 1.0, 2.0], probs=[0.25] * 4)
NORMS = [Norm(1.0), Norm(2.0), Norm(3.0), Norm("inf")]


def small_poisson(seed, ell, mean=6.0, cap=8):
    rng = rng_for(seed)
    w = Window.box([-ell, -ell], [ell, ell])
    while True:
        r = sample_poisson_marked(mean / (2 * ell) ** 2, DYADIC, w, rng)
        if len(r) <= cap:
            return r


def line_realization(xs, masses, half=3.0):
    pts = np.column_stack([xs, np.zeros(len(xs))])
    return MarkedRealization(pts, masses, Window.box([-half, -half], [half, half]))


# ------------------------------------------------------------------ paths

def test_path_trivial_cases():
    empty = MarkedRealization(np.zeros((0, 2)), [], Window.box([-2, -2], [2, 2]))
    assert max_mass_path(empty, PathQuery(1.0, [0, 0])).value == 0
    r = line_realization([1.5], [2.0])
    assert max_mass_path(r, PathQuery(1.0, [0, 0])).value == 0
    assert max_mass_path(r, PathQuery(1.5, [0, 0])).value == 2.0


def test_path_infeasible_two_point_is_flagged():
    r = line_realization([0.5], [1.0])
    res = max_mass_path(r, PathQuery(1.0, [0, 0], [2.0, 0]))
    assert res.value == 0 and res.infeasible and res.certificate is None


def test_path_query_validation():
    with pytest.raises(InvalidInput):
        PathQuery(0.0, [0, 0])
    with pytest.raises(InvalidInput):
        PathQuery(1.0, [0, 0], [0, 0], "diamond", 0.3)
    with pytest.raises(InvalidInput):
        PathQuery(1.0, [0, 0], [1, 0], "diamond", None)
    r = line_realization([0.5], [1.0], half=1.0)
    with pytest.raises(OutOfWindow):
        max_mass_path(r, PathQuery(2.0, [0, 0]))


def test_path_line_hand_solution():
    # unit atoms at 0.5, 1, 1.5 and a heavy one at -1: with ell = 1.5 the best
    # is either the right chain (3) or heavy + nothing else reachable
    r = line_realization([0.5, 1.0, 1.5, -1.0], [1.0, 1.0, 1.0, 2.5], half=4.0)
    assert max_mass_path(r, PathQuery(1.5, [0, 0])).value == 3.0
    # ell = 2: 0.5 then the heavy atom costs 0.5 + 1.5
    assert max_mass_path(r, PathQuery(2.0, [0, 0])).value == 3.5
    # ell = 3.5: go left to -1, then right to 1.5 costs 1 + 2.5
    assert max_mass_path(r, PathQuery(3.5, [0, 0])).value == 5.5


@pytest.mark.parametrize("seed", range(40))
def test_path_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    ell = float(rng.uniform(0.5, 3.0))
    norm = NORMS[seed % 4]
    r = small_poisson(seed, ell)
    y = None if seed % 2 else rng.uniform(-0.5, 0.5, 2) * ell / 2
    q = PathQuery(ell, np.zeros(2), y)
    res = max_mass_path(r, q, norm)
    assert res.value == brute_force_path_oracle(r, q, norm)
    assert certificate_ok(r, q, res, norm)


@given(st.integers(0, 2 ** 31), st.floats(0.3, 3.0))
def test_path_monotone_in_length(seed, ell):
    r = small_poisson(seed, 2 * ell, cap=10)
    a = max_mass_path(r, PathQuery(ell, [0, 0])).value
    b = max_mass_path(r, PathQuery(2 * ell, [0, 0])).value
    assert a <= b


def test_sup_ratio_against_enumeration():
    for seed in range(25):
        r = small_poisson(100 + seed, 3.0, cap=6)
        norm = NORMS[seed % 4]
        ratio = sup_ratio_from_origin(r, 3.0, norm, 1.0)[0]
        best = 0.0
        idx = range(len(r))
        for k in range(1, len(r) + 1):
            for perm in itertools.permutations(idx, k):
                v = np.vstack([[0, 0], r.locations[list(perm)]])
                L = path_length(v, norm)
                if L <= 3.0 + 1e-9:
                    best = max(best, r.masses[list(perm)].sum() / max(1.0, L))
        assert ratio == pytest.approx(best, rel=1e-12)


# ---------------------------------------------------------------- animals

def test_animal_chain_example():
    r = line_realization([0.5, 1.0, 1.5], [1.0, 1.0, 1.0])
    res = max_mass_animal_inf(r, np.zeros(2), 1.5)
    assert res.value == 3.0
    assert animal_certificate_ok(r, np.zeros(2), 1.5, res)
    assert max_mass_animal_inf(line_realization([2.0], [1.0]), np.zeros(2), 1.5).value == 0
    assert max_mass_animal_inf(line_realization([1.5], [4.0]), np.zeros(2), 1.5).value == 4.0


def test_animal_beats_path_on_a_star():
    # an atom at the origin and three at unit distance on three rays: the
    # star costs 3, a path through all four costs 2 + 2 sqrt(2)
    r = MarkedRealization([[0, 0], [1, 0], [-1, 0], [0, 1]], [1, 1, 1, 1],
                          Window.box([-4, -4], [4, 4]))
    assert max_mass_animal_inf(r, np.zeros(2), 3.0).value == 4
    assert max_mass_path(r, PathQuery(3.0, [0, 0])).value == 3


@pytest.mark.parametrize("seed", range(30))
def test_animal_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    ell = float(rng.uniform(0.5, 3.0))
    norm = NORMS[seed % 4]
    r = small_poisson(1000 + seed, ell, mean=8, cap=11)
    y = None
    restriction, delta = "none", None
    if seed % 3 == 0:
        y = rng.uniform(0.2, 0.6) * ell * np.array([1.0, 0.3])
        restriction, delta = ("diamond", "antidiamond", "none")[seed % 9 // 3], 0.4
        if restriction == "none":
            delta = None
    res = max_mass_animal_inf(r, np.zeros(2), ell, y=y, restriction=restriction, delta=delta,
                              norm=norm)
    assert res.value == brute_force_animal_oracle(r, np.zeros(2), ell, norm, y, restriction, delta)
    assert animal_certificate_ok(r, np.zeros(2), ell, res, y, norm)


def test_steiner_floor_values():
    assert steiner_ratio_floor(Norm(1.0)) == pytest.approx(2 / 3)
    assert steiner_ratio_floor(Norm("inf")) == pytest.approx(2 / 3)
    assert steiner_ratio_floor(Norm(2.0)) >= 0.8
    assert steiner_ratio_floor(Norm(3.0)) == 0.5


def test_bracket_conventions():
    empty = MarkedRealization(np.zeros((0, 2)), [], Window.box([-5, -5], [5, 5]))
    assert bracket_animal(empty, np.zeros(2), 1.0, 0.5) == (0, 0)
    r = small_poisson(7, 2.0, cap=10)
    lo, hi = bracket_animal(r, np.zeros(2), 1.0)
    assert lo == hi == max_mass_animal_inf(r, np.zeros(2), 1.0).value
    for seed in range(20):
        r = small_poisson(50 + seed, 2.0, cap=10)
        lo, hi = bracket_animal(r, np.zeros(2), 1.0, 0.7)
        assert lo <= hi


@given(st.integers(0, 2 ** 31), st.floats(0.3, 2.0), st.sampled_from(NORMS))
def test_sandwich_property(seed, ell, norm):
    r = small_poisson(seed, 2 * ell, mean=9, cap=12)
    p1 = max_mass_path(r, PathQuery(ell, [0, 0]), norm).value
    a = max_mass_animal_inf(r, np.zeros(2), ell, norm=norm).value
    p2 = max_mass_path(r, PathQuery(2 * ell, [0, 0]), norm).value
    assert p1 <= a <= p2


# ---------------------------------------------------------------- lattice

def test_lattice_trivial_cases():
    r = sample_lattice_iid(MarkDistribution.constant(2.0), [-2, -2], [2, 2], 1)
    assert lattice_max_animal(r, 1, [0, 0]).value == 2.0
    assert lattice_max_animal(r, 6, [0, 0]).value == 12.0
    assert lattice_max_path(r, 0, True, [0, 0]).value == 2.0
    with pytest.raises(InvalidInput):
        lattice_max_animal(r, 26, [0, 0])


def test_lattice_corridor():
    # a corridor of heavy sites along the positive x axis
    sites = [(i, j) for i in range(-3, 8) for j in range(-3, 4)]
    m = [5.0 if j == 0 and i >= 0 else 0.5 for i, j in sites]
    r = MarkedRealization(np.array(sites, float), m, lattice=True)
    assert lattice_max_path(r, 7, True, [0, 0]).value == 40.0
    assert lattice_max_animal(r, 8, [0, 0]).value == 40.0


@pytest.mark.parametrize("seed", range(20))
def test_lattice_matches_oracles(seed):
    rng = np.random.default_rng(seed)
    nu = DYADIC if seed % 2 else MarkDistribution("bernoulli", p=0.4, scale=1.0)
    r = sample_lattice_iid(nu, [0, 0], [4, 4], rng_for(seed))
    x = r.locations[int(rng.integers(25))]
    y = r.locations[int(rng.integers(25))]
    n = int(rng.integers(1, 8))
    assert lattice_max_animal(r, n, x, y).value == lattice_animal_oracle(r, n, x, y)
    k = int(rng.integers(0, 9))
    for sa in (True, False):
        assert lattice_max_path(r, k, sa, x).value == lattice_path_oracle(r, k, sa, x)


@pytest.mark.parametrize("seed", range(25))
def test_lattice_reduction(seed):
    rng = np.random.default_rng(seed)
    masses = DYADIC if seed % 2 else MarkDistribution.constant(1.0)
    r = sample_lattice_iid(masses, [0, 0], [3, 3], rng_for(seed))
    x = r.locations[int(rng.integers(16))]
    y = r.locations[int(rng.integers(16))]
    n = int(rng.integers(1, 6))
    lat = lattice_max_animal(r, n + 1, x, y).value
    cont = max_mass_animal_inf(r, x, float(n), y=y, norm=Norm(1.0)).value
    assert lat == cont


def test_budget_exhaustion_flags_result():
    r = sample_lattice_iid(MarkDistribution("exponential", rate=1.0), [-6, -6], [6, 6], 3)
    res = lattice_max_animal(r, 10, [0, 0], budget=5)
    assert not res.proven_optimal
    full = lattice_max_animal(r, 10, [0, 0])
    assert full.proven_optimal and res.value <= full.value
