import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greedymass.geometry import (Animal, Antidiamond, Cone, Diamond, GeomPath, InvalidInput, Norm,
                                 animal_length, concat_animals, concat_paths, cylinder_decompose,
                                 cylinder_piece_cap, dfs_cover_path, is_cylinder_path, mst_edges,
                                 mst_length, orth_project_onto_line, path_length)

P_VALUES = [1.0, 1.5, 2.0, 3.0, math.inf]


def naive_norm(v, p):
    if math.isinf(p):
        return max(abs(a) for a in v)
    return sum(abs(a) ** p for a in v) ** (1 / p)


def cayley_mst(pts, p):
    """Minimum over all spanning trees, enumerated through Pruefer codes."""
    n = len(pts)
    if n == 1:
        return 0.0
    if n == 2:
        return naive_norm(pts[0] - pts[1], p)
    best = math.inf
    for code in itertools.product(range(n), repeat=n - 2):
        deg = [1] * n
        for c in code:
            deg[c] += 1
        total, code = 0.0, list(code)
        for c in code:
            leaf = min(i for i in range(n) if deg[i] == 1)
            total += naive_norm(pts[leaf] - pts[c], p)
            deg[leaf] -= 1
            deg[c] -= 1
        u, v = [i for i in range(n) if deg[i] == 1]
        total += naive_norm(pts[u] - pts[v], p)
        best = min(best, total)
    return best


coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
points2 = st.lists(st.tuples(coords, coords), min_size=1, max_size=12).map(np.array)


def test_norm_values():
    v = np.array([3.0, -4.0])
    assert Norm(1, 2)(v) == 7.0
    assert Norm(2, 2)(v) == 5.0
    assert Norm("inf", 2)(v) == 4.0
    with pytest.raises(InvalidInput):
        Norm(0.5, 2)
    with pytest.raises(InvalidInput):
        Norm("two", 2)


@given(points2, st.sampled_from(P_VALUES))
def test_norm_matches_naive(pts, p):
    n = Norm(p, 2)
    for v in pts:
        assert n(v) == pytest.approx(naive_norm(v, p), rel=1e-12, abs=1e-12)


def test_path_length_examples():
    assert path_length(GeomPath([[0, 0]]), Norm(2)) == 0
    assert path_length(GeomPath([[0, 0], [1, 0], [1, 1]]), Norm(1)) == 2
    with pytest.raises(InvalidInput):
        GeomPath(np.zeros((0, 2)))


def test_path_length_random_against_double_loop():
    rng = np.random.default_rng(1)
    for _ in range(50):
        pts = rng.normal(size=(6, 2))
        ref = 0.0
        for i in range(5):
            ref += math.sqrt(sum((pts[i + 1][k] - pts[i][k]) ** 2 for k in range(2)))
        assert path_length(GeomPath(pts), Norm(2)) == pytest.approx(ref, rel=1e-13)


def test_animal_length_examples():
    assert animal_length(Animal([[0, 0]]), Norm(2)) == 0
    tri = Animal([[0, 0], [1, 0], [0, 1]], [(0, 1), (1, 2), (0, 2)])
    assert animal_length(tri, Norm(1)) == 4
    with pytest.raises(InvalidInput):
        Animal([[0, 0], [1, 0], [2, 0]], [(0, 1)])


def test_animal_length_of_mst_edges_equals_mst_length():
    rng = np.random.default_rng(2)
    for p in P_VALUES:
        pts = rng.uniform(0, 5, (8, 2))
        a = Animal(pts, mst_edges(pts, Norm(p)))
        assert animal_length(a, Norm(p)) == pytest.approx(mst_length(pts, Norm(p)), rel=1e-12)


def test_concat_paths_and_animals():
    p = concat_paths(GeomPath([[0, 0], [1, 0]]), GeomPath([[1, 0], [1, 1]]))
    assert np.array_equal(p.vertices, [[0, 0], [1, 0], [1, 1]])
    with pytest.raises(InvalidInput):
        concat_paths(GeomPath([[0, 0], [1, 0]]), GeomPath([[2, 0], [1, 1]]))
    a1 = Animal([[0, 0], [1, 0]], [(0, 1)])
    a2 = Animal([[1, 0], [1, 2]], [(0, 1)])
    u = concat_animals(a1, a2)
    assert animal_length(u, Norm(2)) == animal_length(a1, Norm(2)) + animal_length(a2, Norm(2))
    same = concat_animals(a1, a1)
    assert len(same) == 2 and same.edges == [(0, 1)]
    with pytest.raises(InvalidInput):
        concat_animals(a1, Animal([[5, 5]]))


def test_dfs_cover_examples():
    one = dfs_cover_path(Animal([[0, 0], [3, 4]], [(0, 1)]))
    assert path_length(one, Norm(2)) <= 10
    star = Animal([[0, 0], [1, 0], [0, 1], [-1, 0]], [(0, 1), (0, 2), (0, 3)])
    assert path_length(dfs_cover_path(star), Norm(2)) <= 6


@given(st.integers(2, 10), st.integers(0, 2 ** 31), st.sampled_from(P_VALUES))
def test_dfs_cover_property(n, seed, p):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3, 3, (n, 2))
    edges = [(i, int(rng.integers(i))) for i in range(1, n)]
    a = Animal(pts, edges)
    walk = dfs_cover_path(a)
    norm = Norm(p)
    assert path_length(walk, norm) <= 2 * animal_length(a, norm) * (1 + 1e-12)
    assert {tuple(v) for v in walk.vertices} == {tuple(v) for v in pts}


def test_cone_examples():
    c = Cone(0.5, [0, 0], [1, 0])
    assert c.contains(np.array([0.0, 0.0]))
    # <z, e1> = 1 >= 0.5 * sqrt(2)
    assert c.contains(np.array([1.0, 1.0]))
    assert not c.contains(np.array([-1.0, 0.1]))
    with pytest.raises(InvalidInput):
        Cone(0.5, [0, 0], [0, 0])
    with pytest.raises(InvalidInput):
        Cone(1.0, [0, 0], [1, 0])


def test_diamond_antidiamond_nesting():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = rng.normal(size=2), rng.normal(size=2)
        dlt = rng.uniform(0.05, 0.95)
        z = rng.normal(scale=3, size=(500, 2))
        dia = Diamond(dlt, x, y).contains(z)
        anti = Antidiamond(dlt, x, y).contains(z)
        assert np.all(anti[dia])
        assert Diamond(dlt, x, y).contains(x) and Antidiamond(dlt, x, y).contains(y)


def test_projection_examples():
    assert np.allclose(orth_project_onto_line([0, 0], [1, 0], [3, 4]), [3, 0])
    assert np.allclose(orth_project_onto_line([1, 1], [1, 1], [2, 2]), [2, 2])
    with pytest.raises(InvalidInput):
        orth_project_onto_line([0, 0], [0, 0], [1, 1])


@given(st.floats(0.01, 0.99), st.integers(0, 2 ** 31), st.sampled_from(P_VALUES))
def test_projection_cone_bound(delta, seed, p):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=2)
    v = rng.normal(size=2)
    cone = Cone(delta, x, v)
    norm = Norm(p, 2)
    z = x + rng.normal(size=(400, 2)) * rng.uniform(0.1, 5)
    z = z[cone.contains(z, 0.0)]
    for y in z:
        py = orth_project_onto_line(x, v, y)
        assert np.linalg.norm(y - py) <= norm.c2 * math.sqrt(delta) * norm(y - x) + 1e-12


def test_mst_examples():
    assert mst_length([[1, 1]], Norm(2)) == 0
    assert mst_length([[0, 0], [1, 0], [2, 0]], Norm(2)) == 2
    with pytest.raises(InvalidInput):
        mst_length(np.zeros((0, 2)), Norm(2))


@pytest.mark.parametrize("p", P_VALUES)
def test_mst_against_cayley_enumeration(p):
    rng = np.random.default_rng(4)
    for n in range(1, 8):
        pts = rng.uniform(0, 4, (n, 2))
        assert mst_length(pts, Norm(p)) == pytest.approx(cayley_mst(pts, p), rel=1e-12)


def test_cylinder_examples():
    e = np.array([1.0, 0.0])
    straight = GeomPath([[0, 0], [1, 0.001], [2, -0.001], [4, 0]])
    assert is_cylinder_path(straight, e, 0.01, Norm(2))
    pieces = cylinder_decompose(straight, 0.1, 4.0, e, Norm(2))
    assert len(pieces) <= 3
    with pytest.raises(InvalidInput):
        cylinder_decompose(GeomPath([[0, 1], [1, 1]]), 0.1, 4.0, e, Norm(2))


def _swing(k):
    # on-axis path swinging to +-1, +-2, ..., +-k and stopping at 0.5
    xs = [0.0]
    for i in range(1, k + 1):
        xs += [float(i), -float(i)]
    xs.append(0.5)
    return GeomPath(np.column_stack([xs, np.zeros(len(xs))]))


def test_cylinder_swings_grow_but_respect_cap():
    e = np.array([1.0, 0.0])
    counts = []
    for k in (1, 3, 6):
        path = _swing(k)
        ell = path_length(path, Norm(2))
        pieces = cylinder_decompose(path, 0.05, ell, e, Norm(2))
        counts.append(len(pieces))
        assert len(pieces) <= cylinder_piece_cap(ell, ell, 0.05)
    assert counts == [5, 8, 12]


@given(st.integers(0, 2 ** 31), st.floats(0.02, 0.24))
def test_cylinder_pieces_reassemble(seed, delta):
    rng = np.random.default_rng(seed)
    steps = rng.choice([[1, 0], [0, 1], [0, -1], [-1, 0]], size=int(rng.integers(2, 30)),
                       p=[0.55, 0.15, 0.15, 0.15])
    v = np.vstack([[0, 0], np.cumsum(steps, axis=0)]).astype(float)
    v = np.vstack([v, [v[-1, 0] + 1, 0.0]])
    path = GeomPath(v)
    norm = Norm(1)
    ell = max(path_length(path, norm), 1.0)
    e = np.array([1.0, 0.0])
    pieces = cylinder_decompose(path, delta, ell, e, norm)
    joined = pieces[0]
    for p in pieces[1:]:
        joined = concat_paths(joined, p)
    ext = np.vstack([v[0] - delta * ell * e, v, v[-1] + delta * ell * e])
    assert np.array_equal(joined.vertices, ext)
    h = delta * delta * ell
    assert all(is_cylinder_path(p, e, h, norm) for p in pieces)
    assert len(pieces) <= cylinder_piece_cap(ell, ell, delta)
