"""Exhaustive reference solvers for tests. They share no search code with the
branch-and-bound solvers: distances come from scipy, spanning trees from
scipy.sparse.csgraph, and cone tests are written out inline."""
import itertools

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import cdist

from ..geometry import FEAS_TOL, InvalidInput

PATH_CAP = 8
ANIMAL_CAP = 12


def _metric(norm):
    if np.isinf(norm.p):
        return {"metric": "chebyshev"}
    if norm.p == 1.0:
        return {"metric": "cityblock"}
    if norm.p == 2.0:
        return {"metric": "euclidean"}
    return {"metric": "minkowski", "p": norm.p}


def _dist(a, b, norm):
    return cdist(np.atleast_2d(a), np.atleast_2d(b), **_metric(norm))


def _in_cone(z, apex, u, delta, tol):
    w = np.atleast_2d(z) - apex
    u = np.asarray(u, float) / np.sqrt(np.dot(u, u))
    return w @ u >= (1 - delta) * np.sqrt((w * w).sum(axis=1)) - tol


def _restricted(z, restriction, delta, x, y):
    if restriction == "none":
        return np.ones(len(z), dtype=bool)
    if restriction == "diamond":
        return _in_cone(z, x, y - x, delta, FEAS_TOL) & _in_cone(z, y, x - y, delta, FEAS_TOL)
    out = _in_cone(z, x, x - y, delta, -FEAS_TOL) | _in_cone(z, y, y - x, delta, -FEAS_TOL)
    apex = np.all(z == x, axis=1) | np.all(z == y, axis=1)
    return ~out | apex


def brute_force_path_oracle(r, q, norm):
    """Max over ordered sequences of distinct atoms (all of them, no filtering
    beyond the query's own constraints) of the sequence mass."""
    if len(r) > PATH_CAP:
        raise InvalidInput(f"path oracle is limited to {PATH_CAP} atoms")
    x = q.x
    y = q.y
    pts = r.locations
    m = r.masses
    if q.two_point and _dist(x, y, norm)[0, 0] > q.ell + FEAS_TOL:
        return 0.0
    allowed = _restricted(pts, q.restriction, q.delta, x, y) if len(pts) else np.zeros(0, bool)
    idx = [i for i in range(len(pts)) if allowed[i]]
    if not idx:
        return 0.0
    P = pts[idx]
    D = _dist(P, P, norm)
    dx = _dist(x, P, norm)[0]
    dy = _dist(y, P, norm)[0] if q.two_point else np.zeros(len(idx))
    best = 0.0
    for k in range(1, len(idx) + 1):
        for perm in itertools.permutations(range(len(idx)), k):
            length = dx[perm[0]]
            for a, b in zip(perm, perm[1:]):
                length += D[a, b]
            if q.two_point:
                length += dy[perm[-1]]
            if length <= q.ell + FEAS_TOL:
                best = max(best, float(sum(m[idx[i]] for i in perm)))
    return best


def brute_force_animal_oracle(r, x, ell, norm, y=None, restriction="none", delta=None):
    """Max over all atom subsets S with mst(S) + d(x,S) [+ d(y,S)] <= ell."""
    if len(r) > ANIMAL_CAP:
        raise InvalidInput(f"animal oracle is limited to {ANIMAL_CAP} atoms")
    x = np.asarray(x, float)
    anchors = [x] if y is None else [x, np.asarray(y, float)]
    pts = r.locations
    if len(pts) == 0:
        return 0.0
    if restriction != "none":
        keep = _restricted(pts, restriction, delta, anchors[0], anchors[1])
    else:
        keep = np.ones(len(pts), bool)
    idx = np.flatnonzero(keep)
    D = _dist(pts, pts, norm)
    da = [_dist(a, pts, norm)[0] for a in anchors]
    best = 0.0
    for k in range(1, len(idx) + 1):
        for S in itertools.combinations(idx, k):
            S = list(S)
            if k == 1:
                tree = 0.0
            else:
                tree = float(minimum_spanning_tree(D[np.ix_(S, S)]).sum())
            cost = tree + sum(float(d[S].min()) for d in da)
            if cost <= ell + FEAS_TOL:
                best = max(best, float(r.masses[S].sum()))
    return best


def _site_mass(r):
    return {tuple(int(c) for c in v): float(m) for v, m in zip(r.locations, r.masses)}


def lattice_animal_oracle(r, n, x, y=None):
    """Grow all connected site sets containing x level by level (as frozensets)
    up to cardinality n, and take the best one containing y."""
    table = _site_mass(r)
    x = tuple(int(round(c)) for c in x)
    y = None if y is None else tuple(int(round(c)) for c in y)
    d = len(x)
    steps = [tuple(s * (k == j) for j in range(d)) for k in range(d) for s in (-1, 1)]
    level = {frozenset([x])}
    best = table[x] if (y is None or y == x) else 0.0
    for _ in range(n - 1):
        nxt = set()
        for A in level:
            for v in A:
                for s in steps:
                    w = tuple(a + b for a, b in zip(v, s))
                    if w in table and w not in A:
                        nxt.add(A | {w})
        level = nxt
        for A in level:
            if y is None or y in A:
                best = max(best, sum(table[v] for v in A))
    return best


def lattice_path_oracle(r, n, self_avoiding, x):
    """Enumerate all (2d)^k walks for k <= n with numpy and take the best
    vertex-set mass among those inside the window (and self-avoiding)."""
    table = _site_mass(r)
    x = np.array([int(round(c)) for c in x])
    d = len(x)
    locs = np.array(list(table.keys()))
    lo = locs.min(axis=0)
    shape = locs.max(axis=0) - lo + 1
    grid = np.full(tuple(shape), np.nan)
    for k, v in table.items():
        grid[tuple(np.array(k) - lo)] = v
    moves = np.concatenate([np.eye(d, dtype=int), -np.eye(d, dtype=int)])
    best = table[tuple(x)]
    for k in range(1, n + 1):
        codes = np.array(list(itertools.product(range(2 * d), repeat=k)))
        pos = np.concatenate([np.zeros((len(codes), 1, d), int), np.cumsum(moves[codes], axis=1)], axis=1)
        pos = pos + (x - lo)
        inside = np.all((pos >= 0) & (pos < shape), axis=(1, 2))
        pos = pos[inside]
        if len(pos) == 0:
            continue
        vals = grid[tuple(pos[..., j] for j in range(d))]
        ok = ~np.isnan(vals).any(axis=1)
        pos, vals = pos[ok], vals[ok]
        flat = np.ravel_multi_index(tuple(pos[..., j] for j in range(d)), tuple(shape))
        order = np.argsort(flat, axis=1)
        sflat = np.take_along_axis(flat, order, axis=1)
        svals = np.take_along_axis(vals, order, axis=1)
        dup = np.zeros_like(sflat, dtype=bool)
        dup[:, 1:] = sflat[:, 1:] == sflat[:, :-1]
        if self_avoiding:
            keep = ~dup.any(axis=1)
            svals, dup = svals[keep], dup[keep]
            if len(svals) == 0:
                continue
        tot = np.where(dup, 0.0, svals).sum(axis=1)
        best = max(best, float(tot.max()))
    return best
