"""Maximal-mass animals with vertices in the atoms (the q = inf problem),
and the path/animal bracket for finite penalizations.

A feasible animal is a nonempty atom set S with
    mst(S) + d(x, S) [+ d(y, S)] <= ell,
or the empty animal (mass 0). The optimal connecting graph on a fixed vertex
set is its minimum spanning tree, so S is the only decision.

Branch and bound: atoms sorted by decreasing mass, include-branch first.
The cost of a vertex set is not monotone under adding points, so
infeasible sets are not cut. Supersets T of S are cut by two lower bounds
on cost(T), both valid for every T containing S:
  * tree bound: cost(T) is the length of a tree on T plus the anchors, so it
    is at least sum(nn) - max(nn) over those vertices (every non-root vertex
    owns a distinct edge at least as long as its nearest-neighbour
    distance); this is nondecreasing when vertices are added, so the value
    over S plus anchors is a lower bound;
  * Steiner bound: the same tree spans S plus anchors, so its length is at
    least sigma * mst(S + anchors), sigma a proven lower bound on the
    Steiner ratio of the norm (see steiner_ratio_floor).
Mass is bounded by a fractional knapsack on the undecided atoms whose
weights are their nearest-neighbour distances. The search itself runs in
the compiled kernel _kernels.animal_search.
"""
import math

import numpy as np

from ..geometry import FEAS_TOL, Animal, InvalidInput, Norm, animal_length, mst_edges
from ..pointproc import mass_of_set
from . import _kernels
from .paths import PathQuery, SolveResult, check_ball, max_mass_path, restriction_mask

DEFAULT_BUDGET = 5_000_000


def _anchors(x, y):
    x = np.asarray(x, dtype=float)
    return (x,) if y is None else (x, np.asarray(y, dtype=float))


def steiner_ratio_floor(norm):
    """A proven lower bound on (Steiner tree length) / (spanning tree length):
    2/3 for the rectilinear plane (and l-inf in d = 2, a rotated copy),
    0.82 for the Euclidean plane (Chung-Graham), 1/2 for any norm."""
    if norm.p == 1.0 and norm.d == 2 or (math.isinf(norm.p) and norm.d == 2):
        return 2.0 / 3.0
    if norm.p == 2.0 and norm.d == 2:
        return 0.82
    return 0.5


def animal_cost(points, anchors, norm):
    """mst(S) + sum over anchors of d(anchor, S); 0 for the empty set."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return 0.0
    from ..geometry import mst_length
    c = mst_length(pts, norm)
    for a in anchors:
        c += float(norm(pts - a).min())
    return c


def max_mass_animal_inf(r, x, ell, y=None, restriction="none", delta=None, norm=None,
                        budget=DEFAULT_BUDGET, check_window=True):
    norm = norm or Norm(2.0, r.d)
    if not ell > 0:
        raise InvalidInput("length budget must be positive")
    anchors = _anchors(x, y)
    q = PathQuery(ell, anchors[0], anchors[1] if y is not None else None, restriction, delta)
    if check_window:
        if y is None:
            check_ball(r, anchors[0], ell, norm)
        else:
            # the filter below gives |s - x| + |s - y| <= 2 ell - |x - y|
            dxy0 = float(norm(anchors[0] - anchors[1]))
            check_ball(r, (anchors[0] + anchors[1]) / 2, ell - dxy0 / 2, norm)
    if len(r) == 0:
        return SolveResult(0.0, None, [], 1, True)
    loc = r.locations
    dx = norm(loc - anchors[0])
    if y is None:
        ok = dx <= ell + FEAS_TOL
    else:
        dy = norm(loc - anchors[1])
        dxy = float(norm(anchors[0] - anchors[1]))
        # any tree joining x, s and y is at least half the triangle perimeter
        ok = (dx + dy + dxy) / 2 <= ell + FEAS_TOL
    ok &= restriction_mask(loc, q)
    cand = np.flatnonzero(ok)
    # heavy atoms first, zero-mass relays last, ties by index
    cand = cand[np.lexsort((cand, -r.masses[cand]))]
    n = len(cand)
    if n == 0:
        return SolveResult(0.0, None, [], 1, True)
    na = len(anchors)
    P = np.vstack([loc[cand]] + [a[None, :] for a in anchors])
    D = norm.pairwise(P)
    Dn = D.copy()
    np.fill_diagonal(Dn, np.inf)
    nn = Dn.min(axis=1)
    mass = r.masses[cand].astype(float)
    sigma = steiner_ratio_floor(norm)
    nn_anchor = nn[n:n + na]
    order_ratio = np.argsort(-(mass / np.maximum(nn[:n], 1e-300)), kind="stable").astype(np.int64)
    suffix = np.maximum.accumulate(nn[:n][::-1])[::-1].copy()
    eps = 1e-12 * max(1.0, float(mass.sum()))
    best, mask, nodes, aborted = _kernels.animal_search(
        D, mass, nn, order_ratio, suffix, n, na, float(ell), sigma, int(budget), FEAS_TOL, eps,
        float(nn_anchor.sum()), float(nn_anchor.max()))
    chosen = sorted(int(cand[j]) for j in np.flatnonzero(mask))
    if not chosen:
        return SolveResult(0.0, None, [], int(nodes), not aborted)
    pts = loc[chosen]
    cert = Animal(pts, mst_edges(pts, norm))
    return SolveResult(float(r.masses[chosen].sum()), cert, chosen, int(nodes), not aborted)


def animal_certificate_ok(r, x, ell, res, y=None, norm=None, tol=FEAS_TOL):
    norm = norm or Norm(2.0, r.d)
    if res.certificate is None:
        return res.value == 0.0
    v = res.certificate.vertices
    cost = animal_length(res.certificate, norm)
    for a in _anchors(x, y):
        cost += float(norm(v - a).min())
    if cost > ell + tol:
        return False
    # every vertex must be an atom
    keys = {tuple(p) for p in r.locations.tolist()}
    if not all(tuple(p) in keys for p in v.tolist()):
        return False
    return abs(mass_of_set(r, v) - res.value) <= 1e-12 * max(1.0, res.value)


def bracket_animal(r, x, ell, q=math.inf, y=None, norm=None, budget=DEFAULT_BUDGET):
    """(lower, upper) with lower <= A^(q)(ell) <= upper.

    lower is the q = inf optimum (which dominates the path value); upper is
    the path value at 2*ell, via the depth-first covering walk of an animal.
    For q = inf both slots hold the exact value."""
    if q < 0:
        raise InvalidInput("penalization must be nonnegative")
    norm = norm or Norm(2.0, r.d)
    a = max_mass_animal_inf(r, x, ell, y=y, norm=norm, budget=budget)
    if math.isinf(q):
        return a.value, a.value
    qx = PathQuery(ell, x, y)
    p = max_mass_path(r, qx, norm)
    q2 = PathQuery(2 * ell, x, y)
    p2 = max_mass_path(r, q2, norm)
    return max(p.value, a.value), p2.value
