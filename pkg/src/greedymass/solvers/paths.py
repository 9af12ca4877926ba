"""Maximal-mass paths on finite marked realizations.

Only atoms contribute mass, and skipping a non-atom vertex never lengthens a
path, so a path is an ordered sequence of distinct atoms between the fixed
endpoints. The search is a depth-first branch and bound (see _kernels):
children are tried nearest-first, states (visited set, current atom) reached
again with a longer used length are dropped, and subtrees are cut with a
fractional knapsack bound whose weights are half the sum of each atom's two
nearest-neighbour distances.
"""
from dataclasses import dataclass, field

import numpy as np

from ..geometry import FEAS_TOL, Antidiamond, Diamond, GeomPath, InvalidInput, Norm, path_length
from ..pointproc import mass_of_set
from . import _kernels

DEFAULT_BUDGET = 50_000_000
MEMO_CAP = 4_000_000
MAX_CANDIDATES = 126


class OutOfWindow(InvalidInput):
    pass


@dataclass
class PathQuery:
    ell: float
    x: np.ndarray = None
    y: np.ndarray = None
    restriction: str = "none"
    delta: float = None
    norm: Norm = None

    def __post_init__(self):
        if not self.ell > 0:
            raise InvalidInput("length budget must be positive")
        if self.x is not None:
            self.x = np.asarray(self.x, dtype=float)
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=float)
        if self.restriction not in ("none", "diamond", "antidiamond"):
            raise InvalidInput(f"unknown restriction {self.restriction!r}")
        if self.restriction != "none":
            if self.y is None:
                raise InvalidInput("restricted queries need two anchors")
            if np.array_equal(self.x, self.y):
                raise InvalidInput("restricted queries need distinct anchors")
            if self.delta is None or not 0 < self.delta < 1:
                raise InvalidInput("restriction needs delta in (0,1)")

    @property
    def two_point(self):
        return self.y is not None

    @classmethod
    def from_origin(cls, ell, d=2, norm=None, x=None):
        return cls(ell, np.zeros(d) if x is None else x, None, norm=norm)

    @classmethod
    def between(cls, x, y, ell, restriction="none", delta=None, norm=None):
        return cls(ell, x, y, restriction, delta, norm)

    def to_json(self):
        out = {"mode": "two_point" if self.two_point else "from_origin", "ell": self.ell,
               "x": self.x.tolist(), "restriction": self.restriction}
        if self.two_point:
            out["y"] = self.y.tolist()
        if self.delta is not None:
            out["delta"] = self.delta
        return out


@dataclass
class SolveResult:
    value: float
    certificate: object = None
    atoms: list = field(default_factory=list)
    nodes_explored: int = 0
    proven_optimal: bool = True
    infeasible: bool = False

    def to_json(self):
        cert = None if self.certificate is None else self.certificate.to_json()
        return {"value": self.value, "certificate": cert, "atoms": [_atom_json(a) for a in self.atoms],
                "nodes_explored": int(self.nodes_explored), "proven_optimal": bool(self.proven_optimal),
                "infeasible": bool(self.infeasible)}


def _atom_json(a):
    # continuum solvers return atom indices, lattice solvers site tuples
    return [int(v) for v in a] if isinstance(a, (tuple, list, np.ndarray)) else int(a)


def restriction_mask(locs, q):
    if q.restriction == "none" or len(locs) == 0:
        return np.ones(len(locs), dtype=bool)
    shape = Diamond if q.restriction == "diamond" else Antidiamond
    return np.asarray(shape(q.delta, q.x, q.y).contains(locs), dtype=bool)


def check_ball(r, center, radius, norm):
    """Refuse queries whose reachable region B(center, radius) is not inside
    the window. Lattice realizations are windowed problems by definition."""
    if r.window is None or r.lattice:
        return
    if not r.window.contains_ball(center, radius, norm):
        raise OutOfWindow("window does not contain the reach region of the query")


def check_reach(r, q, norm):
    if q.two_point:
        # |z - x| + |z - y| <= ell implies |z - (x+y)/2| <= ell/2
        check_ball(r, (q.x + q.y) / 2, q.ell / 2, norm)
    else:
        check_ball(r, q.x, q.ell, norm)


def path_candidates(r, q, norm):
    """Indices of atoms that can lie on some feasible path."""
    if len(r) == 0:
        return np.zeros(0, dtype=int)
    loc = r.locations
    dx = norm(loc - q.x)
    if q.two_point:
        ok = dx + norm(loc - q.y) <= q.ell + FEAS_TOL
    else:
        ok = dx <= q.ell + FEAS_TOL
    ok &= r.masses > 0
    ok &= restriction_mask(loc, q)
    return np.flatnonzero(ok)


def _weights(D, n, two_point):
    # half the sum of the two nearest other entries, for every candidate atom
    m = D.shape[0]
    Dm = D[:n, :m].copy()
    Dm[np.arange(n), np.arange(n)] = np.inf
    if m - 1 >= 2:
        part = np.partition(Dm, 1, axis=1)
        nn1, nn2 = part[:, 0], part[:, 1]
    else:
        nn1 = Dm.min(axis=1)
        nn2 = nn1
    w = (nn1 + nn2) / 2.0
    corr = 0.0 if two_point or n == 0 else float(nn2.max()) / 2.0
    return w, corr


def max_mass_path(r, q, norm=None, budget=DEFAULT_BUDGET):
    norm = norm or q.norm or Norm(2.0, r.d)
    if q.x is None:
        q.x = np.zeros(r.d)
    check_reach(r, q, norm)
    if q.two_point and norm(q.x - q.y) > q.ell + FEAS_TOL:
        return SolveResult(0.0, None, [], 0, True, infeasible=True)
    cand = path_candidates(r, q, norm)
    n = len(cand)
    if n > MAX_CANDIDATES:
        raise InvalidInput(f"{n} candidate atoms exceed the solver limit of {MAX_CANDIDATES}")
    pts = [r.locations[cand], q.x[None, :]]
    if q.two_point:
        pts.append(q.y[None, :])
    P = np.vstack(pts)
    D = norm.pairwise(P)
    mass = r.masses[cand].astype(float)
    w, corr = _weights(D, n, q.two_point)
    ratio = np.where(w > 0, mass / np.where(w > 0, w, 1.0), np.inf)
    order = np.lexsort((np.arange(n), -ratio)).astype(np.int64)
    nbr = np.argsort(D[:n + 1, :n], axis=1, kind="stable").astype(np.int64)
    scale = max(1.0, float(mass.sum()))
    best, k, seqbuf, nodes, aborted = _kernels.path_search(
        D, mass, w, order, nbr, q.two_point, float(q.ell), corr, int(budget), MEMO_CAP,
        FEAS_TOL, 1e-12 * scale)
    seq = [int(cand[i]) for i in seqbuf[:k]]
    verts = [q.x] + [r.locations[i] for i in seq] + ([q.y] if q.two_point else [])
    value = float(r.masses[seq].sum()) if seq else 0.0
    return SolveResult(value, GeomPath(np.array(verts)), seq, int(nodes), not aborted)


def certificate_ok(r, q, res, norm, tol=FEAS_TOL):
    """Independent re-evaluation of a path certificate."""
    if res.certificate is None:
        return res.value == 0.0
    v = res.certificate.vertices
    if not np.array_equal(v[0], q.x):
        return False
    if q.two_point and not np.array_equal(v[-1], q.y):
        return False
    if path_length(res.certificate, norm) > q.ell + tol:
        return False
    inner = v[1:-1] if q.two_point else v[1:]
    if q.restriction != "none" and len(inner) and not restriction_mask(inner, q).all():
        return False
    return abs(mass_of_set(r, v) - res.value) <= 1e-12 * max(1.0, res.value)


def sup_ratio_from_origin(r, ell_max, norm, floor_len=1.0, x=None, budget=DEFAULT_BUDGET):
    """sup over floor_len <= ell <= ell_max of P(ell)/ell, computed exactly as
    the max over paths of mass / max(floor_len, length).

    Returns (ratio, mass, length, nodes, proven)."""
    x = np.zeros(r.d) if x is None else np.asarray(x, dtype=float)
    q = PathQuery(ell_max, x)
    check_reach(r, q, norm)
    cand = path_candidates(r, q, norm)
    n = len(cand)
    if n > MAX_CANDIDATES:
        raise InvalidInput(f"{n} candidate atoms exceed the solver limit of {MAX_CANDIDATES}")
    if n == 0:
        return 0.0, 0.0, 0.0, 0, True
    P = np.vstack([r.locations[cand], x[None, :]])
    D = norm.pairwise(P)
    Dm = D[:n].copy()
    Dm[np.arange(n), np.arange(n)] = np.inf
    nn = Dm.min(axis=1)
    mass = r.masses[cand].astype(float)
    best, bm, bl, nodes, aborted = _kernels.ratio_search(D, mass, nn, float(ell_max), float(floor_len),
                                                         int(budget), FEAS_TOL)
    return float(best), float(bm), float(bl), int(nodes), not aborted
