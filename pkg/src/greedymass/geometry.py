"""Norms, cones/diamonds/antidiamonds, geometric paths and animals.

Points are numpy float arrays of shape (d,). Point lists are arrays of
shape (n, d). Every comparison against a length budget uses the absolute
tolerance FEAS_TOL so that solvers, oracles and certificate checks agree.
"""
import math

import numpy as np

FEAS_TOL = 1e-9


class InvalidInput(ValueError):
    pass


class Norm:
    """The p-norm on R^d, p in [1, inf]."""

    def __init__(self, p=2.0, d=2):
        if isinstance(p, str):
            if p.lower() not in ("inf", "infinity"):
                raise InvalidInput(f"bad norm exponent {p!r}")
            p = math.inf
        p = float(p)
        if not p >= 1.0:
            raise InvalidInput(f"norm exponent must be >= 1, got {p}")
        d = int(d)
        if d < 1:
            raise InvalidInput(f"dimension must be positive, got {d}")
        self.p = p
        self.d = d

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        a = np.abs(v)
        if self.p == 1.0:
            return a.sum(axis=-1)
        if self.p == 2.0:
            return np.sqrt((a * a).sum(axis=-1))
        if math.isinf(self.p):
            return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
        return (a ** self.p).sum(axis=-1) ** (1.0 / self.p)

    def dist(self, a, b):
        return self(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))

    def pairwise(self, pts, other=None):
        pts = np.asarray(pts, dtype=float)
        other = pts if other is None else np.asarray(other, dtype=float)
        return self(pts[:, None, :] - other[None, :, :])

    @property
    def c1(self):
        # smallest c with ||v||_2 <= c ||v|| composed with ||v|| <= c' ||v||_2,
        # i.e. the product of the two p-norm equivalence factors
        if math.isinf(self.p):
            return math.sqrt(self.d)
        return self.d ** abs(1.0 / self.p - 0.5)

    @property
    def c2(self):
        return math.sqrt(2.0) * self.c1 ** 2

    def to_json(self):
        return {"p": "inf" if math.isinf(self.p) else self.p}

    @classmethod
    def from_json(cls, obj, d):
        return cls(obj["p"], d)

    def __repr__(self):
        return f"Norm(p={self.p}, d={self.d})"

    def __eq__(self, other):
        return isinstance(other, Norm) and self.p == other.p and self.d == other.d

    def __hash__(self):
        return hash((self.p, self.d))


def _points(pts, d=None):
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, d) if d else a.reshape(1, -1)
    if a.ndim != 2:
        raise InvalidInput("points must be a 2d array")
    return a


class GeomPath:
    """A finite sequence of points x_0, ..., x_r (r >= 0)."""

    def __init__(self, vertices):
        v = _points(vertices)
        if len(v) == 0:
            raise InvalidInput("a path needs at least one vertex")
        self.vertices = v

    def __len__(self):
        return len(self.vertices)

    @property
    def d(self):
        return self.vertices.shape[1]

    def reversed(self):
        return GeomPath(self.vertices[::-1].copy())

    def to_json(self):
        return {"vertices": self.vertices.tolist()}

    def __eq__(self, other):
        return (isinstance(other, GeomPath) and self.vertices.shape == other.vertices.shape
                and np.array_equal(self.vertices, other.vertices))

    def __repr__(self):
        return f"GeomPath({self.vertices.tolist()})"


class Animal:
    """A finite connected graph whose vertices are points of R^d."""

    def __init__(self, vertices, edges=(), check=True):
        self.vertices = _points(vertices)
        e = [tuple(sorted((int(i), int(j)))) for i, j in edges]
        self.edges = e
        if check:
            n = len(self.vertices)
            if n == 0:
                raise InvalidInput("an animal needs at least one vertex")
            for i, j in e:
                if i == j:
                    raise InvalidInput(f"self-loop on vertex {i}")
                if not (0 <= i < n and 0 <= j < n):
                    raise InvalidInput(f"edge ({i},{j}) out of range")
            if not _connected(n, e):
                raise InvalidInput("animal graph is not connected")

    def __len__(self):
        return len(self.vertices)

    def adjacency(self):
        adj = [[] for _ in range(len(self.vertices))]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for a in adj:
            a.sort()
        return adj

    def to_json(self):
        return {"vertices": self.vertices.tolist(), "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["vertices"], obj["edges"])

    @classmethod
    def from_path(cls, path):
        r = len(path) - 1
        return cls(path.vertices, [(i, i + 1) for i in range(r)], check=False)

    def __repr__(self):
        return f"Animal({len(self.vertices)} vertices, {len(self.edges)} edges)"


def _connected(n, edges):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n
    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            comps -= 1
    return comps == 1


def path_length(path, norm):
    if not isinstance(path, GeomPath):
        path = GeomPath(path)
    v = path.vertices
    if len(v) < 2:
        return 0.0
    return float(norm(np.diff(v, axis=0)).sum())


def animal_length(animal, norm):
    if not isinstance(animal, Animal):
        raise InvalidInput("expected an Animal")
    if not animal.edges:
        return 0.0
    e = np.asarray(animal.edges)
    v = animal.vertices
    return float(norm(v[e[:, 0]] - v[e[:, 1]]).sum())


def concat_paths(p1, p2):
    a, b = p1.vertices, p2.vertices
    if a.shape[1] != b.shape[1] or not np.array_equal(a[-1], b[0]):
        raise InvalidInput("last vertex of the first path must equal the first of the second")
    return GeomPath(np.vstack([a, b[1:]]))


def concat_animals(a1, a2):
    """Union of vertex and edge sets; vertices are identified by exact equality."""
    keys = {}
    verts = []
    for v in list(a1.vertices) + list(a2.vertices):
        k = tuple(v.tolist())
        if k not in keys:
            keys[k] = len(verts)
            verts.append(v)
    k1 = {tuple(v.tolist()) for v in a1.vertices}
    k2 = {tuple(v.tolist()) for v in a2.vertices}
    if not k1 & k2:
        raise InvalidInput("animals must share a vertex to be concatenated")
    edges = set()
    for a in (a1, a2):
        idx = [keys[tuple(v.tolist())] for v in a.vertices]
        for i, j in a.edges:
            edges.add(tuple(sorted((idx[i], idx[j]))))
    return Animal(np.array(verts), sorted(edges))


def dfs_cover_path(animal):
    """Walk of a depth-first search from vertex 0, children by increasing index.

    Each tree edge is walked at most twice, and the trailing walk back to the
    root is dropped, so the length is at most twice the animal length.
    """
    if not isinstance(animal, Animal):
        raise InvalidInput("expected an Animal")
    adj = animal.adjacency()
    n = len(animal.vertices)
    seen = [False] * n
    walk = [0]
    seen[0] = True
    stack = [(0, iter(adj[0]))]
    while stack:
        v, it = stack[-1]
        nxt = None
        for w in it:
            if not seen[w]:
                nxt = w
                break
        if nxt is None:
            stack.pop()
            if stack:
                walk.append(stack[-1][0])
        else:
            seen[nxt] = True
            walk.append(nxt)
            stack.append((nxt, iter(adj[nxt])))
    if not all(seen):
        raise InvalidInput("animal graph is not connected")
    # drop the final backtrack towards the root, it visits nothing new
    last_new = max(walk.index(v) for v in range(n))
    walk = walk[:last_new + 1]
    return GeomPath(animal.vertices[walk])


class Cone:
    """C_delta(x, u) = {z : <z - x, u/|u|_2> >= (1 - delta) |z - x|_2}."""

    def __init__(self, delta, x, u):
        if not 0.0 < delta < 1.0:
            raise InvalidInput(f"delta must lie in (0,1), got {delta}")
        u = np.asarray(u, dtype=float)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise InvalidInput("cone direction must be nonzero")
        self.delta = float(delta)
        self.x = np.asarray(x, dtype=float)
        self.u = u / nu

    def contains(self, z, tol=FEAS_TOL):
        w = np.asarray(z, dtype=float) - self.x
        return (w @ self.u) >= (1.0 - self.delta) * np.linalg.norm(w, axis=-1) - tol


class Diamond:
    """Intersection of C_delta(x, y - x) and C_delta(y, x - y)."""

    def __init__(self, delta, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.array_equal(x, y):
            raise InvalidInput("diamond apexes must differ")
        self.delta = float(delta)
        self.x, self.y = x, y
        self.c1 = Cone(delta, x, y - x)
        self.c2 = Cone(delta, y, x - y)

    def contains(self, z, tol=FEAS_TOL):
        return self.c1.contains(z, tol) & self.c2.contains(z, tol)


class Antidiamond:
    """Complement of C_delta(x, x - y) u C_delta(y, y - x), plus the apexes."""

    def __init__(self, delta, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.array_equal(x, y):
            raise InvalidInput("antidiamond apexes must differ")
        self.delta = float(delta)
        self.x, self.y = x, y
        self.out_x = Cone(delta, x, x - y)
        self.out_y = Cone(delta, y, y - x)

    def contains(self, z, tol=FEAS_TOL):
        z = np.asarray(z, dtype=float)
        # strict complement: points on the outward cones' boundary are excluded,
        # the tolerance is applied in the direction that keeps the apexes in
        inside = ~(self.out_x.contains(z, -tol) | self.out_y.contains(z, -tol))
        apex = np.all(z == self.x, axis=-1) | np.all(z == self.y, axis=-1)
        return inside | apex


def in_cone(cone, z):
    return bool(cone.contains(z))


def in_diamond(diamond, z):
    return bool(diamond.contains(z))


def in_antidiamond(antidiamond, z):
    return bool(antidiamond.contains(z))


def orth_project_onto_line(x, v, y):
    """Euclidean orthogonal projection of y onto the line x + Rv."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        raise InvalidInput("line direction must be nonzero")
    y = np.asarray(y, dtype=float)
    t = ((y - x) @ v) / vv
    return x + np.multiply.outer(t, v)


def mst_length(points, norm):
    """Length of a minimum spanning tree (Prim, O(n^2))."""
    pts = _points(points)
    n = len(pts)
    if n == 0:
        raise InvalidInput("need at least one point")
    if n == 1:
        return 0.0
    best = norm(pts - pts[0])
    used = np.zeros(n, dtype=bool)
    used[0] = True
    best[0] = np.inf
    total = 0.0
    for _ in range(n - 1):
        j = int(np.argmin(np.where(used, np.inf, best)))
        total += best[j]
        used[j] = True
        best = np.minimum(best, norm(pts - pts[j]))
    return float(total)


def mst_edges(points, norm):
    """Edges of a minimum spanning tree, as sorted index pairs."""
    pts = _points(points)
    n = len(pts)
    if n == 0:
        raise InvalidInput("need at least one point")
    best = norm(pts - pts[0])
    parent = np.zeros(n, dtype=int)
    used = np.zeros(n, dtype=bool)
    used[0] = True
    edges = []
    for _ in range(n - 1):
        j = int(np.argmin(np.where(used, np.inf, best)))
        edges.append(tuple(sorted((int(parent[j]), j))))
        used[j] = True
        dj = norm(pts - pts[j])
        closer = dj < best
        best = np.where(closer, dj, best)
        parent = np.where(closer, j, parent)
    return edges


def is_cylinder_path(path, e, h, norm, tol=FEAS_TOL):
    """True when the endpoints are extremal in <., e> among the vertices
    within distance h of the axis Re (first is min and last max, or vice versa)."""
    v = path.vertices
    e = np.asarray(e, dtype=float)
    s = v @ e / (e @ e)
    off = norm(v - np.multiply.outer(s, e))
    good = off <= h + tol
    if not (good[0] and good[-1]):
        return False
    sg = s[good]
    lo, hi = sg.min(), sg.max()
    fwd = s[0] <= lo + tol and s[-1] >= hi - tol
    bwd = s[0] >= hi - tol and s[-1] <= lo + tol
    return bool(fwd or bwd)


def cylinder_decompose(path, delta, ell, e, norm):
    """Split the path extended by the stubs (x - delta*ell*e, x) and
    (y, y + delta*ell*e) into delta^2*ell-cylinder paths.

    e is rescaled to a unit vector of the norm; both endpoints must lie on Re.
    The forward chain alternates last-occurrence argmax/argmin of <., e>
    over the near-axis vertices, the backward chain alternates
    first-occurrence argmin/argmax, and each chain stops at a point whose
    remaining excursion is shorter than delta*ell.  Returns the list of
    pieces in path order; single-vertex pieces are dropped.
    """
    if not 0.0 < delta < 0.25:
        raise InvalidInput("delta must lie in (0, 1/4)")
    if not isinstance(path, GeomPath):
        path = GeomPath(path)
    e = np.asarray(e, dtype=float)
    if not np.any(e):
        raise InvalidInput("axis direction must be nonzero")
    e = e / float(norm(e))
    v = path.vertices
    s = v @ e / (e @ e)
    proj = np.multiply.outer(s, e)
    off = norm(v - proj)
    scale = max(1.0, float(np.abs(v).max()))
    if off[0] > FEAS_TOL * scale or off[-1] > FEAS_TOL * scale:
        raise InvalidInput("path endpoints must lie on the axis")
    h = delta * delta * ell
    good = off <= h
    good[0] = good[-1] = True
    I = len(v) - 1
    gidx = np.flatnonzero(good)

    def pick(lo, hi, kind, last):
        # among near-axis indices in [lo, hi], extremal <., e> with tie rule
        g = gidx[(gidx >= lo) & (gidx <= hi)]
        vals = s[g]
        target = vals.min() if kind == "min" else vals.max()
        hits = g[vals == target]
        return int(hits[-1] if last else hits[0])

    jmin = pick(0, I, "min", last=False)
    imax = pick(0, I, "max", last=True)
    if jmin <= imax:
        f0, ftype, b0, btype = imax, "max", jmin, "min"
    else:
        f0, ftype, b0, btype = jmin, "min", imax, "max"

    # forward chain
    fwd = [f0]
    kind = ftype
    while True:
        cur = fwd[-1]
        if cur == I:
            if kind == "max":
                kind = "min"
            break
        nk = "min" if kind == "max" else "max"
        nxt = pick(cur + 1, I, nk, last=True)
        if kind == "min" and abs(s[nxt] - s[cur]) < delta * ell:
            break
        fwd.append(nxt)
        kind = nk
    # backward chain
    bwd = [b0]
    kind = btype
    while True:
        cur = bwd[-1]
        if cur == 0:
            break
        nk = "min" if kind == "max" else "max"
        nxt = pick(0, cur - 1, nk, last=False)
        if kind == "max" and abs(s[nxt] - s[cur]) < delta * ell:
            break
        bwd.append(nxt)
        kind = nk

    x, y = v[0], v[-1]
    head = np.vstack([x - delta * ell * e, v[:bwd[-1] + 1]])
    tail = np.vstack([v[fwd[-1]:], y + delta * ell * e])
    pieces = [head]
    for a, b in zip(bwd[::-1][:-1], bwd[::-1][1:]):
        pieces.append(v[a:b + 1])
    pieces.append(v[b0:f0 + 1])
    for a, b in zip(fwd[:-1], fwd[1:]):
        pieces.append(v[a:b + 1])
    pieces.append(tail)
    return [GeomPath(p) for p in pieces if len(p) > 1]


def cylinder_piece_cap(length, ell, delta):
    """Proven upper bound on the number of pieces from cylinder_decompose."""
    return 2.0 * (length / ell) / delta + 5.0
