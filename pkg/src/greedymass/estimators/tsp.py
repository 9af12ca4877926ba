"""A boustrophedon sweep path from the origin through n points of [0,L]^d.

Construction. Let m = ceil(n^(1/d)) and w = L/m. The first d-1
coordinates are cut into m slabs each, giving m^(d-1) columns (cells of
the (d-1)-dimensional grid, index c_j = min(floor(x_j / w), m-1)). The
columns are ordered along a snake (boustrophedon) order of that grid, so
consecutive columns differ by one in exactly one index, and column 0 is
the one at the origin. Inside the k-th column of the snake the points are
visited by increasing last coordinate when k is even, decreasing when k
is odd. The path starts at the origin.

Length bound (proven, l1 length, hence valid for every p-norm since
||v||_p <= ||v||_1):
  * last coordinate: insert virtual waypoints on the faces x_d = 0 and
    x_d = L between columns; the extended path is monotone in x_d inside
    each column, so it moves at most L per column, m^(d-1) L in total.
    Removing the waypoints only shortens it (triangle inequality).
  * first d-1 coordinates: a step from column c to a later column c'
    moves coordinate j by at most (|c_j - c'_j| + 1) w; summed over j this
    is at most (||c - c'||_1 + d - 1) w, and ||c - c'||_1 is at most the
    number of snake positions between them. Over the n steps this sums to
    at most (m^(d-1) - 1 + (d-1) n) w.
Total: L (m^(d-1) + m^(d-2) + (d-1) n / m). With n^(1/d) <= m <= n^(1/d) + 1,
    m^(d-1) <= 2^(d-1) n^((d-1)/d),  m^(d-2) <= 2^(d-2) n^((d-1)/d),
    n / m <= n^((d-1)/d),
so length <= C5 n^((d-1)/d) L with

    C5(d) = 2^(d-1) + 2^(d-2) + d - 1        (4 for d = 2, 8 for d = 3).
"""
import math

import numpy as np

from ..geometry import GeomPath, InvalidInput, Norm, path_length


def few_constant(d):
    return 2 ** (d - 1) + 2 ** (d - 2) + d - 1


def snake_order(cells, m):
    """Rank of each (d-1)-dim cell index along the boustrophedon order."""
    cells = np.asarray(cells, dtype=np.int64)
    k = cells.shape[1]
    rank = np.zeros(len(cells), dtype=np.int64)
    flip = np.zeros(len(cells), dtype=bool)
    # most significant index first; each lower index reverses direction when
    # the rank so far is odd
    for j in range(k - 1, -1, -1):
        c = np.where(flip, m - 1 - cells[:, j], cells[:, j])
        rank = rank * m + c
        flip = (rank % 2) == 1
    return rank


def few_tsp_path(points, L, d=None, norm=None):
    """Sweep path from the origin through all points; returns (path, ratio)
    with ratio = length / (n^((d-1)/d) L) <= few_constant(d)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise InvalidInput("need at least one point")
    d = d or pts.shape[1]
    if pts.shape[1] != d or d < 2:
        raise InvalidInput("points must be (n, d) with d >= 2")
    L = float(L)
    if not L > 0:
        raise InvalidInput("cube side must be positive")
    if np.any(pts < 0) or np.any(pts > L):
        raise InvalidInput("points must lie in [0, L]^d")
    norm = norm or Norm(2.0, d)
    n = len(pts)
    m = max(1, math.ceil(round(n ** (1.0 / d), 12)))
    w = L / m
    cells = np.minimum(np.floor(pts[:, :-1] / w).astype(np.int64), m - 1)
    rank = snake_order(cells, m)
    last = pts[:, -1]
    key2 = np.where(rank % 2 == 0, last, -last)
    order = np.lexsort((key2, rank))
    verts = np.vstack([np.zeros((1, d)), pts[order]])
    path = GeomPath(verts)
    ratio = path_length(path, norm) / (n ** ((d - 1) / d) * L)
    return path, float(ratio)
