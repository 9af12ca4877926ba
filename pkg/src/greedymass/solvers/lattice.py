"""Greedy lattice animals and lattice paths on windowed lattice realizations.

The lattice graph is Z^d restricted to the sites of the realization (its
window); neighbours differ by one unit in one coordinate. Site masses are
the atom masses, zero-mass sites included.

Conventions: animals have cardinality at most n and contain the anchors;
paths make at most n steps from the anchor. With nonnegative masses these
agree with the exactly-n versions whenever the window leaves room to grow.
An empty feasible set (two anchors too far apart) has value 0.
"""
import numpy as np

from ..geometry import GeomPath, InvalidInput
from .paths import SolveResult

DEFAULT_BUDGET = 20_000_000


def site_table(r):
    if not r.lattice:
        raise InvalidInput("expected a lattice realization")
    keys = [tuple(int(c) for c in v) for v in r.locations]
    return dict(zip(keys, r.masses.tolist()))


def _neighbours(site, table):
    out = []
    for k in range(len(site)):
        for s in (-1, 1):
            w = site[:k] + (site[k] + s,) + site[k + 1:]
            if w in table:
                out.append(w)
    return out


def _as_site(a, table):
    s = tuple(int(round(c)) for c in np.asarray(a, dtype=float))
    if s not in table:
        raise InvalidInput(f"anchor {s} is not a site of the window")
    return s


def _l1(a, b):
    return sum(abs(i - j) for i, j in zip(a, b))


def lattice_max_animal(r, n, x=None, y=None, budget=DEFAULT_BUDGET):
    """Max mass of a connected site set of cardinality <= n containing x (and y).

    Redelmeier-style enumeration of connected sets grown from x, each set
    produced once; a branch is cut when the mass plus the largest masses it
    could still add cannot beat the incumbent, or when the second anchor is
    too far to be reached with the remaining cells."""
    table = site_table(r)
    n = int(n)
    if n < 1:
        raise InvalidInput("cardinality must be >= 1")
    if n > len(table):
        raise InvalidInput("cardinality exceeds the number of window sites")
    x = _as_site(np.zeros(r.d) if x is None else x, table)
    y = None if y is None else _as_site(y, table)
    if y is not None and _l1(x, y) + 1 > n:
        return SolveResult(0.0, None, [], 0, True, infeasible=True)
    sorted_sites = sorted(table, key=lambda s: (-table[s], s))
    best = [-1.0, None]
    nodes = [0]
    aborted = [False]

    def bound(S, mass, untried, seen):
        k = n - len(S)
        tot = mass
        for s in sorted_sites:
            if k == 0:
                break
            if s in S:
                continue
            if s in seen and s not in untried:
                continue
            tot += table[s]
            k -= 1
        return tot

    def rec(S, mass, untried, seen):
        nodes[0] += 1
        if nodes[0] > budget:
            aborted[0] = True
            return
        if (y is None or y in S) and mass > best[0]:
            best[0] = mass
            best[1] = sorted(S)
        if len(S) == n:
            return
        if y is not None and y not in S:
            if len(S) + min(_l1(s, y) for s in S) > n:
                return
        untried = list(untried)
        uset = set(untried)
        if bound(S, mass, uset, seen) <= best[0]:
            return
        while untried:
            c = untried.pop()
            uset.discard(c)
            new = [w for w in _neighbours(c, table) if w not in seen]
            for w in new:
                seen.add(w)
            S.add(c)
            rec(S, mass + table[c], untried + new, seen)
            S.discard(c)
            for w in new:
                seen.discard(w)
            if aborted[0]:
                return

    first = _neighbours(x, table)
    rec({x}, table[x], first, {x, *first})
    if best[1] is None:
        return SolveResult(0.0, None, [], nodes[0], not aborted[0], infeasible=True)
    return SolveResult(best[0], None, best[1], nodes[0], not aborted[0])


def lattice_max_path(r, n, self_avoiding=True, x=None, budget=DEFAULT_BUDGET):
    """Max mass of the vertex set of a lattice path of at most n steps from x."""
    table = site_table(r)
    n = int(n)
    if n < 0:
        raise InvalidInput("number of steps must be >= 0")
    x = _as_site(np.zeros(r.d) if x is None else x, table)
    sorted_sites = sorted(table, key=lambda s: (-table[s], s))
    best = [-1.0, None]
    nodes = [0]
    aborted = [False]
    seen_state = {}

    def bound(visited, mass, steps_left):
        k = steps_left
        tot = mass
        for s in sorted_sites:
            if k == 0:
                break
            if s in visited:
                continue
            tot += table[s]
            k -= 1
        return tot

    def rec(walk, visited, mass, steps_left):
        nodes[0] += 1
        if nodes[0] > budget:
            aborted[0] = True
            return
        if mass > best[0]:
            best[0] = mass
            best[1] = list(walk)
        if steps_left == 0:
            return
        if bound(visited, mass, steps_left) <= best[0]:
            return
        cur = walk[-1]
        if not self_avoiding:
            key = (cur, frozenset(visited))
            if seen_state.get(key, -1) >= steps_left:
                return
            seen_state[key] = steps_left
        for w in _neighbours(cur, table):
            fresh = w not in visited
            if self_avoiding and not fresh:
                continue
            walk.append(w)
            if fresh:
                visited.add(w)
            rec(walk, visited, mass + (table[w] if fresh else 0.0), steps_left - 1)
            if fresh:
                visited.discard(w)
            walk.pop()
            if aborted[0]:
                return

    rec([x], {x}, table[x], n)
    cert = GeomPath(np.array(best[1], dtype=float))
    return SolveResult(best[0], cert, [], nodes[0], not aborted[0])
