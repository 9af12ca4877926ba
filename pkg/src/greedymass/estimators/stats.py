"""Confidence intervals, Monte Carlo reports and the shape checks on
estimated curves (concavity, symmetry, monotonicity).

CI convention: normal approximation, z = 1.96, half-width
z * (sample std) / sqrt(replicas). Reports built from fewer than
MIN_REPLICAS replicas are flagged.
"""
from dataclasses import dataclass, field

import numpy as np

from ..geometry import InvalidInput

Z95 = 1.96
MIN_REPLICAS = 50


def mean_ci(samples, z=Z95):
    """(mean, half-width) of a sample; half-width uses the ddof=1 std."""
    x = np.asarray(samples, dtype=float)
    if len(x) < 2:
        raise InvalidInput("a confidence interval needs at least 2 replicas")
    return float(x.mean()), float(z * x.std(ddof=1) / np.sqrt(len(x)))


def frequency_ci(hits, z=Z95):
    """(frequency, half-width) of a Bernoulli sample, z * sqrt(p(1-p)/R)."""
    h = np.asarray(hits, dtype=bool)
    if len(h) < 2:
        raise InvalidInput("a confidence interval needs at least 2 replicas")
    p = float(h.mean())
    return p, float(z * np.sqrt(p * (1 - p) / len(h)))


@dataclass
class GridPoint:
    param: object
    mean: float
    ci: float
    replicas: int
    extra: dict = field(default_factory=dict)

    def to_json(self):
        out = {"param": self.param, "mean": self.mean, "ci_half_width": self.ci,
               "replicas": self.replicas}
        out.update(self.extra)
        return out


@dataclass
class EstimateReport:
    """Per-grid-point Monte Carlo summary with its seed lineage."""
    kind: str
    grid: list
    seed: int
    streams: list = field(default_factory=list)
    unproven: int = 0
    z: float = Z95
    meta: dict = field(default_factory=dict)

    @property
    def params(self):
        return [g.param for g in self.grid]

    @property
    def means(self):
        return np.array([g.mean for g in self.grid])

    @property
    def cis(self):
        return np.array([g.ci for g in self.grid])

    def point(self, param):
        for g in self.grid:
            if g.param == param:
                return g
        raise KeyError(param)

    def below_floor(self):
        return any(g.replicas < MIN_REPLICAS for g in self.grid)

    def to_json(self):
        return {"kind": self.kind, "seed": self.seed, "streams": self.streams, "z": self.z,
                "solver_flags": {"unproven": self.unproven},
                "replica_floor_met": not self.below_floor(),
                "grid": [g.to_json() for g in self.grid], "meta": self.meta}


def fekete_time_constant(samples, z=Z95):
    """Lower estimate max_t mean(t)/t of sup_t E X(0,t)/t.

    samples: iterable of (t, mean) or (t, mean, ci). Returns a dict with the
    estimate, the arg t and the pairs (t1, t2) whose means violate
    superadditivity beyond the summed half-widths."""
    rows = [tuple(s) + (0.0,) * (3 - len(s)) for s in samples]
    if not rows:
        raise InvalidInput("no samples")
    t = np.array([r[0] for r in rows], dtype=float)
    m = np.array([r[1] for r in rows], dtype=float)
    h = np.array([r[2] for r in rows], dtype=float)
    if np.any(t <= 0) or np.any(m < 0):
        raise InvalidInput("times must be positive and means nonnegative")
    ratio = m / t
    k = int(np.argmax(ratio))
    flags = []
    index = {float(a): i for i, a in enumerate(t)}
    for i in range(len(t)):
        for j in range(i, len(t)):
            s = index.get(float(t[i] + t[j]))
            if s is None:
                continue
            if m[s] + h[s] + h[i] + h[j] < m[i] + m[j]:
                flags.append((float(t[i]), float(t[j])))
    return {"estimate": float(ratio[k]), "argmax": float(t[k]), "superadditive_flags": flags}


def _as_curve(report_or_pairs):
    if isinstance(report_or_pairs, EstimateReport):
        b = np.array(report_or_pairs.params, dtype=float)
        return b, report_or_pairs.means, report_or_pairs.cis
    rows = list(report_or_pairs)
    b = np.array([r[0] for r in rows], dtype=float)
    m = np.array([r[1] for r in rows], dtype=float)
    h = np.array([r[2] if len(r) > 2 else 0.0 for r in rows], dtype=float)
    return b, m, h


def _result(name, margins, tests):
    margins = np.asarray(margins, dtype=float)
    return {"check": name, "passed": bool(np.all(margins >= 0)) if len(margins) else True,
            "worst_margin": float(margins.min()) if len(margins) else 0.0,
            "tests": tests}


def check_concavity(curve, tol=1e-12):
    """Midpoint tests g(b1) + g(b2) <= 2 g((b1+b2)/2) + slack over all grid
    triples whose midpoint is on the grid; slack = h1 + h2 + 2 h_mid."""
    b, m, h = _as_curve(curve)
    if len(b) < 3:
        raise InvalidInput("concavity needs at least 3 grid points")
    key = {round(float(v), 12): i for i, v in enumerate(b)}
    margins, tests = [], []
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            k = key.get(round(float(b[i] + b[j]) / 2, 12))
            if k is None or k in (i, j):
                continue
            slack = h[i] + h[j] + 2 * h[k]
            margin = 2 * m[k] + slack - m[i] - m[j] + tol
            margins.append(margin)
            tests.append({"b1": float(b[i]), "b2": float(b[j]), "margin": float(margin),
                          "passed": bool(margin >= 0)})
    return _result("concavity", margins, tests)


def check_symmetry(curve, tol=1e-12):
    """|g(b) - g(-b)| <= h(b) + h(-b) for every b > 0 with -b on the grid."""
    b, m, h = _as_curve(curve)
    key = {round(float(v), 12): i for i, v in enumerate(b)}
    margins, tests = [], []
    for i, v in enumerate(b):
        j = key.get(round(-float(v), 12))
        if v <= 0 or j is None:
            continue
        margin = h[i] + h[j] - abs(m[i] - m[j]) + tol
        margins.append(margin)
        tests.append({"b": float(v), "margin": float(margin), "passed": bool(margin >= 0)})
    if not tests:
        raise InvalidInput("symmetry needs a grid containing some pair b, -b")
    return _result("symmetry", margins, tests)


def check_monotonicity(curve, tol=1e-12):
    """g nonincreasing on the nonnegative grid points:
    g(b_next) <= g(b) + h + h_next."""
    b, m, h = _as_curve(curve)
    idx = [i for i in np.argsort(b) if b[i] >= 0]
    if len(idx) < 2:
        raise InvalidInput("monotonicity needs at least 2 nonnegative grid points")
    margins, tests = [], []
    for i, j in zip(idx, idx[1:]):
        margin = m[i] + h[i] + h[j] - m[j] + tol
        margins.append(margin)
        tests.append({"b": float(b[i]), "b_next": float(b[j]), "margin": float(margin),
                      "passed": bool(margin >= 0)})
    return _result("monotonicity", margins, tests)
