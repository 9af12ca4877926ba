"""Empirical checks of the model's bounds and identities.

Structural checks (exact inequalities on single realizations) never use
statistical slack; statistical checks compare a frequency or a mean to a
bound with a CI (or 3 sigma) slack and say so in their output.
"""
import json
import math
import os

import numpy as np

from ..geometry import InvalidInput, Norm
from ..pointproc import (MarkDistribution, MarkedRealization, Window, box_counts, columnar_columns,
                         factorial_moment_samples, layer_mass, mass_of_set, rng_for,
                         sample_lattice_iid, sample_poisson_marked, sample_poisson_marked_above)
from ..solvers.animals import bracket_animal, max_mass_animal_inf
from ..solvers.lattice import lattice_max_animal
from ..solvers.paths import PathQuery, max_mass_path, sup_ratio_from_origin
from .lln import diamond_process_value, process_window_radius
from .processes import ProcessSpec, pmap
from .stats import Z95, frequency_ci, mean_ci
from .tsp import few_tsp_path

STREAM_TAIL = 11
STREAM_MAXINEQ = 12
STREAM_MAXINEQ_TRIPLES = 13
STREAM_DIVERGENCE = 14
STREAM_SUITE = 15
STREAM_MOMENT = 18


# ---------------------------------------------------------------- tail bound

def tail_bound_constant(d, C=1.0, lam=1.0):
    """2^(d+1) e C lam: P(sup_l P(l)/l >= alpha) <= this * alpha^(-d)."""
    return 2 ** (d + 1) * math.e * C * lam


def alpha_zero(d, C=1.0, lam=1.0):
    return tail_bound_constant(d, C, lam) ** (1.0 / d)


def expectation_bound(d, C=1.0, lam=1.0):
    """E sup_l P(l)/l <= d (2^(d+1) e C lam)^(1/d) / (d - 1)."""
    return d * alpha_zero(d, C, lam) / (d - 1)


def _tail_replica(args):
    seed, i, lam, d, ell_max, floor_len = args
    norm = Norm(1.0, d)
    w = Window.box(np.full(d, -ell_max), np.full(d, ell_max))
    r = sample_poisson_marked(lam, MarkDistribution.constant(1.0), w, rng_for(seed, STREAM_TAIL, i))
    ratio, _, _, _, proven = sup_ratio_from_origin(r, ell_max, norm, floor_len)
    return ratio, proven


def tail_bound_check(alphas, replicas, seed, lam=1.0, d=2, ell_max=4.0, C=1.0, floor_len=1.0,
                     jobs=None, z=Z95):
    """Frequency of {sup_{floor_len <= l <= ell_max} P(l)/l >= alpha} for the
    Poisson process with unit marks, lengths in the l1 norm, against
    2^(d+1) e C lam alpha^(-d). The truncated sup is below the full sup, so
    the bound must hold with margin. Unproven solves are excluded."""
    if not lam > 0 or any(a <= 0 for a in alphas):
        raise InvalidInput("need lam > 0 and alpha > 0")
    args = [(seed, i, lam, d, float(ell_max), float(floor_len)) for i in range(replicas)]
    rows = pmap(_tail_replica, args, jobs)
    ratios = np.array([a for a, p in rows if p])
    k = tail_bound_constant(d, C, lam)
    out = []
    for a in alphas:
        f, h = frequency_ci(ratios >= a, z)
        bound = k * a ** (-d)
        out.append({"alpha": a, "frequency": f, "ci": h, "bound": bound,
                    "passed": bool(f <= bound + h)})
    m, h = mean_ci(ratios, z)
    return {"check": "tail_bound", "replicas": replicas, "used": int(len(ratios)),
            "unproven": int(replicas - len(ratios)), "alpha0": alpha_zero(d, C, lam),
            "ell_max": ell_max, "norm": "l1", "per_alpha": out,
            "mean_sup_ratio": m, "mean_ci": h, "expectation_bound": expectation_bound(d, C, lam),
            "passed": all(o["passed"] for o in out)}


# -------------------------------------------------------- maximal inequality

class SuperadditivityViolation(AssertionError):
    def __init__(self, triple):
        super().__init__(f"superadditivity violated: {triple}")
        self.triple = triple


class SuperadditiveProcessSpec:
    """A stationary superadditive process X(s,t), s < t integers.

    kinds:
      additive(c):              X(s,t) = c (t - s), time constant c
      iid_sums(mark):           X(s,t) = sum_{s<=k<t} xi_k, time constant E xi
      shifted_sums(mark, b):    X(s,t) = max(0, sum xi_k - b), xi >= 0, b >= 0,
                                time constant E xi
      diamond(process, u, delta, mode): the diamond-restricted value
                                between s u and t u with budget t - s
    """
    KINDS = ("additive", "iid_sums", "shifted_sums", "diamond")

    def __init__(self, kind, **params):
        if kind not in self.KINDS:
            raise InvalidInput(f"unknown superadditive process {kind!r}")
        self.kind = kind
        self.params = params
        if "mark" in params and not isinstance(params["mark"], MarkDistribution):
            params["mark"] = MarkDistribution.from_json(params["mark"])
        if kind == "diamond":
            if not isinstance(params["process"], ProcessSpec):
                params["process"] = ProcessSpec.from_json(params["process"])
            params.setdefault("mode", "path")
            params["u"] = np.asarray(params["u"], dtype=float)
        if kind == "shifted_sums" and params.get("b", 0) < 0:
            raise InvalidInput("shift must be nonnegative")

    def time_constant(self):
        """Analytic time constant, or None when it has to be estimated."""
        if self.kind == "additive":
            return float(self.params["c"])
        if self.kind in ("iid_sums", "shifted_sums"):
            return float(self.params["mark"].moment(1))
        return None

    def realize(self, rng, n_max):
        """Draw what X needs on [-n_max, n_max]; returns an evaluator X(s,t)."""
        k, p = self.kind, self.params
        if k == "additive":
            return lambda s, t: p["c"] * (t - s)
        if k in ("iid_sums", "shifted_sums"):
            xi = p["mark"].sample(rng, 2 * n_max)
            cum = np.concatenate([[0.0], np.cumsum(xi)])
            b = p.get("b", 0.0)

            def X(s, t):
                v = cum[t + n_max] - cum[s + n_max]
                return max(0.0, v - b) if k == "shifted_sums" else v
            return X
        proc, u, delta, mode = p["process"], p["u"], p["delta"], p["mode"]
        norm = p.get("norm") or Norm(2.0, proc.d)
        radius = process_window_radius(u, -n_max, n_max, mode, norm)
        r = proc.sample(rng, radius)
        return lambda s, t: diamond_process_value(r, u, delta, s, t, mode, norm).value

    def to_json(self):
        out = {"kind": self.kind}
        for k, v in self.params.items():
            if isinstance(v, (MarkDistribution, ProcessSpec)):
                out[k] = v.to_json()
            elif isinstance(v, np.ndarray):
                out[k] = v.tolist()
            elif isinstance(v, Norm):
                out[k] = v.to_json()
            else:
                out[k] = v
        return out


def _maxineq_replica(args):
    spec, seed, i, n_max = args
    X = spec.realize(rng_for(seed, STREAM_MAXINEQ, i), n_max)
    return [X(-n, n) for n in range(1, n_max + 1)]


def _triple_replica(args):
    spec, seed, i, n_max = args
    rng = rng_for(seed, STREAM_MAXINEQ_TRIPLES, i)
    s = np.sort(rng.choice(np.arange(-n_max, n_max + 1), size=3, replace=False))
    s1, s2, s3 = (int(v) for v in s)
    X = spec.realize(rng, n_max)
    a, b, c = X(s1, s2), X(s2, s3), X(s1, s3)
    ok = c + 1e-12 * max(1.0, abs(c)) >= a + b and min(a, b, c) >= 0
    return {"index": i, "s": [s1, s2, s3], "values": [a, b, c], "ok": bool(ok)}


def maximal_inequality_check(spec, alphas, n_max, replicas, seed, triples=100, jobs=None, z=Z95):
    """Frequency of {max_{1<=n<=n_max} X(-n,n)/(2n) > alpha} against
    3 TC / alpha. TC is analytic when known (then the additive process is
    checked exactly, with no slack) and otherwise the Fekete estimate
    max_n mean X(-n,n)/(2n), using X(-n,n) ~ X(0,2n). Superadditivity is
    first verified on sampled integer triples; a violation aborts with the
    offending triple."""
    if not isinstance(spec, SuperadditiveProcessSpec):
        spec = SuperadditiveProcessSpec(**spec)
    for row in pmap(_triple_replica, [(spec, seed, i, n_max) for i in range(triples)], jobs):
        if not row["ok"]:
            raise SuperadditivityViolation(row)
    rows = np.array(pmap(_maxineq_replica, [(spec, seed, i, n_max) for i in range(replicas)], jobs))
    ns = np.arange(1, n_max + 1)
    sup = (rows / (2 * ns)).max(axis=1)
    tc = spec.time_constant()
    exact = spec.kind == "additive"
    if tc is None:
        tc = float((rows.mean(axis=0) / (2 * ns)).max())
        tc_source = "fekete_estimate"
    else:
        tc_source = "analytic"
    out = []
    for a in alphas:
        f, h = frequency_ci(sup > a, z)
        bound = 3 * tc / a
        slack = 0.0 if exact else h
        out.append({"alpha": a, "frequency": f, "ci": slack, "bound": bound,
                    "passed": bool(f <= bound + slack)})
    return {"check": "maximal_inequality", "process": spec.to_json(), "n_max": n_max,
            "replicas": replicas, "triples_checked": triples, "time_constant": tc,
            "time_constant_source": tc_source, "exact": exact, "per_alpha": out,
            "passed": all(o["passed"] for o in out)}


# ---------------------------------------------------------- moment property

def doubled_poisson(lam, window, seed, offset=1e-3):
    """Clustered negative control: every Poisson atom gets a twin at a fixed
    small offset (unit marks)."""
    r = sample_poisson_marked(lam, MarkDistribution.constant(1.0), window, seed)
    twin = r.locations + offset
    keep = window.contains(twin)
    loc = np.vstack([r.locations, twin[keep]])
    return MarkedRealization(loc, np.ones(len(loc)), window, check=False)


def _moment_sample(args):
    process, seed, i, radius = args
    return process.sample(rng_for(seed, STREAM_MOMENT, 0, i), radius)


def moment_property_run(process, samples, seed, n_disjoint=10, n_same=10, C=1.0, mode="bound",
                        radius=4.0, sigmas=3.0, jobs=None):
    """Draw samples realizations of process and run moment_property_check
    on seeded box pairs inside the (common) realization window."""
    if not isinstance(process, ProcessSpec):
        process = ProcessSpec.from_json(process)
    batch = pmap(_moment_sample, [(process, seed, i, radius) for i in range(samples)], jobs)
    w = batch[0].window
    lo, hi = w.center - w.half, w.center + w.half
    pairs = random_box_pairs(lo, hi, n_disjoint, n_same, rng_for(seed, STREAM_MOMENT, 1))
    out = moment_property_check(batch, pairs, C, mode, sigmas)
    out["process"] = process.to_json()
    return out


def random_box_pairs(lo, hi, n_disjoint, n_same, rng, min_side=0.15):
    """Half-open box pairs inside [lo, hi]: disjoint pairs (split along a
    random axis) and pairs of identical boxes."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    side = hi - lo
    pairs = []
    for k in range(n_disjoint + n_same):
        a = lo + rng.uniform(0, 0.3, len(lo)) * side
        b = a + rng.uniform(min_side + 0.2, 0.7, len(lo)) * side
        b = np.minimum(b, hi)
        if k < n_disjoint:
            ax = int(rng.integers(len(lo)))
            cut = a[ax] + rng.uniform(0.3, 0.7) * (b[ax] - a[ax])
            b1, a2 = b.copy(), a.copy()
            b1[ax] = cut
            a2[ax] = cut
            pairs.append(((a.tolist(), b1.tolist()), (a2.tolist(), b.tolist())))
        else:
            pairs.append(((a.tolist(), b.tolist()), (a.tolist(), b.tolist())))
    return pairs


def moment_property_check(batch, box_pairs, C=1.0, mode="bound", sigmas=3.0):
    """Second factorial moment against C^2 times the product of means.

    D = mean(N1 N2 - N(B1 & B2)) - C^2 mean(N1) mean(N2), standard error
    from the delta method (influence values F - C^2 (m2 N1 + m1 N2)).
    mode "bound": pass when D <= sigmas * se. mode "equality": pass when
    |D| <= sigmas * se (the Poisson factorization)."""
    if len(batch) < 2:
        raise InvalidInput("need at least 2 realizations")
    if mode not in ("bound", "equality"):
        raise InvalidInput("mode is 'bound' or 'equality'")
    c2 = C * C
    out = []
    for b1, b2 in box_pairs:
        F = factorial_moment_samples(batch, (b1, b2), 2)
        n1 = box_counts(batch, b1)
        n2 = box_counts(batch, b2)
        m1, m2 = n1.mean(), n2.mean()
        if m1 == 0 and m2 == 0 and F.max() == 0:
            raise InvalidInput("degenerate batch: no atom in either box")
        D = F.mean() - c2 * m1 * m2
        phi = F - c2 * (m2 * n1 + m1 * n2)
        se = float(phi.std(ddof=1) / np.sqrt(len(batch)))
        ok = D <= sigmas * se if mode == "bound" else abs(D) <= sigmas * se
        out.append({"boxes": [b1, b2], "second_moment": float(F.mean()), "product": float(m1 * m2),
                    "excess": float(D), "se": se, "passed": bool(ok)})
    return {"check": "moment_property", "mode": mode, "C": C, "sigmas": sigmas,
            "batch": len(batch), "pairs": out, "passed": all(o["passed"] for o in out)}


# ---------------------------------------------------------- divergence probe

def _columnar_stat(cols, W, ell_min):
    """Best witness ratio over 'row 0 to column j, then up k steps' paths in
    the box [0, W]^2: mass prefix(j) + k X_j over max(j + k, ell_min) steps."""
    j = np.arange(len(cols), dtype=float)
    prefix = np.cumsum(cols)
    best = 0.0
    for k in (np.zeros_like(j), np.full_like(j, W), np.maximum(0, ell_min - j)):
        k = np.minimum(k, W)
        r = (prefix + k * cols) / np.maximum(j + k, ell_min)
        best = max(best, float(r.max()))
    return best


def _poisson_stat(r, ell_min, norm, L):
    """Best witness ratio from the origin corner of [0, L]^d: single atoms,
    and sweep paths through the k heaviest atoms for dyadic k."""
    if len(r) == 0:
        return 0.0
    m = r.masses
    dist = norm(r.locations)
    best = float((m / np.maximum(dist, ell_min)).max())
    order = np.argsort(-m, kind="stable")
    k = 1
    while True:
        k = min(k, len(order))
        idx = order[:k]
        path, ratio = few_tsp_path(r.locations[idx], L, r.d, norm)
        length = ratio * k ** ((r.d - 1) / r.d) * L
        best = max(best, float(m[idx].sum() / max(length, ell_min)))
        if k == len(order):
            break
        k *= 2
    return best


def _threshold_for_cap(lam, nu, vol, cap):
    """Smallest t0 with lam vol nu([t0, inf)) <= cap (bisection)."""
    if lam * vol <= cap:
        return 0.0
    lo, hi = 0.0, 1.0
    while lam * vol * nu.tail(hi) > cap:
        hi *= 2
    for _ in range(80):
        mid = (lo + hi) / 2
        if lam * vol * nu.tail(mid) > cap:
            lo = mid
        else:
            hi = mid
    return hi


def _divergence_replica(args):
    kind, params, W, seed, i, ell_min = args
    rng = rng_for(seed, STREAM_DIVERGENCE, i, int(W))
    nu = MarkDistribution.from_json(params["mark"])
    if kind == "columnar":
        cols = columnar_columns(nu, 0, int(W), rng)
        return _columnar_stat(cols, int(W), ell_min)
    d = params.get("d", 2)
    lam = params.get("lam", 1.0)
    w = Window.box(np.zeros(d), np.full(d, float(W)))
    t0 = _threshold_for_cap(lam, nu, w.volume(), params.get("cap", 200_000))
    r = sample_poisson_marked_above(lam, nu, w, t0, rng)
    return _poisson_stat(r, ell_min, Norm(2.0, d), float(W))


def divergence_probe(kind, params, windows, replicas, seed, thresholds=(2.0, 4.0, 8.0), ell_min=8.0,
                     jobs=None):
    """Witness statistic max_l value(l)/l on growing windows.

    Every witness is an explicit path from the origin, so the statistic is
    a lower bound of the optimum's sup over l >= ell_min. kind "columnar":
    lattice paths on the columnar field in [0,W]^2 ("row then column").
    kind "poisson": sweep paths through the heaviest atoms of a Poisson
    process on [0,W]^d; when lam W^d exceeds params["cap"] only the atoms
    above the matching mass level are drawn (thinning keeps this exact).

    Classification on the replica medians: "divergence-consistent" when the
    median at the largest window exceeds every threshold; "plateau" when
    it stays below the smallest threshold times the median at the smallest
    window (and below the largest threshold); otherwise "inconclusive"."""
    if kind not in ("columnar", "poisson"):
        raise InvalidInput("divergence probes are 'columnar' or 'poisson'")
    if kind == "columnar" and params.get("d", 2) != 2:
        raise InvalidInput("columnar probes need d = 2")
    windows = sorted(int(w) for w in windows)
    args = [(kind, params, W, seed, i, ell_min) for W in windows for i in range(replicas)]
    stats = np.array(pmap(_divergence_replica, args, jobs)).reshape(len(windows), replicas)
    med = np.median(stats, axis=1)
    slope = float(np.polyfit(np.log(windows), np.log(np.maximum(med, 1e-300)), 1)[0]) \
        if len(windows) > 1 else 0.0
    crossing = {}
    for s in thresholds:
        hit = [W for W, v in zip(windows, med) if v > s]
        crossing[str(s)] = hit[0] if hit else None
    if med[-1] > max(thresholds):
        verdict = "divergence-consistent"
    elif med[-1] <= min(thresholds) * med[0] and med[-1] <= max(thresholds):
        verdict = "plateau"
    else:
        verdict = "inconclusive"
    return {"check": "divergence_probe", "kind": kind, "params": params, "windows": windows,
            "replicas": replicas, "ell_min": ell_min, "thresholds": list(thresholds),
            "median": med.tolist(), "q10": np.quantile(stats, 0.1, axis=1).tolist(),
            "q90": np.quantile(stats, 0.9, axis=1).tolist(), "fitted_exponent": slope,
            "first_window_above": crossing, "classification": verdict}


# ------------------------------------------------ sandwich and identities

def _rel_le(a, b, rel=1e-12):
    return a <= b + rel * max(1.0, abs(a), abs(b))


def _suite_instance(args):
    seed, i, process, lattice_every, sets = args
    rng = rng_for(seed, STREAM_SUITE, i)
    checks = {}
    norms = [Norm(1.0, 2), Norm(2.0, 2), Norm(math.inf, 2)]
    is_lattice = process is None and lattice_every and i % lattice_every == 0
    if process is not None:
        ell = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        r = process.sample(rng, 2 * ell + 1e-9)
        norm = norms[int(rng.integers(3))]
    elif is_lattice:
        side = int(rng.integers(3, 5))
        nu = MarkDistribution("discrete", values=[0.5, 1.0, 2.0], probs=[0.4, 0.4, 0.2]) \
            if rng.random() < 0.5 else MarkDistribution("bernoulli", p=0.5, scale=1.0)
        r = sample_lattice_iid(nu, [0, 0], [side - 1, side - 1], rng)
        ell = float(rng.integers(1, 4))
        norm = Norm(1.0, 2)
    else:
        ell = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        R = 2 * ell
        lam = float(rng.uniform(2.0, 10.0)) / (2 * R) ** 2
        nu = MarkDistribution("discrete", values=[0.25, 0.5, 1.0, 2.0], probs=[0.25] * 4)
        r = sample_poisson_marked(lam, nu, Window.box([-R, -R], [R, R]), rng)
        norm = norms[int(rng.integers(3))]
    x0 = r.locations[int(rng.integers(len(r)))] if is_lattice else np.zeros(2)

    # sandwich P(l) <= A(l) <= P(2l)
    p1 = max_mass_path(r, PathQuery(ell, x0), norm)
    a1 = max_mass_animal_inf(r, x0, ell, norm=norm)
    p2 = max_mass_path(r, PathQuery(2 * ell, x0), norm)
    unproven = 0
    if p1.proven_optimal and a1.proven_optimal and p2.proven_optimal:
        checks["sandwich"] = bool(_rel_le(p1.value, a1.value) and _rel_le(a1.value, p2.value))
    else:
        unproven += 1

    # bracket lower bound nonincreasing in q
    lows = [bracket_animal(r, x0, ell, q, norm=norm)[0] for q in (0.0, 1.0, math.inf)]
    checks["penalization_monotone"] = all(_rel_le(b, a) for a, b in zip(lows, lows[1:]))

    # layer identity on random vertex sets
    worst = 0.0
    for _ in range(sets):
        if len(r) == 0:
            S = np.zeros(0, dtype=int)
        else:
            S = np.flatnonzero(rng.random(len(r)) < rng.uniform(0.1, 0.9))
        a, b = mass_of_set(r, S), layer_mass(r, S)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    checks["layer_identity"] = worst <= 1e-12

    # restriction monotonicity for two-point paths and animals
    if is_lattice:
        y = r.locations[int(rng.integers(len(r)))]
    else:
        ang = rng.uniform(0, 2 * np.pi)
        y = x0 + rng.uniform(0.2, 0.9) * ell * np.array([np.cos(ang), np.sin(ang)]) / float(
            norm(np.array([np.cos(ang), np.sin(ang)])))
    if not np.array_equal(x0, y) and float(norm(y - x0)) <= ell:
        delta = float(rng.uniform(0.1, 0.9))
        pv = [max_mass_path(r, PathQuery(ell, x0, y, k, delta if k != "none" else None), norm).value
              for k in ("diamond", "antidiamond", "none")]
        av = [max_mass_animal_inf(r, x0, ell, y=y, restriction=k,
                                  delta=delta if k != "none" else None, norm=norm).value
              for k in ("diamond", "antidiamond", "none")]
        checks["restriction_monotone"] = all(_rel_le(a, b) for v in (pv, av) for a, b in zip(v, v[1:]))

    # lattice reduction A^L(x, y, n+1) = A(x, y, n) under l1
    if is_lattice:
        n = int(rng.integers(0, 6))
        n = min(n, len(r) - 1)
        xs = r.locations[int(rng.integers(len(r)))]
        ys = r.locations[int(rng.integers(len(r)))]
        lat = lattice_max_animal(r, n + 1, xs, ys).value
        if n == 0:
            cont = mass_of_set(r, xs[None, :]) if np.array_equal(xs, ys) else 0.0
        else:
            cont = max_mass_animal_inf(r, xs, float(n), y=ys, norm=Norm(1.0, 2)).value
        checks["lattice_reduction"] = abs(lat - cont) <= 1e-12 * max(1.0, lat)
    failed = [k for k, v in checks.items() if not v]
    out = {"index": i, "checks": checks, "failed": failed, "unproven": unproven}
    if failed:
        out["artifact"] = {"seed": seed, "stream": [STREAM_SUITE, i], "ell": ell,
                           "norm": norm.to_json(), "realization": r.to_json()}
    return out


def sandwich_and_identity_suite(instance_count, seed, process=None, lattice_every=2, sets=10,
                                out_dir=None, jobs=None):
    """Run the structural checks on instance_count seeded instances and
    aggregate pass rates (all must be 1). With process None the instances
    alternate between small lattice boxes and small Poisson windows with
    dyadic marks. Failing instances are returned (and written to out_dir)
    as reproducible JSON artifacts."""
    if process is not None and not isinstance(process, ProcessSpec):
        process = ProcessSpec.from_json(process)
    args = [(seed, i, process, lattice_every, sets) for i in range(instance_count)]
    rows = pmap(_suite_instance, args, jobs)
    names = sorted({k for r in rows for k in r["checks"]})
    rates = {}
    for k in names:
        vals = [r["checks"][k] for r in rows if k in r["checks"]]
        rates[k] = {"instances": len(vals), "pass_rate": float(np.mean(vals)) if vals else 1.0}
    failures = [r for r in rows if r["failed"]]
    if out_dir and failures:
        os.makedirs(out_dir, exist_ok=True)
        for f in failures:
            with open(os.path.join(out_dir, f"failure_{f['index']}.json"), "w") as fh:
                json.dump(f, fh, sort_keys=True)
    return {"check": "sandwich_and_identity_suite", "instances": instance_count, "rates": rates,
            "unproven": int(sum(r["unproven"] for r in rows)), "failures": failures,
            "passed": not failures}
