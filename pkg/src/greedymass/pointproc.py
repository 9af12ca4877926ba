"""Marked point process samplers, mark distributions, truncation layers,
masses of sets and factorial moment estimates.

Random streams: every sampler takes either a numpy Generator or an
integer seed. Integer seeds and replica indices are combined through
numpy's SeedSequence (see rng_for), which is the only splitting scheme used
in the package.
"""
import json
import math

import numpy as np
from scipy import integrate

from .geometry import InvalidInput, Norm

LATTICE_DTYPE = np.int64


def rng_for(seed, *stream):
    """Generator for (master seed, stream ids...). Deterministic and
    independent across distinct id tuples."""
    if isinstance(seed, np.random.Generator):
        if stream:
            raise InvalidInput("stream ids need an integer master seed")
        return seed
    ent = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(s) for s in stream]
    return np.random.default_rng(np.random.SeedSequence(ent))


# ---------------------------------------------------------------- windows

class Window:
    """Axis-aligned box (center, half-widths) or p-norm ball (center, radius)."""

    def __init__(self, shape, center, half=None, radius=None, norm=None):
        self.shape = shape
        self.center = np.asarray(center, dtype=float)
        d = len(self.center)
        if shape == "box":
            self.half = np.broadcast_to(np.asarray(half, dtype=float), (d,)).copy()
            if np.any(self.half < 0):
                raise InvalidInput("box half-widths must be nonnegative")
        elif shape == "ball":
            self.radius = float(radius)
            if self.radius < 0:
                raise InvalidInput("ball radius must be nonnegative")
            self.norm = norm if norm is not None else Norm(2.0, d)
        else:
            raise InvalidInput(f"unknown window shape {shape!r}")

    @classmethod
    def box(cls, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return cls("box", (lo + hi) / 2, half=(hi - lo) / 2)

    @classmethod
    def ball(cls, center, radius, norm=None):
        return cls("ball", center, radius=radius, norm=norm)

    @property
    def d(self):
        return len(self.center)

    @property
    def lo(self):
        return self.center - (self.half if self.shape == "box" else self.radius)

    @property
    def hi(self):
        return self.center + (self.half if self.shape == "box" else self.radius)

    def volume(self):
        if self.shape == "box":
            return float(np.prod(2 * self.half))
        d, p, r = self.d, self.norm.p, self.radius
        if math.isinf(p):
            return (2 * r) ** d
        return (2 * math.gamma(1 + 1 / p)) ** d / math.gamma(1 + d / p) * r ** d

    def contains(self, z, tol=0.0):
        z = np.asarray(z, dtype=float)
        if self.shape == "box":
            return np.all(np.abs(z - self.center) <= self.half + tol, axis=-1)
        return self.norm(z - self.center) <= self.radius + tol

    def contains_ball(self, x, r, norm):
        """Does the window contain the closed norm-ball B(x, r)?"""
        x = np.asarray(x, dtype=float)
        if self.shape == "box":
            # the ball of any p-norm lies inside its sup-norm ball
            return bool(np.all(np.abs(x - self.center) + r <= self.half + 1e-12))
        if norm == self.norm:
            return bool(self.norm(x - self.center) + r <= self.radius + 1e-12)
        # general case: norm-ball inside the l1-ball of radius r*d,
        # and the sup ball of radius r; check the sup-box corners conservatively
        box = Window.box(x - r, x + r)
        corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(box.lo, box.hi)])).reshape(self.d, -1).T
        return bool(np.all(self.contains(corners)))

    def shifted(self, z):
        z = np.asarray(z, dtype=float)
        if self.shape == "box":
            return Window("box", self.center + z, half=self.half)
        return Window("ball", self.center + z, radius=self.radius, norm=self.norm)

    def sample_uniform(self, rng, n):
        d = self.d
        if self.shape == "box":
            return self.center + self.half * rng.uniform(-1.0, 1.0, size=(n, d))
        out = np.empty((0, d))
        while len(out) < n:
            m = max(16, 2 * (n - len(out)))
            cand = rng.uniform(-1.0, 1.0, size=(m, d))
            cand = cand[self.norm(cand) <= 1.0]
            out = np.vstack([out, cand])
        return self.center + self.radius * out[:n]

    def to_json(self):
        if self.shape == "box":
            return {"box": {"center": self.center.tolist(), "half": self.half.tolist()}}
        return {"ball": {"center": self.center.tolist(), "radius": self.radius,
                         "norm": self.norm.to_json()}}

    @classmethod
    def from_json(cls, obj):
        if obj is None:
            return None
        if "box" in obj:
            b = obj["box"]
            return cls("box", b["center"], half=b["half"])
        b = obj["ball"]
        return cls("ball", b["center"], radius=b["radius"],
                   norm=Norm.from_json(b.get("norm", {"p": 2}), len(b["center"])))


# -------------------------------------------------------- mark distributions

class MarkDistribution:
    """Parametric mark law nu.

    kinds: constant(c), bernoulli(p, scale), exponential(rate),
    pareto(alpha, xmin), discrete(values, probs).
    Bernoulli puts mass 1-p at 0; all other kinds live on (0, inf).
    """

    KINDS = ("constant", "bernoulli", "exponential", "pareto", "discrete")

    def __init__(self, kind, **params):
        if kind not in self.KINDS:
            raise InvalidInput(f"unknown mark distribution {kind!r}")
        self.kind = kind
        self.params = params
        if kind == "constant":
            if not params["c"] > 0:
                raise InvalidInput("constant mark must be positive")
        elif kind == "bernoulli":
            p = params["p"]
            params.setdefault("scale", 1.0)
            if not 0 <= p <= 1 or not params["scale"] > 0:
                raise InvalidInput("bernoulli needs p in [0,1] and scale > 0")
        elif kind == "exponential":
            if not params["rate"] > 0:
                raise InvalidInput("exponential rate must be positive")
        elif kind == "pareto":
            params.setdefault("xmin", 1.0)
            if not (params["alpha"] > 0 and params["xmin"] > 0):
                raise InvalidInput("pareto needs alpha > 0 and xmin > 0")
        elif kind == "discrete":
            v = np.asarray(params["values"], dtype=float)
            pr = np.asarray(params["probs"], dtype=float)
            if v.shape != pr.shape or np.any(v <= 0) or np.any(pr < 0) or abs(pr.sum() - 1) > 1e-12:
                raise InvalidInput("discrete needs positive values and probs summing to 1")
            order = np.argsort(v)
            self._v, self._p = v[order], pr[order]

    @classmethod
    def constant(cls, c=1.0):
        return cls("constant", c=c)

    def sample(self, rng, n):
        k, p = self.kind, self.params
        if k == "constant":
            return np.full(n, float(p["c"]))
        if k == "bernoulli":
            return np.where(rng.random(n) < p["p"], float(p["scale"]), 0.0)
        if k == "exponential":
            return rng.exponential(1.0 / p["rate"], size=n)
        if k == "pareto":
            # inverse transform keeps the law exact: xmin * U^(-1/alpha)
            u = 1.0 - rng.random(n)
            return p["xmin"] * u ** (-1.0 / p["alpha"])
        return rng.choice(self._v, size=n, p=self._p)

    def tail(self, t):
        """nu([t, inf))."""
        t = np.asarray(t, dtype=float)
        k, p = self.kind, self.params
        if k == "constant":
            r = (t <= p["c"]).astype(float)
        elif k == "bernoulli":
            r = np.where(t <= 0, 1.0, np.where(t <= p["scale"], p["p"], 0.0))
        elif k == "exponential":
            r = np.where(t <= 0, 1.0, np.exp(-p["rate"] * np.maximum(t, 0)))
        elif k == "pareto":
            r = np.where(t <= p["xmin"], 1.0, (p["xmin"] / np.maximum(t, p["xmin"])) ** p["alpha"])
        else:
            cum = np.concatenate([[0.0], np.cumsum(self._p)])
            idx = np.searchsorted(self._v, t, side="left")
            r = 1.0 - cum[idx]
            r = np.clip(r, 0.0, 1.0)
        return float(r) if r.ndim == 0 else r

    def greedy_integral(self, d):
        """int_0^inf nu([t, inf))^(1/d) dt, inf when divergent."""
        if d < 1:
            raise InvalidInput("dimension must be >= 1")
        k, p = self.kind, self.params
        if k == "constant":
            return float(p["c"])
        if k == "bernoulli":
            return p["scale"] * p["p"] ** (1.0 / d)
        if k == "exponential":
            return d / p["rate"]
        if k == "pareto":
            a = p["alpha"]
            if a <= d:
                return math.inf
            return p["xmin"] * a / (a - d)
        v = self._v
        tails = np.array([self.tail(x) for x in v])
        return float(np.sum(np.diff(np.concatenate([[0.0], v])) * tails ** (1.0 / d)))

    def moment(self, k):
        """int t^k nu(dt), inf when divergent."""
        kind, p = self.kind, self.params
        if kind == "constant":
            return float(p["c"]) ** k
        if kind == "bernoulli":
            return p["p"] * p["scale"] ** k
        if kind == "exponential":
            return math.gamma(k + 1) / p["rate"] ** k
        if kind == "pareto":
            a = p["alpha"]
            return math.inf if a <= k else a * p["xmin"] ** k / (a - k)
        return float(np.sum(self._p * self._v ** k))

    def above(self, t):
        """(nu([t, inf)), law of a mark conditioned to be >= t). Closed form
        for the kinds where conditioning stays in the family."""
        k, p = self.kind, self.params
        q = float(self.tail(t))
        if q == 0.0:
            return 0.0, None
        if k == "pareto":
            return q, MarkDistribution("pareto", alpha=p["alpha"], xmin=max(t, p["xmin"]))
        if k == "constant" or t <= 0:
            return q, self
        if k == "exponential":
            return q, _Shifted(self, t)
        raise InvalidInput(f"conditioning is not available for {k} marks")

    def to_json(self):
        params = {k: (list(v) if isinstance(v, (list, tuple, np.ndarray)) else v)
                  for k, v in self.params.items()}
        return {"kind": self.kind, **params}

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        kind = obj.pop("kind")
        return cls(kind, **obj)

    def __repr__(self):
        return f"MarkDistribution({self.kind}, {self.params})"


class _Shifted:
    """t + (exponential mark): the exponential law conditioned on >= t."""

    def __init__(self, base, t):
        self.base = base
        self.t = float(t)

    def sample(self, rng, n):
        return self.t + self.base.sample(rng, n)


def greedy_integral_numeric(dist, d):
    """Quadrature of int nu([t,inf))^(1/d) dt, relative error ~1e-6.
    Used as an independent check of the closed forms."""
    f = lambda t: dist.tail(t) ** (1.0 / d)
    brk = []
    if dist.kind == "constant":
        brk = [dist.params["c"]]
    elif dist.kind == "bernoulli":
        brk = [dist.params["scale"]]
    elif dist.kind == "pareto":
        brk = [dist.params["xmin"]]
    elif dist.kind == "discrete":
        brk = list(dist._v)
    total, last = 0.0, 0.0
    for b in brk:
        val, _ = integrate.quad(f, last, b, epsrel=1e-10, limit=200)
        total += val
        last = b
    val, _ = integrate.quad(f, last, np.inf, epsrel=1e-10, limit=400)
    return total + val


# ------------------------------------------------------------ realizations

class MarkedRealization:
    """Finite family of (location, mass) atoms inside a window.

    window None means the atoms are the whole configuration (no edge
    effects to guard against). Masses are >= 0; zero-mass atoms only occur
    on lattice realizations, where every site is kept.
    """

    def __init__(self, locations, masses, window=None, lattice=False, check=True):
        loc = np.asarray(locations, dtype=float)
        m = np.asarray(masses, dtype=float).reshape(-1)
        if loc.size == 0:
            d = window.d if window is not None else (loc.shape[1] if loc.ndim == 2 else 2)
            loc = np.zeros((0, d))
        if loc.ndim != 2 or len(loc) != len(m):
            raise InvalidInput("locations must be (n, d) with one mass per atom")
        self.locations = loc
        self.masses = m
        self.window = window
        self.lattice = bool(lattice)
        if check:
            self.validate()

    def validate(self):
        if np.any(self.masses < 0) or not np.all(np.isfinite(self.masses)):
            raise InvalidInput("masses must be finite and nonnegative")
        if self.window is not None and len(self) and not np.all(self.window.contains(self.locations, 1e-9)):
            raise InvalidInput("atom outside the window")
        if len(np.unique(self.locations, axis=0)) != len(self):
            raise InvalidInput("atom locations must be pairwise distinct")
        if self.lattice and np.any(self.locations != np.round(self.locations)):
            raise InvalidInput("lattice atoms must have integer coordinates")

    def __len__(self):
        return len(self.masses)

    @property
    def d(self):
        return self.locations.shape[1]

    def total_mass(self):
        return float(self.masses.sum())

    def subset(self, keep):
        return MarkedRealization(self.locations[keep], self.masses[keep], self.window,
                                 self.lattice, check=False)

    def to_json(self):
        return {"window": None if self.window is None else self.window.to_json(),
                "lattice": self.lattice,
                "atoms": np.column_stack([self.locations, self.masses]).tolist()}

    @classmethod
    def from_json(cls, obj):
        atoms = np.asarray(obj["atoms"], dtype=float)
        window = Window.from_json(obj.get("window"))
        if atoms.size == 0:
            d = window.d if window is not None else 2
            atoms = np.zeros((0, d + 1))
        return cls(atoms[:, :-1], atoms[:, -1], window, obj.get("lattice", False))

    def dumps(self):
        return json.dumps(self.to_json())

    def __repr__(self):
        return f"MarkedRealization({len(self)} atoms, d={self.d}, lattice={self.lattice})"


def sample_poisson_marked(lam, nu, window, seed):
    if not lam > 0:
        raise InvalidInput("intensity must be positive")
    vol = window.volume()
    if not vol > 0:
        raise InvalidInput("window must have positive volume")
    rng = rng_for(seed)
    n = rng.poisson(lam * vol)
    loc = window.sample_uniform(rng, n)
    m = nu.sample(rng, n)
    return MarkedRealization(loc, m, window, lattice=False, check=False)


def sample_poisson_marked_above(lam, nu, window, t0, seed):
    """Atoms of the marked Poisson process with mass >= t0 only. By thinning
    they form a Poisson process of intensity lam * nu([t0, inf)) with marks
    drawn from nu conditioned on [t0, inf)."""
    q, cond = nu.above(t0)
    if cond is None:
        return MarkedRealization(np.zeros((0, window.d)), np.zeros(0), window, check=False)
    rng = rng_for(seed)
    n = rng.poisson(lam * q * window.volume())
    loc = window.sample_uniform(rng, n)
    return MarkedRealization(loc, cond.sample(rng, n), window, check=False)


def lattice_window(lo, hi):
    """Box window around the integer sites lo..hi (inclusive), padded by 1/2."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return Window.box(lo - 0.5, hi + 0.5)


def lattice_sites(lo, hi):
    lo = np.asarray(lo, dtype=int)
    hi = np.asarray(hi, dtype=int)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grid], axis=1)


def sample_lattice_iid(nu, lo, hi, seed):
    """One atom per site of the integer box lo..hi with i.i.d. nu masses."""
    rng = rng_for(seed)
    sites = lattice_sites(lo, hi)
    m = nu.sample(rng, len(sites))
    return MarkedRealization(sites.astype(float), m, lattice_window(lo, hi), lattice=True, check=False)


def columnar_columns(nu, lo0, hi0, seed):
    """Column values X_{v1,0}, v1 = lo0..hi0, of the columnar field."""
    return nu.sample(rng_for(seed), int(hi0) - int(lo0) + 1)


def sample_lattice_columnar(nu, lo, hi, seed):
    """d = 2 only: X_{v1, v2} = X_{v1, 0}, column values i.i.d. nu."""
    lo = np.asarray(lo, dtype=int)
    hi = np.asarray(hi, dtype=int)
    if len(lo) != 2:
        raise InvalidInput("columnar masses are only defined for d = 2")
    cols = columnar_columns(nu, lo[0], hi[0], seed)
    sites = lattice_sites(lo, hi)
    m = cols[sites[:, 0] - lo[0]]
    return MarkedRealization(sites.astype(float), m, lattice_window(lo, hi), lattice=True, check=False)


def shift_realization(r, z):
    z = np.asarray(z, dtype=float)
    w = None if r.window is None else r.window.shifted(z)
    lattice = r.lattice and np.all(z == np.round(z))
    return MarkedRealization(r.locations + z, r.masses.copy(), w, lattice, check=False)


SHIFT_BITS = 32


def uniform_shift(r, seed):
    """Shift by U uniform on the dyadic grid {k / 2^32 : 0 < k < 2^32} in each
    coordinate. Dyadic shifts of coordinates below 2^20 are exact in double
    precision, so shifting back by -U restores the atoms bit for bit."""
    rng = rng_for(seed)
    k = rng.integers(1, 2 ** SHIFT_BITS, size=r.d)
    return shift_realization(r, k / float(2 ** SHIFT_BITS))


def iid_marking(points, nu, seed, window=None):
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        d = window.d if window is not None else 2
        return MarkedRealization(np.zeros((0, d)), np.zeros(0), window)
    if len(np.unique(pts, axis=0)) != len(pts):
        raise InvalidInput("points must be pairwise distinct")
    rng = rng_for(seed)
    return MarkedRealization(pts, nu.sample(rng, len(pts)), window, check=False)


def truncate(r, t):
    """Atoms with mass >= t, each given mass 1."""
    if not t > 0:
        raise InvalidInput("truncation level must be positive")
    keep = r.masses >= t
    return MarkedRealization(r.locations[keep], np.ones(int(keep.sum())), r.window, r.lattice, check=False)


def _atom_index(r):
    return {tuple(v): i for i, v in enumerate(r.locations.tolist())}


def region_indices(r, region):
    """Atom indices selected by a region: a predicate on locations (vectorized),
    an integer index sequence, or an (n, d) array of points. Duplicates are
    collapsed; points that are not atoms select nothing."""
    if callable(region):
        if len(r) == 0:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(np.asarray(region(r.locations), dtype=bool))
    a = np.asarray(region)
    if a.size == 0:
        return np.zeros(0, dtype=int)
    if a.dtype.kind in "iu" and a.ndim == 1:
        return np.unique(a)
    pts = np.asarray(region, dtype=float).reshape(-1, r.d)
    idx = _atom_index(r)
    hits = {idx[k] for k in map(tuple, pts.tolist()) if k in idx}
    return np.array(sorted(hits), dtype=int)


def mass_of_set(r, region):
    """Sum of masses over the atom SET selected by region."""
    idx = region_indices(r, region)
    return float(r.masses[idx].sum()) if len(idx) else 0.0


def layer_mass(r, region):
    """Mass of a set rebuilt from its truncation layers:
    sum_i (t_i - t_{i-1}) * #{atoms in the set with mass >= t_i}."""
    idx = region_indices(r, region)
    if len(idx) == 0:
        return 0.0
    m = r.masses[idx]
    levels = np.unique(m[m > 0])
    total, prev = 0.0, 0.0
    for t in levels:
        total += (t - prev) * int(np.count_nonzero(m >= t))
        prev = t
    return total


# ------------------------------------------------------------- grid DPPs

class DPPKernelSpec:
    """Translation-invariant kernel on the discrete torus (Z/nZ)^d scaled to
    side length `side`. `table[z]` is K(z) for offsets z in (Z/nZ)^d."""

    def __init__(self, side, cells, table, mark=None, tol=1e-9):
        self.side = float(side)
        self.cells = int(cells)
        t = np.asarray(table)
        self.d = t.ndim
        if t.shape != (self.cells,) * self.d:
            raise InvalidInput("kernel table must have shape (cells,)*d")
        self.table = t
        self.mark = mark if mark is not None else MarkDistribution.constant(1.0)
        K = self.matrix()
        if not np.allclose(K, K.conj().T, atol=tol):
            raise InvalidInput("kernel matrix is not Hermitian")
        ev = np.linalg.eigvalsh(K)
        if ev.min() < -tol or ev.max() > 1 + tol:
            raise InvalidInput(f"kernel spectrum outside [0,1]: [{ev.min()}, {ev.max()}]")
        self.spectrum_range = (float(ev.min()), float(ev.max()))

    @classmethod
    def from_spectrum(cls, side, spectrum, mark=None):
        """Kernel whose eigenvalue on Fourier mode k is spectrum[k]."""
        spec = np.asarray(spectrum, dtype=float)
        if np.any(spec < -1e-12) or np.any(spec > 1 + 1e-12):
            raise InvalidInput("spectrum must lie in [0,1]")
        table = np.fft.ifftn(spec)
        if np.abs(table.imag).max() < 1e-12:
            table = table.real
        return cls(side, spec.shape[0], table, mark)

    @classmethod
    def gaussian(cls, side, cells, rho, d=2, mark=None):
        """Spectrum exp(-|k|^2 * rho) clipped at 1: a smooth repulsive kernel."""
        k = np.fft.fftfreq(cells) * cells
        kk = np.meshgrid(*([k] * d), indexing="ij")
        r2 = sum(a * a for a in kk)
        return cls.from_spectrum(side, np.exp(-rho * r2), mark)

    def sites(self):
        n = self.cells
        idx = lattice_sites([0] * self.d, [n - 1] * self.d)
        return idx, (idx + 0.5) * (self.side / n)

    def matrix(self):
        idx, _ = self.sites()
        diff = (idx[:, None, :] - idx[None, :, :]) % self.cells
        return self.table[tuple(diff[..., k] for k in range(self.d))]

    def window(self):
        return Window.box(np.zeros(self.d), np.full(self.d, self.side))


def _hkpv(vecs, rng):
    """Sequential sampling from a projection DPP with orthonormal columns."""
    V = vecs.copy()
    k = V.shape[1]
    out = []
    for _ in range(k):
        p = np.sum(np.abs(V) ** 2, axis=1)
        p = np.maximum(p, 0)
        p /= p.sum()
        i = int(rng.choice(len(p), p=p))
        out.append(i)
        # eliminate coordinate i, then re-orthonormalize
        j = int(np.argmax(np.abs(V[i])))
        Vj = V[:, j].copy()
        V = np.delete(V, j, axis=1)
        if V.shape[1] == 0:
            break
        V = V - np.outer(Vj, V[i] / Vj[i])
        V, _ = np.linalg.qr(V)
    return sorted(out)


def sample_dpp_grid(spec, seed, eig=None):
    """Exact spectral (HKPV) sample of the grid DPP, then i.i.d. marks."""
    rng = rng_for(seed)
    if eig is None:
        eig = np.linalg.eigh(spec.matrix())
    lam, vecs = eig
    lam = np.clip(lam, 0.0, 1.0)
    pick = rng.random(len(lam)) < lam
    chosen = _hkpv(vecs[:, pick], rng) if pick.any() else []
    _, centers = spec.sites()
    loc = centers[chosen]
    m = spec.mark.sample(rng, len(loc))
    return MarkedRealization(loc, m, spec.window(), check=False)


# ------------------------------------------------------ factorial moments

def box_counts(batch, box):
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    out = np.empty(len(batch))
    for i, r in enumerate(batch):
        z = r.locations
        out[i] = np.count_nonzero(np.all((z >= lo) & (z < hi), axis=1)) if len(z) else 0
    return out


def _box_intersection(b1, b2):
    lo = np.maximum(np.asarray(b1[0], float), np.asarray(b2[0], float))
    hi = np.minimum(np.asarray(b1[1], float), np.asarray(b2[1], float))
    return lo, hi


def factorial_moment_samples(batch, boxes, k):
    """Per-realization samples whose mean is the k-th factorial moment
    measure of prod(boxes). Boxes are half-open [lo, hi)."""
    if len(batch) == 0:
        raise InvalidInput("empty batch")
    if k == 1:
        return box_counts(batch, boxes[0])
    if k == 2:
        b1, b2 = boxes
        n1 = box_counts(batch, b1)
        n2 = box_counts(batch, b2)
        both = box_counts(batch, _box_intersection(b1, b2))
        return n1 * n2 - both
    raise InvalidInput("only k in {1, 2} is supported")


def estimate_factorial_moment(batch, boxes, k):
    return float(factorial_moment_samples(batch, boxes, k).mean())
