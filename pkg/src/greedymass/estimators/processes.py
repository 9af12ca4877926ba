"""Process specifications used by the estimators and the CLI, and the
ordered parallel map over replicas.

A ProcessSpec is a JSON-friendly tagged union:
    {"kind": "poisson", "lam": 1.0, "mark": {...}, "d": 2}
    {"kind": "lattice_iid", "mark": {...}, "d": 2}
    {"kind": "lattice_columnar", "mark": {...}}
    {"kind": "dpp_grid", "side": 8.0, "cells": 16, "rho": 0.05, "mark": {...}}
    {"kind": "doubled_poisson", "lam": 1.0, "offset": 1e-3, "d": 2}
    {"kind": "empty", "d": 2}
    {"kind": "fixed", "realization": {...}}
sample(seed, radius) returns a realization whose window contains every
p-norm ball of that radius around the origin (a box for continuum
processes, the integer box [-radius, radius]^d for lattice ones).
"""
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..geometry import InvalidInput
from ..pointproc import (DPPKernelSpec, MarkDistribution, MarkedRealization, Window,
                         sample_dpp_grid, sample_lattice_columnar, sample_lattice_iid,
                         sample_poisson_marked)

KINDS = ("poisson", "lattice_iid", "lattice_columnar", "dpp_grid", "doubled_poisson", "empty",
         "fixed")


class ProcessSpec:
    def __init__(self, kind, **params):
        if kind not in KINDS:
            raise InvalidInput(f"unknown process kind {kind!r}")
        self.kind = kind
        self.params = params
        self.mark = None
        if "mark" in params:
            m = params["mark"]
            self.mark = m if isinstance(m, MarkDistribution) else MarkDistribution.from_json(m)
        if kind in ("poisson", "doubled_poisson") and not params.get("lam", 0) > 0:
            raise InvalidInput("poisson needs lam > 0")
        if kind == "lattice_columnar" and params.get("d", 2) != 2:
            raise InvalidInput("columnar masses are only defined for d = 2")
        self._realization = None
        if kind == "fixed":
            r = params["realization"]
            self._realization = r if isinstance(r, MarkedRealization) else MarkedRealization.from_json(r)
        self._dpp = None

    @property
    def d(self):
        if self.kind == "fixed":
            return self._realization.d
        if self.kind == "lattice_columnar":
            return 2
        return int(self.params.get("d", 2))

    @property
    def lattice(self):
        return self.kind in ("lattice_iid", "lattice_columnar")

    def sample(self, seed, radius):
        d = self.d
        k = self.kind
        if k == "poisson":
            w = Window.box(np.full(d, -float(radius)), np.full(d, float(radius)))
            return sample_poisson_marked(self.params["lam"], self.mark, w, seed)
        if k in ("lattice_iid", "lattice_columnar"):
            n = int(np.ceil(radius))
            lo, hi = [-n] * d, [n] * d
            f = sample_lattice_iid if k == "lattice_iid" else sample_lattice_columnar
            return f(self.mark, lo, hi, seed)
        if k == "dpp_grid":
            return sample_dpp_grid(self.dpp(), seed)
        if k == "doubled_poisson":
            # clustered control: every Poisson atom gets a twin at a fixed offset
            w = Window.box(np.full(d, -float(radius)), np.full(d, float(radius)))
            r = sample_poisson_marked(self.params["lam"], MarkDistribution.constant(1.0), w, seed)
            twin = r.locations + self.params.get("offset", 1e-3)
            loc = np.vstack([r.locations, twin[w.contains(twin)]])
            return MarkedRealization(loc, np.ones(len(loc)), w, check=False)
        if k == "empty":
            w = Window.box(np.full(d, -float(radius)), np.full(d, float(radius)))
            return MarkedRealization(np.zeros((0, d)), np.zeros(0), w)
        return self._realization

    def dpp(self):
        if self._dpp is None:
            p = self.params
            self._dpp = DPPKernelSpec.gaussian(p["side"], p["cells"], p["rho"], self.d, self.mark)
        return self._dpp

    def to_json(self):
        out = {"kind": self.kind}
        for k, v in self.params.items():
            if k == "mark":
                out[k] = self.mark.to_json()
            elif k == "realization":
                out[k] = self._realization.to_json()
            else:
                out[k] = v
        return out

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        return cls(obj.pop("kind"), **obj)

    def __repr__(self):
        return f"ProcessSpec({self.to_json()})"


def default_jobs():
    v = os.environ.get("GREEDYMASS_JOBS")
    return max(1, int(v)) if v else 1


def pmap(fn, items, jobs=None, chunksize=None):
    """Ordered map; with jobs > 1 the items run in a process pool. Results
    come back in input order, so reductions over them do not depend on
    the schedule."""
    items = list(items)
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    if jobs == 1 or len(items) <= 1:
        return [fn(a) for a in items]
    chunksize = chunksize or max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
