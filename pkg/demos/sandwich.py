"""Paths versus animals on one Poisson realization.

A path of length l is an animal of length l, and a depth-first walk
around an animal of length l is a path of length 2l. So for every l
    P(l) <= A(l) <= P(2l).
This script prints the three values on a growing grid of l.
"""
import numpy as np

from greedymass.geometry import Norm
from greedymass.pointproc import MarkDistribution, Window, sample_poisson_marked
from greedymass.solvers import PathQuery, max_mass_animal_inf, max_mass_path

norm = Norm(2.0)
r = sample_poisson_marked(1.0, MarkDistribution("exponential", rate=1.0),
                          Window.box([-7, -7], [7, 7]), 2024)
print(f"{len(r)} atoms in [-7, 7]^2, exponential marks")
print("   l    P(l)    A(l)   P(2l)")
for ell in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
    p1 = max_mass_path(r, PathQuery(ell, [0, 0]), norm).value
    a = max_mass_animal_inf(r, np.zeros(2), ell, norm=norm).value
    p2 = max_mass_path(r, PathQuery(2 * ell, [0, 0]), norm).value
    print(f"{ell:4.1f} {p1:7.3f} {a:7.3f} {p2:7.3f}")
