"""Exact solvers for greedy paths and animals, and the exhaustive oracles."""
from .animals import (animal_certificate_ok, bracket_animal, max_mass_animal_inf,
                      steiner_ratio_floor)
from .lattice import lattice_max_animal, lattice_max_path
from .oracles import (brute_force_animal_oracle, brute_force_path_oracle, lattice_animal_oracle,
                      lattice_path_oracle)
from .paths import (OutOfWindow, PathQuery, SolveResult, certificate_ok, max_mass_path,
                    sup_ratio_from_origin)

__all__ = [
    "OutOfWindow", "PathQuery", "SolveResult", "animal_certificate_ok", "bracket_animal",
    "brute_force_animal_oracle", "brute_force_path_oracle", "certificate_ok",
    "lattice_animal_oracle", "lattice_max_animal", "lattice_max_path", "lattice_path_oracle",
    "max_mass_animal_inf", "max_mass_path", "steiner_ratio_floor", "sup_ratio_from_origin",
]
