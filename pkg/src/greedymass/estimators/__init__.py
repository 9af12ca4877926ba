"""Monte Carlo estimators and empirical checks built on the solvers."""
from .diagnostics import (SuperadditiveProcessSpec, SuperadditivityViolation, divergence_probe,
                          moment_property_run,
                          doubled_poisson, maximal_inequality_check, moment_property_check,
                          random_box_pairs, sandwich_and_identity_suite, tail_bound_check)
from .exactness import few_sweep_check, oracle_equivalence
from .lln import (diamond_process_value, estimate_directional_limit, estimate_lln_curve,
                  estimate_process_means, mean_superadditivity_check, solve_functional,
                  superadditivity_check)
from .processes import ProcessSpec, pmap
from .stats import (EstimateReport, GridPoint, check_concavity, check_monotonicity,
                    check_symmetry, fekete_time_constant, frequency_ci, mean_ci)
from .tsp import few_constant, few_tsp_path

__all__ = [
    "EstimateReport", "GridPoint", "ProcessSpec", "SuperadditiveProcessSpec",
    "SuperadditivityViolation", "check_concavity", "check_monotonicity", "check_symmetry",
    "diamond_process_value", "divergence_probe", "doubled_poisson", "estimate_directional_limit",
    "estimate_lln_curve", "estimate_process_means", "fekete_time_constant", "few_constant",
    "few_sweep_check", "few_tsp_path", "frequency_ci", "maximal_inequality_check", "mean_ci",
    "mean_superadditivity_check", "moment_property_check", "moment_property_run", "oracle_equivalence", "pmap", "random_box_pairs",
    "sandwich_and_identity_suite", "solve_functional", "superadditivity_check",
    "tail_bound_check",
]
