"""Generalized pentagram maps: discrete maps, continuous limits and Diophantine searches."""

__version__ = "0.1.0"

from .curves import FunctionCurve, PolynomialCurve, TrigCurve, trig_test_curve
from .diffpoly import DifferentialPolynomial, var, variational_derivative
from .dioph import rp3_search, rp4_search, symmetric_invariants
from .gauge import delta_kappa, gauge_matrix, lift_realization, solve_gauge
from .limits import fit_limit, gamma_epsilon, limit_flavor, r0_oracle
from .maps import IndexSchema, apply_schema, iterate_schema, pentagram_schema
from .projective import (LiftedPolygon, SmoothLiftedCurve, discrete_normalize,
                         projective_equivalence, wilczynski_invariants)
from .psdo import PseudoDiffOp, agd_operator, fractional_power, hamiltonian_density, psdo_root

__all__ = [
    "__version__", "FunctionCurve", "PolynomialCurve", "TrigCurve", "trig_test_curve",
    "DifferentialPolynomial", "var", "variational_derivative", "rp3_search", "rp4_search",
    "symmetric_invariants", "delta_kappa", "gauge_matrix", "lift_realization", "solve_gauge",
    "fit_limit", "gamma_epsilon", "limit_flavor", "r0_oracle", "IndexSchema", "apply_schema",
    "iterate_schema", "pentagram_schema", "LiftedPolygon", "SmoothLiftedCurve",
    "discrete_normalize", "projective_equivalence", "wilczynski_invariants", "PseudoDiffOp",
    "agd_operator", "fractional_power", "hamiltonian_density", "psdo_root",
]
