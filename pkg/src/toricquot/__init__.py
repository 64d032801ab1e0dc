"""Quotients of Euclidean space by orthogonal torus actions and their finite extensions.

Exact weight-lattice algebra, split detection, quotient curvature,
orbit-type strata, local reductions, and reflection-group tools.
"""

__version__ = "0.1.0"

from .actions import ExtendedAction, FiniteOrthGroup, TorusAction, close_group, rotation
from .curvature import bracket_witness, finite_difference_oracle, ray_scan, sec_quotient
from .distance import quotient_distance_extended, quotient_distance_torus, reduction_isometry_check
from .errors import ToricQuotError
from .lattice import IntMatrix, hermite_normal_form, smith_normal_form
from .reflections import chamber_complex, conjugacy_test, extend_chamber_map, find_reflections
from .split import canonical_split_form, is_split
from .strata import classify_stratum, enumerate_strata, local_reduction, singular_set_dimension

__all__ = [
    "ExtendedAction", "FiniteOrthGroup", "IntMatrix", "ToricQuotError", "TorusAction",
    "bracket_witness", "canonical_split_form", "chamber_complex", "classify_stratum", "close_group",
    "conjugacy_test", "enumerate_strata", "extend_chamber_map", "find_reflections",
    "finite_difference_oracle", "hermite_normal_form", "is_split", "local_reduction",
    "quotient_distance_extended", "quotient_distance_torus", "ray_scan", "reduction_isometry_check",
    "rotation", "sec_quotient", "singular_set_dimension", "smith_normal_form",
]
