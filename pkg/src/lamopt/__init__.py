"""Bi-level stacking-sequence optimization of symmetric composite laminates.

At fixed ply counts the realizable out-of-plane lamination parameters form
a convex polytope whose vertices are the block-contiguous ("extreme")
stacking sequences.  lamopt builds that polytope, optimizes ply counts and
bending parameters over it, and retrieves a concrete stacking sequence.
"""
from .clt import (AngleSet, LamParams, LoadCase, Material, StrainAllowables,
                  a_matrix, buckling_factor, d_matrix, material_invariants,
                  membrane_strain, reduced_stiffness, xi_a, xi_d, zeta)
from .geometry import FeasiblePolytope, affine_hull, contains, convex_hull, solve_lp
from .region import (brute_force_cloud, extreme_sequences, feasible_region,
                     support_max)
from .outer import (OuterResult, RuleSetOuter, best_xi_d,
                    check_ply_constraints, solve_outer)
from .inner import InnerResult, RuleSetInner, check_rules, retrieve_stacking
from .problem import DesignProblem

__version__ = "0.1.0"
