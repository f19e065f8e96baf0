"""
Lightest laminate for a buckling-critical panel
===============================================

The outer stage picks ply counts and a target ``xi_d`` inside the
feasible polytope.  The inner stage then retrieves a stacking sequence.
The same pipeline backs ``lamopt optimize``.
"""
import json

import numpy as np

import lamopt as lo
from lamopt.cli import run_optimize
from lamopt.outer import design_margins

np.set_printoptions(precision=4, suppress=True)

problem_doc = {
    "schema_version": 1,
    "material": {"E1": 181000.0, "E2": 10300.0, "G12": 7170.0, "nu12": 0.28,
                 "ply_thickness": 0.125,
                 "allowables": {"tension": 0.005, "compression": 0.004, "shear": 0.008}},
    "angles": [0, 45, -45, 90],
    "loads": {"Nx": -60.0, "Ny": -10.0, "Nxy": 25.0, "plate_a": 200.0, "plate_b": 100.0},
    "outer_rules": {"min_pct": 0.1, "max_pct": 0.6},
    "inner_rules": {"max_contiguous": 3, "outer_ply_angles": [45, -45]},
    "solver": {"max_total_plies": 12},
}
problem = lo.DesignProblem.from_dict(problem_doc)

# %%
# Outer stage on its own.
outer = lo.solve_outer(problem)
print(outer.status, outer.counts, "after", outer.n_candidates, "candidates")
print("xi_d target:", outer.xi_d)
print({k: round(v, 4) for k, v in outer.margins.items()})

# %%
# Inner stage: the retrieved sequence has a slightly different ``xi_d``,
# so its margins are re-evaluated.
inner = lo.retrieve_stacking(outer.counts, outer.xi_d, problem.inner, problem.angles)
print("half laminate (mid-plane first):", problem.angles.to_angles(inner.sequence))
print("buckling margin:",
      design_margins(outer.counts, inner.xi_d, problem).get("buckling"))

# %%
# The full result document, as written by the command-line tool.
doc, code = run_optimize(problem_doc)
print("exit code", code)
print(json.dumps({k: doc[k] for k in ("status", "counts", "full_laminate")}))
