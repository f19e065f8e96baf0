"""
From target parameters back to a stacking sequence
==================================================

A point inside the feasible polytope is usually not itself realizable.
Retrieval finds the arrangement whose ``xi_d`` is closest in the
Euclidean sense, optionally subject to stacking rules.
"""
import numpy as np

import lamopt as lo

np.set_printoptions(precision=4, suppress=True)
angles = lo.AngleSet((0, 45, -45, 90))
counts = (3, 2, 2, 3)
ext = lo.extreme_sequences(counts, angles)

# %%
# Take the centroid of the block sequences as a target.
target = ext.points.mean(axis=0)
plain = lo.retrieve_stacking(counts, target, None, angles)
print(plain.method, angles.to_angles(plain.sequence), f"{plain.residual:.2e}")

# %%
# Stacking rules apply to the half laminate: at most two equal plies in a
# row, a ±45 skin ply, and no jump above 45 degrees between neighbours.
rules = lo.RuleSetInner(max_contiguous=2, outer_ply_angles=(45, -45),
                        max_disorientation=45)
ruled = lo.retrieve_stacking(counts, target, rules, angles)
print(ruled.method, angles.to_angles(ruled.sequence), f"{ruled.residual:.2e}")
print("violations:", lo.check_rules(ruled.sequence, rules, angles))

# %%
# Branch-and-bound is exact.  On a problem small enough to enumerate it
# returns the same sequence and residual as the exhaustive search.
exh = lo.retrieve_stacking(counts, target, rules, angles, method="exhaustive")
bnb = lo.retrieve_stacking(counts, target, rules, angles, method="branch-and-bound")
print("identical:", (exh.sequence, exh.residual) == (bnb.sequence, bnb.residual))

# %%
# Rules that cannot be met are reported, not hidden.
tight = lo.RuleSetInner(max_contiguous=1)
bad = lo.retrieve_stacking((3, 0, 0, 1), target, tight, angles)
print(bad.status, [v.as_dict() for v in bad.violations])
