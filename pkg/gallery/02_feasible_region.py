"""
Which bending parameters can a ply count reach?
===============================================

At fixed ply counts, ``xi_d`` can only take finitely many values, one per
arrangement.  Their convex hull is spanned by the block-contiguous
arrangements alone, where each angle forms one run of plies.  This
script builds that polytope and checks it against full enumeration.
"""
import numpy as np

import lamopt as lo
from lamopt.region import is_block_contiguous, unit_directions

np.set_printoptions(precision=4, suppress=True)
angles = lo.AngleSet((0, 45, -45, 90))
counts = (2, 2, 1, 2)

# %%
# At most ``4! = 24`` block-contiguous sequences, far fewer than the
# ``7!/(2!2!1!2!) = 630`` arrangements overall.
ext = lo.extreme_sequences(counts, angles)
cloud = lo.brute_force_cloud(counts, angles)
print(len(ext.distinct), "block sequences;", len(cloud.sequences), "arrangements")

# %%
# The polytope in half-space form.  Some block sequences fall inside the
# hull, so there can be fewer vertices than block sequences.
poly = lo.feasible_region(counts, angles)
print("vertices:", len(poly.vertices), " facets:", poly.n_facets,
      " affine dimension:", poly.affine_dim)
for v, i in list(zip(poly.vertices, poly.vertex_ids))[:4]:
    print(v, angles.to_angles(ext.distinct[i]))

# %%
# Every arrangement lands inside the polytope.
inside = [lo.contains(poly, p, tol=1e-9) for p in cloud.points]
print("all inside:", all(inside))

# %%
# Maximizing any linear functional of ``xi_d`` only needs the block
# sequences.  Compare with the full enumeration over random directions.
worst = 0.0
for lam in unit_directions(200, seed=1):
    value, seq = lo.support_max(counts, angles, lam)
    worst = max(worst, abs(value - (cloud.points @ lam).max()))
    assert is_block_contiguous(seq)
print(f"largest support mismatch: {worst:.1e}")
