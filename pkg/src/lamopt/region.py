"""
Feasible region of bending lamination parameters at fixed ply counts
====================================================================

For fixed ply counts the achievable ``xi_d`` values fill the convex hull of
the block-contiguous stacking sequences: every linear functional
``lam @ xi_d`` is a weighted sum of per-ply scores with weights that grow
monotonically from the mid-plane to the skin, so by the rearrangement
inequality it is maximized by stacking whole angle blocks in score order.
There are at most ``N_angles!`` such sequences.

This module enumerates them, builds the polytope, evaluates support
functions, and provides the brute-force enumeration used to check all of
the above.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .clt import AngleSet, _check_counts, xi_d_batch
from .errors import CloudSizeError
from .geometry import FeasiblePolytope, contains, convex_hull

CLOUD_LIMIT = 10**6


def skin_key(seq) -> tuple:
    """Sort key reading a sequence from the skin ply inward."""
    return tuple(reversed(tuple(seq)))


def block_sequence(counts, order) -> tuple:
    """Stacking sequence (mid-plane to skin) with angle blocks in ``order``.

    ``order[0]`` is the outermost block, ``order[-1]`` the block touching
    the mid-plane.
    """
    seq = []
    for k in reversed(order):
        seq.extend([k] * int(counts[k]))
    return tuple(seq)


def is_block_contiguous(seq) -> bool:
    """True when every angle occupies a single contiguous run of plies."""
    seen = set()
    prev = None
    for k in seq:
        if k != prev:
            if k in seen:
                return False
            seen.add(k)
            prev = k
    return True


@dataclass(frozen=True)
class ExtremeSequenceSet:
    """Block-contiguous sequences for one ply-count vector.

    Attributes
    ----------
    by_permutation : dict
        Maps each permutation of angle indices (outermost block first) to
        its stacking sequence.
    distinct : list of tuple
        Distinct sequences in order of first appearance.
    points : ndarray, shape (len(distinct), 4)
        ``xi_d`` of each distinct sequence.
    """
    counts: tuple
    mode: str
    by_permutation: dict
    distinct: list
    points: np.ndarray


def extreme_sequences(counts, angles: AngleSet, mode: str = "midpoint") -> ExtremeSequenceSet:
    n = _check_counts(counts, len(angles))
    by_perm = {}
    distinct = []
    seen = set()
    for order in itertools.permutations(range(len(angles))):
        seq = block_sequence(n, order)
        by_perm[order] = seq
        if seq not in seen:
            seen.add(seq)
            distinct.append(seq)
    points = xi_d_batch(distinct, angles.zeta_table, mode)
    return ExtremeSequenceSet(tuple(int(c) for c in n), mode, by_perm, distinct, points)


def feasible_region(counts, angles: AngleSet, mode: str = "midpoint") -> FeasiblePolytope:
    """Polytope of realizable ``xi_d`` at fixed ply counts.

    ``vertex_ids`` of the result index into
    ``extreme_sequences(counts, angles, mode).distinct``.
    """
    ext = extreme_sequences(counts, angles, mode)
    return convex_hull(ext.points)


def support_max(counts, angles: AngleSet, lam, mode: str = "midpoint"):
    """Maximum of ``lam @ xi_d`` over every sequence with the given counts.

    Only the block-contiguous sequences are scanned.  Exact ties go to the
    sequence that is lexicographically smallest read from the skin inward.

    Returns
    -------
    value : float
    seq : tuple of int
    """
    ext = extreme_sequences(counts, angles, mode)
    values = ext.points @ np.asarray(lam, dtype=float)
    best = values.max()
    winners = [s for s, v in zip(ext.distinct, values) if v == best]
    return float(best), min(winners, key=skin_key)


def multinomial(counts) -> int:
    out = math.factorial(int(sum(counts)))
    for c in counts:
        out //= math.factorial(int(c))
    return out


def multiset_permutations(counts) -> np.ndarray:
    """Every distinct arrangement of a multiset of angle indices.

    Rows are sorted lexicographically (mid-plane ply first).
    """
    n = np.asarray(counts, dtype=np.int64)
    rows = np.zeros((1, 0), dtype=np.int64)
    remaining = n[None, :].copy()
    for _ in range(int(n.sum())):
        new_rows, new_rem = [], []
        for k in range(n.size):
            mask = remaining[:, k] > 0
            if not mask.any():
                continue
            r = np.column_stack([rows[mask], np.full(mask.sum(), k)])
            rem = remaining[mask].copy()
            rem[:, k] -= 1
            new_rows.append(r)
            new_rem.append(rem)
        rows = np.vstack(new_rows)
        remaining = np.vstack(new_rem)
    order = np.lexsort(rows.T[::-1])
    return rows[order]


class Cloud(NamedTuple):
    sequences: np.ndarray
    points: np.ndarray


def brute_force_cloud(counts, angles: AngleSet, mode: str = "midpoint",
                      limit: int = CLOUD_LIMIT) -> Cloud:
    """``xi_d`` of every distinct stacking sequence with the given counts.

    Raises
    ------
    CloudSizeError
        If there are more than ``limit`` sequences.
    """
    n = _check_counts(counts, len(angles))
    size = multinomial(n)
    if size > limit:
        raise CloudSizeError(size, limit)
    seqs = multiset_permutations(n)
    return Cloud(seqs, xi_d_batch(seqs, angles.zeta_table, mode))


def unit_directions(n: int, seed: int, dim: int = 4) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lam = rng.normal(size=(n, dim))
    return lam / np.linalg.norm(lam, axis=1, keepdims=True)


def verify_counts(counts, angles: AngleSet, mode: str = "midpoint",
                  samples: int = 100, seed: int = 0, tol: float = 1e-9,
                  limit: int = CLOUD_LIMIT) -> dict:
    """Check the hull and support properties against brute force.

    Returns a report with the number of enumerated sequences, the largest
    polytope constraint violation over the cloud, the largest support-value
    mismatch over ``samples`` random unit directions, whether every support
    maximizer is block-contiguous, and an overall ``passed`` flag.
    """
    cloud = brute_force_cloud(counts, angles, mode, limit)
    poly = feasible_region(counts, angles, mode)
    pts = cloud.points
    ineq = (pts @ poly.A.T - poly.b).max(initial=0.0) if poly.A.shape[0] else 0.0
    eq = np.abs(pts @ poly.C.T - poly.d).max(initial=0.0) if poly.C.shape[0] else 0.0
    hull_violation = max(float(ineq), float(eq), 0.0)
    n_outside = sum(not contains(poly, p, tol) for p in pts)

    support_gap = 0.0
    contiguous = True
    for lam in unit_directions(samples, seed):
        value, seq = support_max(counts, angles, lam, mode)
        support_gap = max(support_gap, abs(float((pts @ lam).max()) - value))
        contiguous &= is_block_contiguous(seq)
    return {
        "counts": [int(c) for c in counts],
        "mode": mode,
        "n_sequences": int(len(pts)),
        "n_vertices": int(len(poly.vertices)),
        "affine_dim": int(poly.affine_dim),
        "n_outside": int(n_outside),
        "max_hull_violation": hull_violation,
        "max_support_gap": support_gap,
        "maximizers_contiguous": bool(contiguous),
        "passed": bool(n_outside == 0 and support_gap <= tol and contiguous),
    }
