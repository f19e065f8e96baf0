"""Independent reference computations used by the test-suite.

Nothing here calls the code paths it is used to check: stiffness comes
from explicit ply transformations, sequences from itertools, and LP optima
from enumerating basic solutions.
"""
import itertools
import math

import numpy as np


def textbook_q(E1, E2, G12, nu12):
    nu21 = nu12 * E2 / E1
    d = 1 - nu12 * nu21
    return np.array([[E1 / d, nu12 * E2 / d, 0],
                     [nu12 * E2 / d, E2 / d, 0],
                     [0, 0, G12]])


def q_bar(Q, theta_deg):
    """Transformed reduced stiffness via the stress transformation matrix."""
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    T = np.array([[c*c, s*s, 2*c*s],
                  [s*s, c*c, -2*c*s],
                  [-c*s, c*s, c*c - s*s]])
    R = np.diag([1.0, 1.0, 2.0])
    Tinv = np.linalg.inv(T)
    return Tinv @ Q @ R @ T @ np.linalg.inv(R)


def ply_by_ply_AD(plies_deg, Q, t):
    """A and D of the full symmetric laminate; ``plies_deg`` mid-plane first."""
    A = np.zeros((3, 3))
    D = np.zeros((3, 3))
    for i, a in enumerate(plies_deg):
        Qb = q_bar(Q, a)
        zb, zt = i * t, (i + 1) * t
        # the mirrored ply contributes the same amount
        A += 2 * Qb * (zt - zb)
        D += 2 * Qb * (zt**3 - zb**3) / 3
    return A, D


def all_sequences(counts):
    items = [k for k, c in enumerate(counts) for _ in range(c)]
    return sorted(set(itertools.permutations(items)))


def literal_xi_d(plies_deg, dz, mode="midpoint"):
    """Direct summation with physical thickness ``dz``."""
    N = len(plies_deg)
    h = N * dz
    out = np.zeros(4)
    for i, a in enumerate(plies_deg, start=1):
        t = math.radians(a)
        z = np.array([math.cos(2*t), math.cos(4*t), math.sin(2*t), math.sin(4*t)])
        if mode == "midpoint":
            zi = (i - 0.5) * dz
            out += z * zi**2 * dz
        else:
            out += z * ((i*dz)**3 - ((i-1)*dz)**3) / 3
    return 3 * out / h**3


def lp_vertex_enumeration(c, A, b):
    """max c.x s.t. A x <= b, x >= 0 by enumerating all basic solutions."""
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    best = -np.inf
    for rows in itertools.combinations(range(m + n), n):
        Gs = G[list(rows)]
        if abs(np.linalg.det(Gs)) < 1e-12:
            continue
        x = np.linalg.solve(Gs, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            best = max(best, float(c @ x))
    return best


def brute_force_bilevel(problem, max_total, margin_fn, rules_ok=None):
    """Lightest design over all counts AND all stacking sequences.

    ``margin_fn(counts, seq)`` returns the design margins of one concrete
    sequence.  Returns ``(total, counts, seq)`` or ``None``.
    """
    K = len(problem.angles)
    for total in range(1, max_total + 1):
        for counts in sorted(c for c in itertools.product(range(total + 1), repeat=K)
                             if sum(c) == total):
            for seq in all_sequences(counts):
                if rules_ok is not None and not rules_ok(seq):
                    continue
                if min(margin_fn(counts, seq).values()) >= 0:
                    return total, counts, seq
    return None
