"""
Outer weight minimization over ply counts and bending parameters
================================================================

Candidates are enumerated by increasing total ply count.  Each one is
checked first against the count-only constraints (ply percentages and
membrane strains, both functions of ``xi_a``), then the best bending
parameters inside the feasible region are found by a max-slack LP over
convex weights of the region's vertices.  Buckling factors are linear in
``D`` and therefore in ``xi_d``, which keeps that LP exact.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clt import (AngleSet, LoadCase, Material, a_matrix, buckling_factor,
                  buckling_modes, d_matrix, membrane_strain, xi_a)
from .geometry import dedup_points, solve_lp
from .region import extreme_sequences


@dataclass(frozen=True)
class RuleSetOuter:
    """Ply-percentage bounds (fractions of the ply count) and a ply cap.

    ``max_total_plies`` caps the ply count of one symmetric half.
    """
    min_pct: tuple
    max_pct: tuple
    max_total_plies: int = 40

    def __post_init__(self):
        lo, hi = tuple(map(float, self.min_pct)), tuple(map(float, self.max_pct))
        if len(lo) != len(hi):
            raise ValueError("min_pct and max_pct differ in length")
        if any(not 0.0 <= a <= b <= 1.0 for a, b in zip(lo, hi)):
            raise ValueError("percentage bounds must satisfy 0 <= min <= max <= 1")
        if sum(lo) > 1.0 + 1e-12:
            raise ValueError(f"minimum percentages sum to {sum(lo):.6g} > 1")
        if self.max_total_plies < 1:
            raise ValueError("max_total_plies must be at least 1")
        object.__setattr__(self, "min_pct", lo)
        object.__setattr__(self, "max_pct", hi)

    @classmethod
    def uniform(cls, n_angles, min_pct=0.0, max_pct=1.0, max_total_plies=40):
        return cls((min_pct,) * n_angles, (max_pct,) * n_angles, max_total_plies)


@dataclass
class OuterResult:
    status: str
    counts: tuple | None = None
    xi_a: np.ndarray | None = None
    xi_d: np.ndarray | None = None
    margins: dict = field(default_factory=dict)
    critical_mode: tuple | None = None
    n_candidates: int = 0

    @property
    def total_plies(self):
        return None if self.counts is None else int(sum(self.counts))


def _angle_label(a):
    return f"{a:g}"


def percentage_margins(counts, rules: RuleSetOuter, angles: AngleSet) -> dict:
    total = float(sum(counts))
    out = {}
    for a, n, lo, hi in zip(angles.angles, counts, rules.min_pct, rules.max_pct):
        out[f"min_pct[{_angle_label(a)}]"] = n / total - lo
        out[f"max_pct[{_angle_label(a)}]"] = hi - n / total
    return out


def strain_margins(xi_a_vec, n_plies, material: Material, loads: LoadCase) -> dict:
    """Relative strain reserves ``1 - |eps| / allowable`` per component."""
    eps = membrane_strain(a_matrix(xi_a_vec, n_plies, material), loads)
    allow = material.allowables
    ex, ey, gxy = (float(e) for e in eps)
    return {
        "strain_x": 1.0 - abs(ex) / (allow.tension if ex >= 0 else allow.compression),
        "strain_y": 1.0 - abs(ey) / (allow.tension if ey >= 0 else allow.compression),
        "strain_xy": 1.0 - abs(gxy) / allow.shear,
    }


def check_ply_constraints(counts, rules: RuleSetOuter, material: Material,
                          loads: LoadCase, angles: AngleSet) -> dict:
    """Signed slacks of every ply-count constraint; feasible iff all >= 0."""
    margins = percentage_margins(counts, rules, angles)
    margins.update(strain_margins(xi_a(counts, angles), int(sum(counts)),
                                  material, loads))
    return margins


def buckling_margin(xi_d_vec, n_plies, material: Material, loads: LoadCase):
    """``(factor - 1, critical mode)``, or ``(None, None)`` without compression."""
    if not (loads.Nx < 0 or loads.Ny < 0):
        return None, None
    D = d_matrix(xi_d_vec, n_plies, material)
    if not buckling_modes(D, loads):
        return None, None
    factor, mode = buckling_factor(D, loads)
    return factor - 1.0, mode


def best_xi_d(counts, loads: LoadCase, material: Material, angles: AngleSet,
              mode: str = "midpoint"):
    """Bending parameters in the feasible region with the largest buckling reserve.

    Maximizes ``s`` over convex weights ``w`` of the region vertices such
    that every buckling mode satisfies ``factor(sum w_k v_k) >= 1 + s``.

    Returns
    -------
    xi : ndarray, shape (4,)
    margin : float or None
        ``s`` recomputed from ``xi`` (critical factor minus one), ``None``
        when the load case has no compressive component.
    """
    ext = extreme_sequences(counts, angles, mode)
    V = ext.points[dedup_points(ext.points)]
    n_plies = int(sum(counts))
    if len(V) == 1:
        return V[0].copy(), buckling_margin(V[0], n_plies, material, loads)[0]
    rows = [buckling_modes(d_matrix(v, n_plies, material), loads) for v in V]
    if not rows[0]:
        return V.mean(axis=0), None
    M = np.array([[f for _, f in r] for r in rows]).T   # modes x vertices
    k = len(V)
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.hstack([-M, np.ones((M.shape[0], 1))])
    A_eq = np.concatenate([np.ones(k), [0.0]])[None, :]
    free = np.zeros(k + 1, bool)
    free[-1] = True
    # scale keeps the tableau well conditioned when factors are large
    scale = max(1.0, float(np.abs(M).max()))
    res = solve_lp(c, A_ub / scale, -np.ones(M.shape[0]) / scale, A_eq, [1.0],
                   maximize=True, free=free)
    w = np.clip(res.x[:k], 0.0, None)
    w /= w.sum()
    xi = w @ V
    return xi, buckling_margin(xi, n_plies, material, loads)[0]


def design_margins(counts, xi_d_vec, problem) -> dict:
    """Every outer margin of a concrete design, buckling included."""
    margins = check_ply_constraints(counts, problem.outer, problem.material,
                                    problem.loads, problem.angles)
    s, _ = buckling_margin(xi_d_vec, int(sum(counts)), problem.material, problem.loads)
    if s is not None:
        margins["buckling"] = s
    return margins


def compositions(total: int, parts: int):
    """All ways to write ``total`` as ``parts`` non-negative integers,
    in lexicographically ascending order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _evaluate(counts, problem):
    rules, angles = problem.outer, problem.angles
    margins = percentage_margins(counts, rules, angles)
    if min(margins.values()) < 0:
        return None
    margins.update(strain_margins(xi_a(counts, angles), sum(counts),
                                  problem.material, problem.loads))
    if min(margins.values()) < 0:
        return None
    xi, s = best_xi_d(counts, problem.loads, problem.material, angles, problem.mode)
    if s is not None:
        if s < 0:
            return None
        margins["buckling"] = s
    return xi, margins


def solve_outer(problem, threads: int = 1) -> OuterResult:
    """Lightest ply counts (and matching ``xi_d``) meeting every constraint.

    Candidates are visited by total ply count, then lexicographically; the
    first feasible one is returned, so the result does not depend on
    ``threads``.
    """
    angles = problem.angles
    n_seen = 0
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for total in range(1, problem.outer.max_total_plies + 1):
            cands = list(compositions(total, len(angles)))
            n_seen += len(cands)
            results = pool.map(lambda c: _evaluate(c, problem), cands) \
                if threads > 1 else map(lambda c: _evaluate(c, problem), cands)
            for counts, res in zip(cands, results):
                if res is None:
                    continue
                xi, margins = res
                _, crit = buckling_margin(xi, total, problem.material, problem.loads)
                return OuterResult("optimal", counts, xi_a(counts, angles), xi,
                                   margins, crit, n_seen)
    return OuterResult("infeasible-up-to-cap", n_candidates=n_seen)
