"""
Low-dimensional geometry and small dense LP (:mod:`lamopt.geometry`)
====================================================================

Convex hulls of at most a few dozen points in R^4 whose affine span is
often lower dimensional, point membership in the resulting H-representation,
and a dense two-phase simplex solver for the small LPs used elsewhere.

"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull

from .errors import ContractError, EmptyInputError

DEDUP_TOL = 1e-12
HULL_TOL = 1e-9


# -- linear programming -------------------------------------------------------

class LPResult(NamedTuple):
    status: str
    x: np.ndarray | None
    value: float | None


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _simplex(T, basis, n_cols, tol, max_iter=50_000):
    """Minimize with Bland's rule; last row of ``T`` holds reduced costs."""
    for _ in range(max_iter):
        cost = T[-1, :n_cols]
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return "optimal"
        col = int(entering[0])
        column = T[:-1, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            return "unbounded"
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, basis, row, col)
    raise RuntimeError("simplex iteration limit reached")


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *,
             maximize=False, free=None, tol=1e-9) -> LPResult:
    """Solve a small dense linear program.

    Minimizes (or maximizes) ``c @ x`` subject to ``A_ub @ x <= b_ub``,
    ``A_eq @ x == b_eq`` and ``x >= 0`` for every variable not flagged in
    ``free``.  Uses a two-phase tableau simplex with Bland's anti-cycling
    rule, so results are deterministic.

    Returns
    -------
    LPResult
        ``(status, x, value)`` with status ``'optimal'``, ``'infeasible'``
        or ``'unbounded'``; ``x`` and ``value`` are ``None`` unless optimal.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, float))
    if A_ub.size == 0:
        A_ub = A_ub.reshape(0, n)
    if A_eq.size == 0:
        A_eq = A_eq.reshape(0, n)
    if (A_ub.shape[1] != n or A_eq.shape[1] != n
            or A_ub.shape[0] != b_ub.size or A_eq.shape[0] != b_eq.size):
        raise ContractError("LP dimensions do not agree")
    free = np.zeros(n, bool) if free is None else np.asarray(free, bool)
    if free.shape != (n,):
        raise ContractError("free mask must have one entry per variable")

    # columns: x (split where free), slacks, then artificials
    cols = [np.eye(n)[:, j] for j in range(n)]
    cols += [-np.eye(n)[:, j] for j in np.flatnonzero(free)]
    split = np.column_stack(cols)
    n_x = split.shape[1]
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    M = np.zeros((m, n_x + m_ub))
    M[:m_ub, :n_x] = A_ub @ split
    M[:m_ub, n_x:] = np.eye(m_ub)
    M[m_ub:, :n_x] = A_eq @ split
    r = np.concatenate([b_ub, b_eq])
    neg = r < 0
    M[neg] *= -1
    r = np.abs(r)
    cost = np.concatenate([c @ split, np.zeros(m_ub)]) * (-1.0 if maximize else 1.0)
    n_real = M.shape[1]

    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = M
    T[:m, n_real:n_real + m] = np.eye(m)
    T[:m, -1] = r
    T[-1, :n_real] = -M.sum(axis=0)
    T[-1, -1] = -r.sum()
    basis = list(range(n_real, n_real + m))
    scale = max(1.0, float(np.abs(r).max(initial=0.0)))

    _simplex(T, basis, n_real + m, tol)
    if -T[-1, -1] > tol * scale * max(1, m):
        return LPResult("infeasible", None, None)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n_real:
            nz = np.flatnonzero(np.abs(T[i, :n_real]) > tol)
            if nz.size == 0:
                continue
            _pivot(T, basis, i, int(nz[0]))
        keep.append(i)
    T = np.vstack([T[keep][:, list(range(n_real)) + [-1]], np.zeros(n_real + 1)])
    basis = [basis[i] for i in keep]
    rows_kept = keep

    T[-1, :n_real] = cost
    for i, j in enumerate(basis):
        T[-1] -= cost[j] * T[i]
    status = _simplex(T, basis, n_real, tol)
    if status == "unbounded":
        return LPResult("unbounded", None, None)

    z = np.zeros(n_real)
    z[basis] = T[:-1, -1]
    # re-solve the basic system against the original data to shed pivot noise
    if basis:
        B = M[rows_kept][:, basis]
        if np.linalg.cond(B) < 1e10:
            polished = np.linalg.solve(B, r[rows_kept])
            if np.all(polished >= -tol * scale):
                z[basis] = np.maximum(polished, 0.0)
    x = split @ z[:n_x]
    return LPResult("optimal", x, float(c @ x))


# -- affine hull and convex hull -----------------------------------------------

def _frame(points, tol):
    P = np.asarray(points, dtype=float)
    centroid = P.mean(axis=0)
    _, s, vt = np.linalg.svd(P - centroid)
    if s.size == 0 or s[0] == 0.0:
        dim = 0
    else:
        dim = int(np.sum(s > tol * s[0]))
    return vt[:dim].T, vt[dim:], dim, centroid


def affine_hull(points, tol: float = HULL_TOL):
    """Affine hull of a point set.

    Returns
    -------
    basis : ndarray, shape (ambient, dim)
        Orthonormal basis of the span of the centered points; singular
        directions below ``tol`` times the largest singular value are dropped.
    dim : int
    centroid : ndarray
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0:
        raise EmptyInputError("affine hull of no points")
    basis, _, dim, centroid = _frame(P, tol)
    return basis, dim, centroid


def dedup_points(points, tol: float = DEDUP_TOL):
    """Indices of the first occurrence of each distinct point."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    kept = []
    for i, p in enumerate(P):
        if not any(np.max(np.abs(P[j] - p)) <= tol for j in kept):
            kept.append(i)
    return kept


@dataclass(frozen=True, eq=False)
class FeasiblePolytope:
    """Convex polytope ``{x : A x <= b, C x = d}`` with its vertex list.

    Attributes
    ----------
    vertices : ndarray, shape (V, 4)
        Extreme points, copied verbatim from the input points.
    A, b : ndarray
        Facet inequalities with unit-norm rows of ``A``.
    C, d : ndarray
        Equalities pinning the orthogonal complement of the affine hull.
    affine_dim : int
    vertex_ids : tuple of int
        Position of each vertex in the point list given to :func:`convex_hull`.
    """
    vertices: np.ndarray
    A: np.ndarray
    b: np.ndarray
    C: np.ndarray
    d: np.ndarray
    affine_dim: int
    vertex_ids: tuple = ()

    @property
    def n_facets(self) -> int:
        return self.A.shape[0]

    def contains(self, x, tol: float = HULL_TOL) -> bool:
        return contains(self, x, tol)


def _merge_facets(eqs, tol):
    merged = []
    for e in eqs:
        if not any(np.max(np.abs(e - f)) <= tol for f in merged):
            merged.append(e)
    merged.sort(key=lambda e: tuple(np.round(e, 9)))
    return np.array(merged)


def convex_hull(points) -> FeasiblePolytope:
    """H- and V-representation of the convex hull of points in R^4.

    Points are deduplicated, projected onto their affine hull, hulled in
    the reduced dimension (Qhull for two or more dimensions) and the facet
    normals lifted back.  The directions orthogonal to the affine hull
    become explicit equality constraints instead of thin facets.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0 or P.shape[0] == 0:
        raise EmptyInputError("convex hull of no points")
    ambient = P.shape[1]
    ids = dedup_points(P)
    Q = P[ids]
    basis, comp, dim, centroid = _frame(Q, HULL_TOL)
    Y = (Q - centroid) @ basis

    if dim == 0:
        local = [0]
        facets = np.zeros((0, 1))
    elif dim == 1:
        y = Y[:, 0]
        lo, hi = int(np.argmin(y)), int(np.argmax(y))
        local = sorted({lo, hi})
        facets = np.array([[1.0, -y[hi]], [-1.0, y[lo]]])
    else:
        hull = ConvexHull(Y)
        local = sorted(int(v) for v in hull.vertices)
        facets = _merge_facets(hull.equations, HULL_TOL)

    if dim == 0:
        A = np.zeros((0, ambient))
        b = np.zeros(0)
    else:
        normals, offsets = facets[:, :-1], facets[:, -1]
        A = normals @ basis.T
        b = A @ centroid - offsets
    C = comp
    d = C @ centroid
    return FeasiblePolytope(
        vertices=Q[local].copy(), A=A, b=b, C=C, d=d, affine_dim=dim,
        vertex_ids=tuple(ids[i] for i in local))


def contains(poly: FeasiblePolytope, x, tol: float = HULL_TOL) -> bool:
    """True iff ``A x <= b + tol`` and ``|C x - d| <= tol``."""
    x = np.asarray(x, dtype=float)
    if poly.A.shape[0] and np.any(poly.A @ x > poly.b + tol):
        return False
    if poly.C.shape[0] and np.any(np.abs(poly.C @ x - poly.d) > tol):
        return False
    return True


def in_convex_hull(points, x, tol: float = 1e-9) -> bool:
    """LP test: is ``x`` a convex combination of ``points``?"""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    k = P.shape[0]
    A_eq = np.vstack([P.T, np.ones((1, k))])
    b_eq = np.concatenate([np.asarray(x, float), [1.0]])
    return solve_lp(np.zeros(k), A_eq=A_eq, b_eq=b_eq, tol=tol).status == "optimal"
