"""
Stacking-sequence retrieval under manufacturing rules
=====================================================

Given ply counts and target bending parameters, find the stacking sequence
whose ``xi_d`` is closest in the Euclidean sense while obeying the
stacking rules.  ``xi_a`` is fixed by the counts, so its mismatch is a
constant that is only reported.

Small problems are scanned exhaustively.  Larger ones use a depth-first
branch-and-bound that places plies from the skin inward and bounds the
unplaced part of each ``xi_d`` component with the rearrangement
inequality, followed by a pairwise-swap polish.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clt import AngleSet, _check_counts, ply_weights, xi_a, xi_d_batch
from .errors import ContractError
from .region import extreme_sequences, multinomial, multiset_permutations, skin_key

EXHAUSTIVE_LIMIT = 10**5


@dataclass(frozen=True)
class RuleSetInner:
    """Stacking rules; every rule is disabled by its default.

    max_contiguous : int
        Longest allowed run of identical plies in the half laminate
        (0 = unlimited).
    outer_ply_angles : tuple of float or None
        Angles allowed for the skin ply (None = any).
    max_disorientation : float
        Largest allowed angle change between neighbouring plies in degrees,
        measured modulo 180 (0 = unlimited).
    """
    max_contiguous: int = 0
    outer_ply_angles: tuple | None = None
    max_disorientation: float = 0.0

    @property
    def active(self) -> bool:
        return bool(self.max_contiguous or self.outer_ply_angles is not None
                    or self.max_disorientation)


@dataclass(frozen=True)
class Violation:
    rule: str
    positions: tuple   # 1-based, mid-plane ply is 1
    observed: float

    def as_dict(self):
        return {"rule": self.rule, "positions": list(self.positions),
                "observed": self.observed}


def angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def check_rules(seq, rules: RuleSetInner, angles: AngleSet) -> list:
    """List every rule violation of a stacking sequence (mid-plane first)."""
    seq = tuple(seq)
    out = []
    if not seq:
        return out
    if rules.max_contiguous:
        start = 0
        for i in range(1, len(seq) + 1):
            if i == len(seq) or seq[i] != seq[start]:
                run = i - start
                if run > rules.max_contiguous:
                    out.append(Violation("max_contiguous",
                                         tuple(range(start + 1, i + 1)), run))
                start = i
    if rules.outer_ply_angles is not None:
        allowed = {angles.index(a) for a in rules.outer_ply_angles}
        if seq[-1] not in allowed:
            out.append(Violation("outer_ply_angles", (len(seq),),
                                 angles.angles[seq[-1]]))
    if rules.max_disorientation:
        for i in range(len(seq) - 1):
            gap = angle_gap(angles.angles[seq[i]], angles.angles[seq[i + 1]])
            if gap > rules.max_disorientation + 1e-12:
                out.append(Violation("max_disorientation", (i + 1, i + 2), gap))
    return out


def rule_mask(seqs, rules: RuleSetInner, angles: AngleSet) -> np.ndarray:
    """Vectorized ``not check_rules(seq)`` over the rows of ``seqs``."""
    seqs = np.atleast_2d(seqs)
    ok = np.ones(seqs.shape[0], bool)
    if rules.max_contiguous:
        run = np.ones(seqs.shape[0], np.int64)
        for i in range(1, seqs.shape[1]):
            run = np.where(seqs[:, i] == seqs[:, i - 1], run + 1, 1)
            ok &= run <= rules.max_contiguous
    if rules.outer_ply_angles is not None:
        allowed = [angles.index(a) for a in rules.outer_ply_angles]
        ok &= np.isin(seqs[:, -1], allowed)
    if rules.max_disorientation and seqs.shape[1] > 1:
        ang = np.asarray(angles.angles)[seqs]
        d = np.abs(np.diff(ang, axis=1)) % 180.0
        gap = np.minimum(d, 180.0 - d)
        ok &= np.all(gap <= rules.max_disorientation + 1e-12, axis=1)
    return ok


def residuals(points, target) -> np.ndarray:
    """Squared distances with a fixed summation order (batch invariant)."""
    d = np.atleast_2d(points) - target
    return ((d[:, 0]*d[:, 0] + d[:, 1]*d[:, 1]) + d[:, 2]*d[:, 2]) + d[:, 3]*d[:, 3]


@dataclass
class InnerResult:
    sequence: tuple
    residual: float
    xi_d: np.ndarray
    violations: list = field(default_factory=list)
    method: str = "exhaustive"
    xi_a_residual: float = 0.0
    exact: bool = True

    @property
    def status(self) -> str:
        return "rule-infeasible" if self.violations else "ok"


def _pick(seqs, res):
    keys = [seqs[:, j] for j in range(seqs.shape[1])] + [res]
    return int(np.lexsort(keys)[0])


def _exhaustive(counts, target, rules, angles, mode):
    seqs = multiset_permutations(counts)
    res = residuals(xi_d_batch(seqs, angles.zeta_table, mode), target)
    mask = rule_mask(seqs, rules, angles)
    if mask.any():
        seqs, res = seqs[mask], res[mask]
    i = _pick(seqs, res)
    return tuple(int(k) for k in seqs[i]), float(res[i])


class _BranchAndBound:
    """Depth-first search from the skin ply inward with rearrangement bounds.

    The inner loop runs on plain Python floats; the per-node arrays are
    far too small for numpy to pay off.
    """

    def __init__(self, counts, target, rules, angles, mode, node_limit):
        self.counts = [int(c) for c in counts]
        self.n = sum(self.counts)
        self.target = [float(t) for t in target]
        self.rules = rules
        self.angles = angles
        self.mode = mode
        self.table = angles.zeta_table
        self.rows = [tuple(float(x) for x in row) for row in self.table]
        w = ply_weights(self.n, mode)
        self.w = [float(x) for x in w]
        self.cum = [0.0] + [float(x) for x in np.cumsum(w)]
        K = len(self.counts)
        self.order = [sorted(range(K), key=lambda k, j=j: (self.rows[k][j], k))
                      for j in range(4)]
        self.allowed_skin = (None if rules.outer_ply_angles is None else
                             {angles.index(a) for a in rules.outer_ply_angles})
        self.gaps = _gap_cache(angles)
        self.node_limit = node_limit
        self.nodes = 0
        self.best = None
        self.best_res = np.inf
        self.truncated = False

    def offer(self, seq):
        seq = tuple(seq)
        res = float(residuals(xi_d_batch([seq], self.table, self.mode), self.target)[0])
        if self.best is None or (res, skin_key(seq)) < (self.best_res, skin_key(self.best)):
            self.best, self.best_res = seq, res

    def bound(self, partial, remaining, r):
        """Lower bound on the residual of any completion.

        The ``r`` unplaced plies occupy positions ``0..r-1``; per component
        the extreme sums pair sorted values with sorted weights.
        """
        cum, rows = self.cum, self.rows
        lb = 0.0
        for j in range(4):
            hi = lo = 0.0
            pos = 0
            for k in self.order[j]:      # ascending values on ascending weights
                c = remaining[k]
                if c:
                    hi += rows[k][j] * (cum[pos + c] - cum[pos])
                    pos += c
            pos = 0
            for k in reversed(self.order[j]):
                c = remaining[k]
                if c:
                    lo += rows[k][j] * (cum[pos + c] - cum[pos])
                    pos += c
            t = self.target[j] - partial[j]
            if t > hi:
                lb += (t - hi) ** 2
            elif t < lo:
                lb += (lo - t) ** 2
        return lb

    def _allowed(self, k, placed, run):
        r = self.rules
        if not placed:
            return self.allowed_skin is None or k in self.allowed_skin
        prev = placed[-1]
        if r.max_contiguous and k == prev and run + 1 > r.max_contiguous:
            return False
        if r.max_disorientation and self.gaps[prev][k] > r.max_disorientation + 1e-12:
            return False
        return True

    def run(self):
        self._dfs([], list(self.counts), (0.0, 0.0, 0.0, 0.0), 0)
        return self.best, self.best_res

    def _dfs(self, placed, remaining, partial, run):
        self.nodes += 1
        if self.nodes > self.node_limit:
            self.truncated = True
            return
        r = self.n - len(placed)
        if r == 0:
            t = self.target
            quick = sum((t[j] - partial[j])**2 for j in range(4))
            if quick <= self.best_res + 1e-12 * max(1.0, self.best_res):
                self.offer(reversed(placed))
            return
        wpos = self.w[r - 1]
        children = []
        for k, c in enumerate(remaining):
            if not c or not self._allowed(k, placed, run):
                continue
            row = self.rows[k]
            part = (partial[0] + wpos*row[0], partial[1] + wpos*row[1],
                    partial[2] + wpos*row[2], partial[3] + wpos*row[3])
            remaining[k] -= 1
            lb = self.bound(part, remaining, r - 1)
            remaining[k] += 1
            children.append((lb, k, part))
        children.sort()
        for lb, k, part in children:
            if lb > self.best_res + 1e-12 * max(1.0, self.best_res):
                break
            new_run = run + 1 if placed and placed[-1] == k else 1
            placed.append(k)
            remaining[k] -= 1
            self._dfs(placed, remaining, part, new_run)
            remaining[k] += 1
            placed.pop()
            if self.truncated:
                return


_GAPS = {}


def _gap_cache(angles):
    key = angles.angles
    if key not in _GAPS:
        _GAPS[key] = [[angle_gap(a, b) for b in key] for a in key]
    return _GAPS[key]


def local_search(seq, target, angles, mode, rules=None):
    """Best-improvement pairwise swaps until no swap lowers the residual.

    Swaps that break a rule are skipped when ``rules`` is given.  Returns
    the polished sequence, its residual and the residual history.
    """
    seq = list(seq)
    table = angles.zeta_table

    def resid(s):
        return float(residuals(xi_d_batch([s], table, mode), target)[0])

    cur = resid(seq)
    history = [cur]
    while True:
        best_move, best_res = None, cur
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] == seq[j]:
                    continue
                cand = seq.copy()
                cand[i], cand[j] = cand[j], cand[i]
                if rules is not None and check_rules(cand, rules, angles):
                    continue
                res = resid(cand)
                if res < best_res:
                    best_move, best_res = (i, j), res
        if best_move is None:
            return tuple(seq), cur, history
        i, j = best_move
        seq[i], seq[j] = seq[j], seq[i]
        assert best_res < cur
        cur = best_res
        history.append(cur)


def retrieve_stacking(counts, xi_d_target, rules: RuleSetInner | None,
                      angles: AngleSet, mode: str = "midpoint", *,
                      method: str = "auto", xi_a_target=None,
                      exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                      node_limit: int = 200_000) -> InnerResult:
    """Stacking sequence with the given counts closest to ``xi_d_target``.

    Parameters
    ----------
    method : {'auto', 'exhaustive', 'branch-and-bound'}
        ``auto`` scans exhaustively when there are at most
        ``exhaustive_limit`` distinct sequences.

    Notes
    -----
    Ties in residual go to the sequence that is lexicographically smallest
    read from the skin inward, for every method.  If no sequence satisfies
    the rules, the closest unconstrained sequence is returned together with
    its violations.
    """
    n = _check_counts(counts, len(angles))
    target = np.asarray(xi_d_target, dtype=float)
    if target.shape != (4,) or not np.all(np.isfinite(target)):
        raise ContractError("xi_d target must be a finite 4-vector")
    rules = rules or RuleSetInner()
    if method == "auto":
        method = "exhaustive" if multinomial(n) <= exhaustive_limit else "branch-and-bound"

    exact = True
    if method == "exhaustive":
        seq, _ = _exhaustive(n, target, rules, angles, mode)
    elif method == "branch-and-bound":
        seq, exact = _branch_and_bound(n, target, rules, angles, mode, node_limit)
    else:
        raise ValueError(f"unknown retrieval method {method!r}")

    # the polish may only leave the rule-feasible set if it was never entered
    polish_rules = rules if not check_rules(seq, rules, angles) else None
    seq, _, _ = local_search(seq, target, angles, mode, polish_rules)
    point = xi_d_batch([seq], angles.zeta_table, mode)[0]
    gap_a = 0.0
    if xi_a_target is not None:
        gap_a = float(np.sum((np.asarray(xi_a_target, float) - xi_a(n, angles))**2))
    return InnerResult(
        sequence=seq, residual=float(residuals(point, target)[0]), xi_d=point,
        violations=check_rules(seq, rules, angles),
        method=method if exact else "local-search",
        xi_a_residual=gap_a, exact=exact)


def _branch_and_bound(counts, target, rules, angles, mode, node_limit):
    bnb = _BranchAndBound(counts, target, rules, angles, mode, node_limit)
    # a polished extreme sequence gives an early incumbent
    ext = extreme_sequences(counts, angles, mode)
    ok = [s for s in ext.distinct if not check_rules(s, rules, angles)]
    if ok:
        start = min(ok, key=lambda s: (float(residuals(
            xi_d_batch([s], angles.zeta_table, mode), target)[0]), skin_key(s)))
        polished, _, _ = local_search(start, target, angles, mode, rules)
        bnb.offer(polished)
    seq, _ = bnb.run()
    if seq is None:
        free = _BranchAndBound(counts, target, RuleSetInner(), angles, mode, node_limit)
        seq, _ = free.run()
        return seq, not free.truncated
    return seq, not bnb.truncated
