"""
Classical laminate theory kernels (:mod:`lamopt.clt`)
=====================================================

Trigonometric ply signatures, lamination parameters, reduced stiffness,
A/D stiffness matrices, membrane strains and simply supported plate
buckling for symmetric laminates.

Conventions
-----------
Only one half of a symmetric laminate is represented.  A stacking
sequence is a tuple of indices into an :class:`AngleSet`; position 0 is
the ply touching the mid-plane and position ``N - 1`` is the skin ply.
Units are N, mm and MPa throughout.

"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (AngleSetError, DegenerateLaminateError,
                     IllConditionedLaminateError, MaterialError,
                     NotApplicableError)

MODES = ("midpoint", "exact")
MAX_ANGLES = 8


def normalize_angle(angle: float) -> float:
    """Map an angle in degrees into the half-open interval (-90, 90]."""
    a = math.fmod(float(angle), 180.0)
    if a <= -90.0:
        a += 180.0
    elif a > 90.0:
        a -= 180.0
    return a + 0.0  # drops a negative zero


def _snap(values):
    # exact trig constants (0, +-1) keep degenerate polytopes exactly degenerate
    out = np.array(values, dtype=float)
    for target in (-1.0, 0.0, 1.0):
        out[np.abs(out - target) < 1e-14] = target
    return out


def zeta(angle: float) -> np.ndarray:
    """Trigonometric signature ``[cos 2t, cos 4t, sin 2t, sin 4t]`` of one ply.

    Parameters
    ----------
    angle : float
        Ply angle in degrees.  It is normalized into (-90, 90] first.

    Returns
    -------
    ndarray, shape (4,)
    """
    t = math.radians(normalize_angle(angle))
    return _snap([math.cos(2*t), math.cos(4*t), math.sin(2*t), math.sin(4*t)])


@dataclass(frozen=True)
class AngleSet:
    """Ordered set of admissible ply angles in degrees.

    Angles are normalized into (-90, 90] on construction; duplicates after
    normalization are rejected.  The order given by the user is preserved
    and defines the angle indices used by stacking sequences and ply counts.
    """
    angles: tuple

    def __post_init__(self):
        norm = tuple(normalize_angle(a) for a in self.angles)
        if not 1 <= len(norm) <= MAX_ANGLES:
            raise AngleSetError(
                f"need between 1 and {MAX_ANGLES} angles, got {len(norm)}")
        if len(set(norm)) != len(norm):
            raise AngleSetError(f"duplicate angles after normalization: {norm}")
        object.__setattr__(self, "angles", norm)
        table = np.array([zeta(a) for a in norm])
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    def __len__(self):
        return len(self.angles)

    @property
    def zeta_table(self) -> np.ndarray:
        """Read-only ``(N_angles, 4)`` array of ply signatures."""
        return self._table

    def index(self, angle: float) -> int:
        """Index of ``angle`` (any equivalent representation) in the set."""
        a = normalize_angle(angle)
        try:
            return self.angles.index(a)
        except ValueError:
            raise AngleSetError(f"angle {angle} is not in {self.angles}") from None

    def to_indices(self, plies: Sequence[float]) -> tuple:
        """Convert ply angles in degrees to a stacking sequence of indices."""
        return tuple(self.index(a) for a in plies)

    def to_angles(self, seq: Sequence[int]) -> list:
        return [self.angles[i] for i in seq]


QUASI_ISO = (0.0, 45.0, -45.0, 90.0)


@dataclass(frozen=True)
class StrainAllowables:
    """Positive strain limits (dimensionless)."""
    tension: float = 0.005
    compression: float = 0.004
    shear: float = 0.008

    def __post_init__(self):
        if min(self.tension, self.compression, self.shear) <= 0:
            raise MaterialError("strain allowables must be positive")


@dataclass(frozen=True)
class Material:
    """Orthotropic ply material (MPa, mm)."""
    E1: float
    E2: float
    G12: float
    nu12: float
    ply_thickness: float
    allowables: StrainAllowables = field(default_factory=StrainAllowables)

    def __post_init__(self):
        if min(self.E1, self.E2, self.G12, self.ply_thickness) <= 0:
            raise MaterialError("E1, E2, G12 and ply_thickness must be positive")
        if not 0 <= self.nu12 < math.sqrt(self.E1 / self.E2):
            raise MaterialError(
                f"nu12={self.nu12} outside [0, sqrt(E1/E2)) = "
                f"[0, {math.sqrt(self.E1 / self.E2):.6g})")

    @property
    def nu21(self) -> float:
        return self.nu12 * self.E2 / self.E1


@dataclass(frozen=True)
class LoadCase:
    """Membrane running loads (N/mm, compression negative) on a rectangular
    simply supported panel of size ``plate_a`` x ``plate_b`` (mm)."""
    Nx: float = 0.0
    Ny: float = 0.0
    Nxy: float = 0.0
    plate_a: float = 1.0
    plate_b: float = 1.0
    max_mode: int = 4

    def __post_init__(self):
        if self.plate_a <= 0 or self.plate_b <= 0:
            raise ValueError("plate dimensions must be positive")
        if int(self.max_mode) != self.max_mode or self.max_mode < 1:
            raise ValueError("max_mode must be a positive integer")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.Nx, self.Ny, self.Nxy], dtype=float)

    def scaled(self, factor: float) -> "LoadCase":
        return LoadCase(self.Nx*factor, self.Ny*factor, self.Nxy*factor,
                        self.plate_a, self.plate_b, self.max_mode)


@dataclass(frozen=True)
class LamParams:
    """In-plane and out-of-plane lamination parameters of one laminate."""
    xi_a: np.ndarray
    xi_d: np.ndarray


def _check_counts(counts, n_angles=None) -> np.ndarray:
    n = np.asarray(counts, dtype=np.int64)
    if n.ndim != 1 or (n_angles is not None and n.size != n_angles):
        raise ValueError(f"ply counts {tuple(counts)} do not match {n_angles} angles")
    if np.any(n < 0):
        raise ValueError(f"negative ply count in {tuple(counts)}")
    if n.sum() == 0:
        raise DegenerateLaminateError("laminate has no plies")
    return n


def counts_of(seq: Sequence[int], n_angles: int) -> tuple:
    """Ply counts (plies per angle index) of a stacking sequence."""
    return tuple(int(c) for c in np.bincount(np.asarray(seq, dtype=np.int64),
                                             minlength=n_angles))


def xi_a(counts: Sequence[int], angles: AngleSet) -> np.ndarray:
    """In-plane lamination parameters; they depend on ply counts only."""
    n = _check_counts(counts, len(angles))
    return (n @ angles.zeta_table) / n.sum()


def ply_weights(n_plies: int, mode: str = "midpoint") -> np.ndarray:
    """Through-thickness weights of the ``n_plies`` plies of a half laminate.

    ``xi_d = sum_i weights[i] * zeta(theta_i)`` with ply 0 at the mid-plane.
    ``midpoint`` uses ``3 z_i**2 dz / h**3`` with ``z_i`` at the ply
    mid-surface; ``exact`` uses ``(z_top**3 - z_bot**3) / h**3``.
    """
    if n_plies < 1:
        raise DegenerateLaminateError("laminate has no plies")
    i = np.arange(1, n_plies + 1, dtype=float)
    if mode == "midpoint":
        w = 3.0 * (i - 0.5)**2
    elif mode == "exact":
        w = i**3 - (i - 1.0)**3
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return w / float(n_plies)**3


def xi_d_batch(seqs, zeta_table: np.ndarray, mode: str = "midpoint") -> np.ndarray:
    """Out-of-plane lamination parameters for many sequences of equal length.

    Summation runs ply by ply in a fixed order, so a sequence gets
    bit-identical values whether it is evaluated alone or in a batch.
    """
    seqs = np.atleast_2d(np.asarray(seqs, dtype=np.int64))
    n_plies = seqs.shape[1]
    w = ply_weights(n_plies, mode)
    out = np.zeros((seqs.shape[0], 4))
    for i in range(n_plies):
        out += w[i] * zeta_table[seqs[:, i]]
    return out


def xi_d(seq: Sequence[int], angles: AngleSet, mode: str = "midpoint") -> np.ndarray:
    """Out-of-plane lamination parameters of one stacking sequence.

    Parameters
    ----------
    seq : sequence of int
        Angle indices from the mid-plane ply to the skin ply.
    angles : AngleSet
    mode : {'midpoint', 'exact'}
        Through-thickness integration rule, see :func:`ply_weights`.
    """
    if len(seq) == 0:
        raise DegenerateLaminateError("empty stacking sequence")
    return xi_d_batch([tuple(seq)], angles.zeta_table, mode)[0]


def lamination_parameters(seq, angles, mode="midpoint") -> LamParams:
    return LamParams(xi_a(counts_of(seq, len(angles)), angles),
                     xi_d(seq, angles, mode))


def reduced_stiffness(mat: Material) -> np.ndarray:
    """Plane-stress reduced stiffness ``Q`` of a ply in its material axes."""
    denom = 1.0 - mat.nu12 * mat.nu21
    if denom <= 0:
        raise MaterialError("inadmissible Poisson ratio")
    q11 = mat.E1 / denom
    q22 = mat.E2 / denom
    q12 = mat.nu12 * mat.E2 / denom
    return np.array([[q11, q12, 0.0],
                     [q12, q22, 0.0],
                     [0.0, 0.0, mat.G12]])


def material_invariants(mat: Material) -> np.ndarray:
    """Stiffness invariants ``U1..U5`` (MPa) as a length-5 array."""
    Q = reduced_stiffness(mat)
    q11, q22, q12, q66 = Q[0, 0], Q[1, 1], Q[0, 1], Q[2, 2]
    return np.array([
        (3*q11 + 3*q22 + 2*q12 + 4*q66) / 8,
        (q11 - q22) / 2,
        (q11 + q22 - 2*q12 - 4*q66) / 8,
        (q11 + q22 + 6*q12 - 4*q66) / 8,
        (q11 + q22 - 2*q12 + 4*q66) / 8,
    ])


def _stiffness_from_params(xi, U) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (4,):
        raise ValueError("lamination parameters must be a 4-vector")
    if np.any(np.abs(xi) > 1 + 1e-9):
        raise ValueError(f"lamination parameters {xi} outside [-1, 1]")
    U1, U2, U3, U4, U5 = U
    x1, x2, x3, x4 = xi
    s11 = U1 + U2*x1 + U3*x2
    s22 = U1 - U2*x1 + U3*x2
    s12 = U4 - U3*x2
    s66 = U5 - U3*x2
    s16 = U2*x3/2 + U3*x4
    s26 = U2*x3/2 - U3*x4
    return np.array([[s11, s12, s16],
                     [s12, s22, s26],
                     [s16, s26, s66]])


def a_matrix(xi_a_vec, n_plies: int, mat: Material) -> np.ndarray:
    """In-plane stiffness ``A`` (N/mm) of the full symmetric laminate.

    ``n_plies`` is the ply count of one half, so the full thickness is
    ``2 * n_plies * ply_thickness``.
    """
    H = 2.0 * n_plies * mat.ply_thickness
    return H * _stiffness_from_params(xi_a_vec, material_invariants(mat))


def d_matrix(xi_d_vec, n_plies: int, mat: Material) -> np.ndarray:
    """Bending stiffness ``D`` (N mm) of the full symmetric laminate."""
    H = 2.0 * n_plies * mat.ply_thickness
    return H**3 / 12.0 * _stiffness_from_params(xi_d_vec, material_invariants(mat))


def membrane_strain(A: np.ndarray, loads: LoadCase) -> np.ndarray:
    """Mid-plane strains ``[eps_x, eps_y, gamma_xy]`` under membrane loads."""
    A = np.asarray(A, dtype=float)
    if np.linalg.cond(A) > 1e12:
        raise IllConditionedLaminateError("A matrix is singular or ill-conditioned")
    return np.linalg.solve(A, loads.vector)


def buckling_modes(D: np.ndarray, loads: LoadCase):
    """Buckling factors of every admissible half-wave pair.

    Returns a list of ``((m, p), factor)`` in ``m``-major order, skipping
    pairs whose load term is not compressive.  D16 and D26 are ignored.
    """
    a, b = loads.plate_a, loads.plate_b
    d11, d12, d22, d66 = D[0, 0], D[0, 1], D[1, 1], D[2, 2]
    out = []
    for m in range(1, loads.max_mode + 1):
        am2 = (m / a)**2
        for p in range(1, loads.max_mode + 1):
            bp2 = (p / b)**2
            denom = -loads.Nx*am2 - loads.Ny*bp2
            if denom <= 0:
                continue
            num = d11*am2**2 + 2*(d12 + 2*d66)*am2*bp2 + d22*bp2**2
            out.append(((m, p), math.pi**2 * num / denom))
    return out


def buckling_factor(D: np.ndarray, loads: LoadCase):
    """Critical buckling load factor of a simply supported orthotropic plate.

    Returns
    -------
    factor : float
        Smallest load multiplier over all modes up to ``loads.max_mode``.
    mode : tuple of int
        Critical half-wave numbers ``(m, p)``; ties keep the first pair in
        ``m``-major order.

    Raises
    ------
    NotApplicableError
        If neither Nx nor Ny is compressive.
    """
    if not (loads.Nx < 0 or loads.Ny < 0):
        raise NotApplicableError("buckling needs a compressive Nx or Ny")
    modes = buckling_modes(np.asarray(D, dtype=float), loads)
    if not modes:
        raise NotApplicableError("no half-wave pair sees a compressive load")
    best_mode, best = modes[0]
    for mode, factor in modes[1:]:
        if factor < best:
            best_mode, best = mode, factor
    return float(best), best_mode
