"""Realizability checks for prescribed machine-state overlaps."""

from __future__ import annotations

import enum

import numpy as np

from .optimize import is_exact

CSI_TOL = 1e-12


class CSIVerdict(str, enum.Enum):
    FEASIBLE = "feasible"
    MARGINAL_ONLY = "marginal-only"
    INFEASIBLE = "infeasible"

    def __str__(self) -> str:
        return self.value


def le(x, y, tol: float = CSI_TOL) -> bool:
    """x <= y, exactly for rationals and up to ``tol`` otherwise."""
    if is_exact(x) and is_exact(y):
        return x <= y
    return float(x) <= float(y) + tol


def in_range(x, lo, hi, tol: float = CSI_TOL) -> bool:
    return le(lo, x, tol) and le(x, hi, tol)


def verdict(marginal_ok: bool, joint_ok: bool) -> CSIVerdict:
    if marginal_ok and joint_ok:
        return CSIVerdict.FEASIBLE
    if marginal_ok:
        return CSIVerdict.MARGINAL_ONLY
    return CSIVerdict.INFEASIBLE


def gram_min_eigenvalue(gram) -> float:
    g = np.asarray(gram, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])


def factor_gram(gram, tol: float = 1e-12) -> np.ndarray:
    """Rows are vectors whose pairwise inner products reproduce ``gram``.

    The vector dimension equals the numerical rank.  Raises ValueError when
    the matrix has an eigenvalue below ``-tol``.
    """
    g = np.asarray(gram, dtype=float)
    w, v = np.linalg.eigh(0.5 * (g + g.T))
    if w[0] < -tol:
        raise ValueError(f"Gram matrix is not positive semidefinite (eigenvalue {w[0]:.3g})")
    keep = w > tol
    return v[:, keep] * np.sqrt(w[keep])
