"""Buzek-Hillery universal cloner parameterized by machine-state overlaps.

The transformation is

    |0>|Q> -> |00>|Q0> + (|01> + |10>)|Y0>
    |1>|Q> -> |11>|Q1> + (|01> + |10>)|Y1>

with <Y0|Y0> = <Y1|Y1> = A, <Y1|Q0> = <Y0|Q1> = C, <Qi|Qi> = 1 - 2A and all
other overlaps zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import qmat
from .exceptions import ParameterDomainError
from .gram import CSIVerdict, factor_gram, in_range, le, verdict
from .optimize import Quadrature, average_over_alpha
from .qmat import DensityMatrix, PureQubit

_KET = np.eye(4, dtype=complex)
K00, K01, K10, K11 = _KET
SYM = K01 + K10

MACHINE_LABELS = ("Q0", "Y0", "Q1", "Y1")


@dataclass(frozen=True)
class BHOverlaps:
    A: float
    C: float

    @property
    def q(self):
        """<Qi|Qi> = 1 - 2A."""
        return 1 - 2 * self.A

    def gram(self) -> np.ndarray:
        """Overlaps <M_l|M_k> in the order Q0, Y0, Q1, Y1."""
        A, C, q = float(self.A), float(self.C), float(self.q)
        return np.array(
            [
                [q, 0.0, 0.0, C],
                [0.0, A, C, 0.0],
                [0.0, C, q, 0.0],
                [C, 0.0, 0.0, A],
            ]
        )


ORIGINAL = BHOverlaps(Fraction(1, 6), Fraction(1, 3))
IMPROVED = BHOverlaps((1 - 1 / math.sqrt(2)) / 2, 1 / (2 * math.sqrt(2)))


def output_density_a(psi: PureQubit, ov: BHOverlaps) -> DensityMatrix:
    """Closed-form reduced state of the original mode."""
    a, b = psi.alpha, psi.beta
    A, C = float(ov.A), float(ov.C)
    pa, pb = abs(a) ** 2, abs(b) ** 2
    off = 2 * C * a * b.conjugate()
    m = np.array(
        [
            [pa + pb * A - pa * A, off],
            [off.conjugate(), pb + pa * A - pb * A],
        ]
    )
    return DensityMatrix(m, check_positive=False)


def joint_output_density(psi: PureQubit, ov: BHOverlaps) -> DensityMatrix:
    """Two-mode output obtained by tracing the machine out of the full state."""
    a, b = psi.alpha, psi.beta
    branches = [a * K00, a * SYM, b * K11, b * SYM]
    return DensityMatrix(qmat.reduce_over_machine(branches, ov.gram()), check_positive=False)


def hs_norm_a(alpha: float, ov: BHOverlaps) -> float:
    """Closed-form Hilbert-Schmidt distance of the original mode, real input."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha!r} outside [0, 1]")
    A, C = float(ov.A), float(ov.C)
    a2 = alpha * alpha
    return 2 * A * A * (4 * a2 * a2 - 4 * a2 + 1) + 2 * a2 * (1 - a2) * (1 - 2 * C) ** 2


def hs_norm_a_matrix(psi: PureQubit, ov: BHOverlaps) -> float:
    return qmat.hs_distance(psi.density(), output_density_a(psi, ov))


def fidelity_closed(psi: PureQubit, ov: BHOverlaps) -> float:
    A, C = float(ov.A), float(ov.C)
    p = abs(psi.alpha) ** 2 * abs(psi.beta) ** 2
    rad = 1 - A + p * (4 * C - 2 + 4 * A)
    if rad < -1e-12:
        raise ParameterDomainError(f"fidelity radicand {rad:.3g} is negative")
    return math.sqrt(max(rad, 0.0))


def fidelity_matrix(psi: PureQubit, ov: BHOverlaps) -> float:
    return qmat.fidelity(psi.density(), output_density_a(psi, ov))


def joint_hs_distance(psi: PureQubit, ov: BHOverlaps) -> float:
    return qmat.hs_distance(psi.product_density(), joint_output_density(psi, ov))


def printed_dab_polynomial(alpha: float, A: float) -> float:
    """Two-mode distance polynomial exactly as it is usually quoted.

    Kept for comparison only: it goes negative (e.g. A = 1/6, alpha^2 = 1/2)
    and so cannot be a squared Hilbert-Schmidt norm.
    """
    a2 = alpha * alpha
    b2 = 1 - a2
    p = a2 * b2
    return 1 + 8 * p * p - 4 * p * (1 + 2 * A) + (1 - 2 * A) ** 2 - 2 * (1 - 2 * A) * (1 - p) + 4 * A * A


def avg_hs_norm_ab(ov: BHOverlaps, quad: Quadrature | str | None = None, *, paper_verbatim: bool = False) -> float:
    """Alpha-average of the two-mode distance to |psi psi>."""
    if paper_verbatim:
        A = float(ov.A)
        return average_over_alpha(lambda x: printed_dab_polynomial(x, A), quad)
    return average_over_alpha(lambda x: joint_hs_distance(PureQubit.real(x), ov), quad)


def marginal_csi_ok(ov: BHOverlaps) -> bool:
    return in_range(ov.A, 0, Fraction(1, 2)) and le(0, ov.C) and le(ov.C ** 2, Fraction(1, 8))


def joint_csi_ok(ov: BHOverlaps) -> bool:
    """Gram positivity: C^2 <= A (1 - 2A)."""
    return le(0, ov.A) and le(0, ov.q) and le(ov.C * ov.C, ov.A * ov.q)


def joint_csi_feasible(ov: BHOverlaps) -> CSIVerdict:
    return verdict(marginal_csi_ok(ov), joint_csi_ok(ov))


@dataclass(frozen=True, eq=False)
class MachineRealization:
    """Machine output vectors Q0, Y0, Q1, Y1 in a ``dimension``-dim basis."""

    vectors: dict

    @property
    def dimension(self) -> int:
        return len(next(iter(self.vectors.values())))

    def gram(self) -> np.ndarray:
        vs = [self.vectors[k] for k in MACHINE_LABELS]
        return np.array([[float(np.vdot(u, v).real) for v in vs] for u in vs])

    def images(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vectors
        img0 = np.kron(K00, v["Q0"]) + np.kron(SYM, v["Y0"])
        img1 = np.kron(K11, v["Q1"]) + np.kron(SYM, v["Y1"])
        return img0, img1

    def isometry_residual(self) -> float:
        img = np.array(self.images())
        return float(np.max(np.abs(img.conj() @ img.T - np.eye(2))))


def realize_machine_vectors(ov: BHOverlaps, tol: float = 1e-12) -> Optional[MachineRealization]:
    """Machine vectors reproducing the overlaps, or None when none exist.

    On the boundary C = sqrt(A(1 - 2A)) the vectors fit in the two-dimensional
    basis (up, down) with Q0, Y1 along up and Y0, Q1 along down.  Strictly
    inside the feasible region the Gram matrix has full rank and a
    four-dimensional factorization is returned instead.
    """
    if joint_csi_feasible(ov) is not CSIVerdict.FEASIBLE:
        return None
    A, C, q = float(ov.A), float(ov.C), float(ov.q)
    if abs(C - math.sqrt(A * q)) <= tol:
        sq, sa = math.sqrt(q), math.sqrt(A)
        up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        vecs = {"Q0": sq * up, "Y0": sa * down, "Q1": sq * down, "Y1": sa * up}
    else:
        rows = factor_gram(ov.gram(), tol)
        vecs = dict(zip(MACHINE_LABELS, rows))
    return MachineRealization(vecs)


@dataclass(frozen=True)
class Table1Column:
    label: str
    overlaps: BHOverlaps
    D_a: float
    fidelity: float
    D_ab_avg: float


def table1(quad: Quadrature | str | None = None) -> tuple[Table1Column, Table1Column]:
    """Recompute both columns of the original-versus-improved comparison."""
    probe = PureQubit.real(1 / math.sqrt(2))
    cols = []
    for label, ov in (("Buzek-Hillery", ORIGINAL), ("improved", IMPROVED)):
        cols.append(
            Table1Column(
                label,
                ov,
                hs_norm_a(float(probe.alpha.real), ov),
                fidelity_closed(probe, ov),
                avg_hs_norm_ab(ov, quad),
            )
        )
    return cols[0], cols[1]
