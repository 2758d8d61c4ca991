"""State-dependent cloner with four machine states.

    |0>|Q> -> |00>|Q0> + (|01> + |10> + |11>)|Y0>
    |1>|Q> -> |11>|Q1> + (|01> + |10> + |00>)|Y1>

Overlaps: <Y0|Y0> = A, <Y1|Y1> = B, <Y1|Q0> = C, <Y0|Q1> = -C,
<Q0|Q0> = 1 - 3A, <Q1|Q1> = 1 - 3B; <Y0|Y1>, <Qi|Yi> and <Q0|Q1> vanish.
Input amplitudes are real throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from . import qmat
from .exceptions import ParameterDomainError
from .gram import CSIVerdict, gram_min_eigenvalue, in_range, le, verdict
from .optimize import (
    Definiteness,
    QuadraticObjective,
    Quadrature,
    average_over_alpha,
    average_polynomial,
    classify_hessian,
    is_exact,
    stationary_point,
)
from .qmat import DensityMatrix, PureQubit

_KET = np.eye(4)
K00, K01, K10, K11 = _KET

INV_SQRT3 = 1 / math.sqrt(3)


@dataclass(frozen=True)
class SDCOverlaps:
    A: float
    B: float
    C: float

    def gram(self) -> np.ndarray:
        """Overlaps <M_l|M_k> in the order Q0, Y0, Q1, Y1."""
        A, B, C = float(self.A), float(self.B), float(self.C)
        return np.array(
            [
                [1 - 3 * A, 0.0, 0.0, C],
                [0.0, A, -C, 0.0],
                [0.0, -C, 1 - 3 * B, 0.0],
                [C, 0.0, 0.0, B],
            ]
        )

    def as_tuple(self):
        return (self.A, self.B, self.C)


class SDCSubcase(enum.Enum):
    GENERAL = ("general", ("A", "B", "C"))
    EQUAL_AB = ("equalAB", ("A", "C"))
    ZERO_C = ("zeroC", ("A", "B"))

    def __init__(self, tag, names):
        self.tag = tag
        self.names = names

    def __str__(self) -> str:
        return self.tag

    @classmethod
    def parse(cls, value) -> "SDCSubcase":
        for sub in cls:
            if str(value).strip().lower() == sub.tag.lower():
                return sub
        raise ValueError(f"unknown subcase {value!r}; expected general, equalAB or zeroC")

    @property
    def mapping(self) -> dict:
        if self is SDCSubcase.GENERAL:
            return {"A": {"A": 1}, "B": {"B": 1}, "C": {"C": 1}}
        if self is SDCSubcase.EQUAL_AB:
            return {"A": {"A": 1}, "B": {"A": 1}, "C": {"C": 1}}
        return {"A": {"A": 1}, "B": {"B": 1}}

    def overlaps(self, values) -> SDCOverlaps:
        v = dict(zip(self.names, values))
        if self is SDCSubcase.EQUAL_AB:
            return SDCOverlaps(v["A"], v["A"], v["C"])
        if self is SDCSubcase.ZERO_C:
            return SDCOverlaps(v["A"], v["B"], 0 * v["A"])
        return SDCOverlaps(v["A"], v["B"], v["C"])

    def free_values(self, ov: SDCOverlaps) -> tuple:
        return tuple(getattr(ov, nm) for nm in self.names)

    def consistent(self, ov: SDCOverlaps, tol: float = 1e-12) -> bool:
        if self is SDCSubcase.EQUAL_AB:
            return abs(ov.A - ov.B) <= tol
        if self is SDCSubcase.ZERO_C:
            return abs(ov.C) <= tol
        return True


def _require_real(psi: PureQubit) -> tuple[float, float]:
    if not psi.is_real:
        raise ValueError("this protocol takes real input amplitudes")
    return psi.alpha.real, psi.beta.real


def joint_output_density(psi: PureQubit, ov: SDCOverlaps) -> DensityMatrix:
    """Two-mode output assembled from the machine Gram data."""
    a, b = _require_real(psi)
    branches = [a * K00, a * (K01 + K10 + K11), b * K11, b * (K01 + K10 + K00)]
    return DensityMatrix(qmat.reduce_over_machine(branches, ov.gram()), check_positive=False)


def output_density_a(psi: PureQubit, ov: SDCOverlaps) -> DensityMatrix:
    a, b = _require_real(psi)
    A, B, C = (float(v) for v in ov.as_tuple())
    off = a * a * A + b * b * B
    m = np.array(
        [
            [a * a * (1 - 2 * A) + 2 * a * b * C + 2 * b * b * B, off],
            [off, b * b + 2 * a * a * A - 2 * a * b * C - 2 * b * b * B],
        ]
    )
    return DensityMatrix(m, check_positive=False)


def _beta(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha!r} outside [0, 1]")
    return math.sqrt(max(0.0, 1.0 - alpha * alpha))


def hs_norm_a(alpha: float, ov: SDCOverlaps) -> float:
    """Closed-form Hilbert-Schmidt distance of mode a, beta = sqrt(1 - alpha^2)."""
    a, b = alpha, _beta(alpha)
    A, B, C = (float(v) for v in ov.as_tuple())
    return 2 * (
        5 * a**4 * A * A
        + 5 * b**4 * B * B
        + a * a * b * b * (1 + 4 * C * C - 6 * A * B)
        - 2 * a**3 * b * A * (1 + 4 * C)
        - 2 * a * b**3 * B * (1 - 4 * C)
    )


def hs_norm_a_matrix(psi: PureQubit, ov: SDCOverlaps) -> float:
    return qmat.hs_distance(psi.density(), output_density_a(psi, ov))


_NAMES = ("A", "B", "C")


def _q(terms) -> QuadraticObjective:
    return QuadraticObjective.from_terms(_NAMES, terms)


# D_a as sum over (m, k) of coeff(A, B, C) * alpha^m * beta^k
HS_NORM_TERMS = {
    (4, 0): _q({("A", "A"): 10}),
    (0, 4): _q({("B", "B"): 10}),
    (2, 2): _q({(): 2, ("C", "C"): 8, ("A", "B"): -12}),
    (3, 1): _q({("A",): -4, ("A", "C"): -16}),
    (1, 3): _q({("B",): -4, ("B", "C"): 16}),
}

# F^2 in the same representation (linear in the overlaps)
FIDELITY_SQ_TERMS = {
    (4, 0): _q({(): 1, ("A",): -2}),
    (3, 1): _q({("A",): 2, ("C",): 2}),
    (2, 2): _q({("A",): 2, ("B",): 2}),
    (1, 3): _q({("B",): 2, ("C",): -2}),
    (0, 4): _q({(): 1, ("B",): -2}),
}


def hessian_Da(alpha: float) -> np.ndarray:
    """Second derivatives of D_a with respect to (A, B, C) at fixed alpha."""
    a, b = alpha, _beta(alpha)
    return np.array(
        [
            [20 * a**4, -12 * a * a * b * b, -16 * a**3 * b],
            [-12 * a * a * b * b, 20 * b**4, 16 * a * b**3],
            [-16 * a**3 * b, 16 * a * b**3, 16 * a * a * b * b],
        ]
    )


def averaged_hs_objective(subcase: SDCSubcase = SDCSubcase.GENERAL) -> QuadraticObjective:
    """Exact alpha-average of D_a as a quadratic in the subcase's free overlaps."""
    full = average_polynomial(HS_NORM_TERMS)
    if subcase is SDCSubcase.GENERAL:
        return full
    return full.substitute(subcase.names, subcase.mapping)


def averaged_fidelity_sq_objective(subcase: SDCSubcase = SDCSubcase.GENERAL) -> QuadraticObjective:
    full = average_polynomial(FIDELITY_SQ_TERMS)
    if subcase is SDCSubcase.GENERAL:
        return full
    return full.substitute(subcase.names, subcase.mapping)


def avg_hs_norm(ov: SDCOverlaps, subcase: SDCSubcase = SDCSubcase.GENERAL):
    """Alpha-averaged D_a; exact when the overlaps are rational."""
    if not subcase.consistent(ov):
        raise ValueError(f"overlaps {ov} are inconsistent with subcase {subcase}")
    q = averaged_hs_objective(subcase)
    vals = subcase.free_values(ov)
    if all(is_exact(v) for v in vals):
        return q(vals)
    return float(q([float(v) for v in vals]))


@dataclass(frozen=True)
class SDCOptimum:
    subcase: SDCSubcase
    overlaps: SDCOverlaps
    D_avg: Fraction
    hessian: Definiteness
    objective: QuadraticObjective = field(repr=False)


def optimize_subcase(subcase: SDCSubcase = SDCSubcase.GENERAL) -> SDCOptimum:
    """Exact minimizer of the averaged D_a within a subcase."""
    q = averaged_hs_objective(subcase)
    x = stationary_point(q)
    return SDCOptimum(subcase, subcase.overlaps(x), q(x), classify_hessian(q.hessian()), q)


def fidelity(psi: PureQubit, ov: SDCOverlaps) -> float:
    a, b = _require_real(psi)
    A, B, C = (float(v) for v in ov.as_tuple())
    rad = (
        (1 - 2 * A) * a**4
        + 2 * (A + C) * a**3 * b
        + 2 * (A + B) * a * a * b * b
        + 2 * (B - C) * a * b**3
        + (1 - 2 * B) * b**4
    )
    if rad < -1e-12:
        raise ParameterDomainError(f"fidelity radicand {rad:.3g} is negative")
    return math.sqrt(max(rad, 0.0))


def fidelity_matrix(psi: PureQubit, ov: SDCOverlaps) -> float:
    return qmat.fidelity(psi.density(), output_density_a(psi, ov))


def avg_fidelity_sq_closed(ov: SDCOverlaps):
    """11/15 + 2A/15 - 2B/5 - 2C/15, exact for rational overlaps."""
    A, B, C = ov.as_tuple()
    if all(is_exact(v) for v in (A, B, C)):
        return Fraction(11, 15) + Fraction(2, 15) * A - Fraction(2, 5) * B - Fraction(2, 15) * C
    return 11 / 15 + 2 * A / 15 - 2 * B / 5 - 2 * C / 15


def avg_fidelity(ov: SDCOverlaps, *, literal: bool = False, quad: Quadrature | str | None = None) -> float:
    """Root-mean-square fidelity over alpha.

    With ``literal=True`` the plain mean of F(alpha) is returned instead,
    computed by quadrature.
    """
    if literal:
        return average_over_alpha(lambda x: fidelity(PureQubit.real(x), ov), quad)
    rad = float(avg_fidelity_sq_closed(ov))
    if rad < 0:
        raise ParameterDomainError(f"averaged fidelity radicand {rad:.3g} is negative")
    return math.sqrt(rad)


def entropy_K_squared(alpha: float, ov: SDCOverlaps, *, printed: bool = False) -> float:
    """Squared eigenvalue gap of the mode-a output as a polynomial.

    ``printed=True`` reproduces the commonly quoted expansion, whose
    A^2 term reads -20 alpha^2 A^2 instead of +20 alpha^4 A^2.
    """
    a, b = alpha, _beta(alpha)
    A, B, C = (float(v) for v in ov.as_tuple())
    a_sq_term = -20 * a * a * A * A if printed else 20 * a**4 * A * A
    return (
        1
        + 8 * a * b * C
        + (8 * B - 4 + 16 * C * C) * b * b
        + 16 * (2 * B - 1) * C * a * b**3
        + 4 * (1 - 4 * B + 5 * B * B - 4 * C * C) * b**4
        + a_sq_term
        - 8 * a * a * A * (1 + 4 * C * a * b + (3 * B - 2) * b * b)
    )


def entropy_K(psi: PureQubit, ov: SDCOverlaps, *, printed: bool = False) -> float:
    a, b = _require_real(psi)
    if a < 0 or b < 0:
        raise ValueError("entropy_K takes alpha, beta >= 0")
    rad = entropy_K_squared(a, ov, printed=printed)
    if rad < -1e-12:
        raise ParameterDomainError(f"K radicand {rad:.3g} is negative")
    return math.sqrt(max(rad, 0.0))


def entropy(psi: PureQubit, ov: SDCOverlaps, base: float = 2) -> float:
    return qmat.von_neumann_entropy(output_density_a(psi, ov), base)


def entropy_from_K(K: float, base: float = 2) -> float:
    return qmat.entropy_from_eigenvalues([(1 + K) / 2, (1 - K) / 2], base)


def avg_entropy(
    ov: SDCOverlaps,
    base: float = 2,
    quad: Quadrature | str | None = None,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> float:
    return average_over_alpha(lambda x: entropy(PureQubit.real(x), ov, base), quad, map_fn)


# --------------------------------------------------------------------------
# feasibility


@dataclass(frozen=True)
class SDCFeasibility:
    A_ok: bool
    B_ok: bool
    C_ok: bool
    joint_B: bool        # C^2 <= B (1 - 3A), pair (Y1, Q0)
    joint_A: bool        # C^2 <= A (1 - 3B), pair (Y0, Q1)
    gram_min_eigenvalue: float

    @property
    def marginal(self) -> bool:
        return self.A_ok and self.B_ok and self.C_ok

    @property
    def joint(self) -> bool:
        return self.joint_A and self.joint_B

    @property
    def verdict(self) -> CSIVerdict:
        return verdict(self.marginal, self.joint)


def csi_feasible(ov: SDCOverlaps) -> SDCFeasibility:
    """Marginal bounds plus both two-vector Gram conditions.

    The two pair conditions together are equivalent to positivity of the
    full Gram matrix of (Q0, Y0, Q1, Y1).
    """
    A, B, C = ov.as_tuple()
    third = Fraction(1, 3)
    return SDCFeasibility(
        A_ok=in_range(A, 0, third),
        B_ok=in_range(B, 0, third),
        C_ok=le(C * C, third),
        joint_B=le(0, B) and le(0, 1 - 3 * A) and le(C * C, B * (1 - 3 * A)),
        joint_A=le(0, A) and le(0, 1 - 3 * B) and le(C * C, A * (1 - 3 * B)),
        gram_min_eigenvalue=gram_min_eigenvalue(ov.gram()),
    )


def perfect_cloning_overlaps(alpha: float, subcase: SDCSubcase) -> SDCOverlaps:
    """Overlaps at which the mode-a output equals the input exactly.

    For zeroC the minimizer is A = beta/(2 alpha), B = alpha/(2 beta).
    """
    a, b = alpha, _beta(alpha)
    if subcase is SDCSubcase.EQUAL_AB:
        return SDCOverlaps(a * b, a * b, a * a - b * b)
    if subcase is SDCSubcase.ZERO_C:
        if a == 0.0 or b == 0.0:
            raise ValueError("zeroC perfect-cloning overlaps diverge at alpha in {0, 1}")
        return SDCOverlaps(b / (2 * a), a / (2 * b), 0.0)
    raise ValueError("perfect-cloning overlaps exist only for equalAB and zeroC")


Interval = tuple[float, float]


@dataclass(frozen=True)
class CurveConstraint:
    name: str
    formula: str
    bound: float
    intervals: tuple[Interval, ...]
    intervals_bisection: tuple[Interval, ...]

    def contains(self, alpha: float) -> bool:
        return any(lo <= alpha <= hi for lo, hi in self.intervals)


@dataclass(frozen=True)
class FeasibilityReport:
    subcase: SDCSubcase
    constraints: tuple[CurveConstraint, CurveConstraint]
    intersection: tuple[Interval, ...]
    samples: tuple[tuple[float, float, int, float, int], ...]
    reported_endpoints: tuple[float, ...]
    endpoint_discrepancy: bool
    notes: tuple[str, ...] = ()

    @property
    def disjoint(self) -> bool:
        return len(self.intersection) == 0

    @property
    def endpoints(self) -> tuple[float, ...]:
        pts = []
        for c in self.constraints:
            for lo, hi in c.intervals:
                pts.extend(p for p in (lo, hi) if 0.0 < p < 1.0)
        return tuple(pts)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0.0 else math.inf


def _curves(subcase: SDCSubcase):
    """(name, formula, value function, bound, closed-form breakpoints)."""
    if subcase is SDCSubcase.EQUAL_AB:
        s5 = math.sqrt(5) / 3
        return (
            ("A", "alpha*sqrt(1-alpha^2)", lambda x: x * _beta(x), 1 / 3,
             (math.sqrt((1 - s5) / 2), math.sqrt((1 + s5) / 2))),
            ("C", "|2*alpha^2-1|", lambda x: abs(2 * x * x - 1), INV_SQRT3,
             (math.sqrt((1 - INV_SQRT3) / 2), math.sqrt((1 + INV_SQRT3) / 2))),
        )
    if subcase is SDCSubcase.ZERO_C:
        return (
            ("A", "alpha/(2*sqrt(1-alpha^2))", lambda x: _ratio(x, 2 * _beta(x)), 1 / 3,
             (2 / math.sqrt(13),)),
            ("B", "sqrt(1-alpha^2)/(2*alpha)", lambda x: _ratio(_beta(x), 2 * x), 1 / 3,
             (3 / math.sqrt(13),)),
        )
    raise ValueError("feasibility curves exist only for equalAB and zeroC")


REPORTED_ENDPOINTS = {
    SDCSubcase.EQUAL_AB: (0.3568, 0.4597, 0.8881, 0.9342),
    SDCSubcase.ZERO_C: (0.6546, 0.8944),
}


def _intervals_from_breaks(breaks, feasible: Callable[[float], bool]) -> tuple[Interval, ...]:
    pts = [0.0, *sorted(breaks), 1.0]
    out: list[list[float]] = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo or not feasible(0.5 * (lo + hi)):
            continue
        if out and out[-1][1] == lo:
            out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def _bisect(g: Callable[[float], float], lo: float, hi: float, iters: int = 200) -> float:
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _roots_by_bisection(value: Callable[[float], float], bound: float, grid: int = 4096) -> list[float]:
    g = lambda x: value(x) - bound  # noqa: E731
    xs = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    gs = [g(x) for x in xs]
    return [
        _bisect(g, x0, x1)
        for x0, x1, g0, g1 in zip(xs[:-1], xs[1:], gs[:-1], gs[1:])
        if (g0 > 0) != (g1 > 0)
    ]


def _intersect(a: Iterable[Interval], b: Iterable[Interval]) -> tuple[Interval, ...]:
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo <= hi:
                out.append((lo, hi))
    return tuple(sorted(out))


def feasibility_curves(
    subcase: SDCSubcase,
    samples: int = 1001,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> FeasibilityReport:
    """Alpha ranges on which each perfect-cloning overlap obeys its CSI bound."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    curves = _curves(subcase)
    constraints = []
    for name, formula, fn, bound, breaks in curves:
        feasible = lambda x, fn=fn, bound=bound: fn(x) <= bound  # noqa: E731
        constraints.append(
            CurveConstraint(
                name,
                formula,
                bound,
                _intervals_from_breaks(breaks, feasible),
                _intervals_from_breaks(_roots_by_bisection(fn, bound), feasible),
            )
        )
    c1, c2 = constraints

    def row(x: float):
        v1 = curves[0][2](x)
        v2 = curves[1][2](x)
        return (x, v1, int(v1 <= curves[0][3]), v2, int(v2 <= curves[1][3]))

    xs = [i / (samples - 1) for i in range(samples)]
    rows = tuple(map_fn(row, xs))
    inter = _intersect(c1.intervals, c2.intervals)
    reported = REPORTED_ENDPOINTS[subcase]
    derived = sorted(p for c in constraints for lo, hi in c.intervals for p in (lo, hi) if 0.0 < p < 1.0)
    discrepancy = len(derived) != len(reported) or any(
        abs(d - r) > 1e-3 for d, r in zip(derived, sorted(reported))
    )
    notes = []
    if subcase is SDCSubcase.ZERO_C:
        notes.append(
            "curves use A = alpha/(2 beta), B = beta/(2 alpha); the overlaps that actually "
            "zero D_a are A = beta/(2 alpha), B = alpha/(2 beta), which swaps the two "
            "feasible ranges but leaves them disjoint"
        )
    if discrepancy:
        notes.append(f"derived endpoints {', '.join(f'{d:.4f}' for d in derived)} differ from reported "
                     f"{', '.join(f'{r:.4f}' for r in reported)}")
    return FeasibilityReport(subcase, (c1, c2), inter, rows, reported, discrepancy, tuple(notes))
