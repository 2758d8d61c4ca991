"""Phase-covariant cloner with real coefficients (a, b, c).

    U|0>|0>|X> = a|00>|0> + b(|01> + |10>)|1> + c|11>|0>
    U|1>|0>|X> = a|11>|1> + b(|01> + |10>)|0> + c|00>|1>

The machine basis {|0>, |1>} is orthonormal, so the two-mode state is
obtained directly from the eight-dimensional output vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import qmat
from .exceptions import ParameterDomainError
from .optimize import constrained_quadratic_max
from .qmat import DensityMatrix, PureQubit

UNITARITY_TOL = 1e-10

_KET2 = np.eye(4, dtype=complex)
_M = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class PCCoeffs:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.unitarity_residual >= UNITARITY_TOL:
            raise ValueError(
                f"a^2 + 2b^2 + c^2 = {self.a**2 + 2*self.b**2 + self.c**2!r}, expected 1"
            )

    @property
    def unitarity_residual(self) -> float:
        return abs(self.a**2 + 2 * self.b**2 + self.c**2 - 1)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


class PCCase(enum.Enum):
    """Input-family cases and the coefficient relation each one imposes.

    ``parametrization`` maps the free variables onto (a, b, c).
    """

    CASE1 = ("case1", ((1, 0), (0, 1), (1, -2)))   # c = a - 2b, real pairs
    CASE2 = ("case2", ((1, 0), (0, 1), (-1, 2)))   # c = 2b - a, real/imaginary pairs
    CASE3 = ("case3", ((2,), (1,), (0,)))          # a = 2b, c = 0, fully complex

    def __init__(self, tag, parametrization):
        self.tag = tag
        self.parametrization = np.array(parametrization, dtype=float)

    @classmethod
    def parse(cls, value) -> "PCCase":
        text = str(value).strip().lower()
        for case in cls:
            if text in (case.tag, case.tag[-1]):
                return case
        raise ValueError(f"unknown case {value!r}; expected 1, 2 or 3")

    def relation_residual(self, k: PCCoeffs) -> float:
        a, b, c = k.as_tuple()
        if self is PCCase.CASE1:
            return abs(2 * b - (a - c))
        if self is PCCase.CASE2:
            return abs(2 * b - (a + c))
        return max(abs(c), abs(2 * b - a))


def joint_state_vector(psi: PureQubit, k: PCCoeffs) -> np.ndarray:
    """Output vector in (mode a) x (mode b) x (machine) order."""
    a, b, c = k.as_tuple()
    k00, k01, k10, k11 = _KET2
    m0, m1 = _M
    sym = k01 + k10
    img0 = a * np.kron(k00, m0) + b * np.kron(sym, m1) + c * np.kron(k11, m0)
    img1 = a * np.kron(k11, m1) + b * np.kron(sym, m0) + c * np.kron(k00, m1)
    return psi.alpha * img0 + psi.beta * img1


def joint_output_density(psi: PureQubit, k: PCCoeffs) -> DensityMatrix:
    v = joint_state_vector(psi, k).reshape(4, 2)
    return DensityMatrix(v @ v.conj().T)


def output_density_a(psi: PureQubit, k: PCCoeffs) -> DensityMatrix:
    """Closed-form reduced state of either output mode."""
    a, b, c = k.as_tuple()
    al, be = psi.alpha, psi.beta
    pa, pb = abs(al) ** 2, abs(be) ** 2
    off = 2 * (a * b * al * be.conjugate() + b * c * al.conjugate() * be)
    m = np.array(
        [
            [a * a * pa + b * b + c * c * pb, off],
            [off.conjugate(), a * a * pb + b * b + c * c * pa],
        ]
    )
    return DensityMatrix(m)


def _root(rad: float) -> float:
    if rad < -1e-12:
        raise ParameterDomainError(f"fidelity radicand {rad:.3g} is negative")
    return math.sqrt(max(rad, 0.0))


def fidelity(psi: PureQubit, k: PCCoeffs) -> float:
    """Fidelity written with the real and imaginary parts of the amplitudes."""
    a, b, c = k.as_tuple()
    a1, a2 = psi.alpha.real, psi.alpha.imag
    b1, b2 = psi.beta.real, psi.beta.imag
    u = a1 * b1 + a2 * b2
    v = a1 * b2 - a2 * b1
    rad = (
        a * a
        + b * b
        + 2 * (2 * a * b + 2 * b * c - a * a + c * c) * u * u
        + 2 * (2 * a * b - 2 * b * c - a * a + c * c) * v * v
    )
    return _root(rad)


def fidelity_amplitude_form(psi: PureQubit, k: PCCoeffs) -> float:
    """Same fidelity written with the complex amplitudes directly."""
    a, b, c = k.as_tuple()
    al, be = psi.alpha, psi.beta
    p = abs(al) ** 2 * abs(be) ** 2
    cross = (al * al * be.conjugate() ** 2 + al.conjugate() ** 2 * be * be).real
    return _root(a * a + b * b + 2 * (2 * a * b - a * a + c * c) * p + 2 * b * c * cross)


def fidelity_matrix(psi: PureQubit, k: PCCoeffs) -> float:
    return qmat.fidelity(psi.density(), output_density_a(psi, k))


def maximize_fidelity(case: PCCase) -> tuple[PCCoeffs, float]:
    """Coefficients maximizing a^2 + b^2 on the unitarity ellipse of a case.

    Returns the coefficients and the maximal fidelity sqrt(a^2 + b^2).
    """
    lmat = case.parametrization
    weight = np.diag([1.0, 2.0, 1.0])
    obj = np.diag([1.0, 1.0, 0.0])
    x, f2 = constrained_quadratic_max(lmat.T @ weight @ lmat, lmat.T @ obj @ lmat)
    a, b, c = (float(v) for v in lmat @ x)
    # cancel the rounding in the surd-valued components before the unitarity check
    norm = math.sqrt(a * a + 2 * b * b + c * c)
    k = PCCoeffs(a / norm, b / norm, c / norm)
    return k, math.sqrt(f2)


def input_family(case: PCCase, n: int = 101, rng: Optional[np.random.Generator] = None) -> list[PureQubit]:
    """Deterministic (or seeded random) sample of a case's input states.

    case1: real alpha, beta; case2: real alpha, imaginary beta; case3:
    alpha, beta with independent complex phases.
    """
    if n < 2:
        raise ValueError("family needs at least 2 states")
    if rng is None:
        theta = np.linspace(0.0, math.pi, n)
        golden = (math.sqrt(5) - 1) / 2
        phi = 2 * math.pi * ((np.arange(n) * golden) % 1.0)
        phase = 2 * math.pi * ((np.arange(n) * golden * golden) % 1.0)
    else:
        theta = rng.uniform(0.0, math.pi, n)
        phi = rng.uniform(0.0, 2 * math.pi, n)
        phase = rng.uniform(0.0, 2 * math.pi, n)
    if case is PCCase.CASE1:
        return [PureQubit.from_angles(t) for t in theta]
    if case is PCCase.CASE2:
        return [PureQubit.from_angles(t, math.pi / 2) for t in theta]
    return [PureQubit.from_angles(t, p, g) for t, p, g in zip(theta, phi, phase)]


def input_independence_residual(
    family: Sequence[PureQubit],
    k: PCCoeffs,
    case: Optional[PCCase] = None,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> float:
    """Spread (max - min) of the fidelity over a sample of input states."""
    if case is not None and case.relation_residual(k) > 1e-10:
        raise ValueError(f"coefficients do not satisfy the {case.tag} relation")
    vals = list(map_fn(lambda s: fidelity(s, k), family))
    return max(vals) - min(vals)
