"""Dense one- and two-qubit operator arithmetic and scalar figures of merit.

Everything here works on 2x2 or 4x4 complex arrays.  Basis order for two
qubits is |00>, |01>, |10>, |11> with the first factor being mode ``a``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np

from .exceptions import InvalidStateError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10


@dataclass(frozen=True)
class PureQubit:
    """Normalized amplitude pair for alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not (cmath.isfinite(a) and cmath.isfinite(b)):
            raise ValueError("amplitudes must be finite")
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "PureQubit":
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0.0:
            raise ValueError("zero vector cannot be normalized")
        return cls(alpha / norm, beta / norm)

    @classmethod
    def real(cls, alpha: float) -> "PureQubit":
        """State with real alpha in [-1, 1] and beta = +sqrt(1 - alpha^2)."""
        if not -1.0 <= alpha <= 1.0:
            raise ValueError(f"alpha={alpha!r} outside [-1, 1]")
        return cls(complex(alpha), complex(math.sqrt(max(0.0, 1.0 - alpha * alpha))))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0, phase: float = 0.0) -> "PureQubit":
        """cos(theta) e^{i phase}|0> + sin(theta) e^{i (phase + phi)}|1>."""
        return cls(
            math.cos(theta) * cmath.exp(1j * phase),
            math.sin(theta) * cmath.exp(1j * (phase + phi)),
        )

    @property
    def is_real(self) -> bool:
        return abs(self.alpha.imag) <= NORM_TOL and abs(self.beta.imag) <= NORM_TOL

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def density(self) -> "DensityMatrix":
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()))

    def product_density(self) -> "DensityMatrix":
        """|psi psi><psi psi|, the ideal two-copy state."""
        v = np.kron(self.vector, self.vector)
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace 2x2 or 4x4 operator.

    Positivity is enforced only when ``check_positive`` is true.  Protocol
    builders pass ``False`` so that overlap sets violating the Gram
    conditions still yield an operator that can be inspected; operations that
    need a physical state (fidelity, entropy) re-check positivity themselves.
    """

    data: np.ndarray
    check_positive: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.data, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise InvalidStateError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("non-finite entries")
        if hermiticity_residual(m) > HERMITIAN_TOL:
            raise InvalidStateError(f"not Hermitian (residual {hermiticity_residual(m):.3g})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr:.15g} differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "data", m)
        if self.check_positive and self.min_eigenvalue < -EIGEN_TOL:
            raise InvalidStateError(f"negative eigenvalue {self.min_eigenvalue:.3g}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, idx):
        return self.data[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def is_positive(self) -> bool:
        return self.min_eigenvalue >= -EIGEN_TOL

    def require_positive(self) -> None:
        if not self.is_positive:
            raise InvalidStateError(f"negative eigenvalue {self.min_eigenvalue:.3g}")

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.data, np.asarray(other), rtol=0.0, atol=atol))


Operator = Union[DensityMatrix, np.ndarray]


def hermiticity_residual(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def reduce_over_machine(branches: Sequence[np.ndarray], gram) -> np.ndarray:
    """Reduced operator of sum_k |phi_k> (x) |M_k> after tracing the machine.

    ``branches[k]`` is the system vector multiplying machine vector ``M_k``
    and ``gram[l][k] = <M_l|M_k>``.  Returns sum_{k,l} <M_l|M_k> |phi_k><phi_l|.
    """
    phi = np.array(branches, dtype=complex).T
    g = np.array(gram, dtype=complex)
    return phi @ g.T @ phi.conj().T


def partial_trace(rho4: Operator, trace_out: Literal["a", "b"] = "b") -> DensityMatrix:
    """Reduced state of a two-qubit operator after tracing out one mode."""
    m = np.asarray(rho4, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidStateError(f"partial trace needs a 4x4 operator, got {m.shape}")
    t = m.reshape(2, 2, 2, 2)
    if trace_out == "b":
        red = np.einsum("ijkj->ik", t)
    elif trace_out == "a":
        red = np.einsum("jijk->ik", t)
    else:
        raise ValueError(f"trace_out must be 'a' or 'b', not {trace_out!r}")
    positive = rho4.check_positive if isinstance(rho4, DensityMatrix) else True
    return DensityMatrix(red, check_positive=positive)


_DET_SNAP = 8 * np.finfo(float).eps


def sqrt_2x2(m) -> np.ndarray:
    """Principal square root of a positive semidefinite 2x2 matrix.

    Uses (M + sI)/t with s = sqrt(det M) and t = sqrt(tr M + 2s).  When t
    vanishes (the zero matrix) the eigendecomposition is used instead.
    A determinant at rounding level (relative to tr^2) is snapped to zero so
    rank-one inputs keep an exact rank-one root.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
    det = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real
    tr = (m[0, 0] + m[1, 1]).real
    if det <= _DET_SNAP * tr * tr:
        det = 0.0
    s = math.sqrt(det)
    t2 = tr + 2.0 * s
    if t2 <= 1e-300:
        w, v = np.linalg.eigh(m)
        return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return (m + s * np.eye(2)) / math.sqrt(t2)


def fidelity(rho_id: Operator, rho_out: Operator) -> float:
    """Tr sqrt(sqrt(rho_id) rho_out sqrt(rho_id)) for 2x2 density matrices."""
    a = _as_state(rho_id)
    b = _as_state(rho_out)
    if a.dim != 2 or b.dim != 2:
        raise InvalidStateError("fidelity is defined here for single-qubit states")
    a.require_positive()
    b.require_positive()
    ra = sqrt_2x2(a.data)
    inner = ra @ b.data @ ra
    inner = 0.5 * (inner + inner.conj().T)
    f = float(np.trace(sqrt_2x2(inner)).real)
    return min(max(f, 0.0), 1.0)


def pure_fidelity(psi: PureQubit, rho_out: Operator) -> float:
    """sqrt(<psi|rho|psi>), the pure-reference shortcut."""
    v = psi.vector
    val = float(np.real(v.conj() @ np.asarray(rho_out) @ v))
    if val < -EIGEN_TOL:
        raise InvalidStateError(f"<psi|rho|psi> = {val:.3g} is negative")
    return math.sqrt(max(val, 0.0))


def hs_distance(rho1: Operator, rho2: Operator) -> float:
    """Tr[(rho1 - rho2)^2], the squared Hilbert-Schmidt distance."""
    m1, m2 = np.asarray(rho1), np.asarray(rho2)
    if m1.shape != m2.shape:
        raise ValueError(f"dimension mismatch: {m1.shape} vs {m2.shape}")
    return float(np.sum(np.abs(m1 - m2) ** 2))


def eigenvalues_2x2(rho: Operator) -> tuple[float, float]:
    """Closed-form eigenvalues (larger first) of a Hermitian 2x2 operator."""
    m = np.asarray(rho)
    mean = 0.5 * (m[0, 0] + m[1, 1]).real
    gap = math.hypot((m[0, 0] - m[1, 1]).real, 2.0 * abs(m[0, 1]))
    return mean + 0.5 * gap, mean - 0.5 * gap


def von_neumann_entropy(rho: Operator, base: float = 2) -> float:
    """-sum lambda log lambda with 0 log 0 = 0."""
    m = _as_state(rho, check_positive=False)
    lam = m.eigenvalues
    if lam[0] < -EIGEN_TOL:
        raise InvalidStateError(f"negative eigenvalue {lam[0]:.3g}")
    return entropy_from_eigenvalues(lam, base)


def entropy_from_eigenvalues(lam, base: float = 2) -> float:
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, None)
    nz = lam[lam > 0.0]
    return float(max(0.0, -np.sum(nz * np.log(nz)) / math.log(base)))


def _as_state(rho: Operator, check_positive: bool = False) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(np.asarray(rho), check_positive=check_positive)
