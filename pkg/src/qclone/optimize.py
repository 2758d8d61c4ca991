"""Exact quadratic objectives, alpha moments and quadrature over input states.

Overlap optimizations are carried out in exact rational arithmetic with
:class:`fractions.Fraction`; floats only appear where surds do.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .exceptions import IndeterminateError

Rational = Fraction

MOMENT_MAX_M = 8
MOMENT_MAX_K = 4


def as_fraction(x) -> Fraction:
    """Exact conversion for ints, Fractions and ``"num/den"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"{x!r} is not an exact rational")


def is_exact(x) -> bool:
    return isinstance(x, (int, _RationalABC)) and not isinstance(x, bool)


# --------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class PiMultiple:
    """An exact value ``coeff * pi``."""

    coeff: Fraction

    def __float__(self) -> float:
        return float(self.coeff) * math.pi

    def __str__(self) -> str:
        return f"{self.coeff}*pi"


def _gamma_half(n2: int) -> tuple[Fraction, int]:
    """Gamma(n2/2) as (c, e) meaning c * sqrt(pi)**e, for n2 >= 1."""
    if n2 % 2 == 0:
        return Fraction(math.factorial(n2 // 2 - 1)), 0
    n = (n2 - 1) // 2
    return Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), 1


def moment(m: int, k: int) -> Fraction | PiMultiple:
    """Exact value of the integral of alpha^m (1 - alpha^2)^(k/2) over [0, 1].

    Equals B((m+1)/2, k/2+1)/2.  The result is rational unless m is even and
    k odd, in which case it is a rational multiple of pi.
    """
    if not (isinstance(m, int) and isinstance(k, int)):
        raise TypeError("moment indices must be integers")
    if not (0 <= m <= MOMENT_MAX_M and 0 <= k <= MOMENT_MAX_K):
        raise ValueError(f"moment({m}, {k}) outside table range m<={MOMENT_MAX_M}, k<={MOMENT_MAX_K}")
    return _moment(m, k)


@lru_cache(maxsize=None)
def _moment(m: int, k: int) -> Fraction | PiMultiple:
    cp, ep = _gamma_half(m + 1)
    cq, eq = _gamma_half(k + 2)
    cs, es = _gamma_half(m + k + 3)
    coeff = cp * cq / cs / 2
    e = ep + eq - es
    if e == 0:
        return coeff
    assert e == 2
    return PiMultiple(coeff)


class MomentTable(Mapping):
    """Immutable table of :func:`moment` over the supported index range."""

    def __init__(self):
        self._data = {
            (m, k): moment(m, k)
            for m in range(MOMENT_MAX_M + 1)
            for k in range(MOMENT_MAX_K + 1)
        }

    def __getitem__(self, key):
        return self._data[key]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)


# --------------------------------------------------------------------------
# quadratic objectives


@dataclass(frozen=True)
class QuadraticObjective:
    """q(x) = x^T Q x + l^T x + c over named variables (at most three).

    ``quad`` is stored symmetric.  Coefficients are Fractions.
    """

    names: tuple[str, ...]
    quad: tuple[tuple[Fraction, ...], ...]
    lin: tuple[Fraction, ...]
    const: Fraction = Fraction(0)

    def __post_init__(self):
        n = len(self.names)
        if n > 3:
            raise ValueError("at most three variables are supported")
        q = tuple(tuple(as_fraction(v) for v in row) for row in self.quad)
        if len(q) != n or any(len(row) != n for row in q):
            raise ValueError("quadratic part has the wrong shape")
        if any(q[i][j] != q[j][i] for i in range(n) for j in range(n)):
            raise ValueError("quadratic part must be symmetric")
        lin = tuple(as_fraction(v) for v in self.lin)
        if len(lin) != n:
            raise ValueError("linear part has the wrong length")
        object.__setattr__(self, "quad", q)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "const", as_fraction(self.const))

    @classmethod
    def from_terms(cls, names: Sequence[str], terms: Mapping[tuple[str, ...], object]) -> "QuadraticObjective":
        """Build from monomials, e.g. ``{("A", "A"): 10, ("A", "C"): -16, ("A",): -4, (): 2}``."""
        names = tuple(names)
        idx = {name: i for i, name in enumerate(names)}
        n = len(names)
        q = [[Fraction(0)] * n for _ in range(n)]
        lin = [Fraction(0)] * n
        const = Fraction(0)
        for mono, coeff in terms.items():
            c = as_fraction(coeff)
            if len(mono) == 0:
                const += c
            elif len(mono) == 1:
                lin[idx[mono[0]]] += c
            elif len(mono) == 2:
                i, j = idx[mono[0]], idx[mono[1]]
                if i == j:
                    q[i][i] += c
                else:
                    q[i][j] += c / 2
                    q[j][i] += c / 2
            else:
                raise ValueError(f"monomial {mono!r} has degree > 2")
        return cls(names, tuple(map(tuple, q)), tuple(lin), const)

    @property
    def dim(self) -> int:
        return len(self.names)

    def __call__(self, x):
        x = self._vector(x)
        n = self.dim
        val = self.const
        for i in range(n):
            val = val + self.lin[i] * x[i]
            for j in range(n):
                val = val + self.quad[i][j] * x[i] * x[j]
        return val

    def gradient(self, x) -> tuple:
        x = self._vector(x)
        n = self.dim
        return tuple(
            self.lin[i] + 2 * sum(self.quad[i][j] * x[j] for j in range(n))
            for i in range(n)
        )

    def hessian(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(2 * v for v in row) for row in self.quad)

    def __add__(self, other: "QuadraticObjective") -> "QuadraticObjective":
        if not isinstance(other, QuadraticObjective):
            return NotImplemented
        if other.names != self.names:
            raise ValueError("objectives are over different variables")
        n = self.dim
        return QuadraticObjective(
            self.names,
            tuple(tuple(self.quad[i][j] + other.quad[i][j] for j in range(n)) for i in range(n)),
            tuple(a + b for a, b in zip(self.lin, other.lin)),
            self.const + other.const,
        )

    def scale(self, factor) -> "QuadraticObjective":
        f = as_fraction(factor)
        return QuadraticObjective(
            self.names,
            tuple(tuple(f * v for v in row) for row in self.quad),
            tuple(f * v for v in self.lin),
            f * self.const,
        )

    def substitute(self, names: Sequence[str], mapping: Mapping[str, Mapping[str, object]]) -> "QuadraticObjective":
        """Affine change of variables.

        ``mapping[old] = {new_name: coeff, ..., "": offset}`` expresses each
        old variable in the new ones; missing old variables are set to zero.
        """
        names = tuple(names)
        n_new = len(names)
        rows = []
        offs = []
        for old in self.names:
            spec = mapping.get(old, {})
            unknown = set(spec) - set(names) - {""}
            if unknown:
                raise ValueError(f"unknown variables {sorted(unknown)}")
            rows.append([as_fraction(spec.get(nm, 0)) for nm in names])
            offs.append(as_fraction(spec.get("", 0)))
        n_old = self.dim
        # x_old = L y + o
        q_new = [[Fraction(0)] * n_new for _ in range(n_new)]
        lin_new = [Fraction(0)] * n_new
        for a in range(n_new):
            for b in range(n_new):
                q_new[a][b] = sum(
                    rows[i][a] * self.quad[i][j] * rows[j][b]
                    for i in range(n_old)
                    for j in range(n_old)
                )
        for a in range(n_new):
            lin_new[a] = sum(self.lin[i] * rows[i][a] for i in range(n_old)) + sum(
                2 * offs[i] * self.quad[i][j] * rows[j][a] for i in range(n_old) for j in range(n_old)
            )
        const = self(offs)
        return QuadraticObjective(names, tuple(map(tuple, q_new)), tuple(lin_new), const)

    def _vector(self, x):
        if isinstance(x, Mapping):
            x = [x[nm] for nm in self.names]
        x = list(x)
        if len(x) != self.dim:
            raise ValueError(f"expected {self.dim} values, got {len(x)}")
        return x


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals; raises on singular input."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise IndeterminateError("quadratic part is singular")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def stationary_point(q: QuadraticObjective) -> tuple[Fraction, ...]:
    """Exact solution of grad q = 0, i.e. 2 Q x = -l."""
    a = [[2 * v for v in row] for row in q.quad]
    return tuple(_solve_exact(a, [-v for v in q.lin]))


# --------------------------------------------------------------------------
# Hessian classification


class Definiteness(str, enum.Enum):
    POSITIVE_DEFINITE = "positive-definite"
    NEGATIVE_DEFINITE = "negative-definite"
    INDEFINITE = "indefinite"
    SINGULAR = "singular"

    def __str__(self) -> str:
        return self.value


def _det_exact(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    m = [list(row) for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return det


def leading_minors(h) -> list:
    """Leading principal minors, exact when every entry is rational."""
    rows = [list(r) for r in (h.tolist() if isinstance(h, np.ndarray) else h)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("Hessian must be square")
    if all(is_exact(v) for r in rows for v in r):
        fr = [[as_fraction(v) for v in r] for r in rows]
        return [_det_exact([r[:k] for r in fr[:k]]) for k in range(1, n + 1)]
    arr = np.array(rows, dtype=float)
    return [float(np.linalg.det(arr[:k, :k])) for k in range(1, n + 1)]


def classify_hessian(h, tol: float = 1e-12) -> Definiteness:
    """Sylvester classification by leading principal minors.

    Rational input is classified exactly.  Float minors of order k are
    treated as zero below ``tol * max(1, max|h_ij|)**k``.
    """
    minors = leading_minors(h)
    exact = all(isinstance(d, Fraction) for d in minors)
    if exact:
        signs = [(d > 0) - (d < 0) for d in minors]
    else:
        arr = np.asarray(h, dtype=float)
        scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
        signs = [
            0 if abs(d) <= tol * scale ** (k + 1) else (1 if d > 0 else -1)
            for k, d in enumerate(minors)
        ]
    if signs[-1] == 0:
        return Definiteness.SINGULAR
    if all(s > 0 for s in signs):
        return Definiteness.POSITIVE_DEFINITE
    if all(s == (-1) ** (k + 1) for k, s in enumerate(signs)):
        return Definiteness.NEGATIVE_DEFINITE
    return Definiteness.INDEFINITE


# --------------------------------------------------------------------------
# constrained maximization


def constrained_quadratic_max(constraint, objective=None) -> tuple[np.ndarray, float]:
    """Maximize x^T P x subject to x^T Q x = 1 with Q positive definite.

    P defaults to the identity, in which case the maximum is 1/lambda_min(Q).
    In general it is the largest mu of P v = mu Q v, found by whitening with
    the Cholesky factor of Q.  The returned vector is scaled onto the
    constraint and its first nonzero component is made positive.
    """
    q = np.atleast_2d(np.asarray(constraint, dtype=float))
    n = q.shape[0]
    if q.shape != (n, n) or not np.allclose(q, q.T, atol=1e-14):
        raise ValueError("constraint matrix must be square and symmetric")
    p = np.eye(n) if objective is None else np.atleast_2d(np.asarray(objective, dtype=float))
    if p.shape != (n, n) or not np.allclose(p, p.T, atol=1e-14):
        raise ValueError("objective matrix must be square and symmetric")
    try:
        chol = np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise ValueError("constraint matrix is not positive definite") from exc
    linv = np.linalg.inv(chol)
    w, v = np.linalg.eigh(linv @ p @ linv.T)
    x = linv.T @ v[:, -1]
    x = x / math.sqrt(float(x @ q @ x))
    nz = np.flatnonzero(np.abs(x) > 1e-15)
    if nz.size and x[nz[0]] < 0:
        x = -x
    return x, float(w[-1])


# --------------------------------------------------------------------------
# quadrature over alpha


@dataclass(frozen=True)
class Quadrature:
    """Rule for averaging over alpha in [0, 1].

    Nodes are placed in theta with alpha = sin(theta), d alpha = cos(theta)
    d theta, which removes the sqrt(1 - alpha^2) endpoint singularity carried
    by every beta-odd integrand.  ``substitution="none"`` integrates in alpha
    directly.
    """

    kind: str = "gauss"
    nodes: int = 128
    substitution: str = "sine"

    def __post_init__(self):
        if self.kind not in ("gauss", "simpson"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.nodes < 2:
            raise ValueError("quadrature needs at least 2 nodes")
        if self.kind == "simpson" and (self.nodes < 3 or self.nodes % 2 == 0):
            raise ValueError("composite Simpson needs an odd node count >= 3")
        if self.substitution not in ("sine", "none"):
            raise ValueError(f"unknown substitution {self.substitution!r}")

    @classmethod
    def parse(cls, text: str) -> "Quadrature":
        """Parse ``gauss:N`` or ``simpson:N``."""
        kind, sep, n = text.partition(":")
        if not sep:
            raise ValueError(f"quadrature spec {text!r} must look like gauss:N or simpson:N")
        try:
            nodes = int(n)
        except ValueError:
            raise ValueError(f"bad node count in {text!r}") from None
        return cls(kind.strip().lower(), nodes)

    def __str__(self) -> str:
        return f"{self.kind}:{self.nodes}"

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes in alpha and matching weights (Jacobian folded in)."""
        return _rule(self.kind, self.nodes, self.substitution)


@lru_cache(maxsize=32)
def _rule(kind: str, n: int, substitution: str):
    hi = math.pi / 2 if substitution == "sine" else 1.0
    if kind == "gauss":
        x, w = np.polynomial.legendre.leggauss(n)
        t = 0.5 * hi * (x + 1.0)
        w = 0.5 * hi * w
    else:
        t = np.linspace(0.0, hi, n)
        h = hi / (n - 1)
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w = w * h / 3.0
    if substitution == "sine":
        alpha, w = np.sin(t), w * np.cos(t)
    else:
        alpha = t
    alpha.setflags(write=False)
    w.setflags(write=False)
    return alpha, w


DEFAULT_QUADRATURE = Quadrature()


def average_over_alpha(
    f: Callable[[float], float],
    quad: Quadrature | str | None = None,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> float:
    """Integral of f(alpha) over [0, 1]; ``map_fn`` may be an executor's map."""
    if quad is None:
        quad = DEFAULT_QUADRATURE
    elif isinstance(quad, str):
        quad = Quadrature.parse(quad)
    alpha, w = quad.rule()
    vals = np.fromiter(map_fn(f, alpha.tolist()), dtype=float, count=len(alpha))
    return float(vals @ w)


def average_polynomial(terms: Mapping[tuple[int, int], object]):
    """Exact alpha-average of sum coeff * alpha^m * beta^k.

    Coefficients may be numbers or :class:`QuadraticObjective` instances;
    every moment used must be rational.
    """
    total = None
    for (m, k), coeff in terms.items():
        mom = moment(m, k)
        if isinstance(mom, PiMultiple):
            raise ValueError(f"moment({m}, {k}) is not rational")
        term = coeff.scale(mom) if isinstance(coeff, QuadraticObjective) else coeff * mom
        total = term if total is None else total + term
    return total


def to_float_vector(x: Iterable) -> np.ndarray:
    return np.array([float(v) for v in x])


def rational_str(x) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"
