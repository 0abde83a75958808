"""Shared exact-arithmetic domain types.

Everything at this layer is exact: scalars are `fractions.Fraction` and
time-dependent quantities are polynomials in t with Fraction coefficients.
Floating point enters only at the boundary of the numerical engines.

Phase-space convention: the coordinates of an N-particle system are ordered
(x1, p1, x2, p2, ..., xN, pN) and the canonical symplectic form J is
block-diagonal with 2x2 blocks [[0, 1], [-1, 0]], so that
[r_i, r_j] = i*hbar*J_ij.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import SingularMapError

Rational = Union[int, Fraction, str]


def as_fraction(value: Rational) -> Fraction:
    """Coerce ints, Fractions, and 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


class Poly:
    """Polynomial in the time variable with exact rational coefficients.

    Coefficients are stored in ascending order and trailing zeros are
    stripped, so equal polynomials compare equal. Evaluation accepts either
    a Fraction (exact result) or a float (engine boundary).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, value: Rational) -> "Poly":
        return cls((value,))

    @classmethod
    def variable(cls) -> "Poly":
        """The monomial t."""
        return cls((0, 1))

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"polynomial {self} is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coefficient(self, power: int) -> Fraction:
        return self.coeffs[power] if power < len(self.coeffs) else Fraction(0)

    # -- calculus ----------------------------------------------------------

    def __call__(self, t):
        result = t * 0
        for c in reversed(self.coeffs):
            result = result * t + c
        return result

    def derivative(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k >= 1)

    def antiderivative(self) -> "Poly":
        return Poly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integral_to(self, t):
        """Definite integral from 0 to t."""
        return self.antiderivative()(t)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly((self.coefficient(k) + o.coefficient(k) for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Poly((-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero or other.is_zero:
                return Poly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Poly(out)
        if isinstance(other, (int, Fraction)):
            return Poly((c * other for c in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly((c / other for c in self.coeffs))
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        return f"Poly({self.coeffs!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
                continue
            tpow = "t" if k == 1 else f"t^{k}"
            if c == 1:
                parts.append(tpow)
            elif c == -1:
                parts.append(f"-{tpow}")
            else:
                parts.append(f"{c}*{tpow}")
        return " + ".join(parts).replace("+ -", "- ")


def as_poly(value) -> Poly:
    """Coerce rationals and polynomials to Poly."""
    if isinstance(value, Poly):
        return value
    return Poly((as_fraction(value),))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Units:
    """Unit system; hbar carries the action scale for a whole run."""

    hbar: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "hbar", as_fraction(self.hbar))
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


@dataclass(frozen=True)
class ParticleSpec:
    """A labelled point particle with an exact positive mass."""

    label: str
    mass: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mass", as_fraction(self.mass))
        if self.mass <= 0:
            raise ValueError(f"mass of {self.label!r} must be positive")


@dataclass(frozen=True)
class FrameTrajectory:
    """Frame position X(t) as a polynomial with rational coefficients.

    Velocity, acceleration, and the integral of the squared velocity are all
    available in closed form, exactly, at rational times.
    """

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(as_fraction(c) for c in self.coefficients)
        )

    @classmethod
    def at_rest(cls) -> "FrameTrajectory":
        return cls(())

    @classmethod
    def constant_offset(cls, a: Rational) -> "FrameTrajectory":
        return cls((as_fraction(a),))

    @classmethod
    def uniform_velocity(cls, v: Rational) -> "FrameTrajectory":
        return cls((Fraction(0), as_fraction(v)))

    @classmethod
    def uniform_acceleration(cls, g: Rational) -> "FrameTrajectory":
        """X(t) = g t^2 / 2."""
        return cls((Fraction(0), Fraction(0), as_fraction(g) / 2))

    def position(self) -> Poly:
        return Poly(self.coefficients)

    def velocity(self) -> Poly:
        return self.position().derivative()

    def acceleration(self) -> Poly:
        return self.velocity().derivative()

    def speed_squared_integral(self) -> Poly:
        """The polynomial t -> integral of Xdot(s)^2 for s in [0, t]."""
        v = self.velocity()
        return (v * v).antiderivative()


def trajectory_eval(traj: FrameTrajectory, t: Rational):
    """Exact (X, Xdot, Xddot, integral of Xdot^2) at a rational time."""
    t = as_fraction(t)
    x = traj.position()
    return (
        x(t),
        x.derivative()(t),
        x.derivative().derivative()(t),
        traj.speed_squared_integral()(t),
    )


POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class CoordinateSystem:
    """Ordered phase-space labelling: one (position, momentum) pair per particle."""

    particles: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        if len(set(self.particles)) != len(self.particles):
            raise ValueError("particle labels must be unique")

    @classmethod
    def for_particles(cls, particles: Sequence) -> "CoordinateSystem":
        labels = [p.label if isinstance(p, ParticleSpec) else str(p) for p in particles]
        return cls(tuple(labels))

    @property
    def n_particles(self) -> int:
        return len(self.particles)

    @property
    def dim(self) -> int:
        return 2 * len(self.particles)

    @property
    def axes(self) -> tuple[tuple[str, str], ...]:
        out = []
        for label in self.particles:
            out.append((label, POSITION))
            out.append((label, MOMENTUM))
        return tuple(out)

    def index(self, label: str, kind: str) -> int:
        k = self.particles.index(label)
        return 2 * k + (0 if kind == POSITION else 1)

    def position_index(self, label: str) -> int:
        return self.index(label, POSITION)

    def momentum_index(self, label: str) -> int:
        return self.index(label, MOMENTUM)

    def axis_symbol(self, i: int) -> str:
        label, kind = self.axes[i]
        return ("x_" if kind == POSITION else "p_") + label

    def primed(self, suffix: str = "'") -> "CoordinateSystem":
        return CoordinateSystem(tuple(lbl + suffix for lbl in self.particles))

    def subsystem(self, labels: Sequence[str]) -> "CoordinateSystem":
        missing = [l for l in labels if l not in self.particles]
        if missing:
            raise ValueError(f"unknown particles: {missing}")
        return CoordinateSystem(tuple(labels))


def symplectic_form(cs: CoordinateSystem) -> np.ndarray:
    """The canonical form J (exact), with J^T = -J and J^2 = -I."""
    n = cs.dim
    j = zeros_matrix(n)
    for k in range(cs.n_particles):
        j[2 * k, 2 * k + 1] = Fraction(1)
        j[2 * k + 1, 2 * k] = Fraction(-1)
    return j


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals
# ---------------------------------------------------------------------------


def rational_matrix(rows) -> np.ndarray:
    return np.array([[as_fraction(v) for v in row] for row in rows], dtype=object)


def rational_vector(entries) -> np.ndarray:
    return np.array([as_fraction(v) for v in entries], dtype=object)


def poly_vector(entries) -> np.ndarray:
    return np.array([as_poly(v) for v in entries], dtype=object)


def zeros_matrix(n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return np.array([[Fraction(0)] * m for _ in range(n)], dtype=object)


def identity_matrix(n: int) -> np.ndarray:
    out = zeros_matrix(n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def exact_inverse(matrix: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse of a square Fraction matrix."""
    n = matrix.shape[0]
    aug = [
        [as_fraction(matrix[i, j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMapError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return np.array([row[n:] for row in aug], dtype=object)


def exact_det(matrix: np.ndarray) -> Fraction:
    """Determinant of a square Fraction matrix by Gaussian elimination."""
    n = matrix.shape[0]
    rows = [[as_fraction(matrix[i, j]) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        pv = rows[col][col]
        for r in range(col + 1, n):
            if rows[r][col] != 0:
                f = rows[r][col] / pv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return det


def to_float_matrix(matrix: np.ndarray) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in matrix], dtype=float)


def to_float_vector(vector: np.ndarray) -> np.ndarray:
    return np.array([float(v) for v in vector], dtype=float)
