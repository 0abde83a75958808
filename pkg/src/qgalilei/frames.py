"""Symplectic-affine frame transformations and quadratic Hamiltonians.

A frame change is represented by its action on the ordered phase-space
coordinates, r' = S r + d(t), with S an exact rational matrix and d a vector
of rational polynomials in t. The map is canonical iff S J S^T = J. A
Hamiltonian is kept as H = r^T A r / 2 + b(t)^T r + c(t) plus a list of 1D
potential terms V(l^T r + offset) whose argument involves positions only.

The module provides the named transformations used throughout the package
(single-particle frame shifts and boosts, the Aharonov-Kaufherr map, the
center-of-mass/relative map, the two canonical three-body sets, and the
second boost built from the first frame's coordinates), commutators between
axes of different maps, exact conjugation of Hamiltonians, the passive
transformation rule for time-dependent displacement generators, and fully
symbolic Heisenberg velocities/accelerations for quadratic dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import (
    MOMENTUM,
    POSITION,
    CoordinateSystem,
    FrameTrajectory,
    ParticleSpec,
    Poly,
    Rational,
    Units,
    as_fraction,
    as_poly,
    exact_det,
    exact_inverse,
    identity_matrix,
    poly_vector,
    rational_matrix,
    rational_vector,
    symplectic_form,
    zeros_matrix,
)
from .errors import (
    ArityError,
    DimensionError,
    MissingTrajectoryError,
    NonQuadraticError,
    UnsupportedGeneratorError,
)
from .weyl import WeylElement

# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PotentialProfile:
    """A named 1D potential profile V(s).

    ``slope`` is set when the profile is linear, V(s) = slope * s; only
    linear profiles take part in exact moment dynamics and symbolic
    accelerations. ``func`` evaluates the profile on numpy arrays.
    """

    name: str
    func: Callable
    slope: Fraction | None = None

    @property
    def is_linear(self) -> bool:
        return self.slope is not None


def linear_profile(slope: Rational, name: str | None = None) -> PotentialProfile:
    slope = as_fraction(slope)
    coeff = float(slope)
    return PotentialProfile(
        name=name or f"linear[{slope}]",
        func=lambda s, c=coeff: c * s,
        slope=slope,
    )


@dataclass(frozen=True, eq=False)
class PotentialTerm:
    """V(l^T r + offset) with l supported on position axes only."""

    vector: np.ndarray
    profile: PotentialProfile
    offset: Poly = Poly()

    def __post_init__(self):
        object.__setattr__(self, "vector", rational_vector(self.vector))
        object.__setattr__(self, "offset", as_poly(self.offset))


def potential_on_positions(
    cs: CoordinateSystem,
    coeffs: dict,
    profile: PotentialProfile,
    offset: Rational | Poly = 0,
) -> PotentialTerm:
    """Potential term whose argument is sum(coeffs[label] * x_label)."""
    vec = rational_vector([0] * cs.dim)
    for label, c in coeffs.items():
        vec[cs.position_index(label)] = as_fraction(c)
    return PotentialTerm(vec, profile, as_poly(offset))


# ---------------------------------------------------------------------------
# Quadratic Hamiltonians
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """H = r^T A r / 2 + b(t)^T r + c(t) + sum of potential terms."""

    cs: CoordinateSystem
    quadratic: np.ndarray
    linear: np.ndarray
    scalar: Poly
    potentials: tuple[PotentialTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "quadratic", rational_matrix(self.quadratic))
        object.__setattr__(self, "linear", poly_vector(self.linear))
        object.__setattr__(self, "scalar", as_poly(self.scalar))
        object.__setattr__(self, "potentials", tuple(self.potentials))
        n = self.cs.dim
        if self.quadratic.shape != (n, n) or self.linear.shape != (n,):
            raise DimensionError("coefficient shapes do not match the coordinates")
        for i in range(n):
            for j in range(i):
                if self.quadratic[i, j] != self.quadratic[j, i]:
                    raise ValueError("quadratic form must be symmetric")
        for term in self.potentials:
            if term.vector.shape != (n,):
                raise DimensionError("potential vector has wrong length")
            for k, (label, kind) in enumerate(self.cs.axes):
                if kind == MOMENTUM and term.vector[k] != 0:
                    raise ValueError("potential argument must involve positions only")

    @classmethod
    def build(
        cls,
        cs: CoordinateSystem,
        quadratic=None,
        linear=None,
        scalar: Rational | Poly = 0,
        potentials: Sequence[PotentialTerm] = (),
    ) -> "QuadraticHamiltonian":
        n = cs.dim
        return cls(
            cs=cs,
            quadratic=zeros_matrix(n) if quadratic is None else quadratic,
            linear=poly_vector([0] * n) if linear is None else linear,
            scalar=scalar,
            potentials=tuple(potentials),
        )

    @property
    def is_time_independent(self) -> bool:
        return (
            all(p.is_constant for p in self.linear)
            and self.scalar.is_constant
            and all(t.offset.is_constant for t in self.potentials)
        )

    def with_potentials(self, *terms: PotentialTerm) -> "QuadraticHamiltonian":
        return replace(self, potentials=self.potentials + tuple(terms))

    def folded_linear(self) -> tuple[np.ndarray, Poly]:
        """(b_eff, c_eff) with all linear potential terms folded in.

        Raises NonQuadraticError when a nonlinear profile is present.
        """
        b = self.linear.copy()
        c = self.scalar
        for term in self.potentials:
            if not term.profile.is_linear:
                raise NonQuadraticError(
                    f"potential {term.profile.name!r} is not linear"
                )
            b = b + term.profile.slope * term.vector
            c = c + term.profile.slope * term.offset
        return poly_vector(b), c


def kinetic_hamiltonian(particles: Sequence[ParticleSpec]) -> QuadraticHamiltonian:
    """Sum of p^2/2m terms for the given particles."""
    cs = CoordinateSystem.for_particles(particles)
    a = zeros_matrix(cs.dim)
    for p in particles:
        i = cs.momentum_index(p.label)
        a[i, i] = 1 / p.mass
    return QuadraticHamiltonian.build(cs, quadratic=a)


def two_body_hamiltonian(
    frame: ParticleSpec, particle: ParticleSpec, profile: PotentialProfile | None = None
) -> QuadraticHamiltonian:
    """Lab description of a frame body in a potential plus a free particle."""
    h = kinetic_hamiltonian([frame, particle])
    if profile is not None:
        h = h.with_potentials(
            potential_on_positions(h.cs, {frame.label: 1}, profile)
        )
    return h


def three_body_hamiltonian(
    frame1: ParticleSpec,
    frame2: ParticleSpec,
    particle: ParticleSpec,
    profile: PotentialProfile | None = None,
) -> QuadraticHamiltonian:
    """Lab description of two frame bodies coupled by V(X2 - X1) plus a free particle."""
    h = kinetic_hamiltonian([frame1, frame2, particle])
    if profile is not None:
        h = h.with_potentials(
            potential_on_positions(
                h.cs, {frame2.label: 1, frame1.label: -1}, profile
            )
        )
    return h


def coefficients_equal(h1: QuadraticHamiltonian, h2: QuadraticHamiltonian) -> bool:
    """Exact coefficient-level equality (potentials compared structurally)."""
    if h1.cs.dim != h2.cs.dim or len(h1.potentials) != len(h2.potentials):
        return False
    if not (h1.quadratic == h2.quadratic).all():
        return False
    if not all(a == b for a, b in zip(h1.linear, h2.linear)):
        return False
    if h1.scalar != h2.scalar:
        return False
    for t1, t2 in zip(h1.potentials, h2.potentials):
        if not (t1.vector == t2.vector).all():
            return False
        if t1.offset != t2.offset or t1.profile.slope != t2.profile.slope:
            return False
    return True


# ---------------------------------------------------------------------------
# Derived masses
# ---------------------------------------------------------------------------


def reduced_mass(a: Rational, b: Rational) -> Fraction:
    a, b = as_fraction(a), as_fraction(b)
    return a * b / (a + b)


@dataclass(frozen=True)
class DerivedMasses:
    """Mass combinations of the three-body frame problem (all exact)."""

    total: Fraction  # M1 + M2 + m
    relative: Fraction  # m M1 / (m + M1)
    pair: Fraction  # M1 M2 / (M1 + M2)
    boost_relative: Fraction  # m M2 / (m + M2)
    boost_pair: Fraction  # M1 (m + M2) / (M1 + m + M2)
    coupling: Fraction  # M1 M2 m / (total * pair * relative)

    @classmethod
    def for_three_body(cls, m1: Rational, m2: Rational, m: Rational) -> "DerivedMasses":
        m1, m2, m = as_fraction(m1), as_fraction(m2), as_fraction(m)
        total = m1 + m2 + m
        rel = reduced_mass(m, m1)
        pair = reduced_mass(m1, m2)
        return cls(
            total=total,
            relative=rel,
            pair=pair,
            boost_relative=reduced_mass(m, m2),
            boost_pair=reduced_mass(m1, m + m2),
            coupling=m1 * m2 * m / (total * pair * rel),
        )


# ---------------------------------------------------------------------------
# Affine frame maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AffineFrameMap:
    """r' = S r + d(t), mapping source coordinates to target coordinates."""

    matrix: np.ndarray
    offset: np.ndarray
    source: CoordinateSystem
    target: CoordinateSystem

    def __post_init__(self):
        object.__setattr__(self, "matrix", rational_matrix(self.matrix))
        object.__setattr__(self, "offset", poly_vector(self.offset))
        n = self.source.dim
        if self.target.dim != n:
            raise DimensionError("source and target dimensions differ")
        if self.matrix.shape != (n, n) or self.offset.shape != (n,):
            raise DimensionError("map shapes do not match the coordinates")

    @property
    def dim(self) -> int:
        return self.source.dim

    @property
    def is_time_independent(self) -> bool:
        return all(p.is_constant for p in self.offset)

    @property
    def jacobian(self) -> Fraction:
        """|det| of the position block (configuration-space volume scaling)."""
        pos = [i for i, (_, kind) in enumerate(self.source.axes) if kind == POSITION]
        tpos = [i for i, (_, kind) in enumerate(self.target.axes) if kind == POSITION]
        block = self.matrix[np.ix_(tpos, pos)]
        return abs(exact_det(block))

    def inverse(self) -> "AffineFrameMap":
        sinv = exact_inverse(self.matrix)
        return AffineFrameMap(
            matrix=sinv,
            offset=-(sinv @ self.offset),
            source=self.target,
            target=self.source,
        )

    def constant_offset(self) -> np.ndarray:
        if not self.is_time_independent:
            raise ValueError("offset is time-dependent")
        return rational_vector([p.constant_value() for p in self.offset])

    def offset_at(self, t) -> np.ndarray:
        return np.array([p(t) for p in self.offset], dtype=object)


def check_canonical(fmap: AffineFrameMap) -> tuple[bool, np.ndarray]:
    """True iff S J S^T = J exactly; also returns the witness S J S^T - J."""
    j = symplectic_form(fmap.source)
    witness = fmap.matrix @ j @ fmap.matrix.T - j
    ok = all(witness[i, j2] == 0 for i in range(fmap.dim) for j2 in range(fmap.dim))
    return ok, witness


def mixed_commutator(
    map_a: AffineFrameMap, row_a: int, map_b: AffineFrameMap, row_b: int
) -> Fraction:
    """Coefficient of i*hbar in the commutator of two transformed axes.

    Both axes are expanded in the shared source coordinates, where the
    canonical commutators hold, so the result is u^T J w for the two rows.
    """
    if map_a.source != map_b.source:
        raise DimensionError("maps must share the source coordinate system")
    j = symplectic_form(map_a.source)
    u = map_a.matrix[row_a]
    w = map_b.matrix[row_b]
    return u @ (j @ w)


# -- named transformations ---------------------------------------------------


def _one_body_map(particle, traj, with_kick: bool) -> AffineFrameMap:
    cs = CoordinateSystem.for_particles([particle])
    d = [-traj.position(), Poly()]
    if with_kick:
        d[1] = -(particle.mass * traj.velocity())
    return AffineFrameMap(identity_matrix(2), d, cs, cs.primed())


def _pair_relative_rows(m_frame: Fraction, m_particle: Fraction):
    mt = m_frame + m_particle
    return [
        [m_frame / mt, 0, m_particle / mt, 0],
        [0, 1, 0, 1],
        [-1, 0, 1, 0],
        [0, -m_particle / mt, 0, m_frame / mt],
    ]


def builtin_map(
    name: str, particles: Sequence[ParticleSpec], traj: FrameTrajectory | None = None
) -> AffineFrameMap:
    """Construct one of the named frame transformations.

    Names and arities:
      shift_only (1)         x' = x - X(t), p' = p
      galilei_full (1)       x' = x - X(t), p' = p - m*Xdot(t)
      aharonov_kaufherr (2)  x' = x - X, P' = P + p, mass independent
      relative_cm (2)        center of mass + true relative pair
      set1 (3)               relative positions (X2 - X1, x - X1)
      set2 (3)               relative momenta, rescaled positions
      double_boost (2)       relative_cm applied to a frame's own pair
    """
    arity = {
        "shift_only": 1,
        "galilei_full": 1,
        "aharonov_kaufherr": 2,
        "relative_cm": 2,
        "set1": 3,
        "set2": 3,
        "double_boost": 2,
    }
    if name not in arity:
        raise ValueError(f"unknown map {name!r}")
    if len(particles) != arity[name]:
        raise ArityError(f"{name} needs {arity[name]} particles, got {len(particles)}")

    if name in ("shift_only", "galilei_full"):
        if traj is None:
            raise MissingTrajectoryError(f"{name} needs a frame trajectory")
        return _one_body_map(particles[0], traj, with_kick=(name == "galilei_full"))

    cs = CoordinateSystem.for_particles(particles)
    zero = poly_vector([0] * cs.dim)

    if name == "aharonov_kaufherr":
        rows = [
            [1, 0, 0, 0],
            [0, 1, 0, 1],
            [-1, 0, 1, 0],
            [0, 0, 0, 1],
        ]
        return AffineFrameMap(rational_matrix(rows), zero, cs, cs.primed())

    if name in ("relative_cm", "double_boost"):
        rows = _pair_relative_rows(particles[0].mass, particles[1].mass)
        return AffineFrameMap(rational_matrix(rows), zero, cs, cs.primed())

    m1, m2, m = (p.mass for p in particles)
    mt = m1 + m2 + m
    if name == "set1":
        rows = [
            [m1 / mt, 0, m2 / mt, 0, m / mt, 0],
            [0, 1, 0, 1, 0, 1],
            [-1, 0, 1, 0, 0, 0],
            [0, -m2 / mt, 0, 1 - m2 / mt, 0, -m2 / mt],
            [-1, 0, 0, 0, 1, 0],
            [0, -m / mt, 0, -m / mt, 0, 1 - m / mt],
        ]
    else:  # set2
        mu = reduced_mass(m, m1)
        mu2 = reduced_mass(m1, m2)
        rows = [
            [m1 / mt, 0, m2 / mt, 0, m / mt, 0],
            [0, 1, 0, 1, 0, 1],
            [-(m2 / mu2) * (m1 / mt), 0, (m2 / mu2) * (1 - m2 / mt), 0,
             -(m2 / mu2) * (m / mt), 0],
            [0, -mu2 / m1, 0, mu2 / m2, 0, 0],
            [-(m / mu) * (m1 / mt), 0, -(m / mu) * (m2 / mt), 0,
             (m / mu) * (1 - m / mt), 0],
            [0, -mu / m1, 0, 0, 0, mu / m],
        ]
    return AffineFrameMap(rational_matrix(rows), zero, cs, cs.primed())


# ---------------------------------------------------------------------------
# Hamiltonian transformation
# ---------------------------------------------------------------------------


def conjugate_hamiltonian(
    h: QuadraticHamiltonian, fmap: AffineFrameMap
) -> QuadraticHamiltonian:
    """Rewrite H exactly in the target coordinates of a static map.

    Substitutes r = S^-1 (r' - d) into the quadratic form, the linear term,
    the scalar, and every potential argument.
    """
    if h.cs != fmap.source:
        raise DimensionError("Hamiltonian and map source coordinates differ")
    if not fmap.is_time_independent:
        raise ValueError(
            "map offset is time-dependent; use passive_hamiltonian_timedep"
        )
    t_inv = exact_inverse(fmap.matrix)
    e = -(t_inv @ fmap.offset_at(Fraction(0)))
    a_e = h.quadratic @ e
    new_a = t_inv.T @ h.quadratic @ t_inv
    new_b = t_inv.T @ (a_e + h.linear)
    new_c = h.scalar + (h.linear @ e) + (e @ a_e) * Fraction(1, 2)
    new_terms = []
    for term in h.potentials:
        new_vec = t_inv.T @ term.vector
        for k, (_, kind) in enumerate(fmap.target.axes):
            if kind == MOMENTUM and new_vec[k] != 0:
                raise ValueError(
                    "potential argument maps onto momenta under this transformation"
                )
        new_terms.append(
            PotentialTerm(new_vec, term.profile, term.offset + (term.vector @ e))
        )
    return QuadraticHamiltonian(
        cs=fmap.target,
        quadratic=new_a,
        linear=new_b,
        scalar=new_c,
        potentials=tuple(new_terms),
    )


def restrict_hamiltonian(
    h: QuadraticHamiltonian, labels: Sequence[str]
) -> QuadraticHamiltonian:
    """Drop decoupled particles, keeping the sector of the given labels.

    Valid only when the quadratic form has no cross terms between kept and
    dropped axes and no potential touches a dropped axis.
    """
    sub = h.cs.subsystem(labels)
    keep = [h.cs.index(lbl, kind) for lbl, kind in sub.axes]
    drop = [i for i in range(h.cs.dim) if i not in keep]
    for i in keep:
        for j in drop:
            if h.quadratic[i, j] != 0:
                raise ValueError("kept sector couples to a dropped axis")
    terms = []
    for term in h.potentials:
        if any(term.vector[j] != 0 for j in drop):
            raise ValueError("a potential touches a dropped axis")
        terms.append(PotentialTerm(term.vector[keep], term.profile, term.offset))
    return QuadraticHamiltonian(
        cs=sub,
        quadratic=h.quadratic[np.ix_(keep, keep)],
        linear=h.linear[keep],
        scalar=h.scalar,
        potentials=tuple(terms),
    )


def passive_hamiltonian_timedep(
    h: QuadraticHamiltonian, gen: WeylElement
) -> QuadraticHamiltonian:
    """Passive transformed Hamiltonian for a time-dependent displacement.

    For a generator with shift X(t), kick K(t), and scalar phase phi(t)
    acting on one particle's pair, the coordinates move as x' = x - X,
    p' = p - K, and the transformed Hamiltonian is the old one rewritten in
    the new coordinates plus the generator drift

        Kdot * x' - Xdot * p' + (hbar * phidot - Xdot * K).

    With K = 0, phi = 0 this leaves the -Xdot p' gauge; with K = m*Xdot and
    phi the dynamical phase it leaves the uniform-force gauge m*Xddot x'.
    """
    if not isinstance(gen, WeylElement):
        raise UnsupportedGeneratorError("generator must be a displacement element")
    label = gen.mass_tag
    if label is None:
        if h.cs.n_particles != 1:
            raise UnsupportedGeneratorError(
                "generator must name its particle via mass_tag"
            )
        label = h.cs.particles[0]
    if label not in h.cs.particles:
        raise UnsupportedGeneratorError(f"unknown particle {label!r}")

    xi = h.cs.position_index(label)
    pi = h.cs.momentum_index(label)
    delta = poly_vector([0] * h.cs.dim)
    delta[xi] = gen.shift
    delta[pi] = gen.kick

    a_delta = h.quadratic @ delta
    new_b = h.linear + a_delta
    new_c = h.scalar + (h.linear @ delta) + (delta @ a_delta) * Fraction(1, 2)
    new_terms = tuple(
        PotentialTerm(t.vector, t.profile, t.offset + (t.vector @ delta))
        for t in h.potentials
    )

    new_b[xi] = new_b[xi] + gen.kick.derivative()
    new_b[pi] = new_b[pi] - gen.shift.derivative()
    new_c = new_c + gen.hbar * gen.phase.derivative() - gen.shift.derivative() * gen.kick

    return QuadraticHamiltonian(
        cs=h.cs.primed(),
        quadratic=h.quadratic,
        linear=new_b,
        scalar=new_c,
        potentials=new_terms,
    )


def alpha_hamiltonian(
    particle: ParticleSpec,
    traj: FrameTrajectory,
    alpha: Rational,
    units: Units = Units(),
) -> QuadraticHamiltonian:
    """Gauge-interpolating moving-frame Hamiltonian

        H'(alpha) = (p' - alpha*m*Xdot)^2 / 2m + (1 - alpha)*m*Xddot*x'.

    alpha = 1 puts the frame motion entirely into a vector-potential-like
    kick; alpha = 0 puts it entirely into a uniform force.
    """
    alpha = as_fraction(alpha)
    m = particle.mass
    cs = CoordinateSystem((particle.label + "'",))
    a = zeros_matrix(2)
    a[1, 1] = 1 / m
    xdot = traj.velocity()
    b = [
        (1 - alpha) * m * traj.acceleration(),
        -alpha * xdot,
    ]
    c = alpha * alpha * m * (xdot * xdot) * Fraction(1, 2)
    return QuadraticHamiltonian.build(cs, quadratic=a, linear=b, scalar=c)


# ---------------------------------------------------------------------------
# Symbolic Heisenberg dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearForm:
    """c^T r + g(t): an exact linear observable expression."""

    cs: CoordinateSystem
    coefficients: np.ndarray
    constant: Poly

    def __post_init__(self):
        object.__setattr__(self, "coefficients", rational_vector(self.coefficients))
        object.__setattr__(self, "constant", as_poly(self.constant))

    @property
    def is_state_independent(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def evaluate(self, mean=None, t=0):
        value = self.constant(t)
        if mean is not None:
            for c, mu in zip(self.coefficients, mean):
                value = value + c * mu
        return value

    def scaled(self, factor: Rational) -> "LinearForm":
        factor = as_fraction(factor)
        return LinearForm(self.cs, factor * self.coefficients, factor * self.constant)

    def pull_back(self, fmap: AffineFrameMap) -> "LinearForm":
        """Rewrite an expression over fmap.target in fmap.source coordinates."""
        if self.cs != fmap.target:
            raise DimensionError("form does not live on the map target")
        return LinearForm(
            cs=fmap.source,
            coefficients=fmap.matrix.T @ self.coefficients,
            constant=self.constant + (self.coefficients @ fmap.offset),
        )

    def equals(self, other: "LinearForm") -> bool:
        return (
            (self.coefficients == other.coefficients).all()
            and self.constant == other.constant
        )


def _axis_vector(cs: CoordinateSystem, axis) -> np.ndarray:
    if isinstance(axis, str):
        axis = cs.position_index(axis)
    if isinstance(axis, (int, np.integer)):
        vec = rational_vector([0] * cs.dim)
        vec[int(axis)] = Fraction(1)
        return vec
    return rational_vector(axis)


def _effective_drive(h: QuadraticHamiltonian, chains: Sequence[np.ndarray]):
    """Linear drive b_eff(t) with linear potentials folded in.

    ``chains`` are the row vectors through which the answer feeds; a
    nonlinear potential is rejected only when one of them reaches it.
    """
    j = symplectic_form(h.cs)
    b_eff = h.linear.copy()
    for term in h.potentials:
        if term.profile.is_linear:
            b_eff = b_eff + term.profile.slope * term.vector
            continue
        for chain in chains:
            if chain @ (j @ term.vector) != 0:
                raise NonQuadraticError(
                    f"nonlinear potential {term.profile.name!r} drives this axis"
                )
    return poly_vector(b_eff)


def heisenberg_velocity(h: QuadraticHamiltonian, axis) -> LinearForm:
    """d<r_axis>/dt as an exact linear form in the coordinates and t."""
    u = _axis_vector(h.cs, axis)
    j = symplectic_form(h.cs)
    w = j @ h.quadratic
    b_eff = _effective_drive(h, [u])
    return LinearForm(h.cs, w.T @ u, u @ (j @ b_eff))


def heisenberg_acceleration(h: QuadraticHamiltonian, axis) -> LinearForm:
    """d^2<r_axis>/dt^2 as an exact linear form in the coordinates and t."""
    u = _axis_vector(h.cs, axis)
    j = symplectic_form(h.cs)
    w = j @ h.quadratic
    b_eff = _effective_drive(h, [u, w.T @ u])
    v = j @ b_eff
    vdot = poly_vector([p.derivative() for p in v])
    return LinearForm(
        cs=h.cs,
        coefficients=(w @ w).T @ u,
        constant=(u @ (w @ v)) + (u @ vdot),
    )


# ---------------------------------------------------------------------------
# Pretty-printing and the named-Hamiltonian catalog
# ---------------------------------------------------------------------------


def _coeff_term(coeff, symbol: str) -> str:
    if isinstance(coeff, Poly) and not coeff.is_constant:
        return f"({coeff})*{symbol}"
    value = coeff.constant_value() if isinstance(coeff, Poly) else coeff
    if value == 1:
        return symbol
    if value == -1:
        return f"-{symbol}"
    return f"({value})*{symbol}"


def format_hamiltonian(h: QuadraticHamiltonian) -> str:
    """Human-readable polynomial rendering of a quadratic Hamiltonian."""
    parts = []
    n = h.cs.dim
    for i in range(n):
        for j in range(i, n):
            coeff = h.quadratic[i, i] / 2 if i == j else h.quadratic[i, j]
            if coeff == 0:
                continue
            sym = (
                f"{h.cs.axis_symbol(i)}^2"
                if i == j
                else f"{h.cs.axis_symbol(i)}*{h.cs.axis_symbol(j)}"
            )
            parts.append(_coeff_term(coeff, sym))
    for i in range(n):
        if not h.linear[i].is_zero:
            parts.append(_coeff_term(h.linear[i], h.cs.axis_symbol(i)))
    if not h.scalar.is_zero:
        parts.append(f"({h.scalar})")
    for term in h.potentials:
        args = [
            _coeff_term(term.vector[i], h.cs.axis_symbol(i))
            for i in range(n)
            if term.vector[i] != 0
        ]
        if not term.offset.is_zero:
            args.append(f"({term.offset})")
        arg = " + ".join(args).replace("+ -", "- ")
        parts.append(f"V[{term.profile.name}]({arg})")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class CatalogEntry:
    description: str
    build: Callable[[], QuadraticHamiltonian]


def hamiltonian_catalog() -> dict:
    """Named Hamiltonians for the CLI, built from the transformation machinery."""
    units = Units()
    p = ParticleSpec("P", Fraction(1))
    s = ParticleSpec("S", Fraction(3))
    s1 = ParticleSpec("S1", Fraction(2))
    s2 = ParticleSpec("S2", Fraction(3))
    fall = FrameTrajectory.uniform_acceleration(1)
    gravity = linear_profile(-s.mass * 1, name="uniform_force")
    three_body_force = linear_profile(Fraction(1), name="uniform_force")

    def free():
        return kinetic_hamiltonian([p])

    def momentum_gauge():
        gen = WeylElement(fall.position(), Poly(), Poly(), units.hbar, p.label)
        return passive_hamiltonian_timedep(kinetic_hamiltonian([p]), gen)

    def force_gauge():
        from .weyl import weyl_from_trajectory

        return passive_hamiltonian_timedep(
            kinetic_hamiltonian([p]), weyl_from_trajectory(p, fall, units)
        )

    def interpolating():
        return alpha_hamiltonian(p, fall, Fraction(1, 2), units)

    def two_body_lab():
        return two_body_hamiltonian(s, p, gravity)

    def ak_frame():
        return conjugate_hamiltonian(
            two_body_lab(), builtin_map("aharonov_kaufherr", [s, p])
        )

    def relative_frame():
        return conjugate_hamiltonian(two_body_lab(), builtin_map("relative_cm", [s, p]))

    def three_lab():
        return three_body_hamiltonian(s1, s2, p, three_body_force)

    def set1_frame():
        return conjugate_hamiltonian(three_lab(), builtin_map("set1", [s1, s2, p]))

    def set2_frame():
        return conjugate_hamiltonian(three_lab(), builtin_map("set2", [s1, s2, p]))

    def double_boost_frame():
        reduced = restrict_hamiltonian(set1_frame(), ["S2'", "P'"])
        boost = builtin_map(
            "double_boost",
            [ParticleSpec("S2'", s2.mass), ParticleSpec("P'", p.mass)],
        )
        return conjugate_hamiltonian(reduced, boost)

    return {
        "free_particle": CatalogEntry("free particle in the lab frame", free),
        "moving_frame_momentum_gauge": CatalogEntry(
            "uniformly accelerated frame, position-only generator "
            "(frame motion enters as a momentum-linear term)",
            momentum_gauge,
        ),
        "moving_frame_force_gauge": CatalogEntry(
            "uniformly accelerated frame, full displacement generator "
            "(frame motion enters as a uniform force)",
            force_gauge,
        ),
        "interpolating_gauge": CatalogEntry(
            "gauge-interpolating moving-frame Hamiltonian at alpha = 1/2",
            interpolating,
        ),
        "two_body_lab": CatalogEntry(
            "frame body in a uniform force plus free particle, lab coordinates",
            two_body_lab,
        ),
        "aharonov_kaufherr_frame": CatalogEntry(
            "two-body Hamiltonian in Aharonov-Kaufherr frame coordinates", ak_frame
        ),
        "two_body_relative": CatalogEntry(
            "two-body Hamiltonian in center-of-mass/relative coordinates",
            relative_frame,
        ),
        "three_body_lab": CatalogEntry(
            "two coupled frame bodies plus free particle, lab coordinates", three_lab
        ),
        "three_body_set1_frame": CatalogEntry(
            "three-body Hamiltonian in relative-position coordinates", set1_frame
        ),
        "three_body_set2_frame": CatalogEntry(
            "three-body Hamiltonian in relative-momentum coordinates", set2_frame
        ),
        "double_boost_frame": CatalogEntry(
            "relative sector boosted to the second finite-mass frame",
            double_boost_frame,
        ),
    }
