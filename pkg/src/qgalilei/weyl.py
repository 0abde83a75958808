"""Exact algebra of displacement unitaries with scalar phases.

Normal-ordered convention, fixed once for the whole package:

    U = exp(i*phase) * exp(-i*shift*p/hbar) * exp(i*kick*x/hbar)

so U moves a particle's coordinates as x -> x - shift, p -> p - kick.
Commuting exp(i*K2*x/hbar) through exp(-i*X1*p/hbar) with [x, p] = i*hbar
produces exp(i*K2*X1/hbar), hence the composition law

    U2 * U1 = (shift1 + shift2, kick1 + kick2,
               phase1 + phase2 + kick2*shift1/hbar).

Shift, kick, and phase are exact rational polynomials in t, so cocycle
identities can be checked as polynomial identities rather than at sampled
times. All elements act affinely on phase space with a trivial linear part;
a product whose net shift and kick vanish is therefore a pure global phase
and leaves every expectation value unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    FrameTrajectory,
    ParticleSpec,
    Poly,
    Rational,
    Units,
    as_fraction,
    as_poly,
)
from .errors import NonCyclicError


@dataclass(frozen=True)
class WeylElement:
    """A displacement unitary in normal-ordered form."""

    shift: Poly
    kick: Poly
    phase: Poly
    hbar: Fraction = Fraction(1)
    mass_tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "shift", as_poly(self.shift))
        object.__setattr__(self, "kick", as_poly(self.kick))
        object.__setattr__(self, "phase", as_poly(self.phase))
        object.__setattr__(self, "hbar", as_fraction(self.hbar))
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def identity(cls, hbar: Rational = 1) -> "WeylElement":
        return cls(Poly(), Poly(), Poly(), as_fraction(hbar))

    @property
    def is_identity(self) -> bool:
        return self.shift.is_zero and self.kick.is_zero and self.phase.is_zero

    def at(self, t):
        """(shift, kick, phase) evaluated at time t."""
        return self.shift(t), self.kick(t), self.phase(t)

    def __matmul__(self, other: "WeylElement") -> "WeylElement":
        return compose(self, other)


def compose(u2: WeylElement, u1: WeylElement) -> WeylElement:
    """Operator product u2 * u1 (u1 acts first)."""
    if u2.hbar != u1.hbar:
        raise ValueError("cannot compose elements with different hbar")
    tag = u1.mass_tag if u1.mass_tag == u2.mass_tag else None
    return WeylElement(
        shift=u1.shift + u2.shift,
        kick=u1.kick + u2.kick,
        phase=u1.phase + u2.phase + u2.kick * u1.shift / u1.hbar,
        hbar=u1.hbar,
        mass_tag=tag,
    )


def inverse(u: WeylElement) -> WeylElement:
    return WeylElement(
        shift=-u.shift,
        kick=-u.kick,
        phase=-u.phase + u.kick * u.shift / u.hbar,
        hbar=u.hbar,
        mass_tag=u.mass_tag,
    )


def compose_all(elements: Sequence[WeylElement], hbar: Rational = 1) -> WeylElement:
    """Compose a chain given in application order (first applied first)."""
    result = WeylElement.identity(elements[0].hbar if elements else hbar)
    for element in elements:
        result = compose(element, result)
    return result


def weyl_from_trajectory(
    particle: ParticleSpec, traj: FrameTrajectory, units: Units = Units()
) -> WeylElement:
    """The frame-change element for a particle and a moving frame X(t).

    Carries shift X(t), kick m*Xdot(t), and the dynamical phase
    (m/2hbar) * integral of Xdot^2, so both position and momentum are
    referred to the moving frame.
    """
    m = particle.mass
    return WeylElement(
        shift=traj.position(),
        kick=m * traj.velocity(),
        phase=(m / (2 * units.hbar)) * traj.speed_squared_integral(),
        hbar=units.hbar,
        mass_tag=particle.label,
    )


@dataclass(frozen=True)
class CycleReport:
    """Net effect of a chain of displacement elements.

    The chain is cyclic iff net shift and net kick vanish identically in t;
    the composed element is then a pure global phase.
    """

    net_shift: Poly
    net_kick: Poly
    global_phase: Poly
    per_mass_phases: dict

    @property
    def is_cyclic(self) -> bool:
        return self.net_shift.is_zero and self.net_kick.is_zero


def cycle_report(elements: Sequence[WeylElement]) -> CycleReport:
    composed = compose_all(elements)
    return CycleReport(
        net_shift=composed.shift,
        net_kick=composed.kick,
        global_phase=composed.phase,
        per_mass_phases={},
    )


def bargmann_factors(
    a: Rational, v: Rational, particle: ParticleSpec, units: Units = Units()
) -> list[WeylElement]:
    """Translation / boost / inverse translation / inverse boost, in
    application order, each as a phase-carrying frame-change element."""
    a = as_fraction(a)
    v = as_fraction(v)
    return [
        weyl_from_trajectory(particle, FrameTrajectory.constant_offset(a), units),
        weyl_from_trajectory(particle, FrameTrajectory.uniform_velocity(v), units),
        weyl_from_trajectory(particle, FrameTrajectory.constant_offset(-a), units),
        weyl_from_trajectory(particle, FrameTrajectory.uniform_velocity(-v), units),
    ]


def bargmann_cycle(
    a: Rational, v: Rational, m: Rational, units: Units = Units()
) -> Fraction:
    """Scalar phase of the closed translation-boost-translation-boost chain.

    The four factors undo each other on phase space, so the composed element
    must be a pure phase; the phase comes out as a*v*m/hbar.
    """
    particle = ParticleSpec("cycle", as_fraction(m))
    composed = compose_all(bargmann_factors(a, v, particle, units))
    if not (composed.shift.is_zero and composed.kick.is_zero):
        raise NonCyclicError(
            f"net shift {composed.shift} / net kick {composed.kick} do not vanish"
        )
    return composed.phase.constant_value()


def bargmann_cycle_report(
    a: Rational, v: Rational, masses: Iterable[Rational], units: Units = Units()
) -> CycleReport:
    """Run the closed chain for several mass channels of the same geometry."""
    per_mass = {}
    net_shift = net_kick = global_phase = Poly()
    for m in masses:
        m = as_fraction(m)
        particle = ParticleSpec(f"m={m}", m)
        composed = compose_all(bargmann_factors(a, v, particle, units))
        if not (composed.shift.is_zero and composed.kick.is_zero):
            raise NonCyclicError("chain is not cyclic")
        per_mass[m] = composed.phase.constant_value()
        net_shift, net_kick = composed.shift, composed.kick
        global_phase = composed.phase
    return CycleReport(net_shift, net_kick, global_phase, per_mass)


def mass_superposition_relative_phase(
    a: Rational, v: Rational, m1: Rational, m2: Rational, units: Units = Units()
) -> Fraction:
    """Relative phase a*v*(m2 - m1)/hbar picked up between two mass channels."""
    return bargmann_cycle(a, v, m2, units) - bargmann_cycle(a, v, m1, units)


def cyclic_expectation_invariance(elements, state, observable, t=None):
    """Apply a cyclic chain actively to a grid state and compare <obs>.

    Returns (before, after, final_state). Raises NonCyclicError when the net
    shift or kick does not vanish identically.
    """
    from . import grid  # deferred: keeps the exact layer import-light

    composed = compose_all(elements)
    if not (composed.shift.is_zero and composed.kick.is_zero):
        raise NonCyclicError("net shift/kick of the chain do not vanish")
    before = grid.expectation(state, observable)
    current = state
    for element in elements:
        current = grid.apply_weyl(current, element, t)
    after = grid.expectation(current, observable)
    return before, after, current


def phase_mod_two_pi(value) -> float:
    """Fold an exact phase (radians) into (-pi, pi] for reporting."""
    folded = math.remainder(float(value), math.tau)
    if folded <= -math.pi:
        folded += math.tau
    return folded
