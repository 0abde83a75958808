"""Exact propagation of Gaussian states through quadratic dynamics.

A Gaussian state is a (mean, covariance) pair over the ordered phase-space
coordinates of a CoordinateSystem. Under H = r^T A r / 2 + b(t)^T r + c the
moments obey linear equations,

    d mu / dt = J (A mu + b(t)),    d Sigma / dt = (JA) Sigma + Sigma (JA)^T,

solved with matrix exponentials when b is constant in time and with classic
fourth-order stepping otherwise. Linear potential terms are folded into b;
anything nonlinear is rejected. This engine is the scalable oracle the grid
engine is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .core import CoordinateSystem, ParticleSpec, Rational, as_fraction, symplectic_form, to_float_matrix
from .errors import DimensionError
from .frames import (
    AffineFrameMap,
    QuadraticHamiltonian,
    builtin_map,
    conjugate_hamiltonian,
    heisenberg_acceleration,
    linear_profile,
    restrict_hamiltonian,
    three_body_hamiltonian,
)
from .grid import fd_acceleration


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of a Gaussian state at one instant."""

    cs: CoordinateSystem
    mean: np.ndarray
    cov: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float))
        n = self.cs.dim
        if self.mean.shape != (n,) or self.cov.shape != (n, n):
            raise DimensionError("moment shapes do not match the coordinates")

    @classmethod
    def pure_packet(
        cls,
        cs: CoordinateSystem,
        centers: Sequence[float],
        momenta: Sequence[float],
        widths: Sequence[float],
        hbar: float = 1.0,
    ) -> "GaussianState":
        """Minimum-uncertainty product packet: Var(x) = w^2, Var(p) = hbar^2/4w^2."""
        n = cs.n_particles
        if not (len(centers) == len(momenta) == len(widths) == n):
            raise DimensionError("need one (center, momentum, width) triple per particle")
        mean = np.zeros(2 * n)
        cov = np.zeros((2 * n, 2 * n))
        for k in range(n):
            mean[2 * k] = centers[k]
            mean[2 * k + 1] = momenta[k]
            cov[2 * k, 2 * k] = widths[k] ** 2
            cov[2 * k + 1, 2 * k + 1] = hbar**2 / (4.0 * widths[k] ** 2)
        return cls(cs, mean, cov, 0.0)

    def validate(self, hbar: float = 1.0, tol: float = 1e-10) -> None:
        """Check symmetry, positivity, and the uncertainty bound Sigma + i*hbar*J/2 >= 0."""
        scale = max(1.0, float(np.max(np.abs(self.cov))))
        if np.max(np.abs(self.cov - self.cov.T)) > tol * scale:
            raise ValueError("covariance is not symmetric")
        if np.min(np.linalg.eigvalsh(self.cov)) <= 0:
            raise ValueError("covariance is not positive definite")
        j = to_float_matrix(symplectic_form(self.cs))
        bound = self.cov + 0.5j * hbar * j
        if np.min(np.linalg.eigvalsh(bound)) < -tol * scale:
            raise ValueError("uncertainty bound violated")


def map_state(state: GaussianState, fmap: AffineFrameMap) -> GaussianState:
    """Exact affine moment transport mu' = S mu + d(t), Sigma' = S Sigma S^T."""
    if state.cs != fmap.source:
        raise DimensionError("state does not live on the map source")
    s = to_float_matrix(fmap.matrix)
    d = np.array([float(p(state.time)) for p in fmap.offset])
    return GaussianState(
        cs=fmap.target,
        mean=s @ state.mean + d,
        cov=s @ state.cov @ s.T,
        time=state.time,
    )


@dataclass(frozen=True, eq=False)
class GaussianTrajectory:
    cs: CoordinateSystem
    times: np.ndarray
    means: np.ndarray  # (samples, 2N)
    covs: np.ndarray  # (samples, 2N, 2N)

    def mean_series(self, axis) -> np.ndarray:
        if isinstance(axis, str):
            axis = self.cs.position_index(axis)
        return self.means[:, axis]

    def state_at(self, index: int) -> GaussianState:
        return GaussianState(self.cs, self.means[index], self.covs[index], float(self.times[index]))

    @property
    def final_state(self) -> GaussianState:
        return self.state_at(-1)

    def to_csv(self, path) -> None:
        """Columns: t, the mean of every axis, then vech(Sigma) taken as the
        lower triangle stacked column by column."""
        n = self.cs.dim
        header = ["t"] + [f"mu_{self.cs.axis_symbol(i)}" for i in range(n)]
        pairs = [(i, j) for j in range(n) for i in range(j, n)]
        header += [f"cov_{i + 1}_{j + 1}" for i, j in pairs]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for k in range(len(self.times)):
                row = [repr(float(self.times[k]))]
                row += [repr(float(v)) for v in self.means[k]]
                row += [repr(float(self.covs[k][i, j])) for i, j in pairs]
                fh.write(",".join(row) + "\n")


def evolve(
    state: GaussianState,
    h: QuadraticHamiltonian,
    duration: float,
    n_samples: int = 121,
    hbar: float = 1.0,
    rk_substep: float = 1e-3,
    validate: bool = True,
) -> GaussianTrajectory:
    """Moment trajectory under a quadratic Hamiltonian with linear potentials.

    The covariance and, for a time-independent drive, the mean are obtained
    from matrix exponentials evaluated directly at every sample time; a
    polynomial drive b(t) is integrated with fourth-order Runge-Kutta using
    substeps no longer than ``rk_substep``.
    """
    if state.cs != h.cs:
        raise DimensionError("state and Hamiltonian coordinates differ")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    b_eff, _ = h.folded_linear()
    a = to_float_matrix(h.quadratic)
    j = to_float_matrix(symplectic_form(h.cs))
    w = j @ a
    n = h.cs.dim

    times = state.time + np.linspace(0.0, duration, n_samples)
    covs = np.empty((n_samples, n, n))
    means = np.empty((n_samples, n))
    means[0] = state.mean
    static_drive = all(p.is_constant for p in b_eff)

    for k, t in enumerate(times):
        e = expm(w * (t - state.time))
        covs[k] = e @ state.cov @ e.T

    if static_drive:
        drive = j @ np.array([float(p(0.0)) for p in b_eff])
        aug = np.zeros((n + 1, n + 1))
        aug[:n, :n] = w
        aug[:n, n] = drive
        init = np.concatenate([state.mean, [1.0]])
        for k, t in enumerate(times):
            means[k] = (expm(aug * (t - state.time)) @ init)[:n]
    else:
        def rhs(t, mu):
            bt = np.array([float(p(t)) for p in b_eff])
            return w @ mu + j @ bt

        mu = state.mean.copy()
        for k in range(1, n_samples):
            t0, t1 = float(times[k - 1]), float(times[k])
            nsub = max(1, int(np.ceil((t1 - t0) / rk_substep)))
            hstep = (t1 - t0) / nsub
            for s in range(nsub):
                ts = t0 + s * hstep
                k1 = rhs(ts, mu)
                k2 = rhs(ts + 0.5 * hstep, mu + 0.5 * hstep * k1)
                k3 = rhs(ts + 0.5 * hstep, mu + 0.5 * hstep * k2)
                k4 = rhs(ts + hstep, mu + hstep * k3)
                mu = mu + (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            means[k] = mu

    traj = GaussianTrajectory(h.cs, times, means, covs)
    if validate:
        traj.state_at(0).validate(hbar)
        traj.state_at(n_samples // 2).validate(hbar)
        traj.final_state.validate(hbar)
    return traj


def moment_transport_gap(
    source_traj: GaussianTrajectory,
    target_traj: GaussianTrajectory,
    fmap: AffineFrameMap,
) -> float:
    """Largest moment mismatch between map-then-evolve and evolve-then-map.

    The operational passive/active equivalence: transporting the source
    trajectory through the (static) map must reproduce the trajectory
    evolved under the conjugated Hamiltonian.
    """
    s = to_float_matrix(fmap.matrix)
    d = np.array([float(p(0.0)) for p in fmap.offset])
    gap = 0.0
    for k in range(len(source_traj.times)):
        mean_gap = np.max(np.abs(s @ source_traj.means[k] + d - target_traj.means[k]))
        cov_gap = np.max(np.abs(s @ source_traj.covs[k] @ s.T - target_traj.covs[k]))
        gap = max(gap, float(mean_gap), float(cov_gap))
    return gap


# ---------------------------------------------------------------------------
# The boost between two finite-mass frames
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DoubleBoostReport:
    """Particle accelerations seen from each of the two finite-mass frames."""

    first_frame_acceleration: tuple[float, float]  # (value, fd error estimate)
    first_frame_symbolic: Fraction
    second_frame_acceleration: tuple[float, float]
    second_frame_symbolic: Fraction
    transport_gap: float
    first_hamiltonian: QuadraticHamiltonian
    second_hamiltonian: QuadraticHamiltonian
    first_trajectory: GaussianTrajectory
    second_trajectory: GaussianTrajectory


def double_boost_check(
    m1: Rational,
    m2: Rational,
    m: Rational,
    slope: Rational = 0,
    initial: GaussianState | None = None,
    duration: float = 2.0,
    n_samples: int = 21,
    hbar: float = 1.0,
) -> DoubleBoostReport:
    """Evolve the relative sector seen from the first frame, boost the
    description to the second frame, and compare the particle accelerations.

    ``slope`` is the uniform-force coefficient of the potential between the
    two frame bodies (zero for free motion, in which case both accelerations
    must vanish).
    """
    m1, m2, m = as_fraction(m1), as_fraction(m2), as_fraction(m)
    s1 = ParticleSpec("S1", m1)
    s2 = ParticleSpec("S2", m2)
    p = ParticleSpec("P", m)
    slope = as_fraction(slope)
    profile = linear_profile(slope) if slope != 0 else None
    lab = three_body_hamiltonian(s1, s2, p, profile)
    first = restrict_hamiltonian(
        conjugate_hamiltonian(lab, builtin_map("set1", [s1, s2, p])), ["S2'", "P'"]
    )
    boost = builtin_map(
        "double_boost", [ParticleSpec("S2'", m2), ParticleSpec("P'", m)]
    )
    second = conjugate_hamiltonian(first, boost)

    if initial is None:
        initial = GaussianState.pure_packet(
            first.cs, centers=(0.5, -0.25), momenta=(0.125, 0.25), widths=(1.0, 1.0), hbar=hbar
        )
    if initial.cs != first.cs:
        raise DimensionError("initial state must live on the first-frame coordinates")

    traj1 = evolve(initial, first, duration, n_samples, hbar)
    traj2 = evolve(map_state(initial, boost), second, duration, n_samples, hbar)
    dt = float(traj1.times[1] - traj1.times[0])

    form1 = heisenberg_acceleration(first, first.cs.position_index("P'"))
    form2 = heisenberg_acceleration(second, second.cs.position_index("P''"))
    if not (form1.is_state_independent and form2.is_state_independent):
        raise RuntimeError("accelerations should be state independent here")

    return DoubleBoostReport(
        first_frame_acceleration=fd_acceleration(traj1.mean_series("P'"), dt),
        first_frame_symbolic=form1.constant.constant_value(),
        second_frame_acceleration=fd_acceleration(traj2.mean_series("P''"), dt),
        second_frame_symbolic=form2.constant.constant_value(),
        transport_gap=moment_transport_gap(traj1, traj2, boost),
        first_hamiltonian=first,
        second_hamiltonian=second,
        first_trajectory=traj1,
        second_trajectory=traj2,
    )
