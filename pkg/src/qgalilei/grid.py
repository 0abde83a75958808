"""Wavefunction dynamics on uniform periodic grids.

Split-step (Strang) propagation for Hamiltonians that separate into a
momentum-diagonal part (any quadratic form in the momenta plus possibly
time-dependent linear terms, including cross couplings between particles)
and a position-diagonal part (quadratic/linear position terms plus 1D
potential profiles):

    psi -> exp(-i V dt / 2 hbar) . IFFT exp(-i T dt / hbar) FFT . exp(-i V dt / 2 hbar)

Time-dependent coefficients are sampled at the midpoint of each step, which
keeps the scheme second order in dt (verified by the step-halving test in
the test suite). Position shifts are applied as exact cyclic permutations
whenever the shift is an integer number of cells, so closed transformation
chains return states bit-for-bit up to floating-point phase rounding.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, replace
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import (
    BoundaryBreachError,
    DimensionError,
    GridMismatchError,
    InsufficientSamplesError,
    NonSeparableError,
    PacketTooWideError,
)
from .frames import QuadraticHamiltonian
from .weyl import WeylElement

logger = logging.getLogger(__name__)

MARGIN_SIGMAS = 8.0


@dataclass(frozen=True)
class GridAxis:
    """One uniform periodic axis: points power-of-two cells on [minimum, maximum)."""

    minimum: float
    maximum: float
    points: int

    def __post_init__(self):
        if self.points <= 0 or self.points & (self.points - 1):
            raise ValueError("points must be a power of two")
        if not self.maximum > self.minimum:
            raise ValueError("empty axis extent")

    @property
    def spacing(self) -> float:
        return (self.maximum - self.minimum) / self.points

    def coordinates(self) -> np.ndarray:
        return self.minimum + self.spacing * np.arange(self.points)

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[GridAxis, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))

    @classmethod
    def cube(cls, minimum: float, maximum: float, points: int, ndim: int = 1):
        return cls(tuple(GridAxis(minimum, maximum, points) for _ in range(ndim)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.points for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        out = 1.0
        for ax in self.axes:
            out *= ax.spacing
        return out


@dataclass(frozen=True, eq=False)
class GridState:
    spec: GridSpec
    psi: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.psi.shape != self.spec.shape:
            raise DimensionError("amplitude shape does not match the grid")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2).real * self.spec.cell_volume)

    def copy(self) -> "GridState":
        return replace(self, psi=self.psi.copy())


def _axis_mesh(values: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = values.size
    return values.reshape(shape)


def make_gaussian(
    spec: GridSpec,
    centers: Sequence[float] | float,
    momenta: Sequence[float] | float,
    widths: Sequence[float] | float,
    hbar: float = 1.0,
) -> GridState:
    """Normalized product Gaussian with <x> = centers, <p> = momenta, Var(x) = widths^2."""
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    momenta = np.atleast_1d(np.asarray(momenta, dtype=float))
    widths = np.atleast_1d(np.asarray(widths, dtype=float))
    if not (len(centers) == len(momenta) == len(widths) == spec.ndim):
        raise DimensionError("need one (center, momentum, width) triple per axis")
    factors = []
    for ax, x0, p0, sigma in zip(spec.axes, centers, momenta, widths):
        if x0 - MARGIN_SIGMAS * sigma < ax.minimum or x0 + MARGIN_SIGMAS * sigma > ax.maximum:
            raise PacketTooWideError(
                f"packet at {x0} with width {sigma} breaks the "
                f"{MARGIN_SIGMAS}-sigma margin on [{ax.minimum}, {ax.maximum})"
            )
        x = ax.coordinates()
        factors.append(np.exp(-((x - x0) ** 2) / (4.0 * sigma**2) + 1j * p0 * x / hbar))
    psi = reduce(np.multiply.outer, factors)
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * spec.cell_volume)
    return GridState(spec, psi, 0.0)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

POSITION = "position"
MOMENTUM = "momentum"
POSITION_SQ = "position_sq"
MOMENTUM_SQ = "momentum_sq"
DIAGONAL = "diagonal"


@dataclass(frozen=True, eq=False)
class Observable:
    """A grid observable: x, p, x^2, p^2 along one axis, or a diagonal array."""

    kind: str
    axis: int = 0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (POSITION, MOMENTUM, POSITION_SQ, MOMENTUM_SQ, DIAGONAL):
            raise ValueError(f"unknown observable kind {self.kind!r}")
        if self.kind == DIAGONAL and self.values is None:
            raise ValueError("diagonal observable needs a values array")


def _marginal_weights(prob: np.ndarray, axis: int) -> np.ndarray:
    other = tuple(i for i in range(prob.ndim) if i != axis)
    w = prob.sum(axis=other) if other else prob
    return w / w.sum()


def expectation(state: GridState, obs: Observable, hbar: float = 1.0) -> float:
    prob = np.abs(state.psi) ** 2
    if obs.kind == DIAGONAL:
        return float(np.sum(prob * obs.values) / prob.sum())
    if obs.kind in (POSITION, POSITION_SQ):
        w = _marginal_weights(prob, obs.axis)
        x = state.spec.axes[obs.axis].coordinates()
        return float(np.sum(w * (x if obs.kind == POSITION else x**2)))
    psit = np.fft.fft(state.psi, axis=obs.axis)
    w = _marginal_weights(np.abs(psit) ** 2, obs.axis)
    p = hbar * state.spec.axes[obs.axis].wavenumbers()
    return float(np.sum(w * (p if obs.kind == MOMENTUM else p**2)))


def expectation_series(
    states: Sequence[GridState], obs: Observable, hbar: float = 1.0
) -> np.ndarray:
    return np.array([expectation(s, obs, hbar) for s in states])


def overlap(a: GridState, b: GridState) -> complex:
    return complex(np.sum(np.conj(a.psi) * b.psi) * a.spec.cell_volume)


def fidelity(a: GridState, b: GridState) -> float:
    return abs(overlap(a, b))


# ---------------------------------------------------------------------------
# Split-step propagation
# ---------------------------------------------------------------------------


class _SplitCoefficients:
    """Hamiltonian coefficients rearranged for the momentum/position split."""

    def __init__(self, h: QuadraticHamiltonian, spec: GridSpec, hbar: float):
        n = spec.ndim
        if h.cs.n_particles != n:
            raise DimensionError("Hamiltonian particle count != grid dimension")
        pos = [h.cs.position_index(lbl) for lbl in h.cs.particles]
        mom = [h.cs.momentum_index(lbl) for lbl in h.cs.particles]
        for i in pos:
            for j in mom:
                if h.quadratic[i, j] != 0:
                    raise NonSeparableError(
                        "quadratic form couples position and momentum"
                    )
        self.app = np.array(
            [[float(h.quadratic[i, j]) for j in mom] for i in mom], dtype=float
        )
        self.axx = np.array(
            [[float(h.quadratic[i, j]) for j in pos] for i in pos], dtype=float
        )
        self.bp = [h.linear[i] for i in mom]
        self.bx = [h.linear[i] for i in pos]
        self.c = h.scalar
        self.pots = [
            (
                np.array([float(t.vector[i]) for i in pos]),
                t.offset,
                t.profile.func,
            )
            for t in h.potentials
        ]
        self.static = (
            all(p.is_constant for p in self.bp + self.bx)
            and self.c.is_constant
            and all(off.is_constant for _, off, _ in self.pots)
        )
        self._p_mesh = [
            _axis_mesh(hbar * ax.wavenumbers(), i, n) for i, ax in enumerate(spec.axes)
        ]
        self._x_mesh = [
            _axis_mesh(ax.coordinates(), i, n) for i, ax in enumerate(spec.axes)
        ]
        self._shape = spec.shape

    def kinetic(self, t: float) -> np.ndarray:
        out = np.zeros(self._shape)
        for i, pi in enumerate(self._p_mesh):
            if self.app[i, i]:
                out = out + 0.5 * self.app[i, i] * pi**2
            bpi = float(self.bp[i](t))
            if bpi:
                out = out + bpi * pi
            for j in range(i + 1, len(self._p_mesh)):
                if self.app[i, j]:
                    out = out + self.app[i, j] * pi * self._p_mesh[j]
        return out

    def potential(self, t: float) -> np.ndarray:
        out = np.zeros(self._shape)
        for i, xi in enumerate(self._x_mesh):
            if self.axx[i, i]:
                out = out + 0.5 * self.axx[i, i] * xi**2
            bxi = float(self.bx[i](t))
            if bxi:
                out = out + bxi * xi
            for j in range(i + 1, len(self._x_mesh)):
                if self.axx[i, j]:
                    out = out + self.axx[i, j] * xi * self._x_mesh[j]
        for coeffs, offset, func in self.pots:
            arg = np.full(self._shape, float(offset(t)))
            for c, xi in zip(coeffs, self._x_mesh):
                if c:
                    arg = arg + c * xi
            out = out + func(arg)
        c0 = float(self.c(t))
        if c0:
            out = out + c0
        return out


@dataclass(frozen=True, eq=False)
class PropagationResult:
    final_state: GridState
    times: np.ndarray
    samples: dict
    norms: np.ndarray
    norm_drift: float


def _check_margin(spec: GridSpec, prob: np.ndarray):
    for axis, ax in enumerate(spec.axes):
        w = _marginal_weights(prob, axis)
        x = ax.coordinates()
        mean = float(np.sum(w * x))
        sigma = float(np.sqrt(max(np.sum(w * (x - mean) ** 2), 0.0)))
        if mean - MARGIN_SIGMAS * sigma < ax.minimum or (
            mean + MARGIN_SIGMAS * sigma > ax.maximum
        ):
            raise BoundaryBreachError(
                f"packet on axis {axis} reached the {MARGIN_SIGMAS}-sigma margin"
            )


def propagate(
    state: GridState,
    h: QuadraticHamiltonian,
    duration: float,
    dt: float,
    hbar: float = 1.0,
    observables: dict | None = None,
    sample_every: int = 1,
    enforce_margin: bool = True,
) -> PropagationResult:
    """Strang split-step evolution of a grid state under H for the given duration.

    ``observables`` maps names to Observable instances; their expectation
    values are recorded every ``sample_every`` steps (including the initial
    and final instants).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9 * max(1.0, abs(duration)):
        raise ValueError("duration must be an integer number of steps")
    if n_steps % max(sample_every, 1):
        raise ValueError("sample_every must divide the number of steps")
    observables = observables or {}

    coeffs = _SplitCoefficients(h, state.spec, hbar)
    psi = state.psi.astype(complex, copy=True)
    t = state.time

    exp_t = exp_v = None
    if coeffs.static:
        exp_t = np.exp(-1j * dt / hbar * coeffs.kinetic(t))
        exp_v = np.exp(-1j * dt / (2.0 * hbar) * coeffs.potential(t))

    times, norms = [], []
    samples = {name: [] for name in observables}

    def record():
        current = GridState(state.spec, psi, t)
        times.append(t)
        norms.append(current.norm())
        for name, obs in observables.items():
            samples[name].append(expectation(current, obs, hbar))
        if enforce_margin:
            _check_margin(state.spec, np.abs(psi) ** 2)

    record()
    for step in range(n_steps):
        if not coeffs.static:
            tm = t + 0.5 * dt
            exp_t = np.exp(-1j * dt / hbar * coeffs.kinetic(tm))
            exp_v = np.exp(-1j * dt / (2.0 * hbar) * coeffs.potential(tm))
        psi *= exp_v
        psi = np.fft.ifftn(exp_t * np.fft.fftn(psi))
        psi *= exp_v
        t = state.time + (step + 1) * dt
        if (step + 1) % sample_every == 0:
            record()

    norms_arr = np.array(norms)
    drift = float(np.max(np.abs(norms_arr - 1.0)))
    if drift > 1e-6:
        raise RuntimeError(f"norm drift {drift:.3e} signals an unstable run")
    return PropagationResult(
        final_state=GridState(state.spec, psi, t),
        times=np.array(times),
        samples={k: np.array(v) for k, v in samples.items()},
        norms=norms_arr,
        norm_drift=drift,
    )


# ---------------------------------------------------------------------------
# Active frame transformations
# ---------------------------------------------------------------------------


def apply_weyl(
    state: GridState, element: WeylElement, t: float | None = None, axis: int = 0
) -> GridState:
    """Active application psi -> G^dagger psi of a displacement element.

    (G^dagger psi)(x) = exp(-i*phase) exp(-i*kick*x/hbar) psi(x + shift),
    with the element evaluated at time t (defaults to the state's time).
    The position shift is an exact cyclic permutation when it lands on the
    grid lattice; otherwise a spectral interpolation is used and a warning
    is logged.
    """
    if t is None:
        t = state.time
    hbar = float(element.hbar)
    shift = float(element.shift(t))
    kick = float(element.kick(t))
    phase = float(element.phase(t))

    ax = state.spec.axes[axis]
    cells = shift / ax.spacing
    s = round(cells)
    if abs(cells - s) <= 1e-9 * max(1.0, abs(cells)):
        psi = np.roll(state.psi, -s, axis=axis)
    else:
        logger.warning(
            "shift %.6g is %.3g cells off the lattice; using spectral interpolation",
            shift,
            cells - s,
        )
        k = _axis_mesh(ax.wavenumbers(), axis, state.spec.ndim)
        psi = np.fft.ifft(np.exp(1j * k * shift) * np.fft.fft(state.psi, axis=axis), axis=axis)
        drift = abs(float(np.sum(np.abs(psi) ** 2) * state.spec.cell_volume) - state.norm())
        logger.warning("interpolated shift norm drift: %.3e", drift)

    if kick or phase:
        x = _axis_mesh(ax.coordinates(), axis, state.spec.ndim)
        psi = psi * np.exp(-1j * (kick * x / hbar + phase))
    elif psi is state.psi:
        psi = psi.copy()
    return GridState(state.spec, psi, state.time)


def apply_conditional_shift(state: GridState, direction: str = "forward") -> GridState:
    """Conditional translation psi(X, x) -> psi(X, x + X) (inverse: x - X).

    Requires equal spacings on both axes and the first axis' origin on the
    shared lattice, so every row moves by an exact integer number of cells
    and the map is a pure permutation of amplitudes.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    if state.spec.ndim != 2:
        raise DimensionError("conditional shift needs a two-particle grid")
    ax0, ax1 = state.spec.axes
    if abs(ax0.spacing - ax1.spacing) > 1e-12 * ax1.spacing:
        raise GridMismatchError("conditional shift needs equal spacings")
    cells = ax0.coordinates() / ax1.spacing
    shifts = np.rint(cells).astype(int)
    if np.max(np.abs(cells - shifts)) > 1e-9:
        raise GridMismatchError("conditioning axis origin is off the shared lattice")
    if direction == "inverse":
        shifts = -shifts
    n0, n1 = state.spec.shape
    cols = (np.arange(n1)[None, :] + shifts[:, None]) % n1
    psi = state.psi[np.arange(n0)[:, None], cols]
    return GridState(state.spec, psi, state.time)


# ---------------------------------------------------------------------------
# Finite-difference acceleration
# ---------------------------------------------------------------------------


def fd_acceleration(values: Sequence[float], dt: float) -> tuple[float, float]:
    """Central-second-difference acceleration with Richardson refinement.

    Returns (value, error_estimate) from a uniformly sampled series.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 5:
        raise InsufficientSamplesError("need at least 5 uniform samples")
    d1 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dt**2
    d2 = (v[4:] - 2.0 * v[2:-2] + v[:-4]) / (2.0 * dt) ** 2
    refined = (4.0 * d1[1:-1] - d2) / 3.0
    value = float(refined.mean())
    error = float(max(np.max(np.abs(refined - d1[1:-1])), refined.std()))
    return value, error


# ---------------------------------------------------------------------------
# Binary checkpoints
# ---------------------------------------------------------------------------

_MAGIC = b"QGRIDCK1"


def write_checkpoint(state: GridState, path) -> None:
    """Binary snapshot.

    Layout (little-endian): 8-byte magic, uint32 ndim, then per axis
    uint32 points + float64 minimum + float64 maximum, then float64 time,
    then the amplitudes as complex64 pairs in C order.
    """
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", state.spec.ndim))
        for ax in state.spec.axes:
            fh.write(struct.pack("<Idd", ax.points, ax.minimum, ax.maximum))
        fh.write(struct.pack("<d", state.time))
        fh.write(np.ascontiguousarray(state.psi).astype("<c8").tobytes())


def read_checkpoint(path) -> GridState:
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError("not a grid checkpoint file")
        (ndim,) = struct.unpack("<I", fh.read(4))
        axes = []
        for _ in range(ndim):
            points, lo, hi = struct.unpack("<Idd", fh.read(20))
            axes.append(GridAxis(lo, hi, points))
        (time,) = struct.unpack("<d", fh.read(8))
        spec = GridSpec(tuple(axes))
        count = int(np.prod(spec.shape))
        psi = np.frombuffer(fh.read(8 * count), dtype="<c8").astype(complex)
    return GridState(spec, psi.reshape(spec.shape), time)
