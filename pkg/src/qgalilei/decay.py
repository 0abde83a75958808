"""Two-level model of an unstable atom entangled with its emitted photon.

The post-decay state a|heavy>|vac> + b e^{i theta}|light>|photon> lives in a
2x2 space (atom energy level x field occupation). Tracing out the field
leaves the atom in a diagonal mixture, so no interferometric experiment on
the atom alone can see theta. The contrast case is the bare superposition
a|heavy> + b e^{i theta}|light>, whose coherence 2ab is fully visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DecayState:
    """Amplitudes of the entangled atom+field state; a^2 + b^2 = 1."""

    a: float
    b: float
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.a**2 + self.b**2 - 1.0) > 1e-12:
            raise ValueError("decay state must be normalized")

    def vector(self) -> np.ndarray:
        """Amplitudes psi[atom, field] of the entangled state."""
        psi = np.zeros((2, 2), dtype=complex)
        psi[0, 0] = self.a
        psi[1, 1] = self.b * np.exp(1j * self.theta)
        return psi

    @classmethod
    def from_survival_probability(cls, p: float, theta: float = 0.0) -> "DecayState":
        return cls(math.sqrt(p), math.sqrt(1.0 - p), theta)


def reduced_atom_state(state: DecayState) -> np.ndarray:
    """Partial trace over the field: rho[i, k] = sum_f psi[i, f] psi*[k, f]."""
    psi = state.vector()
    return psi @ psi.conj().T


def product_superposition_density(state: DecayState) -> np.ndarray:
    """Density matrix of the bare superposition a|heavy> + b e^{i theta}|light>."""
    ket = np.array([state.a, state.b * np.exp(1j * state.theta)], dtype=complex)
    return np.outer(ket, ket.conj())


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def visibility(rho: np.ndarray) -> float:
    """Interferometric contrast: twice the off-diagonal magnitude."""
    return 2.0 * abs(rho[0, 1])
