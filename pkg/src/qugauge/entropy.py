"""Reduced density matrices of the doubled system and their linear entropies.

Doubling attaches a tilde copy to each basis vector, ``|a> -> |a a~>``. The
doubled states used here are two-term Schmidt forms, so the reductions are
read off the Schmidt weights directly. :func:`qugauge.oracle.purification_tensor`
builds the four-component state explicitly for cross-checking.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from qugauge.dynamics import MixingConfig, SpectrumConfig
from qugauge.linalg2 import DomainError

DENSITY_TOL = 1e-12
SIDES = ("system", "tilde")


@dataclass(frozen=True, eq=False)
class DensityMatrix2:
    """A 2x2 Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (2, 2) or not np.all(np.isfinite(rho)):
            raise DomainError(f"density matrix must be a finite 2x2 array, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > DENSITY_TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > DENSITY_TOL:
            raise DomainError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
        if np.min(np.linalg.eigvalsh(rho)) < -DENSITY_TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def diagonal(cls, p0: float, p1: float) -> "DensityMatrix2":
        return cls(np.diag([p0, p1]).astype(complex))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


@dataclass(frozen=True)
class AmplitudePair:
    a_pp: complex
    a_ps: complex


@dataclass(frozen=True)
class ProbabilityPair:
    p_stay: float
    p_flip: float


def _check_side(trace_out: str) -> None:
    if trace_out not in SIDES:
        raise DomainError(f"trace_out must be one of {SIDES}, got {trace_out!r}")


def reduce_static(m: MixingConfig, which: str = "phi", trace_out: str = "tilde") -> DensityMatrix2:
    """Reduction of the doubled ``phi`` (or ``psi``) over one factor.

    Tracing out the tilde copy gives the matrix on ``{|0>, |1>}``; tracing
    out the system gives the same matrix on ``{|0~>, |1~>}``.
    """
    _check_side(trace_out)
    c2 = math.cos(m.theta) ** 2
    s2 = 1.0 - c2
    if which == "phi":
        return DensityMatrix2.diagonal(c2, s2)
    if which == "psi":
        return DensityMatrix2.diagonal(s2, c2)
    raise DomainError(f"which must be 'phi' or 'psi', got {which!r}")


def linear_entropy(rho) -> float:
    """``2 (1 - Tr rho^2)``; 0 for a pure state, 1 for the maximally mixed one."""
    if not isinstance(rho, DensityMatrix2):
        rho = DensityMatrix2(rho)
    return 2.0 * (1.0 - rho.purity())


def von_neumann_entropy(rho) -> float:
    """``-sum p log p`` in nats.

    Supplementary; not the linear entropy used everywhere else.
    """
    if not isinstance(rho, DensityMatrix2):
        rho = DensityMatrix2(rho)
    return float(-sum(p * math.log(p) for p in rho.eigenvalues() if p > 0.0))


def transition_amplitudes(s: SpectrumConfig, m: MixingConfig, t: float) -> AmplitudePair:
    """Components of ``phi(t)`` on ``phi(0)`` and ``psi(0)``."""
    c, sn = math.cos(m.theta), math.sin(m.theta)
    e1 = cmath.exp(-1j * s.omega1 * t)
    e2 = cmath.exp(-1j * s.omega2 * t)
    return AmplitudePair(e1 * c * c + e2 * sn * sn, sn * c * (e2 - e1))


def transition_probabilities(s: SpectrumConfig, m: MixingConfig, t: float) -> ProbabilityPair:
    flip = math.sin(2 * m.theta) ** 2 * math.sin(0.5 * s.gap * t) ** 2
    return ProbabilityPair(1.0 - flip, flip)


def reduce_dynamic(s: SpectrumConfig, m: MixingConfig, t: float, trace_out: str = "tilde") -> DensityMatrix2:
    """Reduction of the doubled ``phi(t)`` in the ``{phi(0), psi(0)}`` basis."""
    _check_side(trace_out)
    p = transition_probabilities(s, m, t)
    return DensityMatrix2.diagonal(p.p_stay, p.p_flip)


def dynamic_entropy(s: SpectrumConfig, m: MixingConfig, t: float) -> float:
    p = transition_probabilities(s, m, t)
    return 4.0 * p.p_stay * p.p_flip


def static_entropy(m: MixingConfig) -> float:
    """Closed form ``sin^2 2theta`` of the static linear entropy."""
    return math.sin(2 * m.theta) ** 2
