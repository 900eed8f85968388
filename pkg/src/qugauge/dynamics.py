"""Hamiltonian, mixed basis and closed-form evolution of the doublet.

A doublet is the pair ``(|phi(t)>, |psi(t)>)``. As an array it has shape
``(2, 2)``: row 0 is ``phi``, row 1 is ``psi``, columns are the amplitudes
on ``|0>`` and ``|1>``. Operators on the doublet index (``sigma_1``,
``omega_d``, gauge rotations) act from the left, operators on the state
space (``H``) act on each row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qugauge.linalg2 import SIGMA1, DomainError, outer

DEFAULT_STEP = 1e-5
ANGLE_TOL = 1e-12


class DegenerateSpectrumError(DomainError):
    """The operation needs omega1 != omega2 (it divides by the gap)."""


@dataclass(frozen=True)
class SpectrumConfig:
    """Eigenfrequencies of ``|0>`` and ``|1>`` in natural units.

    Equal frequencies are allowed so that the vacuum case of the
    birefringence map can be represented; operations that divide by the
    gap raise :class:`DegenerateSpectrumError`.
    """

    omega1: float
    omega2: float

    def __post_init__(self):
        for name in ("omega1", "omega2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def gap(self) -> float:
        return self.omega2 - self.omega1

    @property
    def degenerate(self) -> bool:
        return self.omega1 == self.omega2

    def require_gap(self, what: str = "this operation") -> float:
        if self.degenerate:
            raise DegenerateSpectrumError(
                f"{what} requires omega1 != omega2 (got {self.omega1!r} for both)"
            )
        return self.gap


@dataclass(frozen=True)
class MixingConfig:
    """Mixing angle and the two phases of the superposed basis.

    ``theta`` is canonicalized to ``[0, pi)``. The phases must differ by an
    integer multiple of pi so that phi and psi stay orthogonal.
    """

    theta: float
    gamma1: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        for name in ("theta", "gamma1", "gamma2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        theta = math.fmod(float(self.theta), math.pi)
        if theta < 0.0:
            theta += math.pi
        if theta >= math.pi:
            theta = 0.0
        object.__setattr__(self, "theta", theta)
        n = (self.gamma1 - self.gamma2) / math.pi
        if abs(n - round(n)) > ANGLE_TOL:
            raise DomainError(
                "gamma1 - gamma2 must be an integer multiple of pi, "
                f"got {self.gamma1 - self.gamma2!r}"
            )

    @property
    def real_coefficients(self) -> bool:
        return self.gamma1 == 0.0 and self.gamma2 == 0.0


@dataclass(frozen=True)
class OmegaElements:
    """Matrix elements of H in the phi/psi basis and the derived gauge data.

    ``g`` is ``None`` where ``cos 2theta`` vanishes; ``w_ps`` stays finite
    there and is the quantity to use for the coupled product ``g * a0``.
    """

    w_pp: float
    w_ss: float
    w_ps: float
    delta: float
    g: float | None
    a0: float

    @property
    def w_sp(self) -> float:
        return self.w_ps

    @property
    def coupled(self) -> float:
        """``g * A0``, which equals ``w_ps`` whether or not ``g`` exists."""
        return self.w_ps

    @property
    def omega_d(self) -> np.ndarray:
        return np.diag([self.w_pp, self.w_ss]).astype(complex)


@dataclass(frozen=True, eq=False)
class Doublet:
    phi: np.ndarray
    psi: np.ndarray

    @classmethod
    def from_array(cls, z: np.ndarray) -> "Doublet":
        return cls(np.array(z[0], dtype=complex), np.array(z[1], dtype=complex))

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.psi], dtype=complex)


def build_hamiltonian(s: SpectrumConfig) -> np.ndarray:
    return np.diag([s.omega1, s.omega2]).astype(complex)


def build_mixed_basis(m: MixingConfig) -> Doublet:
    c, sn = math.cos(m.theta), math.sin(m.theta)
    e1, e2 = np.exp(1j * m.gamma1), np.exp(1j * m.gamma2)
    phi = np.array([e1 * c, e2 * sn], dtype=complex)
    psi = np.array([-e2 * sn, e1 * c], dtype=complex)
    return Doublet(phi, psi)


def _phases(s: SpectrumConfig, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.stack(
        [np.exp(-1j * s.omega1 * t), np.exp(-1j * s.omega2 * t)], axis=-1
    )


def evolve(
    d0: Doublet, s: SpectrumConfig, m: MixingConfig, t: float, general: bool = False
) -> Doublet:
    """Evolve a doublet prepared at ``t = 0`` to time ``t``.

    By default the mixing phases must vanish (real coefficients). Pass
    ``general=True`` to evolve arbitrary-phase doublets with ``exp(-iHt)``
    applied directly.
    """
    if not (general or m.real_coefficients):
        raise DomainError(
            "evolve() assumes real mixing coefficients (gamma1 = gamma2 = 0); "
            "pass general=True for arbitrary phases"
        )
    if general:
        u = np.diag(_phases(s, t))
        return Doublet(u @ d0.phi, u @ d0.psi)
    return Doublet.from_array(d0.as_array() * _phases(s, t))


def doublet_at(s: SpectrumConfig, m: MixingConfig, t) -> np.ndarray:
    """Doublet array(s) at time(s) ``t``: shape ``(2, 2)`` or ``t.shape + (2, 2)``.

    Closed form; the mixing phases are ignored (real coefficients).
    """
    z0 = build_mixed_basis(MixingConfig(m.theta)).as_array()
    ph = _phases(s, t)
    return z0 * ph[..., None, :]


def omega_elements(s: SpectrumConfig, m: MixingConfig) -> OmegaElements:
    c2 = math.cos(m.theta) ** 2
    s2 = math.sin(m.theta) ** 2
    cos2t = math.cos(2 * m.theta)
    sin2t = math.sin(2 * m.theta)
    w_pp = s.omega1 * c2 + s.omega2 * s2
    w_ss = s.omega1 * s2 + s.omega2 * c2
    w_ps = 0.5 * s.gap * sin2t
    delta = s.gap * cos2t
    g = None if abs(cos2t) <= ANGLE_TOL else sin2t / cos2t
    return OmegaElements(w_pp, w_ss, w_ps, delta, g, 0.5 * delta)


def hamiltonian_in_mixed_basis(s: SpectrumConfig, m: MixingConfig, t: float = 0.0) -> np.ndarray:
    """H as the symmetric matrix of its phi/psi elements (time independent)."""
    w = omega_elements(s, m)
    return np.array([[w.w_pp, w.w_ps], [w.w_ps, w.w_ss]], dtype=complex)


def reconstruct_hamiltonian(s: SpectrumConfig, m: MixingConfig, t: float) -> np.ndarray:
    """Rebuild H in the computational basis from the projectors at time ``t``."""
    w = omega_elements(s, m)
    phi, psi = doublet_at(s, m, t)
    return (
        w.w_pp * outer(phi, phi)
        + w.w_ss * outer(psi, psi)
        + w.w_ps * (outer(phi, psi) + outer(psi, phi))
    )


def time_derivative(s: SpectrumConfig, m: MixingConfig, t: float, h: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference derivative of the doublet array at ``t``."""
    if not h > 0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")
    return (doublet_at(s, m, t + h) - doublet_at(s, m, t - h)) / (2 * h)


def evolution_residual(s: SpectrumConfig, m: MixingConfig, t: float, h: float = DEFAULT_STEP) -> float:
    """Max entry of ``i dz/dt - omega_d z - w_ps sigma_1 z`` (sigma_1 on the doublet index)."""
    w = omega_elements(s, m)
    z = doublet_at(s, m, t)
    dz = time_derivative(s, m, t, h)
    r = 1j * dz - w.omega_d @ z - w.w_ps * (SIGMA1 @ z)
    return float(np.max(np.abs(r)))


def period(s: SpectrumConfig) -> float:
    """Revival time ``2 pi / (omega2 - omega1)`` (negative if omega2 < omega1)."""
    return 2 * math.pi / s.require_gap("the period")


def total_phase(s: SpectrumConfig) -> float:
    """Phase picked up by phi over one period: ``-2 pi omega1 / (omega2 - omega1)``."""
    return -2 * math.pi * s.omega1 / s.require_gap("the total phase")
