"""Geometric phases, energy variance and Fubini-Study distances.

Phases are returned unwrapped, in radians. Distances follow the
convention ``ds^2 = 4 (1 - |<xi(t)|xi(t+dt)>|^2)``, under which the
projective space of a qubit is the unit sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qugauge.dynamics import (
    DEFAULT_STEP,
    MixingConfig,
    SpectrumConfig,
    build_hamiltonian,
    doublet_at,
    omega_elements,
    period,
    total_phase,
)
from qugauge.linalg2 import DomainError
from qugauge.oracle import QuadratureConfig, simpson

QUADRATURE_PANELS = 10_000
ROUTES = ("closed", "quadrature", "numerical")

_INDEX = {"phi": 0, "psi": 1}


def _row(which: str) -> int:
    try:
        return _INDEX[which]
    except KeyError:
        raise DomainError(f"which must be 'phi' or 'psi', got {which!r}") from None


@dataclass(frozen=True)
class PhaseReport:
    beta_phi: float
    beta_psi: float
    varphi: float
    period: float


@dataclass(frozen=True)
class VarianceReport:
    dw2: float


@dataclass(frozen=True)
class FsPoint:
    ds_dt: float
    s_accum: float


def berry_phase(
    s: SpectrumConfig,
    m: MixingConfig,
    which: str = "phi",
    route: str = "closed",
    panels: int = QUADRATURE_PANELS,
    h: float = DEFAULT_STEP,
) -> float:
    """Berry-like phase of ``phi`` or ``psi`` over one period.

    Routes:
        ``closed``: ``2 pi sin^2 theta`` (phi) or ``2 pi cos^2 theta`` (psi).
        ``quadrature``: total phase plus the Simpson integral of
        ``<xi(t)|H|xi(t)>`` evaluated on the evolved state.
        ``numerical``: as ``quadrature`` but with ``<xi|i d/dt|xi>`` taken by
        central differences; good to about 1e-6.
    """
    row = _row(which)
    T = period(s)
    if route == "closed":
        sin2 = math.sin(m.theta) ** 2
        return 2 * math.pi * (sin2 if row == 0 else 1.0 - sin2)
    cfg = QuadratureConfig(panels)
    if route == "quadrature":
        hm = build_hamiltonian(s)

        def integrand(t):
            xi = doublet_at(s, m, t)[..., row, :]
            return np.einsum("...i,ij,...j->...", xi.conj(), hm, xi).real

    elif route == "numerical":

        def integrand(t):
            xi = doublet_at(s, m, t)[..., row, :]
            dxi = (doublet_at(s, m, t + h)[..., row, :] - doublet_at(s, m, t - h)[..., row, :]) / (2 * h)
            return np.einsum("...i,...i->...", xi.conj(), 1j * dxi).real

    else:
        raise DomainError(f"route must be one of {ROUTES}, got {route!r}")
    return total_phase(s) + simpson(integrand, 0.0, T, cfg)


def berry_phases(s: SpectrumConfig, m: MixingConfig, route: str = "closed") -> PhaseReport:
    return PhaseReport(
        berry_phase(s, m, "phi", route),
        berry_phase(s, m, "psi", route),
        total_phase(s),
        period(s),
    )


def energy_variance(s: SpectrumConfig, m: MixingConfig) -> VarianceReport:
    """``<H^2> - <H>^2`` from the explicit moment expansion in theta.

    Time independent and the same for phi and psi.
    """
    c2 = math.cos(m.theta) ** 2
    s2 = math.sin(m.theta) ** 2
    second = s.omega1**2 * c2 + s.omega2**2 * s2
    first = omega_elements(s, m).w_pp
    return VarianceReport(second - first * first)


def energy_variance_from_state(s: SpectrumConfig, m: MixingConfig, t: float = 0.0, which: str = "phi") -> float:
    """``<xi(t)|H^2|xi(t)> - <xi(t)|H|xi(t)>^2`` with explicit matrix products."""
    xi = doublet_at(s, m, t)[_row(which)]
    hm = build_hamiltonian(s)
    hx = hm @ xi
    return float(np.vdot(hx, hx).real - np.vdot(xi, hx).real ** 2)


def aa_invariant(s: SpectrumConfig, m: MixingConfig, t0: float, t1: float) -> float:
    """Anandan-Aharonov length ``2 * Delta omega * (t1 - t0)``, ``Delta omega = |w_ps|``."""
    return 2.0 * abs(omega_elements(s, m).w_ps) * (t1 - t0)


def aa_invariant_quadrature(
    s: SpectrumConfig, m: MixingConfig, t0: float, t1: float, panels: int = QUADRATURE_PANELS, which: str = "phi"
) -> float:
    """Simpson integral of ``2 Delta omega`` along the evolved state.

    ``Delta omega`` is taken as ``|| (H - <H>) xi ||`` rather than the square
    root of ``<H^2> - <H>^2``, which loses half the digits near eigenstates.
    """
    row = _row(which)
    hm = build_hamiltonian(s)

    def integrand(t):
        xi = doublet_at(s, m, t)[..., row, :]
        hx = xi @ hm.T
        first = np.einsum("...i,...i->...", xi.conj(), hx).real
        return 2.0 * np.linalg.norm(hx - first[..., None] * xi, axis=-1)

    return simpson(integrand, t0, t1, QuadratureConfig(panels))


def infidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``1 - |<a|b>|^2`` for unit vectors, via the orthogonal remainder of ``b``.

    Subtracting the projection first avoids the cancellation in
    ``1 - |<a|b>|^2`` when the states are close.
    """
    r = b - a * np.vdot(a, b)
    return float(np.vdot(r, r).real)


@dataclass(frozen=True)
class OverlapCheck:
    """Small-``dt`` overlaps compared with their leading ``dt^2`` term."""

    dt: float
    same_state_defect: float
    cross_term: float
    predicted: float

    @property
    def defect_ratio(self) -> float:
        return self.same_state_defect / self.predicted if self.predicted else math.nan

    @property
    def cross_ratio(self) -> float:
        return self.cross_term / self.predicted if self.predicted else math.nan

    @property
    def within_tolerance(self) -> bool:
        """Both ratios inside ``[1 - 10 dt, 1 + 10 dt]`` (or both terms ~0 when unmixed)."""
        if self.predicted == 0.0:
            return self.same_state_defect <= 1e-24 and self.cross_term <= 1e-24
        bound = 10 * self.dt
        return abs(self.defect_ratio - 1) <= bound and abs(self.cross_ratio - 1) <= bound


def overlap_expansion_check(
    s: SpectrumConfig, m: MixingConfig, t: float, dt: float, which: str = "phi"
) -> OverlapCheck:
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    row = _row(which)
    now = doublet_at(s, m, t)
    later = doublet_at(s, m, t + dt)
    defect = infidelity(now[row], later[row])
    cross = abs(np.vdot(now[row], later[1 - row])) ** 2
    predicted = dt**2 * omega_elements(s, m).w_ps ** 2
    return OverlapCheck(dt, defect, float(cross), predicted)


@dataclass(frozen=True)
class Convergence:
    checks: tuple
    orders: tuple

    @property
    def min_order(self) -> float:
        return min(self.orders) if self.orders else math.nan


def overlap_convergence(
    s: SpectrumConfig, m: MixingConfig, t: float = 0.0, dts=(1e-2, 1e-3, 1e-4), which: str = "phi"
) -> Convergence:
    """Observed order of ``|defect - dt^2 w_ps^2|`` between successive ``dt``.

    The leading term is exact, so the error is the next correction; its
    order is at least 3.
    """
    checks = tuple(overlap_expansion_check(s, m, t, dt, which) for dt in dts)
    errs = [abs(c.same_state_defect - c.predicted) for c in checks]
    orders = []
    for (a, ea), (b, eb) in zip(zip(dts, errs), zip(dts[1:], errs[1:])):
        if ea > 0 and eb > 0:
            orders.append(math.log(ea / eb) / math.log(a / b))
    return Convergence(checks, tuple(orders))


def fs_distance(s: SpectrumConfig, m: MixingConfig, t0: float, t1: float) -> FsPoint:
    """Fubini-Study rate ``|omega2 - omega1| |sin 2theta|`` and the length it sweeps."""
    rate = abs(s.gap * math.sin(2 * m.theta))
    return FsPoint(rate, rate * (t1 - t0))


def fs_rate_from_overlap(s: SpectrumConfig, m: MixingConfig, t: float, dt: float = 1e-4, which: str = "phi") -> float:
    """``sqrt(4 (1 - |<xi(t)|xi(t+dt)>|^2)) / dt``; converges to ``ds/dt`` as O(dt^2)."""
    row = _row(which)
    d = infidelity(doublet_at(s, m, t)[row], doublet_at(s, m, t + dt)[row])
    return math.sqrt(4.0 * d) / dt


def fs_length_numerical(
    s: SpectrumConfig, m: MixingConfig, t0: float, t1: float, steps: int = 10_000, which: str = "phi"
) -> float:
    """Sum of geodesic Fubini-Study distances between successive states.

    Each step contributes ``2 arccos |<a|b>|``; the polygon converges to the
    curve length as ``O(1/steps^2)``.
    """
    row = _row(which)
    xs = doublet_at(s, m, np.linspace(t0, t1, steps + 1))[:, row, :]
    a, b = xs[:-1], xs[1:]
    ov = np.einsum("ki,ki->k", a.conj(), b)
    rem = b - a * ov[:, None]
    sin_half = np.sqrt(np.einsum("ki,ki->k", rem.conj(), rem).real)
    return float(np.sum(2.0 * np.arctan2(sin_half, np.abs(ov)))) * (1 if t1 >= t0 else -1)


def bloch_vector(v: np.ndarray) -> np.ndarray:
    """Bloch vector(s) of unit ket(s) ``v`` (last axis of length 2)."""
    c0, c1 = v[..., 0], v[..., 1]
    x = c0.conj() * c1
    return np.stack([2 * x.real, 2 * x.imag, (np.abs(c0) ** 2 - np.abs(c1) ** 2)], axis=-1)


def sphere_correspondence(
    s: SpectrumConfig, m: MixingConfig, t0: float, t1: float, steps: int = 10_000, which: str = "phi"
) -> float:
    """``int sin(Theta) d(varphi)`` along the Bloch-sphere trajectory.

    Polar and azimuthal angles are read off the Bloch vector of the evolved
    state at ``steps + 1`` times; the azimuth is unwrapped and the sum uses
    the mean of ``sin(Theta)`` over each interval.
    """
    row = _row(which)
    ts = np.linspace(t0, t1, steps + 1)
    b = bloch_vector(doublet_at(s, m, ts)[:, row, :])
    sin_polar = np.hypot(b[:, 0], b[:, 1])
    azimuth = np.unwrap(np.arctan2(b[:, 1], b[:, 0]))
    dphi = np.abs(np.diff(azimuth))
    total = float(np.sum(0.5 * (sin_polar[1:] + sin_polar[:-1]) * dphi))
    return total if t1 >= t0 else -total
