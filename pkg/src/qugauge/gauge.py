"""Covariant derivative, local-in-time gauge transformations, free energy
and the birefringent-medium picture of the same evolution.

The gauge group acts on the doublet index through
``U(t) = exp(-i g lambda(t) sigma_1)`` and shifts the field component
``A0 -> A0 + d lambda / dt``. Where ``g = tan 2theta`` is undefined
(``cos 2theta = 0``) a gauge function can be given in product form, i.e.
its values are ``g * lambda(t)`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qugauge.dynamics import (
    DEFAULT_STEP,
    MixingConfig,
    OmegaElements,
    SpectrumConfig,
    build_hamiltonian,
    doublet_at,
    omega_elements,
    period,
    time_derivative,
)
from qugauge.linalg2 import SIGMA1, DomainError, exp_sigma1, outer
from qugauge.oracle import QuadratureConfig, simpson

GAUGE_FAMILIES = ("zero", "constant", "linear", "polynomial", "sinusoidal", "sampled")
QUADRATURE_PANELS_PER_PERIOD = 10_000


class UndefinedCouplingError(DomainError):
    """``g`` is undefined here and the gauge function is not in product form."""


@dataclass(frozen=True)
class GaugeFunction:
    """A real gauge function of time together with its exact derivative.

    Build instances with the family constructors (:meth:`zero`,
    :meth:`constant`, :meth:`linear`, :meth:`polynomial`,
    :meth:`sinusoidal`, :meth:`sampled`). ``coupled=True`` marks the values
    as ``g * lambda`` rather than ``lambda``.
    """

    family: str
    params: tuple
    coupled: bool = False

    def __post_init__(self):
        if self.family not in GAUGE_FAMILIES:
            raise DomainError(f"unknown gauge family {self.family!r}")

    @classmethod
    def zero(cls, coupled: bool = False) -> "GaugeFunction":
        return cls("zero", (), coupled)

    @classmethod
    def constant(cls, c: float, coupled: bool = False) -> "GaugeFunction":
        return cls("constant", (float(c),), coupled)

    @classmethod
    def linear(cls, a: float, coupled: bool = False) -> "GaugeFunction":
        return cls("linear", (float(a),), coupled)

    @classmethod
    def polynomial(cls, coefficients, coupled: bool = False) -> "GaugeFunction":
        """Coefficients in increasing order: ``c0 + c1 t + c2 t^2 + ...``."""
        coeffs = tuple(float(c) for c in coefficients)
        if not coeffs:
            raise DomainError("polynomial gauge function needs at least one coefficient")
        return cls("polynomial", coeffs, coupled)

    @classmethod
    def sinusoidal(cls, a: float, b: float, coupled: bool = False) -> "GaugeFunction":
        """``a * sin(b t)``."""
        return cls("sinusoidal", (float(a), float(b)), coupled)

    @classmethod
    def sampled(cls, times, values, coupled: bool = False) -> "GaugeFunction":
        """Piecewise-linear interpolation through ``(times, values)``.

        The derivative is the slope of the segment containing ``t``, so
        finite-difference checks straddling a node are not meaningful.
        """
        ts = tuple(float(x) for x in times)
        vs = tuple(float(x) for x in values)
        if len(ts) < 2 or len(ts) != len(vs):
            raise DomainError("sampled gauge function needs >= 2 matching times and values")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("sampled gauge function times must be strictly increasing")
        return cls("sampled", (ts, vs), coupled)

    def value(self, t: float) -> float:
        p = self.params
        if self.family == "zero":
            return 0.0
        if self.family == "constant":
            return p[0]
        if self.family == "linear":
            return p[0] * t
        if self.family == "polynomial":
            return sum(c * t**k for k, c in enumerate(p))
        if self.family == "sinusoidal":
            return p[0] * math.sin(p[1] * t)
        return float(np.interp(t, p[0], p[1]))

    def derivative(self, t: float) -> float:
        p = self.params
        if self.family in ("zero", "constant"):
            return 0.0
        if self.family == "linear":
            return p[0]
        if self.family == "polynomial":
            return sum(k * c * t ** (k - 1) for k, c in enumerate(p) if k)
        if self.family == "sinusoidal":
            return p[0] * p[1] * math.cos(p[1] * t)
        ts, vs = p
        i = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2))
        return (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i])

    def angle(self, w: OmegaElements, t: float) -> float:
        """``g * lambda(t)``, the argument of the gauge rotation."""
        if self.coupled:
            return self.value(t)
        return _require_g(w) * self.value(t)

    def angle_rate(self, w: OmegaElements, t: float) -> float:
        """``g * d lambda / dt``, the shift of the coupled field ``g * A0``."""
        if self.coupled:
            return self.derivative(t)
        return _require_g(w) * self.derivative(t)


def _require_g(w: OmegaElements) -> float:
    if w.g is None:
        raise UndefinedCouplingError(
            "g = tan(2 theta) is undefined at cos(2 theta) = 0; "
            "supply the gauge function in product form (coupled=True)"
        )
    return w.g


@dataclass(frozen=True)
class GaugeField:
    """The sigma_1 component of the time-like gauge potential.

    ``strength`` is the coefficient of ``i sigma_1`` in the covariant
    derivative, ``g * A0``. ``a0`` and ``coupling`` are ``None`` when they
    cannot be separated out of the product.
    """

    a0: float | None
    coupling: float | None
    strength: float


def gauge_field(s: SpectrumConfig, m: MixingConfig) -> GaugeField:
    w = omega_elements(s, m)
    return GaugeField(w.a0, w.g, w.w_ps)


def gauge_potential(s: SpectrumConfig, m: MixingConfig, t: float) -> float:
    # A0 carries no time dependence; t is accepted so it can be differentiated
    return omega_elements(s, m).a0


def covariant_derivative_residual(
    s: SpectrumConfig, m: MixingConfig, t: float, h: float = DEFAULT_STEP
) -> float:
    """Max entry of ``i D_t z - omega_d z`` with ``D_t = d/dt + i g A0 sigma_1``."""
    s.require_gap("the covariant derivative")
    w = omega_elements(s, m)
    strength = w.g * w.a0 if w.g is not None else w.w_ps
    z = doublet_at(s, m, t)
    dz = time_derivative(s, m, t, h)
    r = 1j * dz - strength * (SIGMA1 @ z) - w.omega_d @ z
    return float(np.max(np.abs(r)))


def gauge_rotation(gf: GaugeFunction, w: OmegaElements, t: float) -> np.ndarray:
    return exp_sigma1(gf.angle(w, t))


def transformed_doublet_at(gf: GaugeFunction, s: SpectrumConfig, m: MixingConfig, t: float) -> np.ndarray:
    w = omega_elements(s, m)
    return gauge_rotation(gf, w, t) @ doublet_at(s, m, t)


def gauge_transform(d, gf: GaugeFunction, s: SpectrumConfig, m: MixingConfig, t: float):
    """Apply the gauge transformation at time ``t``.

    Args:
        d: the doublet at time ``t`` (a :class:`~qugauge.dynamics.Doublet`
            or a ``(2, 2)`` array).

    Returns:
        ``(transformed doublet array, transformed GaugeField)``.
    """
    w = omega_elements(s, m)
    z = d.as_array() if hasattr(d, "as_array") else np.asarray(d, dtype=complex)
    u = gauge_rotation(gf, w, t)
    rate = gf.angle_rate(w, t)
    if gf.coupled:
        a0 = w.a0 + rate / w.g if w.g is not None else None
    else:
        a0 = w.a0 + gf.derivative(t)
    return u @ z, GaugeField(a0, w.g, w.w_ps + rate)


@dataclass(frozen=True)
class InvarianceCheck:
    """Residuals of the gauge-transformed dynamics at one time.

    ``covariance``: max entry of ``i D'_t z' - U omega_d z``, i.e. the
    transformed covariant equation ``U (i D_t z) = i D'_t (U z)``.
    ``transformation_law``: max entry of
    ``g A0' sigma_1 - (U g A0 sigma_1 U^-1 + i (dU/dt) U^-1)``.
    ``literal_form``: max entry of ``i D'_t z' - omega_d z'``. This one is
    only small when ``omega_d`` commutes with ``U``; it is reported, never
    gated.
    """

    covariance: float
    transformation_law: float
    literal_form: float


def gauge_invariance_residual(
    gf: GaugeFunction, s: SpectrumConfig, m: MixingConfig, t: float, h: float = DEFAULT_STEP
) -> InvarianceCheck:
    if not h > 0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")
    w = omega_elements(s, m)
    z = doublet_at(s, m, t)
    u = gauge_rotation(gf, w, t)
    zp, field = gauge_transform(z, gf, s, m, t)
    dzp = (transformed_doublet_at(gf, s, m, t + h) - transformed_doublet_at(gf, s, m, t - h)) / (2 * h)
    lhs = 1j * dzp - field.strength * (SIGMA1 @ zp)
    covariance = float(np.max(np.abs(lhs - u @ (w.omega_d @ z))))
    literal = float(np.max(np.abs(lhs - w.omega_d @ zp)))

    du = (gauge_rotation(gf, w, t + h) - gauge_rotation(gf, w, t - h)) / (2 * h)
    u_inv = u.conj().T
    expected = u @ (w.w_ps * SIGMA1) @ u_inv + 1j * du @ u_inv
    law = float(np.max(np.abs(field.strength * SIGMA1 - expected)))
    return InvarianceCheck(covariance, law, literal)


@dataclass(frozen=True)
class FieldStrength:
    is_zero: bool
    a0: float
    da0_dt: float


def field_strength_is_zero(
    s: SpectrumConfig, m: MixingConfig, t: float = 0.0, h: float = DEFAULT_STEP
) -> FieldStrength:
    """Witness that the field strength vanishes.

    Only the time component of the potential exists, so the field strength
    reduces to spatial derivatives of ``A0`` (none) and the time derivative
    of the spatial components (all zero). The witness is the measured
    ``|dA0/dt|``.
    """
    a0 = gauge_potential(s, m, t)
    witness = abs(gauge_potential(s, m, t + h) - gauge_potential(s, m, t - h)) / (2 * h)
    return FieldStrength(witness == 0.0, a0, witness)


@dataclass(frozen=True, eq=False)
class FreeEnergy:
    """Free energy ``F = H - w_ps sigma_1`` in the phi/psi representation.

    ``temperature`` (``g``) and ``entropy`` (``A0``) are labels for the two
    factors of the ``T S`` term; only their product ``w_ps`` is physical.
    """

    operator: np.ndarray
    ts: np.ndarray
    temperature: float | None
    entropy: float

    @property
    def ts_coefficient(self) -> float:
        return float(self.ts[0, 1].real)


def free_energy_operator(s: SpectrumConfig, m: MixingConfig) -> FreeEnergy:
    w = omega_elements(s, m)
    h_mixed = np.array([[w.w_pp, w.w_ps], [w.w_ps, w.w_ss]], dtype=complex)
    ts = w.w_ps * SIGMA1
    return FreeEnergy(h_mixed - ts, ts, w.g, w.a0)


def ts_operator(s: SpectrumConfig, m: MixingConfig, t: float) -> np.ndarray:
    """The ``T S`` term as an operator on the state space (projector form)."""
    w = omega_elements(s, m)
    phi, psi = doublet_at(s, m, t)
    return w.w_ps * (outer(phi, psi) + outer(psi, phi))


def free_energy_computational(s: SpectrumConfig, m: MixingConfig, t: float) -> np.ndarray:
    """``F`` in the computational basis at time ``t``, for display."""
    return build_hamiltonian(s) - ts_operator(s, m, t)


def free_energy_residual(s: SpectrumConfig, m: MixingConfig, t: float) -> float:
    """Max entry of ``H z - w_ps sigma_1 z - omega_d z`` (H on the state index)."""
    w = omega_elements(s, m)
    z = doublet_at(s, m, t)
    hz = z @ build_hamiltonian(s).T
    r = hz - w.w_ps * (SIGMA1 @ z) - w.omega_d @ z
    return float(np.max(np.abs(r)))


def ts_integral(s: SpectrumConfig, m: MixingConfig, t0: float, t1: float) -> float:
    """``2 w_ps (t1 - t0)``, the time integral of the summed ``T S`` elements."""
    return 2.0 * omega_elements(s, m).w_ps * (t1 - t0)


def _panels_for(s: SpectrumConfig, span: float) -> int:
    if s.degenerate or span == 0.0:
        return QUADRATURE_PANELS_PER_PERIOD
    periods = max(1, math.ceil(abs(span / period(s)) - 1e-9))
    return QUADRATURE_PANELS_PER_PERIOD * periods


def ts_integral_quadrature(
    s: SpectrumConfig, m: MixingConfig, t0: float, t1: float, panels: int | None = None
) -> float:
    """Simpson quadrature of ``sum_ab <z_a(t)| TS(t) |z_b(t)>``.

    ``TS(t)`` is formed as ``H`` minus the diagonal projector part
    ``w_pp |phi><phi| + w_ss |psi><psi|``, so the integrand does not take
    ``w_ps`` as an input.
    """
    w = omega_elements(s, m)
    h = build_hamiltonian(s)
    cfg = QuadratureConfig(panels or _panels_for(s, t1 - t0))

    def integrand(t):
        z = doublet_at(s, m, t)
        phi, psi = z[..., 0, :], z[..., 1, :]
        chi = phi + psi
        chi_h_chi = np.einsum("...i,ij,...j->...", chi.conj(), h, chi)
        on_phi = np.abs(np.einsum("...i,...i->...", chi.conj(), phi)) ** 2
        on_psi = np.abs(np.einsum("...i,...i->...", chi.conj(), psi)) ** 2
        return (chi_h_chi - w.w_pp * on_phi - w.w_ss * on_psi).real

    return simpson(integrand, t0, t1, cfg)


@dataclass(frozen=True)
class MediumConfig:
    """Propagation of the degenerate pair through a medium with two indices.

    ``omega`` is the vacuum angular frequency, ``n1``/``n2`` the refractive
    indices seen by ``|0>``/``|1>``, ``ell`` the path length and ``v0`` the
    vacuum speed.
    """

    omega: float
    n1: float
    n2: float
    ell: float = 1.0
    v0: float = 1.0

    def __post_init__(self):
        for name in ("omega", "n1", "n2", "ell", "v0"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.n1 < 1.0 or self.n2 < 1.0:
            raise DomainError(f"refractive indices must be >= 1, got n1={self.n1}, n2={self.n2}")
        if self.v0 <= 0.0:
            raise DomainError(f"v0 must be positive, got {self.v0}")

    @property
    def vacuum_time(self) -> float:
        return self.ell / self.v0

    @property
    def transit_times(self) -> tuple[float, float]:
        return self.ell * self.n1 / self.v0, self.ell * self.n2 / self.v0


def medium_to_spectrum(mc: MediumConfig) -> SpectrumConfig:
    """Equivalent spectrum ``omega_i = n_i omega``; check ``.degenerate`` for the vacuum case."""
    return SpectrumConfig(mc.n1 * mc.omega, mc.n2 * mc.omega)


def medium_evolution(mc: MediumConfig, m: MixingConfig, ell: float | None = None) -> np.ndarray:
    """Doublet array after a path ``ell`` through the medium.

    Each computational component picks up ``exp(-i omega t_i)`` with its own
    transit time ``t_i = ell n_i / v0``.
    """
    ell = mc.ell if ell is None else ell
    t1 = ell * mc.n1 / mc.v0
    t2 = ell * mc.n2 / mc.v0
    c, sn = math.cos(m.theta), math.sin(m.theta)
    a = np.exp(-1j * mc.omega * t1)
    b = np.exp(-1j * mc.omega * t2)
    return np.array([[c * a, sn * b], [-sn * a, c * b]], dtype=complex)


def birefringent_gauge_field(mc: MediumConfig, m: MixingConfig) -> float:
    return 0.5 * mc.omega * (mc.n2 - mc.n1) * math.cos(2 * m.theta)


__all__ = [
    "FieldStrength",
    "FreeEnergy",
    "GaugeField",
    "GaugeFunction",
    "InvarianceCheck",
    "MediumConfig",
    "UndefinedCouplingError",
    "birefringent_gauge_field",
    "covariant_derivative_residual",
    "field_strength_is_zero",
    "free_energy_computational",
    "free_energy_operator",
    "free_energy_residual",
    "gauge_field",
    "gauge_invariance_residual",
    "gauge_potential",
    "gauge_rotation",
    "gauge_transform",
    "medium_evolution",
    "medium_to_spectrum",
    "transformed_doublet_at",
    "ts_integral",
    "ts_integral_quadrature",
    "ts_operator",
]
