"""Brute-force reference methods used to cross-check the closed forms.

Nothing in here may call the closed-form evolution or the entropy shortcuts:
RK4 integrates the Schrodinger equation from the Hamiltonian matrix alone,
and the purification tensor builds the doubled state explicitly and traces
it out index by index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qugauge.linalg2 import DomainError


class ConfigurationError(DomainError):
    """Raised for integrator or quadrature settings that violate their invariants."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``renormalize_every`` rescales the state to unit norm every that many
    steps; 0 disables it so norm drift stays observable.
    """

    step: float = 1e-3
    t_end: float = 2 * math.pi
    renormalize_every: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise ConfigurationError(f"step must be positive and finite, got {self.step!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ConfigurationError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        if self.renormalize_every < 0:
            raise ConfigurationError("renormalize_every must be >= 0")

    def check_resolution(self, h_matrix: np.ndarray) -> None:
        fastest = max(float(np.max(np.abs(h_matrix))), 1.0)
        limit = 0.01 * 2 * math.pi / fastest
        if self.step > limit * (1 + 1e-12):
            raise ConfigurationError(
                f"step {self.step} resolves fewer than 100 steps per fastest oscillation "
                f"(need step <= {limit:.6g})"
            )


@dataclass(frozen=True)
class QuadratureConfig:
    panels: int = 10_000
    rule: str = "simpson"

    def __post_init__(self):
        if self.rule != "simpson":
            raise ConfigurationError(f"unsupported quadrature rule {self.rule!r}")
        if self.panels < 2 or self.panels % 2:
            raise ConfigurationError(f"Simpson needs an even panel count >= 2, got {self.panels}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def rk4_step(h_matrix: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
    """One classic RK4 step of ``dv/dt = -i H v`` (``v`` may hold several columns)."""
    a = -1j * h_matrix
    k1 = a @ v
    k2 = a @ (v + 0.5 * dt * k1)
    k3 = a @ (v + 0.5 * dt * k2)
    k4 = a @ (v + dt * k3)
    return v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagate(h_matrix, v, duration: float, max_step: float, renormalize_every: int = 0):
    """Propagate ``v`` over ``duration`` with equal steps no longer than ``max_step``."""
    h_matrix = np.asarray(h_matrix, dtype=complex)
    v = np.array(v, dtype=complex)
    n = max(1, math.ceil(abs(duration) / max_step - 1e-9)) if duration else 0
    dt = duration / n if n else 0.0
    for k in range(1, n + 1):
        v = rk4_step(h_matrix, v, dt)
        if renormalize_every and k % renormalize_every == 0:
            v = v / np.linalg.norm(v, axis=0)
    return v


def integrate_schrodinger(spectrum, psi0, cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """RK4 trajectory of ``i d psi/dt = H psi`` from ``t = 0`` to ``cfg.t_end``.

    ``spectrum`` is a :class:`~qugauge.dynamics.SpectrumConfig` or a 2x2
    Hamiltonian matrix. The step is shortened, if needed, so that an integer
    number of steps lands exactly on ``t_end``.
    """
    if hasattr(spectrum, "omega1"):
        h_matrix = np.diag([spectrum.omega1, spectrum.omega2]).astype(complex)
    else:
        h_matrix = np.asarray(spectrum, dtype=complex)
    cfg.check_resolution(h_matrix)
    n = max(1, math.ceil(cfg.t_end / cfg.step - 1e-9)) if cfg.t_end else 0
    dt = cfg.t_end / n if n else 0.0
    states = np.empty((n + 1,) + np.shape(psi0), dtype=complex)
    states[0] = psi0
    v = states[0]
    for k in range(1, n + 1):
        v = rk4_step(h_matrix, v, dt)
        if cfg.renormalize_every and k % cfg.renormalize_every == 0:
            v = v / np.linalg.norm(v)
        states[k] = v
    return Trajectory(np.linspace(0.0, cfg.t_end, n + 1), states)


def simpson(f, t0: float, t1: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Composite Simpson estimate of the integral of ``f`` over ``[t0, t1]``.

    ``f`` is called once on the whole node array when it vectorizes,
    otherwise node by node.
    """
    if not isinstance(cfg, QuadratureConfig):
        cfg = QuadratureConfig(int(cfg))
    n = cfg.panels
    ts = np.linspace(t0, t1, n + 1)
    try:
        ys = np.asarray(f(ts))
    except TypeError:
        ys = None
    if ys is None or ys.shape != ts.shape:
        ys = np.array([f(t) for t in ts])
    if not np.all(np.isfinite(ys)):
        raise DomainError("integrand is not finite on the interval")
    hstep = (t1 - t0) / n
    total = (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()) * hstep / 3.0
    return float(total) if np.isrealobj(ys) else complex(total)


def central_diff(f, t: float, h: float = 1e-5) -> np.ndarray:
    """``(f(t+h) - f(t-h)) / 2h``."""
    if not h > 0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")
    return (np.asarray(f(t + h)) - np.asarray(f(t - h))) / (2 * h)


@dataclass(frozen=True, eq=False)
class Purification:
    """A doubled pure state and its two explicit partial traces.

    ``state`` has four components ordered ``|a, b~>`` with index ``2a + b``.
    """

    state: np.ndarray
    rho_system: np.ndarray
    rho_tilde: np.ndarray
    basis: str


def partial_traces(state4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rho = np.outer(state4, state4.conj()).reshape(2, 2, 2, 2)
    rho_system = np.zeros((2, 2), dtype=complex)
    rho_tilde = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            for j in range(2):
                rho_system[i, k] += rho[i, j, k, j]
                rho_tilde[i, k] += rho[j, i, j, k]
    return rho_system, rho_tilde


def purification_tensor(m, s, t: float = 0.0, basis: str = "computational", which: str = "phi") -> Purification:
    """Materialize the doubled state of ``phi(t)`` (or ``psi(t)``) and trace it out.

    ``basis="computational"`` doubles ``|0> -> |0 0~>``, ``|1> -> |1 1~>``
    on the amplitudes of the state at time ``t``. ``basis="phi-psi"``
    expands the state on ``{phi(0), psi(0)}`` and doubles that pair
    instead; the reduced matrices are then expressed in the phi/psi basis.
    """
    if which not in ("phi", "psi"):
        raise DomainError(f"which must be 'phi' or 'psi', got {which!r}")
    c, sn = math.cos(m.theta), math.sin(m.theta)
    phi0 = np.array([c, sn], dtype=complex)
    psi0 = np.array([-sn, c], dtype=complex)
    h_diag = np.array([s.omega1, s.omega2], dtype=float)
    u = np.diag(np.exp(-1j * h_diag * t))
    xi_t = u @ (phi0 if which == "phi" else psi0)

    if basis == "computational":
        amps = xi_t
    elif basis == "phi-psi":
        amps = np.array([np.vdot(phi0, xi_t), np.vdot(psi0, xi_t)])
    else:
        raise DomainError(f"basis must be 'computational' or 'phi-psi', got {basis!r}")

    state = np.zeros(4, dtype=complex)
    for a in range(2):
        state[2 * a + a] = amps[a]
    rho_system, rho_tilde = partial_traces(state)
    return Purification(state, rho_system, rho_tilde, basis)
