"""Fixed-size complex linear algebra for a two-level system.

Kets are complex numpy arrays of shape ``(2,)`` and operators are complex
arrays of shape ``(2, 2)``. Nothing here handles general dimensions.
"""

import math

import numpy as np

NORM_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


KET0 = _frozen([1, 0])
KET1 = _frozen([0, 1])

IDENTITY = _frozen([[1, 0], [0, 1]])
SIGMA1 = _frozen([[0, 1], [1, 0]])
SIGMA2 = _frozen([[0, -1j], [1j, 0]])
SIGMA3 = _frozen([[1, 0], [0, -1]])


def ket(c0: complex, c1: complex, normalize: bool = False) -> np.ndarray:
    """Build a two-component ket from its amplitudes on ``|0>`` and ``|1>``.

    With ``normalize=False`` the amplitudes must already be normalized to
    within ``NORM_TOL``; the ket is never silently rescaled.
    """
    v = np.array([c0, c1], dtype=complex)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"ket amplitudes must be finite, got {v!r}")
    n = math.sqrt(float(np.vdot(v, v).real))
    if normalize:
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return v / n
    if abs(n - 1.0) > NORM_TOL:
        raise DomainError(f"ket is not normalized (norm {n!r})")
    return v


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Return ``<a|b>``, conjugating the first argument."""
    return complex(np.vdot(a, b))


def outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return the rank-one operator ``|a><b|``."""
    return np.outer(a, np.conj(b))


def apply(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    # no renormalization; callers decide
    return m @ v


def exp_sigma1(a: float) -> np.ndarray:
    """Closed-form ``exp(-i a sigma_1) = cos(a) I - i sin(a) sigma_1``."""
    if not math.isfinite(a):
        raise DomainError(f"exp_sigma1 needs a finite argument, got {a!r}")
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def is_hermitian(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    return float(np.max(np.abs(m - m.conj().T))) <= tol


def is_unitary(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    return float(np.max(np.abs(m.conj().T @ m - IDENTITY))) <= tol


def expectation(op: np.ndarray, v: np.ndarray) -> complex:
    """``<v|op|v>`` for a single ket."""
    return complex(np.vdot(v, op @ v))
