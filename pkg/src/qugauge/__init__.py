"""Two-level system time evolution as a gauge theory in time.

Closed-form evolution, covariant derivative and gauge-invariance checks,
geometric phases, Fubini-Study distances, the birefringence mapping and
linear entropies, each paired with an independent numerical oracle.
"""

from qugauge.linalg2 import DomainError
from qugauge.dynamics import (
    DegenerateSpectrumError,
    Doublet,
    MixingConfig,
    OmegaElements,
    SpectrumConfig,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateSpectrumError",
    "DomainError",
    "Doublet",
    "MixingConfig",
    "OmegaElements",
    "SpectrumConfig",
    "__version__",
]
