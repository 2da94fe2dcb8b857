"""Centralised numerical tolerances."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance constants used across the package.

    ``validation`` guards density-matrix checks and exact-arithmetic
    identities, ``derived`` anything that goes through the iterative
    eigensolver (matrix square roots in particular).
    """

    validation: float = 1e-10
    derived: float = 1e-8
    eig: float = 1e-12
    permutation: float = 1e-12
    lipschitz_factor: float = 10.0

    def __post_init__(self):
        for name in ("validation", "derived", "eig", "permutation", "lipschitz_factor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")


DEFAULT_TOLERANCES = Tolerances()
