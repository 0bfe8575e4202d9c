"""Deterministic area-uniform point sets on the unit sphere."""

import math

import numpy as np

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def fibonacci_sphere(n: int) -> np.ndarray:
    """n unit vectors on a Fibonacci spiral lattice, shape (n, 3).

    Each point represents an equal surface patch (area 4*pi/n on the unit
    sphere).  Fully deterministic: no random offset.
    """
    if n < 1:
        raise ValueError("need at least one lattice point")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = i * _GOLDEN_ANGLE
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
