"""Spectrally accurate Poisson solve with homogeneous Dirichlet data on the box.

The density is expanded in the discrete sine basis and each mode is divided by
the continuous Laplacian eigenvalue

    lambda(k) = -sum_s k_s^2 pi^2 / (upper_s - lower_s)^2 .

Using the continuous eigenvalues (not the difference-stencil ones, which
belong to the harmonic solver) is what makes this component spectrally
accurate: the result solves Poisson's equation exactly for the sine
interpolant of the density.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SupportViolationError
from .grid import GridFunction, UniformGrid
from .transforms import InteriorModeArray, forward_dst, inverse_dst

__all__ = ["continuous_eigenvalues", "solve_phi_star"]

SUPPORT_RTOL = 1e-14


def continuous_eigenvalues(grid: UniformGrid) -> np.ndarray:
    """Continuous Laplacian eigenvalue per interior sine mode (all negative)."""
    terms = []
    for s in range(grid.dim):
        length = grid.upper[s] - grid.lower[s]
        k = np.arange(1, grid.panels[s])
        shape = [1] * grid.dim
        shape[s] = k.size
        terms.append(((k * math.pi / length) ** 2).reshape(shape))
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return -np.broadcast_to(total, grid.interior_shape).copy()


def check_support(rho: GridFunction, rtol: float = SUPPORT_RTOL) -> float:
    """Verify the density vanishes on the grid boundary.

    Returns max boundary |rho|; raises SupportViolationError when it exceeds
    ``rtol * max |rho|``.
    """
    boundary_max = rho.boundary_abs_max()
    scale = float(np.max(np.abs(rho.values)))
    if boundary_max > rtol * scale:
        raise SupportViolationError(
            f"density is nonzero on the boundary (max {boundary_max:.3e}, "
            f"max |rho| {scale:.3e}); enlarge the domain or add padding"
        )
    return boundary_max


def solve_phi_star(rho: GridFunction) -> GridFunction:
    """Solve Laplacian(phi) = rho with zero Dirichlet boundary values.

    The density must vanish on the boundary (its support is assumed a
    positive distance inside the domain).  The returned field has exactly
    zero boundary values.
    """
    check_support(rho)
    beta = forward_dst(rho)
    alpha = beta.coefficients / continuous_eigenvalues(rho.grid)
    return inverse_dst(InteriorModeArray(rho.grid, alpha)).assert_finite()
