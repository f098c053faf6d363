"""Free-space Green's functions of the Laplace operator in 1, 2 and 3 dimensions.

All kernels are radial:

    d = 1:  G(r) = r / 2
    d = 2:  G(r) = log(r) / (2 pi)
    d = 3:  G(r) = -1 / (4 pi r)

The 2D and 3D kernels are singular at r = 0; callers must never request a
zero-distance value (the zero collar around the density guarantees this in
the boundary accumulation).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SingularityError

__all__ = ["green_value", "green_values", "kernel_slice"]


def green_value(dim: int, r: float) -> float:
    """Green's function at distance ``r >= 0``."""
    if r < 0:
        raise ValueError(f"distance must be nonnegative, got {r}")
    if dim == 1:
        return 0.5 * r
    if r == 0.0:
        raise SingularityError(f"Green's function is singular at r=0 for dim {dim}")
    if dim == 2:
        return math.log(r) / (2.0 * math.pi)
    if dim == 3:
        return -1.0 / (4.0 * math.pi * r)
    raise ValueError(f"dim must be 1, 2 or 3, got {dim}")


def green_values(dim: int, r: np.ndarray) -> np.ndarray:
    """Vectorized ``green_value`` over an array of distances."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("distances must be nonnegative")
    if dim == 1:
        return 0.5 * r
    if np.any(r == 0.0):
        raise SingularityError(f"Green's function is singular at r=0 for dim {dim}")
    if dim == 2:
        return np.log(r) / (2.0 * np.pi)
    if dim == 3:
        return -1.0 / (4.0 * np.pi * r)
    raise ValueError(f"dim must be 1, 2 or 3, got {dim}")


def kernel_slice(dim: int, fixed_offsets, axis_offsets) -> np.ndarray:
    """Kernel values along one axis with the other coordinates frozen.

    ``fixed_offsets`` holds the dim-1 frozen coordinate differences and
    ``axis_offsets`` the sampled offsets along the remaining axis.  Returns
    G(sqrt(fixed^2 + offset^2)) per sample; any zero combined distance is a
    singularity error.
    """
    fixed = np.atleast_1d(np.asarray(fixed_offsets, dtype=np.float64))
    if fixed.size != dim - 1:
        raise ValueError(
            f"expected {dim - 1} fixed offsets for dim {dim}, got {fixed.size}"
        )
    if dim not in (2, 3):
        raise ValueError(f"kernel slices exist only for dim 2 or 3, got {dim}")
    offsets = np.asarray(axis_offsets, dtype=np.float64)
    dist = np.sqrt(float(np.sum(fixed * fixed)) + offsets * offsets)
    return green_values(dim, dist)
