"""High order solution of Laplace's equation on the box with Dirichlet data.

The 4th order scheme solves the compact width-one operator

    Delta_h + sum_{r<s} (h_r^2 + h_s^2)/12 * D2_r D2_s

whose eigenvectors are the discrete sine modes, so the linear system
diagonalizes under a DST.  Note the eigenvalues here are the *difference*
ones, (2 cos(k pi / M) - 2)/h^2, not the continuous eigenvalues used by the
spectral Poisson solve; the two tables must never be mixed.

A 6th order solution is one further deferred-correction sweep: the truncation
error of the 4th order solution is approximated by width-two difference
operators applied to it and fed back as a right-hand side for the same
compact operator.  Near the boundary, where the width-two stencils do not
fit, the right-hand side is filled by cubic extrapolation along the inward
normal of the nearest face (averaged over ties at edges and corners).

In one dimension the exact solution is linear, so no machinery is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .grid import BoundaryValues, GridFunction, UniformGrid
from .transforms import InteriorModeArray, forward_dst, inverse_dst

__all__ = [
    "CompactOperatorSymbol",
    "build_operator_symbol",
    "compact_operator_stencil",
    "correlate_valid",
    "transfer_boundary_to_rhs",
    "solve_harmonic_4th",
    "sixth_order_rhs",
    "solve_harmonic_6th",
    "solve_harmonic_1d",
]

_D2 = np.array([1.0, -2.0, 1.0])
_D4 = np.array([1.0, -4.0, 6.0, -4.0, 1.0])  # D2 applied twice
_DELTA3 = np.array([0.0, 1.0, 0.0])
_DELTA5 = np.array([0.0, 0.0, 1.0, 0.0, 0.0])


def _outer(arrays) -> np.ndarray:
    out = arrays[0]
    for a in arrays[1:]:
        out = np.multiply.outer(out, a)
    return out


def discrete_eigenvalues(grid: UniformGrid) -> list[np.ndarray]:
    """Per-axis eigenvalues of D2 on the discrete sine modes (all negative)."""
    out = []
    for s in range(grid.dim):
        k = np.arange(1, grid.panels[s])
        out.append((2.0 * np.cos(k * np.pi / grid.panels[s]) - 2.0) / grid.mesh[s] ** 2)
    return out


def compact_operator_stencil(grid: UniformGrid) -> np.ndarray:
    """Dense width-one stencil of the compact 4th order operator.

    Shape (3,)*dim with the evaluation node at the center: the discrete
    Laplacian plus the (h_r^2 + h_s^2)/12 cross-derivative corrections
    (9 points in 2D, 19 in 3D).
    """
    d = grid.dim
    h = grid.mesh
    stencil = np.zeros((3,) * d)
    for s in range(d):
        parts = [_DELTA3] * d
        parts[s] = _D2 / h[s] ** 2
        stencil += _outer(parts)
    for r in range(d):
        for s in range(r + 1, d):
            parts = [_DELTA3] * d
            parts[r] = _D2 / h[r] ** 2
            parts[s] = _D2 / h[s] ** 2
            stencil += (h[r] ** 2 + h[s] ** 2) / 12.0 * _outer(parts)
    return stencil


@dataclass(frozen=True)
class CompactOperatorSymbol:
    """Interior-mode eigenvalues and stencil form of the compact operator."""

    grid: UniformGrid
    values: np.ndarray
    stencil: np.ndarray


def build_operator_symbol(grid: UniformGrid) -> CompactOperatorSymbol:
    """Tabulate the operator's eigenvalue per discrete sine mode."""
    if grid.dim not in (2, 3):
        raise ShapeError("compact harmonic operator is defined for dim 2 and 3")
    lam = discrete_eigenvalues(grid)
    h = grid.mesh
    axed = []
    for s, l in enumerate(lam):
        shape = [1] * grid.dim
        shape[s] = l.size
        axed.append(l.reshape(shape))
    symbol = sum(np.broadcast_to(a, grid.interior_shape).copy() for a in axed)
    for r in range(grid.dim):
        for s in range(r + 1, grid.dim):
            symbol += (h[r] ** 2 + h[s] ** 2) / 12.0 * axed[r] * axed[s]
    if np.any(symbol == 0.0):
        raise ShapeError("compact operator has a vanishing eigenvalue on this grid")
    return CompactOperatorSymbol(grid, symbol, compact_operator_stencil(grid))


def correlate_valid(values: np.ndarray, stencil: np.ndarray) -> np.ndarray:
    """Apply a dense stencil wherever every tap stays inside the array.

    out[j] = sum_m stencil[m] * values[j + m]; the output index j addresses
    the stencil's corner, so entry j corresponds to node j + center.
    """
    out_shape = tuple(n - w + 1 for n, w in zip(values.shape, stencil.shape))
    if any(n < 1 for n in out_shape):
        raise ShapeError("array too small for stencil")
    out = np.zeros(out_shape)
    for idx in np.ndindex(stencil.shape):
        c = stencil[idx]
        if c != 0.0:
            sl = tuple(slice(i, i + n) for i, n in zip(idx, out_shape))
            out += c * values[sl]
    return out


def transfer_boundary_to_rhs(
    g: BoundaryValues, stencil: np.ndarray | CompactOperatorSymbol
) -> GridFunction:
    """Move boundary-value stencil contributions to the right-hand side.

    Returns the grid function that is nonzero only on the first interior
    layer: minus the compact operator applied to the boundary-extended field
    (interior zero).  Interior nodes at depth two or more come out exactly
    zero because the width-one stencil cannot reach the boundary from there.
    """
    if isinstance(stencil, CompactOperatorSymbol):
        stencil = stencil.stencil
    grid = g.grid
    extended = g.as_full_array()
    extended[(slice(1, -1),) * grid.dim] = 0.0
    rhs = GridFunction.zeros(grid)
    rhs.values[(slice(1, -1),) * grid.dim] = -correlate_valid(extended, stencil)
    return rhs


def _spectral_solve(
    symbol: CompactOperatorSymbol, rhs_interior: np.ndarray, g: BoundaryValues
) -> GridFunction:
    coeff = forward_dst(GridFunction(symbol.grid, _embed_interior(symbol.grid, rhs_interior)))
    modes = InteriorModeArray(symbol.grid, coeff.coefficients / symbol.values)
    u = inverse_dst(modes)
    full = g.as_full_array()
    full[(slice(1, -1),) * symbol.grid.dim] = u.interior()
    return GridFunction(symbol.grid, full).assert_finite()


def _embed_interior(grid: UniformGrid, interior: np.ndarray) -> np.ndarray:
    full = np.zeros(grid.shape)
    full[(slice(1, -1),) * grid.dim] = interior
    return full


def solve_harmonic_4th(g: BoundaryValues) -> GridFunction:
    """4th order discrete-harmonic extension of the boundary data."""
    grid = g.grid
    if min(grid.panels) < 4:
        raise ShapeError("4th order harmonic solve needs at least 4 panels per axis")
    symbol = build_operator_symbol(grid)
    g_rhs = transfer_boundary_to_rhs(g, symbol)
    return _spectral_solve(symbol, g_rhs.interior().copy(), g)


def sixth_order_rhs(u1: GridFunction) -> GridFunction:
    """Deferred-correction right-hand side built from a 4th order solution.

    Applies the width-two truncation-error operators where they fit (all
    node coordinates at depth >= 2 from the boundary) and fills the layer
    adjacent to the boundary by cubic extrapolation along the inward normal
    of the nearest face; where several faces tie (edges, corners) the tied
    directions are averaged.
    """
    grid = u1.grid
    if grid.dim not in (2, 3):
        raise ShapeError("sixth order correction is defined for dim 2 and 3")
    if min(grid.panels) < 7:
        # Extrapolation reads four directly-computed values along the normal,
        # which requires a deep interior at least four nodes wide.
        raise ShapeError(
            "sixth order correction needs at least 7 panels per axis "
            "(width-two stencils plus a four-point extrapolation ray)"
        )
    h = grid.mesh
    d = grid.dim

    stencil = np.zeros((5,) * d)
    for r in range(d):
        for s in range(d):
            if r == s:
                continue
            # coefficient of D2_r D2_r D2_s
            coeff = h[r] ** 4 / 240.0 + h[r] ** 2 * h[s] ** 2 / 144.0
            parts = [_DELTA5] * d
            parts[r] = _D4 / h[r] ** 4
            parts[s] = np.pad(_D2, 1) / h[s] ** 2
            stencil += coeff * _outer(parts)

    rhs = np.zeros(grid.shape)
    deep = tuple(slice(2, -2) for _ in range(d))
    rhs[deep] = correlate_valid(u1.values, stencil)

    # Depth-1 layer by cubic extrapolation, corners after edges after faces.
    depth = []
    for s in range(d):
        idx = np.arange(grid.panels[s] + 1)
        shape = [1] * d
        shape[s] = idx.size
        depth.append(np.minimum(idx, grid.panels[s] - idx).reshape(shape))
    tie_count = sum((dp == 1).astype(int) for dp in depth)
    tie_count = np.broadcast_to(tie_count, grid.shape)

    for current_tie in range(1, d + 1):
        contrib = np.zeros(grid.shape)
        counts = np.zeros(grid.shape, dtype=int)
        for axis in range(d):
            for side in (0, 1):
                m_ax = grid.panels[axis]
                base = [slice(1, -1)] * d
                base[axis] = 1 if side == 0 else m_ax - 1

                def ray(k):
                    sel = list(base)
                    sel[axis] = 1 + k if side == 0 else m_ax - 1 - k
                    return rhs[tuple(sel)]

                extrap = 4.0 * ray(1) - 6.0 * ray(2) + 4.0 * ray(3) - ray(4)
                layer = tuple(base)
                mask = tie_count[layer] == current_tie
                contrib[layer][mask] += extrap[mask]
                counts[layer][mask] += 1
        filled = counts > 0
        rhs[filled] = contrib[filled] / counts[filled]

    return GridFunction(grid, rhs).assert_finite()


def solve_harmonic_6th(g: BoundaryValues) -> GridFunction:
    """6th order harmonic extension: 4th order solve plus one correction sweep."""
    grid = g.grid
    symbol = build_operator_symbol(grid)
    g_rhs = transfer_boundary_to_rhs(g, symbol)
    u1 = _spectral_solve(symbol, g_rhs.interior().copy(), g)
    correction = sixth_order_rhs(u1)
    total = g_rhs.interior() + correction.interior()
    return _spectral_solve(symbol, total, g)


def solve_harmonic_1d(g_left: float, g_right: float, grid: UniformGrid) -> GridFunction:
    """Exact 1D harmonic solution: the linear interpolant of the endpoints."""
    if grid.dim != 1:
        raise ShapeError("solve_harmonic_1d needs a one-dimensional grid")
    t = np.arange(grid.panels[0] + 1) / grid.panels[0]
    values = float(g_left) * (1.0 - t) + float(g_right) * t
    return GridFunction(grid, values)
