"""Green's-function boundary values of a gridded density.

Every boundary node of the grid receives the Trapezoidal approximation of the
free-space convolution integral, summed over interior source nodes (boundary
sources carry a zero density by precondition, so leaving them out loses
nothing and keeps every kernel evaluation away from the singularity).

Two implementations share that definition:

* ``boundary_values_naive`` accumulates one boundary node at a time; it is
  the reference oracle, with cost O(N^(2d-1)/d).
* ``boundary_values_fast`` rearranges each face's double (triple) sum into a
  per-slice discrete convolution, evaluated with zero-padded FFTs, for
  O(N log N) total work.  Slices are independent, so they are farmed out to a
  thread pool; the per-face reduction is serial and in ascending slice order,
  which makes the output bitwise independent of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .dirichlet import check_support
from .grid import BoundaryValues, GridFunction, UniformGrid
from .greens import green_values
from .transforms import next_smooth_length

__all__ = ["FaceConvolutionPlan", "boundary_values_naive", "boundary_values_fast"]


def _interior_points(grid: UniformGrid):
    axes = [grid.axis_coordinates(s)[1:-1] for s in range(grid.dim)]
    mesh = np.meshgrid(*axes, indexing="ij", sparse=True)
    return [np.ascontiguousarray(np.broadcast_to(m, grid.interior_shape)).ravel()
            for m in mesh]


def _face_target_coords(grid: UniformGrid, axis: int, side: int):
    """Coordinate arrays (flattened) of every node on one face."""
    coords = []
    face_axes = [s for s in range(grid.dim) if s != axis]
    shapes = [grid.panels[s] + 1 for s in face_axes]
    pinned = grid.upper[axis] if side else grid.lower[axis]
    for s in range(grid.dim):
        if s == axis:
            coords.append(np.full(shapes, pinned).ravel())
        else:
            c = grid.axis_coordinates(s)
            shape = [1] * len(face_axes)
            shape[face_axes.index(s)] = c.size
            arr = np.broadcast_to(c.reshape(shape), shapes)
            coords.append(np.ascontiguousarray(arr).ravel())
    return coords, tuple(shapes)


def boundary_values_naive(rho: GridFunction, chunk: int = 256) -> BoundaryValues:
    """Trapezoidal boundary sums accumulated target node by target node.

    Pure reference implementation; use the fast variant for production runs.
    """
    grid = rho.grid
    check_support(rho)
    weight = float(np.prod(grid.mesh))
    src = _interior_points(grid)
    density = rho.interior().ravel()
    faces = {}
    for axis in range(grid.dim):
        for side in (0, 1):
            targets, face_shape = _face_target_coords(grid, axis, side)
            n = targets[0].size
            vals = np.empty(n)
            for lo in range(0, n, chunk):
                hi = min(lo + chunk, n)
                dist_sq = np.zeros((hi - lo, density.size))
                for t, s in zip(targets, src):
                    diff = t[lo:hi, None] - s[None, :]
                    dist_sq += diff * diff
                g = green_values(grid.dim, np.sqrt(dist_sq))
                vals[lo:hi] = g @ density
            faces[(axis, side)] = (vals * weight).reshape(face_shape or ())
    return BoundaryValues(grid, faces)


@dataclass(frozen=True)
class FaceConvolutionPlan:
    """Shapes and index windows for one face's per-slice convolutions.

    For each source slice along the face normal, a kernel sampled at in-face
    offsets -(M_s-1)..+(M_s-1) is convolved with the slice's interior data;
    the window [M_s-2, 2M_s-1) of the full convolution holds the values at
    the face's own node range 0..M_s.
    """

    axis: int
    side: int
    in_axes: tuple[int, ...]
    kernel_shape: tuple[int, ...]
    data_shape: tuple[int, ...]
    padded_shape: tuple[int, ...]
    wanted: tuple[tuple[int, int], ...]
    normal_slices: range


def _plan_face(grid: UniformGrid, axis: int, side: int) -> FaceConvolutionPlan:
    in_axes = tuple(s for s in range(grid.dim) if s != axis)
    kernel_shape = tuple(2 * grid.panels[s] - 1 for s in in_axes)
    data_shape = tuple(grid.panels[s] - 1 for s in in_axes)
    full = tuple(k + d - 1 for k, d in zip(kernel_shape, data_shape))
    padded = tuple(next_smooth_length(n) for n in full)
    wanted = tuple(
        (grid.panels[s] - 2, 2 * grid.panels[s] - 1) for s in in_axes
    )
    return FaceConvolutionPlan(
        axis=axis,
        side=side,
        in_axes=in_axes,
        kernel_shape=kernel_shape,
        data_shape=data_shape,
        padded_shape=padded,
        wanted=wanted,
        normal_slices=range(1, grid.panels[axis]),
    )


def _kernel_fft(grid: UniformGrid, plan: FaceConvolutionPlan, dist_panels: int):
    """FFT of the kernel slice at a whole-panel normal distance.

    The in-face Trapezoidal weights are folded into the kernel, so each
    kernel transform is shared by the two opposite faces of its axis.
    """
    h_normal = grid.mesh[plan.axis]
    fixed = dist_panels * h_normal
    offsets = [
        (np.arange(2 * grid.panels[s] - 1) - (grid.panels[s] - 1)) * grid.mesh[s]
        for s in plan.in_axes
    ]
    dist_sq = np.array(fixed * fixed)
    for i, off in enumerate(offsets):
        shape = [1] * len(offsets)
        shape[i] = off.size
        dist_sq = dist_sq + (off * off).reshape(shape)
    kernel = green_values(grid.dim, np.sqrt(dist_sq))
    kernel *= float(np.prod([grid.mesh[s] for s in plan.in_axes]))
    return sfft.rfftn(kernel, plan.padded_shape)


def _slice_data(rho: GridFunction, axis: int, p: int) -> np.ndarray:
    sl = [slice(1, -1)] * rho.grid.dim
    sl[axis] = p
    return rho.values[tuple(sl)]


def _convolve_slice(data: np.ndarray, kernel_fft, plan: FaceConvolutionPlan):
    out = sfft.irfftn(sfft.rfftn(data, plan.padded_shape) * kernel_fft,
                      plan.padded_shape)
    window = tuple(slice(a, b) for a, b in plan.wanted)
    return out[window]


def _boundary_1d(rho: GridFunction) -> BoundaryValues:
    # Single sums per endpoint; no convolution machinery needed in 1D.
    grid = rho.grid
    h = grid.mesh[0]
    coords = grid.axis_coordinates(0)[1:-1]
    density = rho.interior()
    faces = {}
    for side, x_b in ((0, grid.lower[0]), (1, grid.upper[0])):
        g = green_values(1, np.abs(x_b - coords))
        faces[(0, side)] = np.array(float(np.dot(g, density)) * h)
    return BoundaryValues(grid, faces)


def boundary_values_fast(rho: GridFunction, thread_count: int = 1) -> BoundaryValues:
    """Boundary sums via per-slice FFT convolutions; O(N log N).

    Mathematically identical to :func:`boundary_values_naive` (the slices
    cover exactly the interior sources); agreement is limited only by FFT
    roundoff.  ``thread_count`` bounds the worker threads used for the
    independent slice convolutions; the result is bitwise identical for any
    value.
    """
    if thread_count < 1:
        raise ValueError("thread_count must be positive")
    grid = rho.grid
    check_support(rho)
    if grid.dim == 1:
        return _boundary_1d(rho)

    plans = {
        (axis, side): _plan_face(grid, axis, side)
        for axis in range(grid.dim)
        for side in (0, 1)
    }

    slice_tasks = []  # (face key, normal index p, data array)
    for key, plan in sorted(plans.items()):
        for p in plan.normal_slices:
            data = _slice_data(rho, plan.axis, p)
            if np.any(data):
                slice_tasks.append((key, p, data))

    kernel_ffts = {}
    results = {}

    def build_kernel(key):
        axis, d = key
        return key, _kernel_fft(grid, plans[(axis, 0)], d)

    def run_slice(task):
        key, p, data = task
        axis, side = key
        dist = p if side == 0 else grid.panels[axis] - p
        return (key, p), _convolve_slice(data, kernel_ffts[(axis, dist)], plans[key])

    # Kernel transforms are keyed by (axis, whole-panel distance); distance d
    # serves slice p=d of the lower face and slice M-d of the upper face.
    needed = sorted(
        {
            (key[0], p if key[1] == 0 else grid.panels[key[0]] - p)
            for key, p, _ in slice_tasks
        }
    )
    if thread_count == 1:
        for k in needed:
            kernel_ffts.update([build_kernel(k)])
        for task in slice_tasks:
            k, v = run_slice(task)
            results[k] = v
    else:
        with ThreadPoolExecutor(max_workers=thread_count) as pool:
            kernel_ffts.update(pool.map(build_kernel, needed))
            for k, v in pool.map(run_slice, slice_tasks):
                results[k] = v

    faces = {}
    for key, plan in sorted(plans.items()):
        face_shape = tuple(grid.panels[s] + 1 for s in plan.in_axes)
        acc = np.zeros(face_shape)
        for p in plan.normal_slices:  # fixed ascending order: deterministic
            w = results.get((key, p))
            if w is not None:
                acc += w
        faces[key] = acc * grid.mesh[plan.axis]
    return BoundaryValues(grid, faces)
