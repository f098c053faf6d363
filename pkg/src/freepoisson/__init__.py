"""High order accurate free-space Poisson solves on uniform rectangular grids.

Computes the convolution of the Laplace Green's function with a smooth,
compactly supported density at every node of a 1D/2D/3D grid in O(N log N)
work: a spectral sine-transform solve with homogeneous boundary values plus a
4th or 6th order discrete-harmonic correction whose Dirichlet data comes from
fast Green's-function convolutions over the boundary.
"""

from .boundary import boundary_values_fast, boundary_values_naive
from .bumps import PolyBump, analytic_potential, evaluate_bump
from .dirichlet import solve_phi_star
from .errors import (
    AlignmentError,
    PGridFormatError,
    ShapeError,
    SingularityError,
    SupportViolationError,
)
from .greens import green_value, kernel_slice
from .grid import (
    BoundaryValues,
    GridFunction,
    UniformGrid,
    max_norm_difference,
    restrict_to_subgrid,
)
from .harmonic import (
    sixth_order_rhs,
    solve_harmonic_1d,
    solve_harmonic_4th,
    solve_harmonic_6th,
    transfer_boundary_to_rhs,
)
from .pgrid import read_pgrid, write_pgrid
from .solver import (
    SolveReport,
    SolverConfig,
    domain_invariance_study,
    pad_domain,
    solve_free_space,
)
from .transforms import (
    fast_linear_convolution,
    fast_linear_convolution_2d,
    forward_dst,
    inverse_dst,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BoundaryValues",
    "GridFunction",
    "PGridFormatError",
    "PolyBump",
    "ShapeError",
    "SingularityError",
    "SolveReport",
    "SolverConfig",
    "SupportViolationError",
    "UniformGrid",
    "analytic_potential",
    "boundary_values_fast",
    "boundary_values_naive",
    "domain_invariance_study",
    "evaluate_bump",
    "fast_linear_convolution",
    "fast_linear_convolution_2d",
    "forward_dst",
    "green_value",
    "inverse_dst",
    "kernel_slice",
    "max_norm_difference",
    "pad_domain",
    "read_pgrid",
    "restrict_to_subgrid",
    "sixth_order_rhs",
    "solve_free_space",
    "solve_harmonic_1d",
    "solve_harmonic_4th",
    "solve_harmonic_6th",
    "solve_phi_star",
    "transfer_boundary_to_rhs",
    "write_pgrid",
]
