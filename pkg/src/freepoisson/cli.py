"""Command-line front end: single solves, convergence / domain / thread studies.

Studies emit CSV (written atomically: temp file, then rename) and print a
summary table; single solves write PGRID files.  A study can also be driven
by a plain key=value config file, with command-line flags taking precedence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .bumps import PolyBump
from .grid import GridFunction, UniformGrid
from .pgrid import read_pgrid, write_pgrid
from .solver import SolverConfig, domain_invariance_study, solve_free_space

__all__ = [
    "StudySpec",
    "run_convergence_study",
    "run_domain_study",
    "run_thread_benchmark",
    "main",
]

DEFAULT_CENTER = (1.0 / math.sqrt(31.0), 0.2, 0.1)
CONVERGENCE_HEADER = (
    "h,panels,order,diff,max_rel_err,t_phistar_s,t_boundary_s,t_harmonic_s"
)
DOMAIN_HEADER = "D,max_rel_diff"
THREADS_HEADER = "threads,t_phistar_s,t_boundary_s,t_harmonic_s,t_total_s,speedup"


@dataclass
class StudySpec:
    """Fully resolved parameters of one CLI run."""

    kind: str
    dim: int = 3
    domain: tuple[float, ...] = ()
    panels: tuple[int, ...] = ()
    h_list: tuple[float, ...] = ()
    d_list: tuple[float, ...] = ()
    thread_list: tuple[int, ...] = ()
    order: int = 6
    diff: int | None = None
    p: int | None = None
    eps: float = 0.4
    center: tuple[float, ...] = ()
    padding_panels: int = 0
    fft_friendly: bool = False
    threads: int = 1
    fit_min_h: float | None = None
    fit_max_h: float | None = None
    out: str | None = None
    format: str = "csv"
    rho_file: str | None = None

    def __post_init__(self):
        if self.kind not in ("solve", "convergence", "domain", "threads"):
            raise ValueError(f"unknown study kind {self.kind!r}")
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        if not self.domain:
            self.domain = tuple(v for _ in range(self.dim) for v in (-1.0, 1.0))
        if len(self.domain) != 2 * self.dim:
            raise ValueError("domain needs a lower and upper bound per axis")
        if not self.center:
            self.center = DEFAULT_CENTER[: self.dim]
        if len(self.center) != self.dim:
            raise ValueError("center needs one coordinate per axis")
        if self.p is None:
            self.p = (6 if self.diff is None else self.diff) + 1
        elif self.diff is not None and self.p != self.diff + 1:
            raise ValueError("give either --p or --diff, not conflicting values")
        self.diff = self.p - 1
        if self.order not in (4, 6):
            raise ValueError("order must be 4 or 6")
        if any(h <= 0 for h in self.h_list):
            raise ValueError("h values must be positive")

    @property
    def lower(self) -> tuple[float, ...]:
        return self.domain[0::2]

    @property
    def upper(self) -> tuple[float, ...]:
        return self.domain[1::2]

    def bump(self) -> PolyBump:
        return PolyBump(self.dim, self.eps, self.p, self.center)

    def solver_config(self, threads: int | None = None) -> SolverConfig:
        return SolverConfig(
            order=self.order,
            padding_panels=self.padding_panels,
            fft_friendly_expansion=self.fft_friendly,
            thread_count=threads if threads is not None else self.threads,
        )

    def grid_for_h(self, h: float) -> UniformGrid:
        panels = []
        for a, b in zip(self.lower, self.upper):
            m = (b - a) / h
            if abs(m - round(m)) > 1e-9 * m or round(m) < 2:
                raise ValueError(
                    f"mesh width {h} does not divide the domain extent {b - a}"
                )
            panels.append(int(round(m)))
        return UniformGrid(self.lower, self.upper, panels)

    def base_grid(self) -> UniformGrid:
        if not self.panels:
            raise ValueError("this study needs --panels")
        panels = self.panels if len(self.panels) > 1 else self.panels * self.dim
        return UniformGrid(self.lower, self.upper, panels)


def fit_slope(hs, errs, fit_min_h=None, fit_max_h=None) -> float:
    """Least-squares slope of log(err) against log(h) over an h window."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    keep = np.ones(hs.size, dtype=bool)
    if fit_min_h is not None:
        keep &= hs >= fit_min_h * (1 - 1e-12)
    if fit_max_h is not None:
        keep &= hs <= fit_max_h * (1 + 1e-12)
    if keep.sum() < 2:
        raise ValueError("need at least two h values inside the fit window")
    if np.any(errs[keep] <= 0):
        raise ValueError("cannot fit a rate through zero error values")
    return float(np.polyfit(np.log(hs[keep]), np.log(errs[keep]), 1)[0])


def run_convergence_study(spec: StudySpec):
    """Solve over the h sequence against the bump's analytic potential.

    Returns (rows, slope); each row matches the CSV header.
    """
    if not spec.h_list:
        raise ValueError("convergence study needs --h-list")
    grids = [spec.grid_for_h(h) for h in spec.h_list]  # validate all up front
    bump = spec.bump()
    config = spec.solver_config()
    rows = []
    for h, grid in zip(spec.h_list, grids):
        phi, report = solve_free_space(bump, grid, config)
        exact = GridFunction.from_callable(grid, bump.potential)
        err = float(
            np.max(np.abs(phi.values - exact.values))
            / np.max(np.abs(exact.values))
        )
        rows.append(
            (
                h,
                grid.panels[0] if len(set(grid.panels)) == 1 else
                "x".join(str(m) for m in grid.panels),
                spec.order,
                spec.diff,
                err,
                report.t_phistar_s,
                report.t_boundary_s,
                report.t_harmonic_s,
            )
        )
    slope = fit_slope(
        spec.h_list, [r[4] for r in rows], spec.fit_min_h, spec.fit_max_h
    )
    return rows, slope


def run_domain_study(spec: StudySpec):
    """Domain-expansion study: rows of (D, max relative difference)."""
    if not spec.d_list:
        raise ValueError("domain study needs --d-list")
    rows = domain_invariance_study(
        spec.bump(), spec.base_grid(), spec.d_list, spec.solver_config()
    )
    return rows


def run_thread_benchmark(spec: StudySpec):
    """Fixed problem, varying thread counts; asserts identical output."""
    if not spec.thread_list:
        raise ValueError("thread benchmark needs --thread-list")
    grid = spec.base_grid()
    bump = spec.bump()
    rows = []
    reference = None
    base_time = None
    for threads in spec.thread_list:
        phi, report = solve_free_space(bump, grid, spec.solver_config(threads))
        if reference is None:
            reference = phi
            base_time = report.t_total_s
        elif not np.array_equal(phi.values, reference.values):
            raise AssertionError(
                f"solution with {threads} threads differs from the first run"
            )
        rows.append(
            (
                threads,
                report.t_phistar_s,
                report.t_boundary_s,
                report.t_harmonic_s,
                report.t_total_s,
                base_time / report.t_total_s if report.t_total_s > 0 else 1.0,
            )
        )
    return rows


def _format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


def write_csv(path, header: str, rows) -> None:
    """Write CSV atomically so failed runs never leave partial files."""
    text = header + "\n" + "\n".join(
        ",".join(_format_cell(v) for v in row) for row in rows
    ) + "\n"
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".csv-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_solve(spec: StudySpec) -> None:
    config = spec.solver_config()
    if spec.rho_file:
        rho = read_pgrid(spec.rho_file)
        phi, report = solve_free_space(rho, None, config)
        grid = rho.grid
    else:
        grid = spec.base_grid()
        phi, report = solve_free_space(spec.bump(), grid, config)
    print(
        f"solved {grid.dim}D grid {'x'.join(str(m) for m in grid.panels)} "
        f"(order {spec.order}); timings: phi* {report.t_phistar_s:.3f}s, "
        f"boundary {report.t_boundary_s:.3f}s, harmonic {report.t_harmonic_s:.3f}s"
    )
    if spec.out:
        if spec.format == "pgrid":
            write_pgrid(spec.out, phi)
        else:
            coords = np.meshgrid(
                *(grid.axis_coordinates(s) for s in range(grid.dim)),
                indexing="ij",
            )
            header = ",".join("xyz"[: grid.dim]) + ",phi"
            rows = zip(*(c.ravel() for c in coords), phi.values.ravel())
            write_csv(spec.out, header, rows)
        print(f"wrote {spec.out}")


def _print_rows(header: str, rows) -> None:
    print(header)
    for row in rows:
        print(",".join(_format_cell(v) for v in row))


def load_config_file(path) -> dict:
    """Parse a plain key=value file ('#' starts a comment)."""
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {raw!r} is not key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


_LIST_KEYS = {
    "h_list": float,
    "d_list": float,
    "thread_list": int,
    "panels": int,
    "center": float,
    "domain": float,
}
_SCALAR_KEYS = {
    "dim": int,
    "order": int,
    "diff": int,
    "p": int,
    "eps": float,
    "padding_panels": int,
    "threads": int,
    "fit_min_h": float,
    "fit_max_h": float,
    "out": str,
    "format": str,
    "rho_file": str,
}


def _coerce_config(values: dict) -> dict:
    out = {}
    for key, val in values.items():
        if key in _LIST_KEYS:
            cast = _LIST_KEYS[key]
            out[key] = tuple(cast(v) for v in val.replace(",", " ").split())
        elif key in _SCALAR_KEYS:
            out[key] = _SCALAR_KEYS[key](val)
        elif key == "fft_friendly":
            out[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            raise ValueError(f"unknown config key {key!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freepoisson",
        description="Free-space Poisson solves and benchmark studies on "
        "uniform rectangular grids.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, help_text in (
        ("solve", "one solve, optionally written as PGRID/CSV"),
        ("convergence", "error vs mesh width against the analytic potential"),
        ("domain", "solution variation under domain expansion"),
        ("threads", "wall time vs thread count on a fixed problem"),
    ):
        p = sub.add_parser(kind, help=help_text)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--dim", type=int)
        p.add_argument("--domain", type=float, nargs="+", metavar="BOUND",
                       help="a b [c d [e f]] per axis")
        p.add_argument("--panels", type=int, nargs="+")
        p.add_argument("--order", type=int, choices=(4, 6))
        p.add_argument("--diff", type=int, help="bump differentiability (p-1)")
        p.add_argument("--p", type=int, help="bump exponent")
        p.add_argument("--eps", type=float, help="bump support radius")
        p.add_argument("--center", type=float, nargs="+")
        p.add_argument("--padding-panels", type=int)
        p.add_argument("--fft-friendly", action="store_const", const=True,
                       default=None)
        p.add_argument("--threads", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "pgrid"))
        if kind == "solve":
            p.add_argument("--rho-file", help="PGRID file with the density")
        if kind == "convergence":
            p.add_argument("--h-list", type=float, nargs="+")
            p.add_argument("--fit-min-h", type=float)
            p.add_argument("--fit-max-h", type=float)
        if kind == "domain":
            p.add_argument("--d-list", type=float, nargs="+")
        if kind == "threads":
            p.add_argument("--thread-list", type=int, nargs="+")
    return parser


def build_spec(args: argparse.Namespace) -> StudySpec:
    merged = {}
    if getattr(args, "config", None):
        merged.update(_coerce_config(load_config_file(args.config)))
    for key, val in vars(args).items():
        if key in ("config", "kind") or val is None:
            continue
        merged[key] = tuple(val) if isinstance(val, list) else val
    return StudySpec(kind=args.kind, **merged)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = build_spec(args)
        if spec.kind == "solve":
            _run_solve(spec)
        elif spec.kind == "convergence":
            rows, slope = run_convergence_study(spec)
            _print_rows(CONVERGENCE_HEADER, rows)
            print(f"fitted slope: {slope:.3f}")
            if spec.out:
                write_csv(spec.out, CONVERGENCE_HEADER, rows)
                print(f"wrote {spec.out}")
        elif spec.kind == "domain":
            rows = run_domain_study(spec)
            _print_rows(DOMAIN_HEADER, rows)
            if spec.out:
                write_csv(spec.out, DOMAIN_HEADER, rows)
                print(f"wrote {spec.out}")
        else:
            rows = run_thread_benchmark(spec)
            _print_rows(THREADS_HEADER, rows)
            if spec.out:
                write_csv(spec.out, THREADS_HEADER, rows)
                print(f"wrote {spec.out}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
