import numpy as np
import pytest

from freepoisson import read_pgrid
from freepoisson.cli import (
    StudySpec,
    build_parser,
    build_spec,
    fit_slope,
    main,
    run_convergence_study,
    run_domain_study,
    run_thread_benchmark,
)


def test_spec_defaults():
    spec = StudySpec(kind="convergence", h_list=(0.1,))
    assert spec.dim == 3
    assert spec.domain == (-1.0, 1.0, -1.0, 1.0, -1.0, 1.0)
    assert spec.center == pytest.approx((1 / np.sqrt(31), 0.2, 0.1))
    assert spec.p == 7 and spec.diff == 6
    assert spec.order == 6


def test_spec_diff_p_consistency():
    assert StudySpec(kind="solve", diff=4).p == 5
    assert StudySpec(kind="solve", p=3).diff == 2
    with pytest.raises(ValueError):
        StudySpec(kind="solve", diff=4, p=9)
    with pytest.raises(ValueError):
        StudySpec(kind="bogus")


def test_grid_for_h_validates_before_running():
    spec = StudySpec(kind="convergence", dim=2, h_list=(0.1, 0.03))
    with pytest.raises(ValueError, match="does not divide"):
        run_convergence_study(spec)


def test_fit_slope_windows():
    hs = [0.4, 0.2, 0.1, 0.05]
    errs = [h**3 for h in hs]
    assert fit_slope(hs, errs) == pytest.approx(3.0, abs=1e-12)
    assert fit_slope(hs, errs, fit_min_h=0.1, fit_max_h=0.4) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_slope(hs, errs, fit_min_h=0.3, fit_max_h=0.35)


def test_convergence_study_rows_and_reproducibility():
    spec = StudySpec(
        kind="convergence", dim=2, h_list=(0.125, 0.0625), diff=4, order=6,
        center=(0.1, 0.0),
    )
    rows1, slope1 = run_convergence_study(spec)
    rows2, slope2 = run_convergence_study(spec)
    assert len(rows1) == 2
    for r1, r2 in zip(rows1, rows2):
        assert r1[0] == r2[0]      # h
        assert r1[1] == r2[1]      # panels
        assert r1[4] == r2[4]      # error identical on rerun
    assert slope1 == slope2
    assert rows1[0][1] == 16 and rows1[1][1] == 32
    assert rows1[0][2] == 6 and rows1[0][3] == 4


def test_domain_study_rows():
    spec = StudySpec(
        kind="domain", dim=2, panels=(16,), d_list=(1.0, 1.25), diff=4,
        center=(0.1, 0.0), order=4,
    )
    rows = run_domain_study(spec)
    assert rows[0] == (1.0, 0.0)
    assert rows[1][1] < 1e-3


def test_thread_benchmark_rows():
    spec = StudySpec(
        kind="threads", dim=2, panels=(20,), thread_list=(1, 2), diff=2,
        center=(0.0, 0.0),
    )
    rows = run_thread_benchmark(spec)
    assert rows[0][0] == 1 and rows[0][5] == 1.0
    assert rows[1][0] == 2


def test_cli_convergence_writes_csv(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    rc = main([
        "convergence", "--dim", "2", "--h-list", "0.125", "0.0625",
        "--diff", "4", "--center", "0.1", "0.0", "--out", str(out),
    ])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "h,panels,order,diff,max_rel_err,t_phistar_s,t_boundary_s,t_harmonic_s"
    assert len(lines) == 3
    err = float(lines[1].split(",")[4])
    assert 0 < err < 1e-3
    assert "fitted slope" in capsys.readouterr().out


def test_cli_solve_writes_pgrid(tmp_path):
    out = tmp_path / "phi.pgrid"
    rc = main([
        "solve", "--dim", "2", "--panels", "16", "--diff", "4",
        "--center", "0.1", "0.0", "--out", str(out), "--format", "pgrid",
    ])
    assert rc == 0
    phi = read_pgrid(out)
    assert phi.grid.panels == (16, 16)
    assert np.all(np.isfinite(phi.values))


def test_cli_solve_roundtrip_density_file(tmp_path):
    # solve from a PGRID density written by an earlier run
    from freepoisson import GridFunction, PolyBump, UniformGrid, write_pgrid

    g = UniformGrid([-1, -1], [1, 1], [16, 16])
    bump = PolyBump(2, 0.4, 5, (0.1, 0.0))
    rho_path = tmp_path / "rho.pgrid"
    write_pgrid(rho_path, GridFunction.from_callable(g, bump))
    out = tmp_path / "phi.pgrid"
    rc = main([
        "solve", "--rho-file", str(rho_path), "--out", str(out),
        "--format", "pgrid",
    ])
    assert rc == 0
    assert read_pgrid(out).grid == g


def test_cli_error_is_reported(tmp_path, capsys):
    rc = main(["convergence", "--dim", "2", "--h-list", "0.3"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_config_file_merge(tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text(
        "# a study\n"
        "dim = 2\n"
        "h_list = 0.125, 0.0625\n"
        "diff = 4\n"
        "center = 0.1 0.0\n"
        "order = 4\n"
    )
    args = build_parser().parse_args(
        ["convergence", "--config", str(cfg), "--order", "6"]
    )
    spec = build_spec(args)
    assert spec.dim == 2
    assert spec.h_list == (0.125, 0.0625)
    assert spec.order == 6  # flag overrides the file
    assert spec.diff == 4


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wibble = 3\n")
    args = build_parser().parse_args(["convergence", "--config", str(cfg)])
    with pytest.raises(ValueError, match="unknown config key"):
        build_spec(args)


def test_csv_write_is_atomic(tmp_path):
    from freepoisson.cli import write_csv

    class Boom:
        def __iter__(self):
            raise RuntimeError("broken row source")

    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        write_csv(target, "a,b", Boom())
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []
