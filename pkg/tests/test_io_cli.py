"""Snapshot/slice output files and the command-line interface."""

from __future__ import annotations

import csv
import io
import os

import numpy as np
import numpy.testing as npt
import pytest

from dgsiac import cli
from dgsiac.config import config_from_dict
from dgsiac.driver import run
from dgsiac.mesh import CartesianMesh
from dgsiac.output import (OutputError, diagonal_slice, global_axis_coords,
                           horizontal_slice, load_reference_slice,
                           read_vtk_snapshot, sample_points, write_slice_csv,
                           write_vtk_snapshot)
from dgsiac.physics import make_system
from dgsiac.refelem import ReferenceElement


def small_grid(n=2, nx=2, ny=3, bounds=((0.0, 1.0), (0.0, 1.5))):
    mesh = CartesianMesh(bounds[0], bounds[1], nx, ny)
    ref = ReferenceElement(n)
    return mesh, ref


# ---------------------------------------------------------------------------
# VTK snapshots
# ---------------------------------------------------------------------------

def test_vtk_round_trip_coordinates_and_fields(tmp_path):
    mesh, ref = small_grid()
    sys = make_system("euler", 1.4)
    X, Y = mesh.node_coords(ref.nodes)
    # Encode the coordinates into the state so the point ordering is
    # checked exactly: rho carries x, x-momentum carries y.
    u = np.zeros(X.shape + (4,))
    u[..., 0] = 2.0 + X
    u[..., 1] = Y
    u[..., 3] = 10.0
    lam = np.arange(mesh.n_elem, dtype=float)
    path = tmp_path / "snap.vtk"
    write_vtk_snapshot(path, u, mesh, ref, sys, lam=lam, title="check")

    xs, ys, fields = read_vtk_snapshot(path)
    p = ref.n_nodes
    assert xs.size == mesh.n_elem_x * p and ys.size == mesh.n_elem_y * p
    npt.assert_allclose(xs, global_axis_coords(mesh, ref, 0), rtol=1e-15)
    # rho at grid point (row j, col i) must equal 2 + xs[i].
    npt.assert_allclose(fields["rho"],
                        np.broadcast_to(2.0 + xs, fields["rho"].shape),
                        rtol=1e-14)
    npt.assert_allclose(fields["rho_v1"],
                        np.broadcast_to(ys[:, None], fields["rho"].shape),
                        rtol=1e-14, atol=1e-15)
    # Primitive fields are appended under their own names.
    npt.assert_allclose(fields["v1"], fields["rho_v1"] / fields["rho"],
                        rtol=1e-13, atol=1e-15)
    assert "p" in fields and "rho_e" in fields
    # The per-element blend parameter is replicated over element nodes.
    grid = fields["blend_lambda"]
    for row in range(mesh.n_elem_y):
        for col in range(mesh.n_elem_x):
            block = grid[row * p:(row + 1) * p, col * p:(col + 1) * p]
            npt.assert_array_equal(block, lam[row * mesh.n_elem_x + col])


def test_vtk_interface_nodes_duplicated():
    mesh, ref = small_grid(n=3, nx=4, ny=2, bounds=((-1.0, 1.0), (0.0, 1.0)))
    xs = global_axis_coords(mesh, ref, 0)
    # Interior interfaces appear once from each neighbor.
    for interface in (-0.5, 0.0, 0.5):
        assert np.count_nonzero(np.abs(xs - interface) < 1e-14) == 2
    assert np.count_nonzero(np.abs(xs + 1.0) < 1e-14) == 1


def test_vtk_reader_rejects_non_vtk(tmp_path):
    path = tmp_path / "junk.vtk"
    path.write_text("not a vtk file\n")
    with pytest.raises(OutputError):
        read_vtk_snapshot(path)
    with pytest.raises(OutputError):
        read_vtk_snapshot(tmp_path / "absent.vtk")


def test_vtk_writer_tolerates_inadmissible_nodes(tmp_path):
    """Snapshots are diagnostics: a state with a pressure dip must still
    be writable (primitive conversion runs unchecked)."""
    mesh, ref = small_grid()
    sys = make_system("euler", 1.4)
    u = np.zeros((mesh.n_elem, ref.n_nodes, ref.n_nodes, 4))
    u[..., 0] = 1.0
    u[..., 3] = 1.0
    u[0, 0, 0, 1] = 2.0  # kinetic energy 2.0 > total 1.0: p < 0 here
    path = tmp_path / "dip.vtk"
    write_vtk_snapshot(path, u, mesh, ref, sys)
    _, _, fields = read_vtk_snapshot(path)
    assert fields["p"].min() < 0.0


# ---------------------------------------------------------------------------
# Point sampling and slices
# ---------------------------------------------------------------------------

def test_sample_points_bilinear_exact():
    mesh, ref = small_grid(n=2, nx=3, ny=2)
    X, Y = mesh.node_coords(ref.nodes)
    vals = 1.0 + 2.0 * X - 0.5 * Y + X * Y
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1, 50)
    y = rng.uniform(0, 1.5, 50)
    got = sample_points(vals, mesh, ref, x, y)
    npt.assert_allclose(got, 1.0 + 2.0 * x - 0.5 * y + x * y,
                        rtol=1e-13, atol=1e-14)


def test_sample_points_domain_edges():
    mesh, ref = small_grid(n=3, nx=2, ny=2, bounds=((0.0, 1.0), (0.0, 1.0)))
    X, Y = mesh.node_coords(ref.nodes)
    vals = X ** 2 + Y
    # Far corners and an interior interface point all evaluate cleanly.
    pts_x = np.array([0.0, 1.0, 0.5, 1.0])
    pts_y = np.array([0.0, 1.0, 0.5, 0.0])
    got = sample_points(vals, mesh, ref, pts_x, pts_y)
    npt.assert_allclose(got, pts_x ** 2 + pts_y, rtol=1e-13, atol=1e-14)


def test_diagonal_slice_square_domain():
    mesh, ref = small_grid(n=2, nx=2, ny=2, bounds=((-1.0, 1.0), (-1.0, 1.0)))
    X, Y = mesh.node_coords(ref.nodes)
    coords, vals = diagonal_slice(X + Y, mesh, ref, n_samples=33)
    assert coords[0] == -1.0 and coords[-1] == 1.0
    npt.assert_allclose(vals, 2.0 * coords, rtol=1e-13, atol=1e-14)


def test_horizontal_slice():
    mesh, ref = small_grid(n=2, nx=3, ny=2)
    X, Y = mesh.node_coords(ref.nodes)
    coords, vals = horizontal_slice(X - Y, mesh, ref, y=0.75, n_samples=17)
    npt.assert_allclose(vals, coords - 0.75, rtol=1e-13, atol=1e-14)
    with pytest.raises(OutputError):
        horizontal_slice(X, mesh, ref, y=2.0)


def test_slice_csv_round_trip(tmp_path):
    coords = np.linspace(0, 1, 7)
    values = np.sin(coords) + 1.0 / 3.0
    path = tmp_path / "slice.csv"
    write_slice_csv(path, coords, values, value_label="rho")
    with open(path) as handle:
        header = handle.readline().strip()
    assert header == "coordinate,rho"
    back_c, back_v = load_reference_slice(path)
    npt.assert_array_equal(back_c, coords)  # 17g round-trips doubles
    npt.assert_array_equal(back_v, values)


def test_load_reference_slice_skips_junk(tmp_path):
    path = tmp_path / "ref.csv"
    path.write_text("# comment\nx,value\n0.5,2.25\n\n1.0,3.5\n")
    coords, values = load_reference_slice(path)
    npt.assert_array_equal(coords, [0.5, 1.0])
    npt.assert_array_equal(values, [2.25, 3.5])
    empty = tmp_path / "empty.csv"
    empty.write_text("x,value\n")
    with pytest.raises(OutputError):
        load_reference_slice(empty)


# ---------------------------------------------------------------------------
# Driver output plumbing
# ---------------------------------------------------------------------------

def tiny_run_config(tmp_path, **extra):
    data = {"case": "convergence", "n": 2, "n_elem_x": 2, "n_elem_y": 2,
            "cfl": 0.4, "final_time": 0.05,
            "output": {"directory": str(tmp_path / "out")}}
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key].update(value)
        else:
            data[key] = value
    return config_from_dict(data)


def test_run_writes_snapshots_and_slices(tmp_path):
    cfg = tiny_run_config(
        tmp_path,
        output={"write_vtk": True,
                "slices": [{"kind": "diagonal"},
                           {"kind": "horizontal", "y": 0.25, "name": "mid"}],
                "slice_samples": 16})
    result = run(cfg)
    names = [os.path.basename(p) for p in result.written_files]
    assert names[0] == "convergence_0000.vtk"   # initial state
    assert "convergence_slice_diagonal.csv" in names
    assert "convergence_slice_mid.csv" in names
    vtks = [p for p in result.written_files if p.endswith(".vtk")]
    assert len(vtks) == 2  # initial + final
    for path in result.written_files:
        assert os.path.exists(path)
    xs, ys, fields = read_vtk_snapshot(vtks[-1])
    assert "rho" in fields and "blend_lambda" in fields
    coords, vals = load_reference_slice(
        [p for p in result.written_files if p.endswith("mid.csv")][0])
    assert coords.size == 16
    # The slice samples the polynomial representation of rho.
    direct = sample_points(result.u[..., 0], result.mesh, result.ref,
                           coords, np.full_like(coords, 0.25))
    npt.assert_allclose(vals, direct, rtol=1e-13)


def test_snapshot_interval_schedules_mid_run_files(tmp_path):
    cfg = tiny_run_config(
        tmp_path, final_time=0.06,
        output={"write_vtk": True, "snapshot_interval": 0.02})
    result = run(cfg)
    vtks = [p for p in result.written_files if p.endswith(".vtk")]
    # initial + at least two interval snapshots + final
    assert len(vtks) >= 4


def test_zero_step_run_applies_filter_once(tmp_path):
    """A zero-duration run with the filter on returns the filtered IC."""
    cfg = tiny_run_config(
        tmp_path, n=3, final_time=0.0,
        filter={"enabled": True, "m": 1, "k": 3, "epsilon": 0.5,
                "mode": "always-on", "sigma_min": 0.0, "sigma_max": 0.0})
    result = run(cfg)
    assert result.steps == 0
    npt.assert_array_equal(result.lam, 1.0)

    from dgsiac.driver import build_run_objects
    from dgsiac.siacfilter import filter_field_2d
    case, physics, mesh, ref, operator, filt, settings = \
        build_run_objects(cfg)
    X, Y = mesh.node_coords(ref.nodes)
    u0 = case.initial_conserved(physics, X, Y)
    expected = filter_field_2d(filt, u0, mesh, operator.bcs, 0.0)
    npt.assert_allclose(result.u, expected, rtol=1e-13, atol=1e-15)


def test_run_determinism(tmp_path):
    cfg = tiny_run_config(tmp_path)
    r1 = run(cfg)
    r2 = run(cfg)
    assert r1.steps == r2.steps
    npt.assert_array_equal(r1.u, r2.u)
    assert r1.report.lines() == r2.report.lines()


# ---------------------------------------------------------------------------
# Command-line interface
# ---------------------------------------------------------------------------

def write_config(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


def test_cli_run_success(tmp_path, capsys):
    path = write_config(tmp_path, """
case = "convergence"
n = 2
n_elem_x = 2
n_elem_y = 2
cfl = 0.4
final_time = 0.05
""")
    rc = cli.main(["run", "--config", path, "--quiet"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("case convergence:")
    assert lines[0].endswith("t=0.05")
    assert any(l.startswith("mesh 2x2") for l in lines)
    assert any(l.startswith("linf[rho] = ") for l in lines)
    assert any(l.startswith("cons[rho] = ") for l in lines)


def test_cli_run_override(tmp_path, capsys):
    path = write_config(tmp_path, 'case = "convergence"\nfinal_time = 0.05\n')
    rc = cli.main(["run", "--config", path, "--quiet",
                   "--override", "n=2", "--override", "n_elem_x=2",
                   "--override", "n_elem_y=2", "--override", "cfl=0.4",
                   "--override", "final_time=0.025"])
    assert rc == 0
    assert "t=0.025" in capsys.readouterr().out


def test_cli_config_error_exit_2(tmp_path, capsys):
    rc = cli.main(["run", "--config", str(tmp_path / "none.toml")])
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err
    path = write_config(tmp_path, 'case = "convergence"\nbogus = 1\n')
    rc = cli.main(["run", "--config", path])
    assert rc == 2


def test_cli_numerical_failure_exit_3(tmp_path, capsys):
    # A CFL number far above the stability bound blows the run up; the
    # stage guard reports it as a numerical failure.
    path = write_config(tmp_path, """
case = "convergence"
n = 2
n_elem_x = 2
n_elem_y = 2
cfl = 120.0
final_time = 50.0
""")
    rc = cli.main(["run", "--config", path, "--quiet"])
    assert rc == 3
    err = capsys.readouterr().err
    assert "numerical failure" in err


def test_cli_tables_tiny_suite(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "_CONVERGENCE_SUITE",
                        [("unfiltered", None, (1, 2))])
    csv_dir = tmp_path / "tables"
    rc = cli.main(["tables", "--suite", "convergence", "--quiet",
                   "--csv-dir", str(csv_dir)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "# convergence suite: unfiltered" in out
    assert "mesh" in out and "eoc" in out
    csv_path = csv_dir / "convergence_1.csv"
    assert csv_path.exists()
    with open(csv_path) as handle:
        comment = handle.readline()
        rows = list(csv.reader(handle))
    assert comment.startswith("# unfiltered")
    assert rows[0] == ["mesh", "linf_error", "eoc", "cons_error"]
    # The mesh column counts elements per unit length (the domain spans
    # two units per direction), so labels 1 and 2 mean 2x2 and 4x4 grids.
    assert rows[1][0] == "1x1" and rows[2][0] == "2x2"
    # Degree-7 elements on the smooth wave: the rate is far above 1.
    assert float(rows[2][2]) > 4.0


def test_cli_tables_levels_cap(capsys, monkeypatch):
    monkeypatch.setattr(cli, "_CONVERGENCE_SUITE",
                        [("unfiltered", None, (1, 2, 4, 8, 16))])
    rc = cli.main(["tables", "--suite", "convergence", "--quiet",
                   "--levels", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "1x1" in out and "2x2" in out
    assert "4x4" not in out


def test_cli_kernel_summary(capsys):
    rc = cli.main(["kernel", "--m", "1", "--k", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "delta kernel m=1 k=3" in out
    assert "degree           : 9" in out
    assert "conditions       : 10" in out
    mass_line = [l for l in out.splitlines() if l.startswith("mass")][0]
    assert float(mass_line.split(":")[1]) == pytest.approx(1.0, abs=1e-14)


def test_cli_kernel_plot_data(capsys):
    rc = cli.main(["kernel", "--m", "1", "--k", "1", "--plot-data",
                   "--samples", "11"])
    out = capsys.readouterr().out
    assert rc == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["xi", "P"]
    assert len(rows) == 12
    xs = np.array([float(r[0]) for r in rows[1:]])
    npt.assert_allclose(xs, np.linspace(-1, 1, 11), atol=1e-15)
    # Endpoint smoothness k=1 pins the kernel to zero at the edges.
    assert abs(float(rows[1][1])) < 1e-12
    assert abs(float(rows[-1][1])) < 1e-12


def test_cli_kernel_bad_args(capsys):
    assert cli.main(["kernel", "--m", "0", "--k", "3"]) == 2
    assert cli.main(["kernel", "--m", "1", "--k", "-1"]) == 2
    assert cli.main(["kernel", "--m", "1", "--k", "1", "--plot-data",
                     "--samples", "1"]) == 2
