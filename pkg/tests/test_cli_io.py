"""Artifact formats and CLI behavior: round trips, golden file, exit codes."""

import hashlib
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermofrac import cli_io as cli
from thermofrac import energy as en
from thermofrac import scenarios as sc
from thermofrac import steppers as sp
from thermofrac.physics import MaterialParams

GOLDEN_SNAPSHOT = """\
# vtk DataFile Version 2.0
thermofrac fields step=0 t=0
ASCII
DATASET UNSTRUCTURED_GRID
POINTS 3 double
0 0 0
1 0 0
0 1 0
CELLS 1 4
3 0 1 2
CELL_TYPES 1
5
POINT_DATA 3
SCALARS theta double 1
LOOKUP_TABLE default
0
0
0
SCALARS z double 1
LOOKUP_TABLE default
0
0
0
VECTORS u double
0 0 0
0 0 0
0 0 0
CELL_DATA 1
SCALARS div_u double 1
LOOKUP_TABLE default
0
SCALARS W double 1
LOOKUP_TABLE default
0
SCALARS W_star double 1
LOOKUP_TABLE default
0
"""


def run_tiny(name="straight_crack", steps=4, **variant):
    cfg = sc.builtin(name)
    return sp.run(cfg.variant(t_end=steps * cfg.dt, **variant))


def make_mat():
    return MaterialParams.from_engineering(E_Y=1.0, nu_P=0.3, a_L=0.7)


# ---- energy CSV -------------------------------------------------------------

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(rows=st.lists(st.tuples(*[finite] * 10), min_size=0, max_size=5))
def test_energy_csv_round_trip_is_exact(rows, tmp_path_factory):
    records = [en.EnergyRecord(*row) for row in rows]
    path = tmp_path_factory.mktemp("csv") / "energies.csv"
    cli.write_energy_csv(records, path)
    assert cli.read_energy_csv(path) == records


def test_energy_csv_schema_and_header(tmp_path):
    records = [en.EnergyRecord(0.0, *[0.0] * 9)]
    path = tmp_path / "energies.csv"
    cli.write_energy_csv(records, path)
    text = path.read_text()
    assert text.startswith(f"# schema: {cli.CSV_SCHEMA}\n")
    assert text.splitlines()[1] == \
        "t,E_el,E_el_star,E_th,E_el_mod,E_el_star_mod,E_s,D_theta,D_z,residual"

    path.write_text(text.replace(cli.CSV_SCHEMA, "thermofrac-energy-v9"))
    with pytest.raises(ValueError, match="unsupported schema"):
        cli.read_energy_csv(path)
    path.write_text(text.replace("E_el_star,", "E_weird,"))
    with pytest.raises(ValueError, match="header"):
        cli.read_energy_csv(path)
    path.write_text("\n".join(text.splitlines()[2:]))
    with pytest.raises(ValueError, match="schema line"):
        cli.read_energy_csv(path)
    path.write_text(text + "1.0,2.0\n")
    with pytest.raises(ValueError, match="row with 2 fields"):
        cli.read_energy_csv(path)


# ---- VTK snapshots ----------------------------------------------------------

def test_snapshot_golden_one_triangle(tmp_path):
    msh = cli._one_triangle_mesh()
    state = sp.SimState(mesh=msh, t=0.0, step=0, u=np.zeros(6),
                        z=np.zeros(3), theta=np.zeros(3))
    path = tmp_path / "golden.vtk"
    cli.write_snapshot(state, make_mat(), path)
    assert path.read_text() == GOLDEN_SNAPSHOT


def test_snapshot_round_trip_bit_exact(tmp_path):
    result = run_tiny("cracked_square", steps=3)
    state = result.state
    path = tmp_path / "fields.vtk"
    mat = sc.builtin("cracked_square").mat
    cli.write_snapshot(state, mat, path)
    snap = cli.read_snapshot(path)

    msh = state.mesh
    assert np.array_equal(snap.nodes, msh.nodes)
    assert np.array_equal(snap.tris, msh.tris)
    assert np.array_equal(snap.point_data["theta"], state.theta)
    assert np.array_equal(snap.point_data["z"], state.z)
    assert np.array_equal(snap.point_data["u"], state.u.reshape(-1, 2))
    from thermofrac import fem_core as fc
    assert np.array_equal(snap.cell_data["div_u"], fc.divergence(msh, state.u))
    assert set(snap.cell_data) == {"div_u", "W", "W_star"}
    lines = path.read_text().splitlines()
    types_at = lines.index(f"CELL_TYPES {msh.tri_count}")
    assert all(line == "5" for line in lines[types_at + 1:types_at + 1 + msh.tri_count])


def test_snapshot_reader_rejects_other_files(tmp_path):
    path = tmp_path / "bad.vtk"
    path.write_text("# vtk DataFile Version 3.0\nx\nBINARY\nWHAT\nPOINTS 0 d\n")
    with pytest.raises(ValueError, match="legacy VTK"):
        cli.read_snapshot(path)


# ---- manifest ---------------------------------------------------------------

def test_manifest_round_trip_and_missing_files(tmp_path):
    manifest = cli.RunManifest(
        scenario="straight_crack", config_hash="ab" * 32,
        code_version="0.1.0", started="2026-08-22T00:00:00+00:00",
        finished="2026-08-22T00:01:00+00:00", energy_csv="energies.csv",
        snapshots=("snapshots/step_000000.vtk",), audit_report=None)
    assert cli.RunManifest.from_json(manifest.to_json()) == manifest
    assert set(manifest.missing_files(tmp_path)) == \
        {"energies.csv", "snapshots/step_000000.vtk"}
    (tmp_path / "energies.csv").write_text("x")
    (tmp_path / "snapshots").mkdir()
    (tmp_path / "snapshots/step_000000.vtk").write_text("x")
    assert manifest.missing_files(tmp_path) == []


def test_snapshot_step_selection():
    assert cli._snapshot_steps(5, 1, 0) == set()
    assert cli._snapshot_steps(5, 1, 99) == {0, 1, 2, 3, 4, 5}
    picked = cli._snapshot_steps(100, 1, 5)
    assert len(picked) == 5 and {0, 100} <= picked
    assert cli._snapshot_steps(10, 4, 99) == {0, 4, 8, 10}


# ---- run execution ----------------------------------------------------------

def test_execute_run_writes_complete_directory(tmp_path):
    cfg = sc.builtin("straight_crack").variant(t_end=0.005)
    manifest, report = cli.execute_run(cfg, tmp_path / "out", snapshots=3,
                                       check_serialization=True)
    out = tmp_path / "out"
    assert report is None
    assert manifest.missing_files(out) == []
    assert len(manifest.snapshots) == 3
    assert manifest.config_hash == \
        hashlib.sha256((out / "scenario.toml").read_bytes()).hexdigest()
    assert sc.read_scenario(out / "scenario.toml") == cfg
    records = cli.read_energy_csv(out / manifest.energy_csv)
    assert len(records) == 6
    stored = cli.RunManifest.from_json((out / "manifest.json").read_text())
    assert stored == manifest


def test_execute_run_is_deterministic(tmp_path):
    cfg = sc.builtin("cracked_square").variant(t_end=0.0003)
    m1, _ = cli.execute_run(cfg, tmp_path / "a", snapshots=2)
    m2, _ = cli.execute_run(cfg, tmp_path / "b", snapshots=2)
    assert m1.config_hash == m2.config_hash
    assert (tmp_path / "a/energies.csv").read_bytes() == \
        (tmp_path / "b/energies.csv").read_bytes()
    for name in m1.snapshots:
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_execute_run_audit_report(tmp_path):
    # hold after a very short ramp: the audit window must show decay
    cfg = sc.builtin("cracked_square").variant(t_end=0.002, t_ramp=0.0005)
    manifest, report = cli.execute_run(cfg, tmp_path, snapshots=0,
                                       audit_phase=(0.001, 0.002),
                                       audit_tol=1e-10)
    assert report is not None and report.passed
    assert manifest.audit_report == "audit.json"
    stored = json.loads((tmp_path / "audit.json").read_text())
    assert stored["model"] == "biot"
    assert stored["max_residual"] == report.max_residual


# ---- CLI entry points -------------------------------------------------------

def test_cli_run_smoke(tmp_path, capsys):
    code = cli.main(["run", "--scenario", "straight_crack",
                     "--resolution", "coarse", "--t-end", "0.004",
                     "--out", str(tmp_path / "r"), "--snapshots", "2",
                     "--seedless-deterministic"])
    assert code == 0
    header = (tmp_path / "r/energies.csv").read_text().splitlines()[1]
    for name in ("E_el", "E_el_star", "E_th", "E_el_mod", "E_el_star_mod", "E_s"):
        assert name in header.split(",")
    assert "straight_crack" in capsys.readouterr().out


def test_cli_flags_reshape_the_config(tmp_path):
    code = cli.main(["run", "--scenario", "straight_crack", "--model", "fpfm",
                     "--delta", "0.2", "--dt", "0.002", "--t-end", "0.004",
                     "--out", str(tmp_path), "--snapshots", "0"])
    assert code == 0
    cfg = sc.read_scenario(tmp_path / "scenario.toml")
    assert (cfg.model, cfg.mat.delta, cfg.dt) == ("fpfm", 0.2, 0.002)


def test_cli_audit_constant_series(tmp_path):
    records = [en.EnergyRecord(0.1 * k, *[0.0] * 9) for k in range(4)]
    path = tmp_path / "flat.csv"
    cli.write_energy_csv(records, path)
    assert cli.main(["audit", "--model", "biot", str(path)]) == 0

    rising = [en.EnergyRecord(0.1 * k, float(k), *[0.0] * 8) for k in range(4)]
    cli.write_energy_csv(rising, path)
    assert cli.main(["audit", "--model", "biot", str(path)]) == 2
    report = tmp_path / "report.json"
    cli.main(["audit", "--model", "biot", str(path), "--out", str(report)])
    assert json.loads(report.read_text())["violation_count"] == 3


def test_cli_exit_codes(tmp_path):
    assert cli.main(["run", "--scenario", "no_such_thing"]) == 1
    assert cli.main(["run", "--bogus"]) == 1
    assert cli.main([]) == 1
    assert cli.main(["--help"]) == 0
    assert cli.main(["run", "--scenario", "lshape", "--t-end", "0.0002",
                     "--solver-tol", "1e-30", "--out", str(tmp_path)]) == 2


def test_cli_verify_passes(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "2.0744998580874" in out
    assert "FAIL" not in out


def test_cli_mesh_and_export(tmp_path):
    out = tmp_path / "mesh.txt"
    assert cli.main(["mesh", "--scenario", "cracked_square",
                     "--out", str(out)]) == 0
    assert int(out.read_text().splitlines()[0]) > 100

    toml = tmp_path / "cfg.toml"
    assert cli.main(["export-scenario", "--scenario", "mode12_path",
                     "--out", str(toml)]) == 0
    assert sc.read_scenario(toml) == sc.builtin("mode12_path")


def test_cli_sweep_runs_every_value(tmp_path, capsys):
    code = cli.main(["sweep", "--scenario", "cracked_square", "--axis", "delta",
                     "--t-end", "0.0002", "--out", str(tmp_path),
                     "--snapshots", "0"])
    assert code == 0
    subs = sorted(p.name for p in tmp_path.iterdir())
    assert subs == ["delta=0", "delta=0.10000000000000001", "delta=0.5"]
    for sub in subs:
        assert (tmp_path / sub / "manifest.json").is_file()
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["sweep", "--scenario", "x"])
    assert cli.main(["sweep", "--scenario", "straight_crack",
                     "--axis", "theta-d"]) == 1
