"""File formats and the command-line front end.

Three artifact kinds, all plain text: per-step energy logs as CSV under a
pinned schema line, field snapshots as ASCII legacy VTK unstructured
grids, and a JSON manifest per run directory naming everything the run
produced.  Floats are serialized with 17 significant digits everywhere,
so read-backs are bit exact and repeated runs of the same config yield
byte-identical files.

Assembly honors the THERMOFRAC_THREADS environment variable (see
fem_core); all file writes are sequential.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import analytic as an
from . import energy as en
from . import fem_core as fc
from . import scenarios as sc
from . import steppers as sp
from .mesh import DomainSpec, Mesh, generate, write_mesh
from .physics import MaterialParams, energy_density_W, energy_density_Wstar

CSV_SCHEMA = "thermofrac-energy-v1"


class AuditFailure(RuntimeError):
    """An artifact failed a post-run consistency re-check."""


def _g17(x: float) -> str:
    return format(float(x), ".17g")


# ---- energy CSV ------------------------------------------------------------

def write_energy_csv(records, path: str | Path) -> None:
    """One row per record in the frozen column order."""
    cols = en.EnergyRecord.column_names()
    lines = [f"# schema: {CSV_SCHEMA}", ",".join(cols)]
    for rec in records:
        lines.append(",".join(_g17(getattr(rec, c)) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_energy_csv(path: str | Path) -> list[en.EnergyRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema: "):
        raise ValueError(f"{path}: missing schema line")
    schema = lines[0].removeprefix("# schema: ")
    if schema != CSV_SCHEMA:
        raise ValueError(f"{path}: unsupported schema {schema!r}")
    cols = en.EnergyRecord.column_names()
    if len(lines) < 2 or tuple(lines[1].split(",")) != cols:
        raise ValueError(f"{path}: header does not match schema {CSV_SCHEMA}")
    out = []
    for line in lines[2:]:
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(cols):
            raise ValueError(f"{path}: row with {len(cells)} fields")
        out.append(en.EnergyRecord(**{c: float(v) for c, v in zip(cols, cells)}))
    return out


# ---- VTK snapshots ---------------------------------------------------------

def _scalar_section(name: str, values: np.ndarray) -> list[str]:
    return [f"SCALARS {name} double 1", "LOOKUP_TABLE default",
            *(_g17(v) for v in values)]


def write_snapshot(state: sp.SimState, mat: MaterialParams,
                   path: str | Path) -> None:
    """Write all fields of one state as an ASCII legacy VTK triangle grid.

    Point data: theta, z, and the displacement vector.  Cell data: div u
    and the two elastic energy densities (the thermal one averaged over
    the edge-midpoint quadrature, matching the energy integrals).
    """
    msh = state.mesh
    e = fc.strains(msh, state.u)
    theta_mid = fc.midpoint_values(msh, state.theta)
    w_star = energy_density_Wstar(e[:, None, :, :], theta_mid, mat).mean(axis=1)

    out = ["# vtk DataFile Version 2.0",
           f"thermofrac fields step={state.step} t={_g17(state.t)}",
           "ASCII", "DATASET UNSTRUCTURED_GRID",
           f"POINTS {msh.node_count} double"]
    out += [f"{_g17(x)} {_g17(y)} 0" for x, y in msh.nodes]
    out.append(f"CELLS {msh.tri_count} {4 * msh.tri_count}")
    out += [f"3 {a} {b} {c}" for a, b, c in msh.tris]
    out.append(f"CELL_TYPES {msh.tri_count}")
    out += ["5"] * msh.tri_count
    out.append(f"POINT_DATA {msh.node_count}")
    out += _scalar_section("theta", state.theta)
    out += _scalar_section("z", state.z)
    out.append("VECTORS u double")
    out += [f"{_g17(a)} {_g17(b)} 0" for a, b in state.u.reshape(-1, 2)]
    out.append(f"CELL_DATA {msh.tri_count}")
    out += _scalar_section("div_u", fc.divergence(msh, state.u))
    out += _scalar_section("W", energy_density_W(e, mat))
    out += _scalar_section("W_star", w_star)
    Path(path).write_text("\n".join(out) + "\n")


@dataclass(frozen=True)
class Snapshot:
    """Parsed VTK snapshot: geometry plus named point and cell arrays."""

    nodes: np.ndarray
    tris: np.ndarray
    point_data: dict[str, np.ndarray]
    cell_data: dict[str, np.ndarray]


def read_snapshot(path: str | Path) -> Snapshot:
    lines = Path(path).read_text().splitlines()
    if (len(lines) < 5 or lines[0] != "# vtk DataFile Version 2.0"
            or lines[2] != "ASCII" or lines[3] != "DATASET UNSTRUCTURED_GRID"):
        raise ValueError(f"{path}: not an ASCII legacy VTK unstructured grid")
    i = 4
    kind, count, _ = lines[i].split()
    if kind != "POINTS":
        raise ValueError(f"{path}: expected POINTS at line {i + 1}")
    n = int(count)
    nodes = np.array([[float(v) for v in lines[i + 1 + k].split()[:2]]
                      for k in range(n)])
    i += 1 + n
    kind, count, _ = lines[i].split()
    if kind != "CELLS":
        raise ValueError(f"{path}: expected CELLS at line {i + 1}")
    m = int(count)
    tris = np.array([[int(v) for v in lines[i + 1 + k].split()[1:]]
                     for k in range(m)], dtype=np.int64)
    i += 1 + m
    if lines[i].split() != ["CELL_TYPES", str(m)]:
        raise ValueError(f"{path}: expected CELL_TYPES at line {i + 1}")
    if any(lines[i + 1 + k] != "5" for k in range(m)):
        raise ValueError(f"{path}: non-triangle cell type")
    i += 1 + m

    point_data: dict[str, np.ndarray] = {}
    cell_data: dict[str, np.ndarray] = {}
    target, size = point_data, n
    while i < len(lines):
        words = lines[i].split()
        if words[0] == "POINT_DATA":
            target, size = point_data, n
        elif words[0] == "CELL_DATA":
            target, size = cell_data, m
        elif words[0] == "SCALARS":
            name = words[1]
            values = np.array([float(lines[i + 2 + k]) for k in range(size)])
            target[name] = values
            i += 1 + size
        elif words[0] == "VECTORS":
            name = words[1]
            values = np.array([[float(v) for v in lines[i + 1 + k].split()[:2]]
                               for k in range(size)])
            target[name] = values
            i += size
        else:
            raise ValueError(f"{path}: unexpected section {words[0]!r}")
        i += 1
    return Snapshot(nodes=nodes, tris=tris, point_data=point_data,
                    cell_data=cell_data)


# ---- run manifest ----------------------------------------------------------

@dataclass(frozen=True)
class RunManifest:
    """Inventory of one run directory, written last on success."""

    scenario: str
    config_hash: str
    code_version: str
    started: str
    finished: str
    energy_csv: str
    snapshots: tuple[str, ...]
    audit_report: str | None = None

    def to_json(self) -> str:
        data = asdict(self)
        data["snapshots"] = list(self.snapshots)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        data["snapshots"] = tuple(data["snapshots"])
        return cls(**data)

    def missing_files(self, base: str | Path) -> list[str]:
        base = Path(base)
        names = [self.energy_csv, *self.snapshots]
        if self.audit_report is not None:
            names.append(self.audit_report)
        return [name for name in names if not (base / name).is_file()]


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---- run execution ---------------------------------------------------------

def _snapshot_steps(n_steps: int, every: int, count: int) -> set[int]:
    """Evenly thin the hook steps down to at most `count` snapshots."""
    if count <= 0:
        return set()
    hooks = sorted({0, n_steps, *range(0, n_steps + 1, every)})
    if count >= len(hooks):
        return set(hooks)
    picks = np.unique(np.linspace(0, len(hooks) - 1, count).round().astype(int))
    return {hooks[i] for i in picks}


def execute_run(config: sc.ScenarioConfig, out_dir: str | Path, *,
                snapshots: int = 5,
                audit_phase: tuple[float, float] | None = None,
                audit_tol: float = 1.0e-8,
                check_serialization: bool = False,
                ) -> tuple[RunManifest, en.AuditReport | None]:
    """Run one config into a directory: scenario copy, CSV, VTK, manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _utcnow()
    sc.write_scenario(config, out_dir / "scenario.toml")
    config_hash = hashlib.sha256((out_dir / "scenario.toml").read_bytes()).hexdigest()

    compiled = config.compile_run()
    chosen = _snapshot_steps(compiled.n_steps, compiled.output_every, snapshots)
    written: list[str] = []

    def hook(state, rec):
        if state.step in chosen:
            (out_dir / "snapshots").mkdir(exist_ok=True)
            name = f"snapshots/step_{state.step:06d}.vtk"
            write_snapshot(state, config.mat, out_dir / name)
            if name not in written:
                written.append(name)

    result = sp.run(compiled, hooks=(hook,))
    write_energy_csv(result.records, out_dir / "energies.csv")
    if check_serialization:
        if read_energy_csv(out_dir / "energies.csv") != result.records:
            raise AuditFailure("energy CSV did not round-trip bit exactly")

    report = None
    audit_file = None
    if audit_phase is not None:
        report = en.audit_dissipation(result.records, config.model,
                                      audit_phase, audit_tol)
        audit_file = "audit.json"
        (out_dir / audit_file).write_text(
            json.dumps(asdict(report), indent=2, sort_keys=True) + "\n")

    manifest = RunManifest(
        scenario=config.name, config_hash=config_hash,
        code_version=__version__, started=started, finished=_utcnow(),
        energy_csv="energies.csv", snapshots=tuple(written),
        audit_report=audit_file)
    missing = manifest.missing_files(out_dir)
    if missing:
        raise AuditFailure(f"manifest lists missing files: {missing}")
    (out_dir / "manifest.json").write_text(manifest.to_json())
    return manifest, report


# ---- subcommands -----------------------------------------------------------

def _scenario_config(name_or_path: str) -> sc.ScenarioConfig:
    if name_or_path in sc.BUILTINS:
        return sc.builtin(name_or_path)
    path = Path(name_or_path)
    if path.is_file():
        return sc.read_scenario(path)
    raise ValueError(f"unknown scenario {name_or_path!r} "
                     f"(not a builtin, not a file)")


def _effective_config(args) -> sc.ScenarioConfig:
    cfg = _scenario_config(args.scenario)
    keys = ("model", "delta", "theta_d", "resolution", "dt", "t_end",
            "t_ramp", "output_every", "solver_tol")
    changes = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    return cfg.variant(**changes) if changes else cfg


def _audit_line(report: en.AuditReport) -> str:
    verdict = "pass" if report.passed else "FAIL"
    return (f"audit[{report.model}] window=({_g17(report.window[0])}, "
            f"{_g17(report.window[1])}) steps={report.n_steps} "
            f"max_residual={report.max_residual:.3e} "
            f"max_violation={report.max_violation:.3e} "
            f"violations={report.violation_count} -> {verdict}")


def cmd_run(args) -> int:
    config = _effective_config(args)
    out_dir = Path(args.out) if args.out else Path("runs") / config.name
    manifest, report = execute_run(
        config, out_dir, snapshots=args.snapshots,
        audit_phase=tuple(args.audit) if args.audit else None,
        audit_tol=args.audit_tol,
        check_serialization=args.seedless_deterministic)
    print(f"{config.name}: wrote {manifest.energy_csv} and "
          f"{len(manifest.snapshots)} snapshots to {out_dir}")
    if report is not None:
        print(_audit_line(report))
        if not report.passed:
            return 2
    return 0


def cmd_sweep(args) -> int:
    config = _effective_config(args)
    if args.axis == "delta":
        values = config.delta_sweep
        make = lambda v: config.variant(delta=v)
    else:
        values = config.theta_d_sweep
        make = lambda v: config.variant(theta_d=v)
    if not values:
        raise ValueError(f"{config.name} declares no {args.axis} sweep values")
    out_root = Path(args.out) if args.out else Path("runs") / f"{config.name}-{args.axis}"
    label = args.axis.replace("-", "_")
    for v in values:
        sub = out_root / f"{label}={_g17(v)}"
        manifest, _ = execute_run(make(v), sub, snapshots=args.snapshots)
        print(f"{config.name} {label}={_g17(v)}: "
              f"{len(manifest.snapshots)} snapshots -> {sub}")
    return 0


def cmd_audit(args) -> int:
    records = read_energy_csv(args.csv)
    phase = tuple(args.phase) if args.phase else (records[0].t, records[-1].t)
    report = en.audit_dissipation(records, args.model, phase, args.tol)
    print(_audit_line(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(asdict(report), indent=2, sort_keys=True) + "\n")
    return 0 if report.passed else 2


def _one_triangle_mesh() -> Mesh:
    return Mesh(nodes=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                tris=np.array([[0, 1, 2]]),
                boundary_edges=np.array([[0, 1], [1, 2], [2, 0]]),
                edge_tag_ids=np.zeros(3, dtype=np.int64))


def cmd_verify(args) -> int:
    """Fast self-checks against independently derived reference values."""
    checks: list[tuple[str, str, bool]] = []

    ref = an.ModeIField.from_engineering(K_I=5.0, E_Y=1.0, nu_P=0.3, v0=0.05)
    du = float(an.div_u(1.0, 0.0, ref))
    checks.append(("tip field div u at (r, angle) = (1, 0)", _g17(du),
                   abs(du - 2.0744998580874499) < 1e-11))
    rate = float(an.ddt_div_u(1.0, 0.0, ref))
    checks.append(("tip field d(div u)/dt at (1, 0)", _g17(rate),
                   abs(rate - 0.05186249645218625) < 1e-12))

    stiff = fc.scalar_stiffness(_one_triangle_mesh(), 1.0).toarray()
    reference = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0],
                          [-0.5, 0.0, 0.5]])
    err = float(np.abs(stiff - reference).max())
    checks.append(("unit right-triangle stiffness vs reference", _g17(err),
                   err < 1e-14))

    eta, oracle = 0.015, 6.799250083505543
    mat = MaterialParams.from_engineering(E_Y=1.0, nu_P=0.3, a_L=0.7,
                                          gamma_star=5.08, eps=0.01)
    errors = []
    for h in (0.02, 0.01, 0.005):
        msh = generate(DomainSpec(kind="unit_square_2x2"), target_h=h)
        x, y = msh.nodes[:, 0], msh.nodes[:, 1]
        z = np.exp(-((y / eta) ** 2)) / (1.0 + np.exp(x / eta))
        state = sp.SimState(mesh=msh, t=0.0, step=0,
                            u=np.zeros(2 * msh.node_count), z=z,
                            theta=np.zeros(msh.node_count))
        rec = en.compute_energies(state, mat)
        errors.append(abs(rec.E_s - oracle) / oracle)
    checks.append(("surface energy error decays under refinement",
                   "  ".join(f"{e:.4f}" for e in errors),
                   errors[0] > errors[1] > errors[2]))

    width = max(len(name) for name, _, _ in checks)
    ok = True
    for name, value, passed in checks:
        ok &= passed
        print(f"{name:<{width}}  {value}  {'pass' if passed else 'FAIL'}")
    return 0 if ok else 2


def cmd_mesh(args) -> int:
    config = _effective_config(args)
    msh = config.build_mesh()
    write_mesh(msh, args.out)
    h_report = msh.h_max(config.grading_boxes or None)
    print(f"{config.name}: {msh.node_count} nodes, {msh.tri_count} triangles, "
          f"h_max={_g17(h_report)} -> {args.out}")
    return 0


def cmd_export_scenario(args) -> int:
    config = _effective_config(args)
    sc.write_scenario(config, args.out)
    print(f"{config.name} -> {args.out}")
    return 0


# ---- argument parsing ------------------------------------------------------

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True,
                        help="builtin name or path to a scenario file")
    parser.add_argument("--resolution", choices=sorted(sc.RESOLUTIONS))
    parser.add_argument("--model", choices=sp.MODELS)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--theta-d", dest="theta_d", type=float)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--t-ramp", dest="t_ramp", type=float)
    parser.add_argument("--output-every", dest="output_every", type=int)
    parser.add_argument("--solver-tol", dest="solver_tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermofrac",
        description="Coupled thermoelastic phase-field fracture on P1 triangles.")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run one scenario into a directory")
    _add_config_flags(run)
    run.add_argument("--out", help="output directory (default runs/<name>)")
    run.add_argument("--snapshots", type=int, default=5,
                     help="max field snapshots to write (default 5)")
    run.add_argument("--audit", nargs=2, type=float, metavar=("T0", "T1"),
                     help="audit energy decay over this hold window")
    run.add_argument("--audit-tol", dest="audit_tol", type=float, default=1e-8)
    run.add_argument("--seedless-deterministic", action="store_true",
                     help="re-read the energy CSV and require bit equality")
    run.set_defaults(func=cmd_run)

    sweep = subs.add_parser("sweep", help="run every value of a sweep axis")
    _add_config_flags(sweep)
    sweep.add_argument("--axis", choices=("delta", "theta-d"), required=True)
    sweep.add_argument("--out", help="root directory for the sweep")
    sweep.add_argument("--snapshots", type=int, default=5)
    sweep.set_defaults(func=cmd_sweep)

    audit = subs.add_parser("audit", help="re-check an energy CSV")
    audit.add_argument("csv")
    audit.add_argument("--model", choices=sp.MODELS, required=True)
    audit.add_argument("--phase", nargs=2, type=float, metavar=("T0", "T1"),
                       help="window to audit (default: whole series)")
    audit.add_argument("--tol", type=float, default=1e-8,
                       help="largest tolerated per-step energy increase")
    audit.add_argument("--out", help="write the report as JSON here")
    audit.set_defaults(func=cmd_audit)

    verify = subs.add_parser("verify", help="run the reference-value checks")
    verify.set_defaults(func=cmd_verify)

    mesh = subs.add_parser("mesh", help="generate and write a scenario mesh")
    _add_config_flags(mesh)
    mesh.add_argument("--out", required=True)
    mesh.set_defaults(func=cmd_mesh)

    export = subs.add_parser("export-scenario",
                             help="write a config for hand editing")
    _add_config_flags(export)
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export_scenario)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (sp.SteppingError, fc.ConvergenceError, AuditFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
