"""Figure builder for simulator outputs.

Turns energy CSVs and legacy VTK snapshots into the four figure types
used to report runs: energy-vs-time curves, field profiles along a
horizontal line, color maps of a scalar field, and crack-path overlays
across a parameter sweep.  Reads only the frozen file formats; the
simulator package is never imported.

Usage: python3 postproc/plot.py --spec figure.toml
"""

import argparse
import glob
import re
from dataclasses import dataclass, fields
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
from matplotlib.tri import Triangulation  # noqa: E402

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

CSV_SCHEMA = "thermofrac-energy-v1"
KINDS = ("energy_series", "line_profile", "field_image", "path_overlay")

# savefig settings are pinned so a rerun on fixed inputs reproduces the
# PNG byte for byte
_DPI = 150
_METADATA = {"Software": "postproc"}


# ---- input readers ---------------------------------------------------------

def read_energy_csv(path) -> dict[str, np.ndarray]:
    """Energy time series as a column-name -> array mapping."""
    with open(path) as fh:
        schema = fh.readline().strip()
        if schema != f"# schema: {CSV_SCHEMA}":
            raise ValueError(f"{path}: expected schema {CSV_SCHEMA!r}")
        names = fh.readline().strip().split(",")
        rows = [line.split(",") for line in fh if line.strip()]
    if any(len(r) != len(names) for r in rows):
        raise ValueError(f"{path}: ragged row")
    data = np.array(rows, dtype=float)
    return {name: data[:, j] for j, name in enumerate(names)}


@dataclass(frozen=True)
class Snapshot:
    """One legacy-VTK unstructured-grid snapshot, z coordinate dropped."""

    nodes: np.ndarray
    tris: np.ndarray
    point_data: dict[str, np.ndarray]
    cell_data: dict[str, np.ndarray]
    time: float | None
    step: int | None


def read_vtk(path) -> Snapshot:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise ValueError(f"{path}: not a legacy VTK file")
    title = lines[1] if len(lines) > 1 else ""
    m_t = re.search(r"\bt=([-+0-9.eE]+)", title)
    m_s = re.search(r"\bstep=(\d+)", title)
    toks = "\n".join(lines[2:]).split()
    pos = 0

    def take(n):
        nonlocal pos
        out = toks[pos:pos + n]
        if len(out) != n:
            raise ValueError(f"{path}: truncated file")
        pos += n
        return out

    def expect(word):
        got = take(1)[0]
        if got.upper() != word:
            raise ValueError(f"{path}: expected {word}, found {got!r}")

    expect("ASCII")
    expect("DATASET")
    expect("UNSTRUCTURED_GRID")

    nodes = tris = None
    point_data: dict[str, np.ndarray] = {}
    cell_data: dict[str, np.ndarray] = {}
    target = None
    while pos < len(toks):
        word = take(1)[0].upper()
        if word == "POINTS":
            n = int(take(1)[0])
            take(1)  # dtype
            nodes = np.array(take(3 * n), dtype=float).reshape(n, 3)[:, :2]
        elif word == "CELLS":
            m = int(take(1)[0])
            take(1)  # total token count
            conn = np.array(take(4 * m), dtype=int).reshape(m, 4)
            if not np.all(conn[:, 0] == 3):
                raise ValueError(f"{path}: non-triangle cell")
            tris = conn[:, 1:]
        elif word == "CELL_TYPES":
            m = int(take(1)[0])
            types = np.array(take(m), dtype=int)
            if not np.all(types == 5):
                raise ValueError(f"{path}: cell type other than triangle")
        elif word in ("POINT_DATA", "CELL_DATA"):
            count = int(take(1)[0])
            target = (point_data, count) if word == "POINT_DATA" else (cell_data, count)
        elif word == "SCALARS":
            name = take(1)[0]
            take(1)  # dtype
            nxt = take(1)[0]
            if nxt.upper() != "LOOKUP_TABLE":  # optional component count
                if nxt != "1":
                    raise ValueError(f"{path}: {name} has {nxt} components")
                expect("LOOKUP_TABLE")
            take(1)  # table name
            store, count = target
            store[name] = np.array(take(count), dtype=float)
        elif word == "VECTORS":
            name = take(1)[0]
            take(1)  # dtype
            store, count = target
            vec = np.array(take(3 * count), dtype=float).reshape(count, 3)
            store[f"{name}1"] = vec[:, 0]
            store[f"{name}2"] = vec[:, 1]
        else:
            raise ValueError(f"{path}: unsupported keyword {word!r}")
    if nodes is None or tris is None:
        raise ValueError(f"{path}: missing geometry")
    return Snapshot(nodes=nodes, tris=tris, point_data=point_data,
                    cell_data=cell_data,
                    time=float(m_t.group(1)) if m_t else None,
                    step=int(m_s.group(1)) if m_s else None)


# ---- figure specification --------------------------------------------------

@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    columns: tuple[str, ...] = ()       # energy_series
    field: str = "z"                    # line_profile, field_image
    line_y: float = 0.0                 # line_profile
    tol: float = 1e-9                   # line_profile
    threshold: float = 0.9              # path_overlay
    bins: int = 40                      # path_overlay
    labels: tuple[str, ...] = ()        # path_overlay, energy_series

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, not {self.kind!r}")
        if not self.inputs:
            raise ValueError("inputs must not be empty")
        if not self.output:
            raise ValueError("output path must be set")

    @classmethod
    def from_toml(cls, path) -> "PlotSpec":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"{path}: unknown keys {unknown}")
        for key in ("inputs", "columns", "labels"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)


def resolve_inputs(spec: PlotSpec) -> list[Path]:
    """Expand globs; every pattern must match at least one existing file."""
    out: list[Path] = []
    for pattern in spec.inputs:
        matches = sorted(glob.glob(pattern))
        if not matches:
            raise FileNotFoundError(f"no files match {pattern!r}")
        out.extend(Path(m) for m in matches)
    return sorted(out, key=_sweep_key)


_GENERIC_PREFIXES = ("final_", "energies_", "snapshot_")


def label_for(path: Path) -> str:
    """Legend label: prefer the sweep-style name=value nearest the file."""
    stem = path.stem
    for pre in _GENERIC_PREFIXES:
        if stem.startswith(pre) and "=" in stem[len(pre):]:
            return stem[len(pre):]
    if "=" in stem:
        return stem
    for part in reversed(path.parent.parts):
        if "=" in part:
            return part
    return stem


def _sweep_key(path: Path):
    label = label_for(path)
    if "=" in label:
        name, tail = label.rsplit("=", 1)
        try:
            return (0, name, float(tail), str(path))
        except ValueError:
            pass
    return (1, label, 0.0, str(path))


# ---- renderers -------------------------------------------------------------

def _energy_series(spec: PlotSpec, paths: list[Path]):
    fig, ax = plt.subplots()
    for i, path in enumerate(paths):
        data = read_energy_csv(path)
        cols = spec.columns or tuple(c for c in data if c != "t")
        for col in cols:
            if col not in data:
                raise KeyError(f"column {col!r} not in {path} "
                               f"(has {', '.join(data)})")
            prefix = ""
            if len(paths) > 1:
                prefix = (spec.labels[i] if i < len(spec.labels)
                          else label_for(path)) + ": "
            ax.plot(data["t"], data[col], label=prefix + col)
    ax.set_xlabel(spec.xlabel or "t")
    ax.set_ylabel(spec.ylabel or "energy")
    ax.legend()
    return fig


def _line_profile(spec: PlotSpec, paths: list[Path]):
    fig, ax = plt.subplots()
    for path in paths:
        snap = read_vtk(path)
        if spec.field not in snap.point_data:
            raise KeyError(f"field {spec.field!r} not in point data of {path} "
                           f"(has {', '.join(snap.point_data)})")
        on_line = np.abs(snap.nodes[:, 1] - spec.line_y) <= spec.tol
        if not on_line.any():
            raise ValueError(f"{path}: no nodes on the line x2 = {spec.line_y}")
        order = np.argsort(snap.nodes[on_line, 0], kind="stable")
        x = snap.nodes[on_line, 0][order]
        vals = snap.point_data[spec.field][on_line][order]
        label = f"t={snap.time:g}" if snap.time is not None else label_for(path)
        ax.plot(x, vals, label=label)
    ax.set_xlabel(spec.xlabel or "x1")
    ax.set_ylabel(spec.ylabel or spec.field)
    ax.legend()
    return fig


def _field_image(spec: PlotSpec, paths: list[Path]):
    snap = read_vtk(paths[0])
    tri = Triangulation(snap.nodes[:, 0], snap.nodes[:, 1], snap.tris)
    fig, ax = plt.subplots()
    if spec.field in snap.point_data:
        img = ax.tripcolor(tri, snap.point_data[spec.field], shading="gouraud")
    elif spec.field in snap.cell_data:
        img = ax.tripcolor(tri, facecolors=snap.cell_data[spec.field])
    else:
        raise KeyError(
            f"field {spec.field!r} not in {paths[0]} (point: "
            f"{', '.join(snap.point_data)}; cell: {', '.join(snap.cell_data)})")
    fig.colorbar(img, ax=ax, label=spec.field)
    ax.set_aspect("equal")
    ax.set_xlabel(spec.xlabel or "x1")
    ax.set_ylabel(spec.ylabel or "x2")
    return fig


def _ridge_path(snap: Snapshot, threshold: float, bins: int):
    """Damage-weighted centerline of the broken region, one point per bin."""
    z = snap.point_data["z"]
    hot = z > threshold
    if not hot.any():
        return np.empty(0), np.empty(0)
    x, y, w = snap.nodes[hot, 0], snap.nodes[hot, 1], z[hot]
    edges = np.linspace(x.min(), x.max() + 1e-12, bins + 1)
    which = np.clip(np.digitize(x, edges) - 1, 0, bins - 1)
    wsum = np.bincount(which, weights=w, minlength=bins)
    filled = wsum > 0
    cx = np.bincount(which, weights=w * x, minlength=bins)[filled] / wsum[filled]
    cy = np.bincount(which, weights=w * y, minlength=bins)[filled] / wsum[filled]
    return cx, cy


def _path_overlay(spec: PlotSpec, paths: list[Path]):
    fig, ax = plt.subplots()
    for i, path in enumerate(paths):
        snap = read_vtk(path)
        if "z" not in snap.point_data:
            raise KeyError(f"field 'z' not in point data of {path}")
        cx, cy = _ridge_path(snap, spec.threshold, spec.bins)
        label = spec.labels[i] if i < len(spec.labels) else label_for(path)
        ax.plot(cx, cy, marker=".", label=label)
    ax.set_xlabel(spec.xlabel or "x1")
    ax.set_ylabel(spec.ylabel or "x2")
    ax.legend()
    return fig


_RENDERERS = {
    "energy_series": _energy_series,
    "line_profile": _line_profile,
    "field_image": _field_image,
    "path_overlay": _path_overlay,
}


def build_figure(spec: PlotSpec):
    """Render the figure for a spec and return it unsaved."""
    paths = resolve_inputs(spec)
    fig = _RENDERERS[spec.kind](spec, paths)
    if spec.title:
        fig.axes[0].set_title(spec.title)
    fig.tight_layout()
    return fig


def plot(spec: PlotSpec) -> Path:
    """Render and write the figure; returns the output path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="render one figure from a spec file")
    ap.add_argument("--spec", required=True, help="TOML figure description")
    args = ap.parse_args(argv)
    try:
        out = plot(PlotSpec.from_toml(args.spec))
    except (ValueError, KeyError, FileNotFoundError, OSError, TypeError) as err:
        print(f"error: {err}")
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
