"""The five reference experiments as validated, serializable configurations.

A ScenarioConfig holds everything needed to reproduce a run: geometry,
boundary tagging rules, material set, loading program, initial damage
profile, time grid, and sweep axes.  Configs are immutable values; mesh
generation and boundary compilation happen in `compile_run`, so the same
config can be compiled at several resolutions.  All closed-form pieces
(tag rules, loading laws, damage profiles) are stored as named kinds with
numeric parameters, which is what makes the TOML round trip exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import expit

from . import steppers as sp
from .fem_core import midpoint_values, strains
from .mesh import DomainSpec, GradingSpec, Hole, Mesh, generate, tag_boundary
from .physics import MaterialParams, energy_density_W, energy_density_Wstar

BUILTINS = ("lshape", "cracked_square", "straight_crack", "mode1_path",
            "mode12_path")

# corridor h_min per named resolution; the background target keeps x2 = 0 a
# grid line (even subdivision of the unit square), which the tip tracker
# depends on
RESOLUTIONS = {"coarse": 2.0e-2, "medium": 1.0e-2, "fine": 5.0e-3}
_BACKGROUND_H = 0.1

_TAG_TOL = 1.0e-9
_UNSET = object()


# ---- boundary tagging rules ------------------------------------------------

@dataclass(frozen=True)
class TagRule:
    """Named boundary region selected by a geometric predicate kind.

    ``x_equals`` / ``y_equals`` take one coordinate value, ``circles``
    takes flattened (cx, cy, r) triples, ``rest`` matches everything and
    must come last.
    """

    name: str
    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        expected = {"x_equals": 1, "y_equals": 1, "rest": 0}
        if self.kind == "circles":
            if not self.params or len(self.params) % 3:
                raise ValueError("circles needs (cx, cy, r) triples")
        elif self.kind in expected:
            if len(self.params) != expected[self.kind]:
                raise ValueError(f"{self.kind} takes {expected[self.kind]} parameters")
        else:
            raise ValueError(f"unknown tag rule kind {self.kind!r}")

    def predicate(self):
        if self.kind == "x_equals":
            v = self.params[0]
            return lambda p: abs(p[0] - v) < _TAG_TOL
        if self.kind == "y_equals":
            v = self.params[0]
            return lambda p: abs(p[1] - v) < _TAG_TOL
        if self.kind == "circles":
            discs = np.asarray(self.params, dtype=float).reshape(-1, 3)
            return lambda p: bool(
                (np.hypot(p[0] - discs[:, 0], p[1] - discs[:, 1])
                 <= discs[:, 2] + _TAG_TOL).any())
        return lambda p: True


# ---- loading program --------------------------------------------------------

@dataclass(frozen=True)
class BCEntry:
    """One Dirichlet patch with the affine-in-time law value + rate*t.

    The run clock saturates at t_ramp when the config sets one, which
    turns any ramp into a ramp-and-hold without touching the entries.
    Displacement entries carry one (value, rate) pair per pinned
    component; temperature entries carry exactly one.
    """

    field: str
    tag: str
    components: tuple[int, ...] = (0, 1)
    value: tuple[float, ...] = ()
    rate: tuple[float, ...] = ()

    def __post_init__(self):
        if self.field not in ("u", "theta"):
            raise ValueError(f"unknown field {self.field!r}")
        width = len(self.components) if self.field == "u" else 1
        if len(self.value) != width or len(self.rate) != width:
            raise ValueError(
                f"entry on {self.tag!r} needs {width} value and rate entries")


# ---- initial damage profile -------------------------------------------------

@dataclass(frozen=True)
class InitialCrack:
    """Closed-form initial damage: a Gaussian ridge along x2 = 0 gated by
    logistic fronts in x1.

    ``front`` has one edge (damage to its left), ``band`` two (damage
    between them), ``none`` is the undamaged state.
    """

    kind: str = "none"
    eta: float = 1.5e-2
    edges: tuple[float, ...] = ()

    def __post_init__(self):
        arity = {"none": 0, "front": 1, "band": 2}
        if self.kind not in arity:
            raise ValueError(f"unknown crack profile {self.kind!r}")
        if len(self.edges) != arity[self.kind]:
            raise ValueError(f"{self.kind} takes {arity[self.kind]} edges")
        if self.eta <= 0.0:
            raise ValueError("eta must be positive")
        if self.kind == "band" and self.edges[0] >= self.edges[1]:
            raise ValueError("band edges must be increasing")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        x, y = points[:, 0], points[:, 1]
        if self.kind == "none":
            return np.zeros(len(points))
        ridge = np.exp(-((y / self.eta) ** 2))
        if self.kind == "front":
            gate = expit(-(x - self.edges[0]) / self.eta)
        else:
            left, right = self.edges
            gate = expit(-(x - right) / self.eta) - expit(-(x - left) / self.eta)
        return ridge * gate


# ---- the config -------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: str
    domain: DomainSpec
    tag_rules: tuple[TagRule, ...]
    mat: MaterialParams
    bcs: tuple[BCEntry, ...]
    dt: float
    t_end: float
    t_ramp: float | None = None
    output_every: int = 1
    crack: InitialCrack = field(default_factory=InitialCrack)
    theta_init: float = 0.0
    observe_box: tuple[float, float, float, float] | None = None
    grading_boxes: tuple[tuple[float, float, float, float], ...] = ()
    delta_sweep: tuple[float, ...] = ()
    theta_d_sweep: tuple[float, ...] = ()
    resolution: str = "coarse"
    solver_tol: float = sp.SOLVER_TOL

    def __post_init__(self):
        if self.model not in sp.MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.resolution not in RESOLUTIONS:
            raise ValueError(f"unknown resolution {self.resolution!r}")
        if self.dt <= 0.0 or self.t_end < self.dt:
            raise ValueError("need dt > 0 and t_end >= dt")
        if self.t_ramp is not None and self.t_ramp <= 0.0:
            raise ValueError("t_ramp must be positive when set")
        if self.observe_box is not None:
            x0, x1, y0, y1 = self.observe_box
            bx0, bx1, by0, by1 = self.domain.bounds
            if not (bx0 <= x0 < x1 <= bx1 and by0 <= y0 < y1 <= by1):
                raise ValueError("observation box must lie inside the domain bounds")

    # -- compilation --

    def build_mesh(self) -> Mesh:
        if self.grading_boxes:
            msh = generate(self.domain, target_h=_BACKGROUND_H,
                           grading=GradingSpec(boxes=self.grading_boxes,
                                               h_min=RESOLUTIONS[self.resolution]))
        else:
            msh = generate(self.domain, target_h=RESOLUTIONS[self.resolution])
        return tag_boundary(msh, [(r.name, r.predicate()) for r in self.tag_rules])

    def boundary_spec(self) -> sp.BoundarySpec:
        ramp = self.t_ramp
        conditions = []
        for entry in self.bcs:
            base = np.asarray(entry.value, dtype=float)
            rate = np.asarray(entry.rate, dtype=float)
            if entry.field == "theta":
                def fn(p, t, base=base[0], rate=rate[0]):
                    return base + rate * (t if ramp is None else min(t, ramp))
                conditions.append(sp.DirichletPatch(field="theta", tag=entry.tag,
                                                    value=fn))
            else:
                def fn(p, t, base=base, rate=rate):
                    return base + rate * (t if ramp is None else min(t, ramp))
                conditions.append(sp.DirichletPatch(field="u", tag=entry.tag,
                                                    value=fn,
                                                    components=entry.components))
        return sp.BoundarySpec(conditions=tuple(conditions))

    def compile_run(self) -> sp.CompiledScenario:
        msh = self.build_mesh()
        return sp.CompiledScenario(
            name=self.name, mesh=msh, mat=self.mat, model=self.model,
            dt=self.dt, t_end=self.t_end, bc=self.boundary_spec(),
            z0=self.crack.evaluate(msh.nodes),
            theta0=np.full(msh.node_count, self.theta_init),
            output_every=self.output_every,
            t_ramp=0.0 if self.t_ramp is None else self.t_ramp,
            solver_tol=self.solver_tol)

    # -- sweep helpers --

    def variant(self, *, model: str | None = None, delta: float | None = None,
                theta_d: float | None = None, resolution: str | None = None,
                dt: float | None = None, t_end: float | None = None,
                t_ramp=_UNSET, output_every: int | None = None,
                solver_tol: float | None = None) -> "ScenarioConfig":
        """Config with sweep axes or numerics swapped out.

        ``theta_d`` rewrites the constant of the temperature entry on the
        ``top`` tag, the convention all builtin sweeps follow.
        """
        changes: dict = {}
        if model is not None:
            changes["model"] = model
        if delta is not None:
            changes["mat"] = replace(self.mat, delta=delta)
        if theta_d is not None:
            rewritten, hit = [], False
            for entry in self.bcs:
                if entry.field == "theta" and entry.tag == "top":
                    entry = replace(entry, value=(float(theta_d),))
                    hit = True
                rewritten.append(entry)
            if not hit:
                raise ValueError(f"{self.name} has no temperature entry on 'top'")
            changes["bcs"] = tuple(rewritten)
        if resolution is not None:
            changes["resolution"] = resolution
        if dt is not None:
            changes["dt"] = dt
        if t_end is not None:
            changes["t_end"] = t_end
        if t_ramp is not _UNSET:
            changes["t_ramp"] = t_ramp
        if output_every is not None:
            changes["output_every"] = output_every
        if solver_tol is not None:
            changes["solver_tol"] = solver_tol
        return replace(self, **changes)


# ---- builtin registry -------------------------------------------------------

def _biot_material() -> MaterialParams:
    return MaterialParams.from_engineering(
        E_Y=1.0, nu_P=0.32, a_L=0.475, Theta0=0.0, delta=0.1)


def _fracture_material(delta: float) -> MaterialParams:
    return MaterialParams.from_engineering(
        E_Y=1.0, nu_P=0.3, a_L=0.7, Theta0=0.0, delta=delta,
        gamma_star=5.08, eps=0.01, alpha=1.0e-3)


def _lshape() -> ScenarioConfig:
    return ScenarioConfig(
        name="lshape", model="biot", domain=DomainSpec(kind="lshape"),
        tag_rules=(TagRule("left", "x_equals", (-1.0,)),
                   TagRule("right", "x_equals", (1.0,)),
                   TagRule("rest", "rest")),
        mat=_biot_material(),
        bcs=(BCEntry("u", "left", (0, 1), (0.0, 0.0), (0.0, 0.0)),
             BCEntry("u", "right", (1,), (0.0,), (-0.1,))),
        dt=1.0e-4, t_end=0.1,
        # the observation box hugs the re-entrant corner: the coupling
        # effect on the averaged energy density lives in the singular core
        # and washes out over wider windows
        observe_box=(-0.03, 0.03, -0.03, 0.03),
        grading_boxes=((-0.1, 0.1, -0.1, 0.1),),
        delta_sweep=(0.0, 0.1, 0.5))


def _cracked_square() -> ScenarioConfig:
    return ScenarioConfig(
        name="cracked_square", model="biot",
        domain=DomainSpec(kind="unit_square_2x2", slit=True, slit_tip_x=0.5),
        tag_rules=(TagRule("top", "y_equals", (1.0,)),
                   TagRule("bottom", "y_equals", (-1.0,)),
                   TagRule("rest", "rest")),
        mat=_biot_material(),
        bcs=(BCEntry("u", "top", (0, 1), (0.0, 0.0), (0.0, 1.0)),
             BCEntry("u", "bottom", (0, 1), (0.0, 0.0), (0.0, -1.0))),
        dt=1.0e-4, t_end=0.1,
        observe_box=(0.45, 0.65, -0.1, 0.1),
        grading_boxes=((0.3, 0.7, -0.1, 0.1),),
        delta_sweep=(0.0, 0.1, 0.5))


def _straight_crack() -> ScenarioConfig:
    return ScenarioConfig(
        name="straight_crack", model="tfpfm2",
        domain=DomainSpec(kind="unit_square_2x2"),
        tag_rules=(TagRule("top", "y_equals", (1.0,)),
                   TagRule("bottom", "y_equals", (-1.0,)),
                   TagRule("rest", "rest")),
        mat=_fracture_material(delta=0.5),
        bcs=(BCEntry("u", "top", (0, 1), (0.0, 0.0), (0.0, 3.0)),
             BCEntry("u", "bottom", (0, 1), (0.0, 0.0), (0.0, -3.0))),
        dt=1.0e-3, t_end=1.0,
        crack=InitialCrack("front", 1.5e-2, (0.0,)),
        grading_boxes=((-1.0, 1.0, -0.06, 0.06),),
        delta_sweep=(0.0, 0.1, 0.2, 0.5))


def _mode1_path() -> ScenarioConfig:
    top, bottom = (-0.5, 0.625, 0.15), (-0.5, -0.625, 0.15)
    return ScenarioConfig(
        name="mode1_path", model="tfpfm2",
        domain=DomainSpec(kind="square_with_holes",
                          holes=(Hole(*top), Hole(*bottom))),
        tag_rules=(TagRule("right", "x_equals", (1.0,)),
                   TagRule("hole_top", "circles", top),
                   TagRule("hole_bottom", "circles", bottom),
                   TagRule("top", "y_equals", (1.0,)),
                   TagRule("bottom", "y_equals", (-1.0,)),
                   TagRule("rest", "rest")),
        mat=_fracture_material(delta=0.5),
        bcs=(BCEntry("u", "right", (0,), (0.0,), (0.0,)),
             BCEntry("u", "hole_top", (1,), (0.0,), (8.0,)),
             BCEntry("u", "hole_bottom", (1,), (0.0,), (-8.0,)),
             BCEntry("theta", "top", (), (10.0,), (0.0,)),
             BCEntry("theta", "bottom", (), (0.0,), (0.0,))),
        dt=1.0e-3, t_end=1.0,
        crack=InitialCrack("front", 1.5e-2, (-0.2,)),
        grading_boxes=((-1.0, 1.0, -0.45, 0.45),),
        theta_d_sweep=(0.0, 3.0, 5.0, 7.0, 10.0))


def _mode12_path() -> ScenarioConfig:
    pull = (3.0 * math.sin(math.pi / 3.0), 3.0 * math.cos(math.pi / 3.0))
    return ScenarioConfig(
        name="mode12_path", model="tfpfm2",
        domain=DomainSpec(kind="unit_square_2x2"),
        tag_rules=(TagRule("top", "y_equals", (1.0,)),
                   TagRule("bottom", "y_equals", (-1.0,)),
                   TagRule("rest", "rest")),
        mat=_fracture_material(delta=0.15),
        bcs=(BCEntry("u", "top", (0, 1), (0.0, 0.0), pull),
             BCEntry("u", "bottom", (0, 1), (0.0, 0.0), (-pull[0], -pull[1])),
             BCEntry("theta", "top", (), (6.0,), (0.0,)),
             BCEntry("theta", "bottom", (), (0.0,), (0.0,))),
        dt=1.0e-3, t_end=1.0,
        crack=InitialCrack("band", 1.5e-2, (-0.5, 0.5)),
        grading_boxes=((-1.0, 1.0, -0.55, 0.55),),
        theta_d_sweep=(0.0, 2.0, 3.0, 5.0, 6.0))


_REGISTRY = {
    "lshape": _lshape,
    "cracked_square": _cracked_square,
    "straight_crack": _straight_crack,
    "mode1_path": _mode1_path,
    "mode12_path": _mode12_path,
}


def builtin(name: str) -> ScenarioConfig:
    try:
        make = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; "
                         f"choose from {', '.join(BUILTINS)}") from None
    return make()


# ---- diagnostics ------------------------------------------------------------

def observe_area_averages(state: sp.SimState, mat: MaterialParams,
                          box: tuple[float, float, float, float]) -> tuple[float, float]:
    """Area-weighted averages of the two energy densities over the box.

    Membership is by triangle centroid, so boundary-straddling triangles
    count fully or not at all.
    """
    msh = state.mesh
    x0, x1, y0, y1 = box
    centroids = msh.centroids
    inside = ((centroids[:, 0] > x0) & (centroids[:, 0] < x1)
              & (centroids[:, 1] > y0) & (centroids[:, 1] < y1))
    if not inside.any():
        raise ValueError("observation box contains no triangle centroids")
    areas = msh.areas[inside]
    e = strains(msh, state.u)[inside]
    w = energy_density_W(e, mat)
    theta_mid = midpoint_values(msh, state.theta)[inside]
    w_star = energy_density_Wstar(e[:, None, :, :], theta_mid, mat).mean(axis=1)
    total = areas.sum()
    return float(areas @ w / total), float(areas @ w_star / total)


def crack_tip_tracker(state: sp.SimState, threshold: float = 0.9,
                      line_y: float = 0.0) -> float:
    """Rightmost damaged position on a horizontal line.

    Returns max x1 over nodes with |x2 - line_y| below tolerance and
    z > threshold; -inf when the line carries no damage above threshold.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    nodes = state.mesh.nodes
    on_line = np.abs(nodes[:, 1] - line_y) < _TAG_TOL
    hot = on_line & (state.z > threshold)
    if not hot.any():
        return -math.inf
    return float(nodes[hot, 0].max())


@dataclass(frozen=True)
class CrackPath:
    """Column-sampled crack trajectory with its scalar shape metrics."""

    columns: np.ndarray
    centroids: np.ndarray
    deviation: float
    kink_angle: float


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    basis = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = float(((basis @ coef - y) ** 2).sum())
    return float(coef[0]), resid


def _two_segment_kink(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) < 4:
        return 0.0
    best: tuple[float, float, float] | None = None
    for split in range(2, len(x) - 1):
        s1, r1 = _line_fit(x[:split], y[:split])
        s2, r2 = _line_fit(x[split:], y[split:])
        if best is None or r1 + r2 < best[0]:
            best = (r1 + r2, s1, s2)
    return abs(math.atan(best[2]) - math.atan(best[1]))


def crack_path_extractor(state: sp.SimState, threshold: float = 0.9,
                         n_columns: int = 40) -> CrackPath:
    """Damage trajectory as per-column z-weighted centroids of x2.

    deviation is the largest |centroid|; kink_angle (radians) is the
    largest best two-segment least-squares kink over two overlapping
    windows (leading and trailing three quarters) of the centroid
    polyline.  A single fit over the full span would cancel for cracks
    that grow point-symmetric wings from both ends of a centered band;
    each window sees one wing only.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    msh = state.mesh
    hot = state.z > threshold
    empty = np.empty(0)
    if not hot.any():
        return CrackPath(empty, empty, 0.0, 0.0)
    x, y, w = msh.nodes[hot, 0], msh.nodes[hot, 1], state.z[hot]
    lo, hi = float(msh.nodes[:, 0].min()), float(msh.nodes[:, 0].max())
    edges = np.linspace(lo, hi, n_columns + 1)
    cols = np.clip(np.digitize(x, edges) - 1, 0, n_columns - 1)
    weight = np.bincount(cols, weights=w, minlength=n_columns)
    moment = np.bincount(cols, weights=w * y, minlength=n_columns)
    filled = weight > 0.0
    centers = (0.5 * (edges[:-1] + edges[1:]))[filled]
    centroids = moment[filled] / weight[filled]
    cut = (3 * len(centers) + 3) // 4
    kink = max(_two_segment_kink(centers[:cut], centroids[:cut]),
               _two_segment_kink(centers[len(centers) - cut:],
                                 centroids[len(centers) - cut:]))
    return CrackPath(columns=centers, centroids=centroids,
                     deviation=float(np.abs(centroids).max()),
                     kink_angle=kink)


# ---- plain-text round trip --------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        text = repr(float(value))
        return text if any(c in text for c in ".einf") else text + ".0"
    if isinstance(value, str):
        return '"' + value + '"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_scenario(config: ScenarioConfig, path: str | Path) -> None:
    """Write the config in TOML form; `read_scenario` restores it exactly."""
    lines = [f"name = {_fmt(config.name)}",
             f"model = {_fmt(config.model)}",
             f"resolution = {_fmt(config.resolution)}",
             f"dt = {_fmt(config.dt)}",
             f"t_end = {_fmt(config.t_end)}"]
    if config.t_ramp is not None:
        lines.append(f"t_ramp = {_fmt(config.t_ramp)}")
    lines += [f"output_every = {_fmt(config.output_every)}",
              f"theta_init = {_fmt(config.theta_init)}",
              f"solver_tol = {_fmt(config.solver_tol)}",
              f"delta_sweep = {_fmt(config.delta_sweep)}",
              f"theta_d_sweep = {_fmt(config.theta_d_sweep)}"]
    if config.observe_box is not None:
        lines.append(f"observe_box = {_fmt(config.observe_box)}")
    lines.append(f"grading_boxes = {_fmt(config.grading_boxes)}")

    dom = config.domain
    lines += ["", "[domain]", f"kind = {_fmt(dom.kind)}",
              f"bounds = {_fmt(dom.bounds)}", f"slit = {_fmt(dom.slit)}",
              f"slit_tip_x = {_fmt(dom.slit_tip_x)}"]
    for hole in dom.holes:
        lines += ["", "[[domain.holes]]", f"cx = {_fmt(hole.cx)}",
                  f"cy = {_fmt(hole.cy)}", f"radius = {_fmt(hole.radius)}",
                  f"segments = {_fmt(hole.segments)}"]

    mat = config.mat
    lines += ["", "[material]"]
    for key in ("E_Y", "nu_P", "a_L", "kappa0", "chi", "Theta0", "delta",
                "gamma_star", "eps", "alpha", "cond_exponent"):
        lines.append(f"{key} = {_fmt(getattr(mat, key))}")

    lines += ["", "[crack]", f"kind = {_fmt(config.crack.kind)}",
              f"eta = {_fmt(config.crack.eta)}",
              f"edges = {_fmt(config.crack.edges)}"]

    for rule in config.tag_rules:
        lines += ["", "[[tag_rules]]", f"name = {_fmt(rule.name)}",
                  f"kind = {_fmt(rule.kind)}", f"params = {_fmt(rule.params)}"]
    for entry in config.bcs:
        lines += ["", "[[bc]]", f"field = {_fmt(entry.field)}",
                  f"tag = {_fmt(entry.tag)}",
                  f"components = {_fmt(entry.components)}",
                  f"value = {_fmt(entry.value)}", f"rate = {_fmt(entry.rate)}"]
    Path(path).write_text("\n".join(lines) + "\n")


def read_scenario(path: str | Path) -> ScenarioConfig:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    dom = data["domain"]
    domain = DomainSpec(kind=dom["kind"], bounds=tuple(dom["bounds"]),
                        holes=tuple(Hole(**h) for h in dom.get("holes", ())),
                        slit=dom["slit"], slit_tip_x=dom["slit_tip_x"])
    mat = MaterialParams.from_engineering(
        data["material"]["E_Y"], data["material"]["nu_P"],
        data["material"]["a_L"],
        **{k: data["material"][k] for k in ("kappa0", "chi", "Theta0", "delta",
                                            "gamma_star", "eps", "alpha",
                                            "cond_exponent")})
    crack = InitialCrack(kind=data["crack"]["kind"], eta=data["crack"]["eta"],
                         edges=tuple(data["crack"]["edges"]))
    return ScenarioConfig(
        name=data["name"], model=data["model"], domain=domain,
        tag_rules=tuple(TagRule(r["name"], r["kind"], tuple(r["params"]))
                        for r in data.get("tag_rules", ())),
        mat=mat,
        bcs=tuple(BCEntry(b["field"], b["tag"], tuple(b["components"]),
                          tuple(b["value"]), tuple(b["rate"]))
                  for b in data.get("bc", ())),
        dt=data["dt"], t_end=data["t_end"], t_ramp=data.get("t_ramp"),
        output_every=data["output_every"], crack=crack,
        theta_init=data["theta_init"],
        observe_box=(tuple(data["observe_box"])
                     if "observe_box" in data else None),
        grading_boxes=tuple(tuple(b) for b in data["grading_boxes"]),
        delta_sweep=tuple(data["delta_sweep"]),
        theta_d_sweep=tuple(data["theta_d_sweep"]),
        resolution=data["resolution"], solver_tol=data["solver_tol"])
