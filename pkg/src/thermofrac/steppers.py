"""Semi-implicit stepping for the coupled thermo-fracture models.

Each step solves sequentially for displacement, damage, and temperature;
every solve sees only fields from the previous step or earlier solves of
the same step, never an iterate of itself, so a step is three linear
systems.  The damage update takes a nodewise max against the previous
field, which is the only mechanism enforcing irreversibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import fem_core as fc
from .energy import EnergyRecord, compute_energies
from .mesh import Mesh
from .physics import MaterialParams, energy_density_W, energy_density_Wstar

MODELS = ("elasticity", "biot", "fpfm", "tfpfm1", "tfpfm2")

SOLVER_TOL = 1.0e-10

ValueFn = Callable[[np.ndarray, float], np.ndarray]


class SteppingError(RuntimeError):
    """A linear solve failed mid-run; carries the 1-based step index."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


# ---- boundary data ---------------------------------------------------------

@dataclass(frozen=True)
class DirichletPatch:
    """Prescribed values for one field on one boundary tag.

    For displacement, `components` selects which components are pinned and
    `value(points, t)` must return shape (n, len(components)); for
    temperature it returns (n,) and `components` is ignored.
    """

    field: str
    tag: str
    value: ValueFn
    components: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        if self.field not in ("u", "theta"):
            raise ValueError(f"unknown field {self.field!r}")
        if self.field == "u" and not set(self.components) <= {0, 1}:
            raise ValueError("displacement components must be 0 or 1")


@dataclass(frozen=True)
class BoundarySpec:
    conditions: tuple[DirichletPatch, ...]

    def compile(self, msh: Mesh, t: float) -> tuple[fc.DirichletBC | None, fc.DirichletBC | None]:
        """Evaluate all patches at time t into solver-level constraints."""
        u_dofs, u_vals, th_dofs, th_vals = [], [], [], []
        for cond in self.conditions:
            nodes = msh.nodes_with_tag(cond.tag)
            if nodes.size == 0:
                continue
            pts = msh.nodes[nodes]
            vals = np.asarray(cond.value(pts, t), dtype=float)
            if cond.field == "theta":
                th_dofs.append(nodes)
                th_vals.append(np.broadcast_to(vals, nodes.shape).ravel())
            else:
                vals = np.broadcast_to(vals, (len(nodes), len(cond.components)))
                for k, comp in enumerate(cond.components):
                    u_dofs.append(2 * nodes + comp)
                    u_vals.append(vals[:, k])

        def pack(dofs, vals):
            if not dofs:
                return None
            return fc.DirichletBC(dofs=np.concatenate(dofs),
                                  values=np.concatenate(vals))

        return pack(u_dofs, u_vals), pack(th_dofs, th_vals)


# ---- state and step audit --------------------------------------------------

@dataclass(frozen=True)
class SimState:
    mesh: Mesh
    t: float
    step: int
    u: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    dt: float = 0.0           # length of the step that produced this state

    def __post_init__(self):
        n = self.mesh.node_count
        if self.u.shape != (2 * n,) or self.z.shape != (n,) or self.theta.shape != (n,):
            raise ValueError("field shapes do not match the mesh")


def initial_state(msh: Mesh, z0: np.ndarray, theta0: np.ndarray) -> SimState:
    return SimState(mesh=msh, t=0.0, step=0, u=np.zeros(2 * msh.node_count),
                    z=np.asarray(z0, float).copy(),
                    theta=np.asarray(theta0, float).copy())


@dataclass
class StepAudit:
    """Session-wide damage-update bookkeeping.

    min_increment stays >= 0 iff irreversibility held exactly on every
    damage step taken since the last reset; max_overshoot records how far
    the unclipped update left [0, 1].
    """

    damage_steps: int = 0
    min_increment: float = math.inf
    max_overshoot: float = 0.0
    min_z: float = math.inf
    max_z: float = -math.inf


_AUDIT = StepAudit()


def reset_step_audit() -> None:
    global _AUDIT
    _AUDIT = StepAudit()


def step_audit() -> StepAudit:
    return replace(_AUDIT)


# ---- single steps ----------------------------------------------------------

def _advance(
    state: SimState,
    dt: float,
    bc: BoundarySpec,
    mat: MaterialParams,
    model: str,
    freeze_theta: bool = False,
    tol: float = SOLVER_TOL,
) -> SimState:
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    msh = state.mesh
    t_new = state.t + dt
    bc_u, bc_th = bc.compile(msh, t_new)
    if model == "fpfm":
        # purely mechanical model: no thermal stress term in the u solve
        theta_for_u = np.full(msh.node_count, mat.Theta0)
    else:
        theta_for_u = state.theta
    step_index = state.step + 1
    try:
        u_new = fc.solve(
            fc.assemble_elasticity(msh, state.z, theta_for_u, mat, bc_u),
            tol=tol, x0=state.u)

        z_new = state.z
        if model in ("fpfm", "tfpfm1", "tfpfm2"):
            e_prev = fc.strains(msh, state.u)
            if model == "tfpfm1":
                theta_mid = fc.midpoint_values(msh, state.theta)
                w_tri = energy_density_Wstar(
                    e_prev[:, None, :, :], theta_mid, mat).mean(axis=1)
            else:
                w_tri = energy_density_W(e_prev, mat)
            w_nodal = fc.cellwise_to_nodal(msh, w_tri)
            z_tilde = fc.solve(
                fc.assemble_damage(msh, state.z, w_nodal, dt, mat),
                tol=tol, x0=state.z)
            overshoot = max(float(z_tilde.max()) - 1.0, -float(z_tilde.min()), 0.0)
            z_new = np.clip(np.maximum(z_tilde, state.z), 0.0, 1.0)
            _AUDIT.damage_steps += 1
            _AUDIT.min_increment = min(_AUDIT.min_increment,
                                       float((z_new - state.z).min()))
            _AUDIT.max_overshoot = max(_AUDIT.max_overshoot, overshoot)
            _AUDIT.min_z = min(_AUDIT.min_z, float(z_new.min()))
            _AUDIT.max_z = max(_AUDIT.max_z, float(z_new.max()))

        theta_new = state.theta
        if model in ("biot", "tfpfm1", "tfpfm2") and not freeze_theta:
            theta_new = fc.solve(
                fc.assemble_heat(msh, state.z, state.theta, u_new, state.u,
                                 dt, mat, bc=bc_th),
                tol=tol, x0=state.theta)
    except fc.ConvergenceError as err:
        raise SteppingError(f"step {step_index}: {err}", step=step_index) from err
    return SimState(mesh=msh, t=t_new, step=step_index,
                    u=u_new, z=z_new, theta=theta_new, dt=dt)


def step_biot(state: SimState, dt: float, bc: BoundarySpec,
              mat: MaterialParams, tol: float = SOLVER_TOL) -> SimState:
    if np.any(state.z != 0.0):
        raise ValueError("coupled thermoelastic stepping assumes z == 0")
    return _advance(state, dt, bc, mat, "biot", tol=tol)


def step_fpfm(state: SimState, dt: float, bc: BoundarySpec,
              mat: MaterialParams, tol: float = SOLVER_TOL) -> SimState:
    return _advance(state, dt, bc, mat, "fpfm", tol=tol)


def step_tfpfm1(state: SimState, dt: float, bc: BoundarySpec,
                mat: MaterialParams, freeze_theta: bool = False,
                tol: float = SOLVER_TOL) -> SimState:
    return _advance(state, dt, bc, mat, "tfpfm1", freeze_theta=freeze_theta,
                    tol=tol)


def step_tfpfm2(state: SimState, dt: float, bc: BoundarySpec,
                mat: MaterialParams, freeze_theta: bool = False,
                tol: float = SOLVER_TOL) -> SimState:
    return _advance(state, dt, bc, mat, "tfpfm2", freeze_theta=freeze_theta,
                    tol=tol)


# ---- whole runs ------------------------------------------------------------

@dataclass(frozen=True)
class CompiledScenario:
    """Everything a stepping loop needs, with boundary data as callables."""

    name: str
    mesh: Mesh
    mat: MaterialParams
    model: str
    dt: float
    t_end: float
    bc: BoundarySpec
    z0: np.ndarray
    theta0: np.ndarray
    freeze_theta: bool = False
    output_every: int = 1
    t_ramp: float = 0.0
    solver_tol: float = SOLVER_TOL

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.dt <= 0.0 or self.t_end < 0.0:
            raise ValueError("need dt > 0 and t_end >= 0")
        if self.output_every < 1:
            raise ValueError("output_every must be at least 1")
        steps = self.t_end / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError("t_end must be an integer number of steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class RunResult:
    records: list[EnergyRecord]
    state: SimState


Hook = Callable[[SimState, EnergyRecord], None]


def run(scenario, hooks: Sequence[Hook] = ()) -> RunResult:
    """Execute a compiled scenario from t = 0 to t_end.

    The displacement at t = 0 is solved from the initial damage and
    temperature before stepping begins.  Hooks fire on the initial state,
    every output_every-th step, and the final step.  On a solver failure
    the raised SteppingError carries the records produced so far.
    """
    sc = scenario.compile_run() if hasattr(scenario, "compile_run") else scenario
    msh = sc.mesh
    state = initial_state(msh, sc.z0, sc.theta0)

    bc_u0, _ = sc.bc.compile(msh, 0.0)
    theta_for_u = (np.full(msh.node_count, sc.mat.Theta0)
                   if sc.model == "fpfm" else state.theta)
    try:
        u0 = fc.solve(fc.assemble_elasticity(msh, state.z, theta_for_u,
                                             sc.mat, bc_u0), tol=sc.solver_tol)
    except fc.ConvergenceError as err:
        raise SteppingError(f"initial solve: {err}", step=0) from err
    state = replace(state, u=u0)

    records = [compute_energies(state, sc.mat)]
    for hook in hooks:
        hook(state, records[0])

    freeze = {"freeze_theta": sc.freeze_theta} if sc.model in ("tfpfm1", "tfpfm2") else {}
    stepper = {
        "elasticity": lambda s: _advance(s, sc.dt, sc.bc, sc.mat, "elasticity",
                                         tol=sc.solver_tol),
        "biot": lambda s: step_biot(s, sc.dt, sc.bc, sc.mat, tol=sc.solver_tol),
        "fpfm": lambda s: step_fpfm(s, sc.dt, sc.bc, sc.mat, tol=sc.solver_tol),
        "tfpfm1": lambda s: step_tfpfm1(s, sc.dt, sc.bc, sc.mat,
                                        tol=sc.solver_tol, **freeze),
        "tfpfm2": lambda s: step_tfpfm2(s, sc.dt, sc.bc, sc.mat,
                                        tol=sc.solver_tol, **freeze),
    }[sc.model]

    for k in range(1, sc.n_steps + 1):
        try:
            new_state = stepper(state)
        except SteppingError as err:
            err.records = records
            err.state = state
            raise
        rec = compute_energies(new_state, sc.mat, prev=state, model=sc.model)
        records.append(rec)
        state = new_state
        if k % sc.output_every == 0 or k == sc.n_steps:
            for hook in hooks:
                hook(state, rec)
    return RunResult(records=records, state=state)
