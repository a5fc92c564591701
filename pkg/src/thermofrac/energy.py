"""Energy bookkeeping and discrete dissipation audits.

Every integral uses the same edge-midpoint quadrature as the assembly in
fem_core, so the audited identities close to rounding rather than to
quadrature error.  The thermal energy and its dissipation are written with
the heat-coupling coefficient delta in the prefactors; for parameter sets
with delta = beta*Theta0 they reduce to the reference-temperature forms,
and both vanish identically in the uncoupled delta = 0 case.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import fem_core as fc
from .physics import MaterialParams, energy_density_W, energy_density_Wstar

_MODELS = ("elasticity", "biot", "fpfm", "tfpfm1", "tfpfm2")

# Lyapunov candidate per model: (energy fields summed, dissipation fields
# summed).  TF-PFM1's total is a Lyapunov function only with the thermal
# solve frozen; with coupling on, the audit reports the trend but the
# acceptance criteria never assert it.
_TOTALS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "elasticity": (("E_el",), ()),
    "biot": (("E_el", "E_th"), ("D_theta",)),
    "fpfm": (("E_el_mod", "E_s"), ("D_z",)),
    "tfpfm1": (("E_el_star_mod", "E_s"), ("D_z",)),
    "tfpfm2": (("E_el_mod", "E_s", "E_th"), ("D_z", "D_theta")),
}


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    E_el: float
    E_el_star: float
    E_th: float
    E_el_mod: float
    E_el_star_mod: float
    E_s: float
    D_theta: float
    D_z: float
    residual: float

    @classmethod
    def column_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def total_energy(rec: EnergyRecord, model: str) -> float:
    names, _ = _TOTALS[model]
    return sum(getattr(rec, n) for n in names)


def total_dissipation(rec: EnergyRecord, model: str) -> float:
    _, names = _TOTALS[model]
    return sum(getattr(rec, n) for n in names)


def _core_energies(state, mat: MaterialParams) -> dict[str, float]:
    msh = state.mesh
    a3 = msh.areas / 3.0
    e = fc.strains(msh, state.u)
    w_tri = energy_density_W(e, mat)

    theta_mid = fc.midpoint_values(msh, state.theta)
    wstar_mid = energy_density_Wstar(e[:, None, :, :], theta_mid, mat)
    deg_mid = np.maximum((1.0 - fc.midpoint_values(msh, state.z)) ** 2, fc.ETA_RES)

    E_el = 0.5 * float(msh.areas @ w_tri)
    E_el_star = 0.5 * float(a3 @ wstar_mid.sum(axis=1))
    E_el_mod = 0.5 * float(a3 @ (deg_mid.sum(axis=1) * w_tri))
    E_el_star_mod = 0.5 * float(a3 @ (deg_mid * wstar_mid).sum(axis=1))

    if mat.delta != 0.0:
        dtheta_sq = (theta_mid - mat.Theta0) ** 2
        E_th = (mat.beta * mat.chi / (2.0 * mat.delta)) * float(a3 @ dtheta_sq.sum(axis=1))
    else:
        E_th = 0.0

    b, c = msh.grads
    gz_sq = (np.einsum("ti,ti->t", b, state.z[msh.tris]) ** 2
             + np.einsum("ti,ti->t", c, state.z[msh.tris]) ** 2)
    z_sq_mid = fc.midpoint_values(msh, state.z) ** 2
    E_s = 0.5 * mat.gamma_star * (
        mat.eps * float(msh.areas @ gz_sq)
        + float(a3 @ z_sq_mid.sum(axis=1)) / mat.eps)

    return {
        "E_el": E_el, "E_el_star": E_el_star, "E_th": E_th,
        "E_el_mod": E_el_mod, "E_el_star_mod": E_el_star_mod, "E_s": E_s,
    }


def compute_energies(
    state,
    mat: MaterialParams,
    prev=None,
    model: str | None = None,
) -> EnergyRecord:
    """Evaluate all tracked energies for one state.

    With `prev` (the state one step earlier) the backward-difference
    dissipation integrals are filled in; with `model` as well, the record
    carries the discrete residual of that model's energy identity.  The
    initial record of a run has neither.
    """
    if model is not None and model not in _MODELS:
        raise ValueError(f"unknown model {model!r}")
    core = _core_energies(state, mat)
    D_theta = 0.0
    D_z = 0.0
    residual = 0.0
    if prev is not None:
        dt = state.t - prev.t
        if dt <= 0.0:
            raise ValueError("prev state must be strictly earlier")
        msh = state.mesh
        if mat.delta != 0.0:
            cond = mat.kappa0 * fc.degraded_element_integrals(
                msh, prev.z, mat.cond_exponent)
            b, c = msh.grads
            gth_sq = (np.einsum("ti,ti->t", b, state.theta[msh.tris]) ** 2
                      + np.einsum("ti,ti->t", c, state.theta[msh.tris]) ** 2)
            D_theta = (mat.beta / mat.delta) * float(cond @ gth_sq)
        zdot = (state.z - prev.z) / dt
        mass = fc.scalar_mass(msh, 1.0)
        D_z = mat.alpha * float(zdot @ (mass @ zdot))
        if model is not None and model != "elasticity":
            prev_core = _core_energies(prev, mat)
            names, dnames = _TOTALS[model]
            tot_now = sum(core[n] for n in names)
            tot_prev = sum(prev_core[n] for n in names)
            diss = sum({"D_theta": D_theta, "D_z": D_z}[n] for n in dnames)
            residual = (tot_now - tot_prev) / dt + diss
    return EnergyRecord(t=state.t, D_theta=D_theta, D_z=D_z,
                        residual=residual, **core)


@dataclass(frozen=True)
class AuditReport:
    """Outcome of a hold-phase dissipation audit.

    The residual scale is first order in dt (backward-difference rates), so
    tolerances must be read against the reported dt.
    """

    model: str
    window: tuple[float, float]
    n_steps: int
    dt: float
    max_residual: float
    max_violation: float
    violation_count: int
    total_start: float
    total_end: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def audit_dissipation(
    records: list[EnergyRecord],
    model: str,
    phase: tuple[float, float],
    tol: float,
) -> AuditReport:
    """Check monotone decay of the model's total energy over a hold window.

    Valid only where the boundary data are constant in time; the caller
    owns that hypothesis.  Works from the records alone so a CSV re-audit
    gives identical numbers.
    """
    if model not in _TOTALS:
        raise ValueError(f"no energy identity registered for model {model!r}")
    t0, t1 = phase
    if not t1 > t0:
        raise ValueError("phase window must have positive length")
    sel = [r for r in records if t0 - 1e-12 <= r.t <= t1 + 1e-12]
    if len(sel) < 2:
        raise ValueError("phase window covers fewer than two records")
    totals = [total_energy(r, model) for r in sel]
    max_violation = 0.0
    violation_count = 0
    max_residual = 0.0
    for k in range(1, len(sel)):
        dt = sel[k].t - sel[k - 1].t
        jump = totals[k] - totals[k - 1]
        if jump > max_violation:
            max_violation = jump
        if jump > tol:
            violation_count += 1
        res = jump / dt + total_dissipation(sel[k], model)
        max_residual = max(max_residual, abs(res))
    return AuditReport(
        model=model,
        window=(sel[0].t, sel[-1].t),
        n_steps=len(sel) - 1,
        dt=(sel[-1].t - sel[0].t) / (len(sel) - 1),
        max_residual=max_residual,
        max_violation=max_violation,
        violation_count=violation_count,
        total_start=totals[0],
        total_end=totals[-1],
        tol=tol,
    )
