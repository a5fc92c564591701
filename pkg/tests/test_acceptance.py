"""End-to-end acceptance suite.

Each test covers one numbered criterion and reports through the
`criterion` fixture, which asserts and feeds the scoreboard printed at
the end of the run.  The two long path studies carry the slow marker;
everything else is sized for minutes.  The irreversibility check reads
the session-wide step audit, so it is deliberately the last test in the
file.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from thermofrac import analytic as an
from thermofrac import energy as en
from thermofrac import fem_core as fc
from thermofrac import scenarios as sc
from thermofrac import steppers as sp
from thermofrac.mesh import DomainSpec, GradingSpec, Mesh, generate, tag_boundary
from thermofrac.physics import MaterialParams

RAMP = 0.45
HOLD_END = 0.5


def hold_config(model: str, **kw) -> sc.ScenarioConfig:
    """Straight-crack pull ramped to RAMP, then held to HOLD_END."""
    return sc.builtin("straight_crack").variant(
        model=model, t_ramp=RAMP, t_end=HOLD_END, **kw)


def hold_audit(records, model, window=(RAMP, HOLD_END)):
    """Audit a hold window with slack tied to the energy at its start."""
    at_ramp = next(r for r in records if abs(r.t - window[0]) < 1e-9)
    tol = 1e-8 * abs(en.total_energy(at_ramp, model))
    report = en.audit_dissipation(records, model, window, tol)
    return report, tol


def test_biot_hold_energy_decay(criterion):
    start = time.monotonic()
    base = sc.builtin("cracked_square").variant(t_ramp=0.02, t_end=0.04)
    msh = tag_boundary(
        generate(DomainSpec(kind="unit_square_2x2", slit=True, slit_tip_x=0.5),
                 target_h=2.0 / 32.0),
        [(r.name, r.predicate()) for r in base.tag_rules])

    def records_at(dt):
        compiled = sp.CompiledScenario(
            name=base.name, mesh=msh, mat=base.mat, model="biot", dt=dt,
            t_end=0.04, bc=base.boundary_spec(),
            z0=np.zeros(msh.node_count), theta0=np.zeros(msh.node_count),
            t_ramp=0.02)
        return sp.run(compiled).records

    rep_a, tol_a = hold_audit(records_at(1e-3), "biot", (0.02, 0.04))
    rep_b, _ = hold_audit(records_at(5e-4), "biot", (0.02, 0.04))
    ratio = rep_a.max_residual / max(rep_b.max_residual, 1e-300)
    elapsed = time.monotonic() - start
    ok = (rep_a.max_violation <= tol_a and rep_a.violation_count == 0
          and ratio >= 1.5 and elapsed < 120.0)
    criterion(1, ok,
              f"violation {rep_a.max_violation:.2e} <= {tol_a:.2e}, "
              f"residual ratio {ratio:.2f}, {elapsed:.0f}s")


def test_fracture_hold_energy_decay(criterion):
    start = time.monotonic()
    records = sp.run(hold_config("fpfm")).records
    report, tol = hold_audit(records, "fpfm")
    min_dz = min(r.D_z for r in records)
    elapsed = time.monotonic() - start
    ok = (report.max_violation <= tol and report.violation_count == 0
          and min_dz >= 0.0 and elapsed < 300.0)
    criterion(2, ok,
              f"violation {report.max_violation:.2e} <= {tol:.2e}, "
              f"min D_z {min_dz:.2e}, {elapsed:.0f}s")


def test_frozen_temperature_hold_energy_decay(criterion):
    compiled = hold_config("tfpfm1").compile_run()
    compiled = replace(compiled, theta0=compiled.mesh.nodes[:, 1].copy(),
                       freeze_theta=True)
    records = sp.run(compiled).records
    report, tol = hold_audit(records, "tfpfm1")
    ok = report.max_violation <= tol and report.violation_count == 0
    criterion(3, ok, f"violation {report.max_violation:.2e} <= {tol:.2e}")


def test_coupled_fracture_hold_energy_decay(criterion):
    records = sp.run(hold_config("tfpfm2")).records
    report, tol = hold_audit(records, "tfpfm2")
    min_dz = min(r.D_z for r in records)
    min_dth = min(r.D_theta for r in records)
    ok = (report.max_violation <= tol and report.violation_count == 0
          and min_dz >= 0.0 and min_dth >= 0.0)
    criterion(4, ok,
              f"violation {report.max_violation:.2e} <= {tol:.2e}, "
              f"min D_z {min_dz:.2e}, min D_theta {min_dth:.2e}")


def test_models_coincide_without_coupling(criterion):
    def trajectory(model):
        states = []
        cfg = sc.builtin("straight_crack").variant(model=model, delta=0.0,
                                                   t_end=0.1)
        sp.run(cfg, hooks=(lambda s, r: states.append(s),))
        return states

    paths = {m: trajectory(m) for m in ("fpfm", "tfpfm1", "tfpfm2")}
    assert np.array_equal(paths["fpfm"][0].mesh.nodes,
                          paths["tfpfm1"][0].mesh.nodes)
    sup = 0.0
    for a, b in (("fpfm", "tfpfm1"), ("fpfm", "tfpfm2"), ("tfpfm1", "tfpfm2")):
        for sa, sb in zip(paths[a], paths[b]):
            sup = max(sup,
                      float(np.abs(sa.u - sb.u).max()),
                      float(np.abs(sa.z - sb.z).max()),
                      float(np.abs(sa.theta - sb.theta).max()))
    bound = 10.0 * sc.builtin("straight_crack").solver_tol
    criterion(5, sup <= bound, f"sup deviation {sup:.2e} <= {bound:.0e}")


@pytest.mark.slow
def test_crack_speed_ordering(criterion):
    start = time.monotonic()
    checkpoints = (400, 600, 800)
    tips = {}
    for model in ("fpfm", "tfpfm1", "tfpfm2"):
        marks = {}

        def hook(state, rec, marks=marks):
            if state.step in checkpoints:
                marks[state.step] = sc.crack_tip_tracker(state)

        cfg = sc.builtin("straight_crack").variant(model=model,
                                                   resolution="medium",
                                                   t_end=0.8)
        sp.run(cfg, hooks=(hook,))
        tips[model] = marks

    spacing = 1.5 * sc.RESOLUTIONS["medium"]
    ok = all(tips["tfpfm1"][k] >= tips["tfpfm2"][k] - spacing
             and tips["tfpfm2"][k] >= tips["fpfm"][k] - spacing
             for k in checkpoints)
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 1800.0
    final = {m: tips[m][800] for m in tips}
    criterion(7, ok,
              "tips at t=0.8: " + ", ".join(f"{m}={v:.3f}" for m, v in final.items())
              + f", {elapsed:.0f}s")


def test_surface_energy_grows_with_coupling(criterion):
    deltas = (0.0, 0.1, 0.5)
    es = {}
    for model in ("tfpfm1", "tfpfm2"):
        for d in deltas:
            cfg = sc.builtin("straight_crack").variant(model=model, delta=d,
                                                       t_end=0.8)
            es[(model, d)] = sp.run(cfg).records[-1].E_s
    slack = 1e-9
    ok = all(es[(m, deltas[i])] <= es[(m, deltas[i + 1])] + slack
             for m in ("tfpfm1", "tfpfm2") for i in range(len(deltas) - 1))
    detail = "; ".join(
        f"{m}: " + " <= ".join(f"{es[(m, d)]:.4f}" for d in deltas)
        for m in ("tfpfm1", "tfpfm2"))
    criterion(8, ok, detail)


def test_lshape_thermal_sign_pattern(criterion):
    finals = {}
    for d in (0.0, 0.1, 0.5):
        cfg = sc.builtin("lshape").variant(delta=d, resolution="fine")
        finals[d] = (cfg, sp.run(cfg).state)

    cfg, state = finals[0.1]
    patch_div = fc.cellwise_to_nodal(state.mesh,
                                     fc.divergence(state.mesh, state.u))
    coldest = int(np.argmin(state.theta))
    hottest = int(np.argmax(state.theta))
    signs_ok = patch_div[coldest] > 0.0 and patch_div[hottest] < 0.0

    box = cfg.observe_box
    w_mid, wstar_mid = sc.observe_area_averages(state, cfg.mat, box)
    w_lo, _ = sc.observe_area_averages(finals[0.0][1], cfg.mat, box)
    w_hi, _ = sc.observe_area_averages(finals[0.5][1], cfg.mat, box)
    ok = signs_ok and wstar_mid > w_mid and w_hi >= w_lo - 1e-12
    criterion(9, ok,
              f"div u at coldest {patch_div[coldest]:.2e}, at hottest "
              f"{patch_div[hottest]:.2e}; W*={wstar_mid:.3e} > W={w_mid:.3e}; "
              f"W(0.5)={w_hi:.3e} >= W(0)={w_lo:.3e}")


def test_tip_dilatation_matches_angular_profile(criterion):
    tip = (0.5, 0.0)
    field = an.ModeIField.from_engineering(K_I=5.0, E_Y=1.0, nu_P=0.3, tip=tip)
    mat = MaterialParams.from_engineering(E_Y=1.0, nu_P=0.3, a_L=0.7)
    msh = generate(
        DomainSpec(kind="unit_square_2x2", slit=True, slit_tip_x=0.5),
        target_h=0.1,
        grading=GradingSpec(boxes=((0.3, 0.7, -0.15, 0.15),),
                            h_min=sc.RESOLUTIONS["medium"]))

    outer = np.unique(msh.boundary_edges)
    outer = outer[np.abs(msh.nodes[outer]).max(axis=1) > 1.0 - 1e-9]
    r, th = an.polar_from_xy(field, msh.nodes[outer])
    u1, u2 = an.displacement(r, th, field)
    # nodes duplicated along the slit both get the angle +pi from atan2;
    # flip the odd component on the side whose triangles sit below the cut
    on_face = (np.abs(msh.nodes[outer, 1]) < 1e-12) & (msh.nodes[outer, 0] < 0.5)
    for j in np.flatnonzero(on_face):
        incident = np.any(msh.tris == outer[j], axis=1)
        if msh.centroids[incident, 1].mean() < 0.0:
            u2[j] = -u2[j]
    bc = fc.DirichletBC(dofs=np.concatenate([2 * outer, 2 * outer + 1]),
                        values=np.concatenate([u1, u2]))

    n = msh.node_count
    system = fc.assemble_elasticity(msh, np.zeros(n), np.zeros(n), mat, bc)
    u = fc.solve(system, tol=1e-12)

    div_h = fc.divergence(msh, u)
    dx = msh.centroids[:, 0] - tip[0]
    dy = msh.centroids[:, 1] - tip[1]
    rc = np.hypot(dx, dy)
    ring = (rc >= 0.05) & (rc <= 0.1)
    profile = np.cos(0.5 * np.arctan2(dy[ring], dx[ring])) / np.sqrt(rc[ring])
    data = div_h[ring]
    amp = float(profile @ data) / float(profile @ profile)
    misfit = float(np.linalg.norm(data - amp * profile)
                   / np.linalg.norm(data))
    exact_amp = float(an.div_u(1.0, 0.0, field))
    ok = misfit <= 0.2 and amp > 0.0
    criterion(10, ok,
              f"rel RMS {misfit:.3f} over {int(ring.sum())} cells, "
              f"amplitude {amp:.3f} (analytic {exact_amp:.3f})")


def _unit_triangle() -> Mesh:
    return Mesh(nodes=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                tris=np.array([[0, 1, 2]]),
                boundary_edges=np.array([[0, 1], [1, 2], [2, 0]]),
                edge_tag_ids=np.zeros(3, dtype=np.int64))


def _restrict(fine_mesh: Mesh, coarse_points: np.ndarray) -> np.ndarray:
    """Indices of the fine-mesh nodes coinciding with the coarse nodes."""
    fine = fine_mesh.nodes
    idx = np.empty(len(coarse_points), dtype=int)
    for i, p in enumerate(coarse_points):
        j = int(np.argmin(np.abs(fine[:, 0] - p[0]) + np.abs(fine[:, 1] - p[1])))
        assert abs(fine[j, 0] - p[0]) + abs(fine[j, 1] - p[1]) < 1e-12
        idx[i] = j
    return idx


def test_convergence_orders_and_assembly_oracles(criterion):
    case = an.manufactured_solution("biot_trig")
    hs = (0.1, 0.05, 0.025)
    sols = {}
    for h in hs:
        # time error is first order, so dt shrinks like h^2 to expose the
        # spatial rate
        dt = 0.025 * (h / 0.2) ** 2
        msh = generate(DomainSpec(kind="unit_square_2x2"), target_h=h)
        n = msh.node_count
        bnodes = np.unique(msh.boundary_edges)
        bc_u = fc.DirichletBC(
            dofs=np.concatenate([2 * bnodes, 2 * bnodes + 1]),
            values=np.zeros(2 * len(bnodes)))
        bc_th = fc.DirichletBC(dofs=bnodes, values=np.zeros(len(bnodes)))
        no_damage = np.zeros(n)
        u = case.u(msh.nodes, 0.0).ravel()
        th = case.theta(msh.nodes, 0.0)
        steps = round(case.t_end / dt)
        for k in range(1, steps + 1):
            t = k * dt
            f = case.body_force(msh.nodes, t).ravel()
            u_new = fc.solve(fc.assemble_elasticity(msh, no_damage, th,
                                                    case.mat, bc_u,
                                                    body_force=f),
                             tol=1e-12, x0=u)
            g = case.heat_source(msh.nodes, t)
            th = fc.solve(fc.assemble_heat(msh, no_damage, th, u_new, u, dt,
                                           case.mat, bc_th, source=g),
                          tol=1e-12, x0=th)
            u = u_new
        sols[h] = (msh, u, th)

    # successive-refinement differences measured at the shared nodes
    d_u, d_th = [], []
    for hc, hf in zip(hs[:-1], hs[1:]):
        coarse_mesh, uc, thc = sols[hc]
        fine_mesh, uf, thf = sols[hf]
        idx = _restrict(fine_mesh, coarse_mesh.nodes)
        mass = fc.scalar_mass(coarse_mesh, 1.0)
        du = uc.reshape(-1, 2) - uf.reshape(-1, 2)[idx]
        dth = thc - thf[idx]
        d_u.append(math.sqrt(du[:, 0] @ (mass @ du[:, 0])
                             + du[:, 1] @ (mass @ du[:, 1])))
        d_th.append(math.sqrt(dth @ (mass @ dth)))
    order_u = math.log(d_u[0] / d_u[1]) / math.log(2.0)
    order_th = math.log(d_th[0] / d_th[1]) / math.log(2.0)

    stiff = fc.scalar_stiffness(_unit_triangle(), 1.0).toarray()
    stiff_ref = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0],
                          [-0.5, 0.0, 0.5]])
    stiff_err = float(np.abs(stiff - stiff_ref).max())

    mat = MaterialParams.from_engineering(E_Y=1.0, nu_P=0.3, a_L=0.7,
                                          gamma_star=5.08, eps=0.01,
                                          alpha=1e-3)
    msh = generate(DomainSpec(kind="unit_square_2x2"), target_h=0.25)
    n = msh.node_count
    relax = fc.solve(fc.assemble_damage(msh, np.full(n, 0.3), np.zeros(n),
                                        1e-2, mat), tol=1e-13)
    drive = fc.solve(fc.assemble_damage(msh, np.zeros(n), np.full(n, 3.5),
                                        1e-2, mat), tol=1e-13)
    relax_err = float(np.abs(relax / (3.0 / 50810.0) - 1.0).max())
    drive_err = float(np.abs(drive / (35.0 / 5116.0) - 1.0).max())

    ok = (order_u >= 1.9 and order_th >= 1.9 and stiff_err <= 1e-10
          and relax_err <= 1e-10 and drive_err <= 1e-10)
    criterion(11, ok,
              f"self-convergence orders u {order_u:.2f}, theta {order_th:.2f}; "
              f"oracle errors {stiff_err:.1e}, {relax_err:.1e}, {drive_err:.1e}")


@pytest.mark.slow
def test_crack_path_thermal_response(criterion):
    # curved growth needs tip resolution finer than the regularization
    # width: on coarser lattices the per-node depinning threshold exceeds
    # the thermal asymmetry of the tip field and every path runs straight.
    # A full-strip fine mesh is unaffordable on one core, so refinement
    # follows the crack; boxes are symmetric in x2 to leave the deflection
    # direction to the physics.
    wing = ((-1.0, -0.15, -0.05, 0.05), (-0.35, 0.55, -0.36, 0.36))
    tips = ((-0.45, 0.45, -0.05, 0.05),
            (0.38, 0.72, -0.22, 0.22), (-0.72, -0.38, -0.22, 0.22))

    deviation = {}
    for model in ("tfpfm1", "tfpfm2"):
        for theta_d in (0.0, 5.0, 10.0):
            cfg = replace(
                sc.builtin("mode1_path").variant(
                    model=model, theta_d=theta_d, resolution="fine"),
                grading_boxes=wing)
            state = sp.run(cfg).state
            deviation[(model, theta_d)] = sc.crack_path_extractor(state).deviation

    # the band's rounded caps make growth here a blunt-notch initiation
    # problem; the load must ramp to ~2 before the cap shoulder
    # localizes, so this scenario runs well past its nominal final time
    kinks = []
    for theta_d in (0.0, 3.0, 6.0):
        cfg = replace(
            sc.builtin("mode12_path").variant(
                theta_d=theta_d, resolution="fine", t_end=2.5),
            grading_boxes=tips)
        kinks.append(sc.crack_path_extractor(sp.run(cfg).state).kink_angle)

    mode1_ok = all(deviation[(m, 0.0)] < deviation[(m, 5.0)] < deviation[(m, 10.0)]
                   for m in ("tfpfm1", "tfpfm2"))
    cross_ok = deviation[("tfpfm2", 10.0)] >= deviation[("tfpfm1", 10.0)]
    kink_ok = kinks[0] < kinks[1] < kinks[2]
    detail = ("deviation " + "; ".join(
        f"{m}: " + " < ".join(f"{deviation[(m, t)]:.3f}" for t in (0.0, 5.0, 10.0))
        for m in ("tfpfm1", "tfpfm2"))
        + "; kink " + " < ".join(f"{k:.3f}" for k in kinks))
    criterion(12, mode1_ok and cross_ok and kink_ok, detail)


def test_damage_stays_irreversible_and_bounded(criterion):
    # session-wide bookkeeping: reads the audit accumulated over every run
    # above, so this test must stay last in the file
    audit = sp.step_audit()
    if audit.damage_steps == 0:
        cfg = sc.builtin("straight_crack").variant(t_end=0.003)
        sp.run(cfg)
        audit = sp.step_audit()
    ok = (audit.damage_steps > 0 and audit.min_increment >= 0.0
          and audit.min_z >= -1e-12 and audit.max_z <= 1.0 + 1e-12)
    criterion(6, ok,
              f"{audit.damage_steps} damage steps, min increment "
              f"{audit.min_increment:.1e}, z in [{audit.min_z:.2e}, "
              f"{audit.max_z:.6f}]")
