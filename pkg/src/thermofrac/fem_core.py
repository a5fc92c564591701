"""P1 finite-element kernels shared by every solver step.

All bilinear forms are integrated with the three-point edge-midpoint rule,
which is exact for quadratic integrands.  Energy evaluation elsewhere uses
the same rule, so discrete energy identities hold to rounding, not to
quadrature error.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .physics import MaterialParams

NodalField = np.ndarray

# Residual factor kept in every degradation function so degraded operators
# stay coercive after full damage.
ETA_RES = 1.0e-6

_NEG_TOL = 1.0e-12


class ConvergenceError(RuntimeError):
    """Iterative solve failed; carries the last relative residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def degrade_stiffness(z: np.ndarray) -> np.ndarray:
    return np.maximum((1.0 - z) ** 2, ETA_RES)


def degrade_conductivity(z: np.ndarray, exponent: int = 2) -> np.ndarray:
    return np.maximum((1.0 - z) ** exponent, ETA_RES)


# ---- constraints -----------------------------------------------------------

@dataclass(frozen=True)
class DirichletBC:
    """Pinned degrees of freedom with their prescribed values.

    Indices refer to scalar dofs of the target system: node index for a
    scalar field, 2*node + component for displacement.
    """

    dofs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dofs = np.asarray(self.dofs, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if dofs.shape != values.shape:
            raise ValueError("dofs and values must have matching length")
        order = np.argsort(dofs, kind="stable")
        dofs, values = dofs[order], values[order]
        if len(dofs) > 1:
            dup = dofs[1:] == dofs[:-1]
            if np.any(dup & (values[1:] != values[:-1])):
                bad = dofs[1:][dup & (values[1:] != values[:-1])][0]
                raise ValueError(f"conflicting values prescribed at dof {bad}")
            keep = np.concatenate(([True], ~dup))
            dofs, values = dofs[keep], values[keep]
        object.__setattr__(self, "dofs", dofs)
        object.__setattr__(self, "values", values)
        self.dofs.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.dofs)


def merge_bcs(*bcs: DirichletBC) -> DirichletBC:
    return DirichletBC(
        dofs=np.concatenate([b.dofs for b in bcs]) if bcs else np.empty(0, np.int64),
        values=np.concatenate([b.values for b in bcs]) if bcs else np.empty(0),
    )


@dataclass(frozen=True)
class LinearSystem:
    """Symmetric positive definite system, constraints already eliminated.

    Pinned rows are replaced by identity with the prescribed value on the
    right-hand side, so the solution vector spans all dofs.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    fixed_dofs: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    fixed_values: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def ndof(self) -> int:
        return self.matrix.shape[0]


# ---- quadrature building blocks -------------------------------------------

def _nthreads() -> int:
    raw = os.environ.get("THERMOFRAC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _chunks(n: int, parts: int):
    if parts <= 1 or n < 4 * parts:
        yield slice(0, n)
        return
    step = -(-n // parts)
    for lo in range(0, n, step):
        yield slice(lo, min(lo + step, n))


def _map_chunks(fn, n: int):
    """Apply fn to triangle slices, concatenating results in slice order."""
    parts = _nthreads()
    slices = list(_chunks(n, parts))
    if len(slices) == 1:
        return [fn(slices[0])]
    with ThreadPoolExecutor(max_workers=parts) as pool:
        return list(pool.map(fn, slices))


def midpoint_values(msh: Mesh, nodal: np.ndarray) -> np.ndarray:
    """P1 field at the three edge midpoints, shape (M, 3).

    Column q holds the value at the midpoint of the edge opposite local
    vertex q, i.e. the point where phi_q vanishes.
    """
    v = nodal[msh.tris]
    out = np.empty_like(v)
    for q in range(3):
        out[:, q] = 0.5 * (v[:, (q + 1) % 3] + v[:, (q + 2) % 3])
    return out


def element_integrals(msh: Mesh, coeff: np.ndarray | float) -> np.ndarray:
    """Per-triangle integral of a P1 (or constant) coefficient."""
    if np.isscalar(coeff):
        return msh.areas * float(coeff)
    return (msh.areas / 3.0) * midpoint_values(msh, np.asarray(coeff)).sum(axis=1)


def degraded_element_integrals(msh: Mesh, z: np.ndarray, exponent: int = 2) -> np.ndarray:
    """Per-triangle integral of the degradation factor.

    The factor is evaluated at the midpoint values of z (not interpolated
    from nodal factors); energy evaluation must use the same convention so
    the audit residuals close at rounding level.
    """
    deg = np.maximum((1.0 - midpoint_values(msh, z)) ** exponent, ETA_RES)
    return (msh.areas / 3.0) * deg.sum(axis=1)


def scalar_stiffness(
    msh: Mesh,
    coeff: np.ndarray | float = 1.0,
    *,
    element_weights: np.ndarray | None = None,
) -> sp.csr_matrix:
    """Assemble (coeff grad v, grad w) with coeff integrated per triangle.

    element_weights, when given, supplies the per-triangle coefficient
    integrals directly and coeff is ignored.
    """
    b, c = msh.grads
    w = element_integrals(msh, coeff) if element_weights is None else element_weights
    n = msh.node_count

    def build(s: slice):
        ke = np.einsum("t,tiq,tjq->tij", w[s],
                       np.stack([b[s], c[s]], axis=-1),
                       np.stack([b[s], c[s]], axis=-1))
        tri = msh.tris[s]
        rows = np.repeat(tri, 3, axis=1).ravel()
        cols = np.tile(tri, (1, 3)).ravel()
        return rows, cols, ke.ravel()

    parts = _map_chunks(build, msh.tri_count)
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def scalar_mass(msh: Mesh, coeff: np.ndarray | float) -> sp.csr_matrix:
    """Assemble (coeff v, w) under the midpoint rule.

    For P1 coeff the local matrix is (A/12) * [[m1+m2, m2, m1],
    [m2, m0+m2, m0], [m1, m0, m0+m1]] scaled by 4/..., written out
    directly below with m_q the coefficient value at midpoint q.
    """
    if np.isscalar(coeff):
        mid = np.full((msh.tri_count, 3), float(coeff))
    else:
        mid = midpoint_values(msh, np.asarray(coeff))
    a3 = msh.areas / 3.0
    n = msh.node_count

    def build(s: slice):
        ke = np.empty((s.stop - s.start, 3, 3))
        m = mid[s]
        f = a3[s]
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            ke[:, i, i] = f * (m[:, j] + m[:, k]) * 0.25
            ke[:, i, j] = f * m[:, k] * 0.25
            ke[:, j, i] = ke[:, i, j]
        tri = msh.tris[s]
        rows = np.repeat(tri, 3, axis=1).ravel()
        cols = np.tile(tri, (1, 3)).ravel()
        return rows, cols, ke.ravel()

    parts = _map_chunks(build, msh.tri_count)
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


# ---- field post-processing -------------------------------------------------

def strains(msh: Mesh, u: NodalField) -> np.ndarray:
    """Per-triangle symmetric gradient of a displacement field, (M, 2, 2)."""
    b, c = msh.grads
    ue = u.reshape(-1, 2)[msh.tris]
    ux, uy = ue[..., 0], ue[..., 1]
    e11 = np.einsum("ti,ti->t", b, ux)
    e22 = np.einsum("ti,ti->t", c, uy)
    e12 = 0.5 * (np.einsum("ti,ti->t", c, ux) + np.einsum("ti,ti->t", b, uy))
    out = np.empty((msh.tri_count, 2, 2))
    out[:, 0, 0] = e11
    out[:, 1, 1] = e22
    out[:, 0, 1] = out[:, 1, 0] = e12
    return out


def divergence(msh: Mesh, u: NodalField) -> np.ndarray:
    """Per-triangle div(u)."""
    b, c = msh.grads
    ue = u.reshape(-1, 2)[msh.tris]
    return np.einsum("ti,ti->t", b, ue[..., 0]) + np.einsum("ti,ti->t", c, ue[..., 1])


def cellwise_to_nodal(msh: Mesh, cell_values: np.ndarray) -> NodalField:
    """Area-weighted average of a per-triangle field onto nodes."""
    num = np.zeros(msh.node_count)
    den = np.zeros(msh.node_count)
    wa = msh.areas
    for i in range(3):
        np.add.at(num, msh.tris[:, i], wa * cell_values)
        np.add.at(den, msh.tris[:, i], wa)
    return num / den


# ---- constraint elimination ------------------------------------------------

def _eliminate(matrix: sp.csr_matrix, rhs: np.ndarray, bc: DirichletBC | None) -> LinearSystem:
    if bc is None or bc.size == 0:
        return LinearSystem(matrix=matrix, rhs=rhs)
    n = matrix.shape[0]
    fixed = np.zeros(n, dtype=bool)
    fixed[bc.dofs] = True
    g = np.zeros(n)
    g[bc.dofs] = bc.values

    coo = matrix.tocoo()
    row_free = ~fixed[coo.row]
    col_fixed = fixed[coo.col]
    # move known-column terms to the rhs before dropping them
    carry = row_free & col_fixed
    out = rhs.copy()
    np.subtract.at(out, coo.row[carry], coo.data[carry] * g[coo.col[carry]])
    keep = row_free & ~col_fixed
    reduced = sp.coo_matrix(
        (np.concatenate([coo.data[keep], np.ones(bc.size)]),
         (np.concatenate([coo.row[keep], bc.dofs]),
          np.concatenate([coo.col[keep], bc.dofs]))),
        shape=(n, n),
    ).tocsr()
    out[bc.dofs] = bc.values
    return LinearSystem(matrix=reduced, rhs=out,
                        fixed_dofs=bc.dofs, fixed_values=bc.values)


# ---- operator assembly -----------------------------------------------------

def assemble_elasticity(
    msh: Mesh,
    z_prev: NodalField,
    theta_prev: NodalField,
    mat: MaterialParams,
    bc: DirichletBC,
    body_force: NodalField | None = None,
) -> LinearSystem:
    """Degraded linear elasticity with thermal expansion load.

    Solves for the displacement that balances deg(z_prev)-weighted stress
    against the deg(z_prev)*beta*(theta_prev - Theta0) pressure.  The
    problem has rigid-body modes, so at least one dof must be pinned.
    """
    if bc is None or bc.size == 0:
        raise ValueError("elasticity requires at least one pinned dof")
    deg_mid = np.maximum((1.0 - midpoint_values(msh, z_prev)) ** 2, ETA_RES)
    w = (msh.areas / 3.0) * deg_mid.sum(axis=1)
    b, c = msh.grads
    lam, mu = mat.lam, mat.mu
    dmat = np.array([
        [lam + 2.0 * mu, lam, 0.0],
        [lam, lam + 2.0 * mu, 0.0],
        [0.0, 0.0, mu],
    ])
    n2 = 2 * msh.node_count

    def build(s: slice):
        m = s.stop - s.start
        bmat = np.zeros((m, 3, 6))
        for i in range(3):
            bmat[:, 0, 2 * i] = b[s, i]
            bmat[:, 1, 2 * i + 1] = c[s, i]
            bmat[:, 2, 2 * i] = c[s, i]
            bmat[:, 2, 2 * i + 1] = b[s, i]
        ke = np.einsum("t,tai,ab,tbj->tij", w[s], bmat, dmat, bmat)
        dofs = np.empty((m, 6), dtype=np.int64)
        dofs[:, 0::2] = 2 * msh.tris[s]
        dofs[:, 1::2] = 2 * msh.tris[s] + 1
        rows = np.repeat(dofs, 6, axis=1).ravel()
        cols = np.tile(dofs, (1, 6)).ravel()
        return rows, cols, ke.ravel()

    parts = _map_chunks(build, msh.tri_count)
    matrix = sp.coo_matrix(
        (np.concatenate([p[2] for p in parts]),
         (np.concatenate([p[0] for p in parts]),
          np.concatenate([p[1] for p in parts]))),
        shape=(n2, n2),
    ).tocsr()

    rhs = np.zeros(n2)
    if mat.beta != 0.0:
        theta_mid = midpoint_values(msh, theta_prev) - mat.Theta0
        load = mat.beta * (msh.areas / 3.0) * (deg_mid * theta_mid).sum(axis=1)
        np.add.at(rhs, 2 * msh.tris.ravel(), (load[:, None] * b).ravel())
        np.add.at(rhs, 2 * msh.tris.ravel() + 1, (load[:, None] * c).ravel())
    if body_force is not None:
        mass = scalar_mass(msh, 1.0)
        f = body_force.reshape(-1, 2)
        rhs[0::2] += mass @ f[:, 0]
        rhs[1::2] += mass @ f[:, 1]
    return _eliminate(matrix, rhs, bc)


def assemble_heat(
    msh: Mesh,
    z_prev: NodalField,
    theta_prev: NodalField,
    u_new: NodalField,
    u_prev: NodalField,
    dt: float,
    mat: MaterialParams,
    bc: DirichletBC | None = None,
    source: NodalField | None = None,
) -> LinearSystem:
    """Backward-Euler heat step with degraded conduction and dilation drive.

    The unknown is the end-of-step temperature; the dilation rate enters
    through the displacement increment over the step.  bc=None means
    insulated everywhere.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    mass = scalar_mass(msh, 1.0)
    cond = mat.kappa0 * degraded_element_integrals(msh, z_prev, mat.cond_exponent)
    matrix = (mat.chi / dt) * mass + scalar_stiffness(msh, element_weights=cond)
    rhs = (mat.chi / dt) * (mass @ theta_prev)
    if mat.delta != 0.0:
        vdiv = (divergence(msh, u_new) - divergence(msh, u_prev)) / dt
        deg_mid = np.maximum((1.0 - midpoint_values(msh, z_prev)) ** mat.cond_exponent,
                             ETA_RES)
        # int_T deg * vdiv * phi_i: phi_i is 1/2 at the two midpoints off i
        load = -mat.delta * (msh.areas / 3.0) * vdiv
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            np.add.at(rhs, msh.tris[:, i],
                      load * 0.5 * (deg_mid[:, j] + deg_mid[:, k]))
    if source is not None:
        rhs += mass @ source
    return _eliminate(matrix.tocsr(), rhs, bc)


def assemble_damage(
    msh: Mesh,
    z_prev: NodalField,
    W_field: NodalField,
    dt: float,
    mat: MaterialParams,
) -> LinearSystem:
    """Semi-implicit phase-field step before clipping.

    The driving density must be nonnegative; it multiplies the unknown, so
    a negative value would break positive definiteness silently.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    wmin = float(np.min(W_field))
    if wmin < -_NEG_TOL * max(1.0, float(np.max(np.abs(W_field)))):
        raise ValueError(f"driving density must be nonnegative, min {wmin}")
    mass = scalar_mass(msh, 1.0)
    mass_w = scalar_mass(msh, np.maximum(W_field, 0.0))
    matrix = (
        (mat.alpha / dt + mat.gamma_star / mat.eps) * mass
        + mat.gamma_star * mat.eps * scalar_stiffness(msh, 1.0)
        + mass_w
    )
    rhs = (mat.alpha / dt) * (mass @ z_prev) + mass_w @ np.ones(msh.node_count)
    return _eliminate(matrix.tocsr(), rhs, None)


# ---- solver ----------------------------------------------------------------

def solve(
    system: LinearSystem,
    tol: float = 1.0e-10,
    x0: NodalField | None = None,
) -> NodalField:
    """Jacobi-preconditioned conjugate gradients with a true-residual stop.

    Zero right-hand side returns exactly zero.  A warm start that already
    meets the tolerance is returned unchanged, which keeps stationary
    states bitwise stationary across steps.
    """
    a = system.matrix
    b = system.rhs
    n = system.ndof
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros(n)
    x = np.zeros(n) if x0 is None else x0.astype(np.float64, copy=True).ravel()
    if system.fixed_dofs.size:
        x[system.fixed_dofs] = system.fixed_values
    r = b - a @ x
    if float(np.linalg.norm(r)) <= tol * bnorm:
        return x
    diag = a.diagonal()
    if np.any(diag <= 0.0):
        raise ValueError("system diagonal must be positive")
    inv_diag = 1.0 / diag
    p = inv_diag * r
    rz = float(r @ p)
    max_iter = 50 * n
    for it in range(max_iter):
        ap = a @ p
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        if float(np.linalg.norm(r)) <= tol * bnorm:
            # recurrence residual can drift; accept only the true one
            true_r = b - a @ x
            if float(np.linalg.norm(true_r)) <= tol * bnorm:
                return x
            r = true_r
        zvec = inv_diag * r
        rz_next = float(r @ zvec)
        beta = rz_next / rz
        rz = rz_next
        p = zvec + beta * p
    final = float(np.linalg.norm(b - a @ x)) / bnorm
    raise ConvergenceError(
        f"pcg failed to reach {tol:g} within {max_iter} iterations", final)
