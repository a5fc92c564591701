"""Constitutive relations, energy densities, and the scaling machinery.

Everything here is a pure function of value types.  Strain and stress
tensors are numpy arrays of shape (..., 2, 2); all operations broadcast
over leading axes so per-triangle batches go through a single call.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

#: Relative tolerance for internal consistency checks of derived constants.
_REL_TOL = 1.0e-12

_LAME_CONVENTIONS = ("standard", "one_minus_nu")


def lame_from_engineering(E_Y: float, nu_P: float, convention: str = "standard") -> tuple[float, float]:
    """Convert Young's modulus and Poisson ratio to Lame constants.

    Parameters
    ----------
    E_Y, nu_P:
        Young's modulus (> 0) and Poisson ratio (-1 < nu_P < 1/2).
    convention:
        ``"standard"`` uses mu = E/(2(1+nu)).  ``"one_minus_nu"`` uses the
        alternative mu = E/(2(1-nu)) denominator for replication studies
        against sources that print that form; lambda is unchanged.

    Returns
    -------
    (lam, mu) tuple of floats.
    """
    if convention not in _LAME_CONVENTIONS:
        raise ValueError(f"unknown Lame convention {convention!r}")
    if E_Y <= 0.0:
        raise ValueError(f"Young's modulus must be positive, got {E_Y}")
    if not -1.0 < nu_P < 0.5:
        raise ValueError(f"Poisson ratio must lie in (-1, 1/2), got {nu_P}")
    lam = E_Y * nu_P / ((1.0 + nu_P) * (1.0 - 2.0 * nu_P))
    if convention == "standard":
        mu = E_Y / (2.0 * (1.0 + nu_P))
    else:
        mu = E_Y / (2.0 * (1.0 - nu_P))
    return lam, mu


@dataclass(frozen=True)
class MaterialParams:
    """Material constants of the coupled model, plus the PFM parameters.

    The stress thermal modulus is locked to ``beta = a_L*(d*lam + 2*mu)``;
    construction fails if the caller supplies an inconsistent value.  All
    fields are plain floats so instances serialize trivially.

    ``delta`` is the thermomechanical coupling coefficient appearing in the
    heat equation source ``-delta*deg(z)*div(du/dt)``.  For dimensional
    parameter sets it equals beta*Theta0; scaled sets carry it directly.
    """

    E_Y: float
    nu_P: float
    lam: float
    mu: float
    a_L: float
    beta: float
    kappa0: float
    chi: float
    Theta0: float
    delta: float
    gamma_star: float
    eps: float
    alpha: float
    d: int = 2
    cond_exponent: int = 2

    def __post_init__(self) -> None:
        if self.d != 2:
            raise ValueError("only the planar (d = 2) model is implemented")
        if self.cond_exponent not in (1, 2):
            raise ValueError("conductivity degradation exponent must be 1 or 2")
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.lam <= -2.0 * self.mu / self.d:
            raise ValueError(f"lam must exceed -2*mu/d, got {self.lam}")
        expected_beta = self.a_L * (self.d * self.lam + 2.0 * self.mu)
        scale = max(abs(expected_beta), abs(self.beta), 1.0)
        if abs(self.beta - expected_beta) > _REL_TOL * scale:
            raise ValueError(
                f"beta = {self.beta} inconsistent with a_L*(d*lam + 2*mu) = {expected_beta}"
            )
        if self.kappa0 <= 0.0 or self.chi <= 0.0:
            raise ValueError("kappa0 and chi must be positive")
        if self.Theta0 < 0.0:
            raise ValueError(f"Theta0 must be nonnegative, got {self.Theta0}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.gamma_star <= 0.0 or self.eps <= 0.0 or self.alpha <= 0.0:
            raise ValueError("gamma_star, eps, and alpha must be positive")

    @classmethod
    def from_engineering(
        cls,
        E_Y: float,
        nu_P: float,
        a_L: float,
        *,
        kappa0: float = 1.0,
        chi: float = 1.0,
        Theta0: float = 0.0,
        delta: float | None = None,
        gamma_star: float = 1.0,
        eps: float = 0.1,
        alpha: float = 1.0e-3,
        cond_exponent: int = 2,
        lame_convention: str = "standard",
    ) -> "MaterialParams":
        """Build a parameter set from engineering constants.

        Lame constants and beta are derived; remaining fields pass through.
        ``delta=None`` derives the dimensional coupling beta*Theta0 (zero
        for a zero reference temperature); scaled sets pass delta directly.
        """
        lam, mu = lame_from_engineering(E_Y, nu_P, lame_convention)
        beta = a_L * (2.0 * lam + 2.0 * mu)
        if delta is None:
            delta = beta * Theta0
        return cls(
            E_Y=E_Y, nu_P=nu_P, lam=lam, mu=mu, a_L=a_L, beta=beta,
            kappa0=kappa0, chi=chi, Theta0=Theta0, delta=delta,
            gamma_star=gamma_star, eps=eps, alpha=alpha,
            cond_exponent=cond_exponent,
        )

    def with_updates(self, **changes) -> "MaterialParams":
        """Return a copy with fields replaced (beta re-derived if needed).

        Changing any of ``a_L``, ``lam``, ``mu`` without an explicit
        ``beta`` recomputes it so the construction invariant keeps holding.
        """
        if {"a_L", "lam", "mu"} & changes.keys() and "beta" not in changes:
            a_L = changes.get("a_L", self.a_L)
            lam = changes.get("lam", self.lam)
            mu = changes.get("mu", self.mu)
            changes["beta"] = a_L * (self.d * lam + 2.0 * mu)
        return replace(self, **changes)


@dataclass(frozen=True)
class ScalingSet:
    """Characteristic scales of the nondimensionalization.

    The derived-scale identities (c_t from c_x, c_u from c_Theta) involve
    material constants, so they are validated inside `nondimensionalize`
    where a parameter set is at hand; here only positivity is enforced.
    """

    c_x: float
    c_t: float
    c_u: float
    c_e: float
    c_Theta: float

    def __post_init__(self) -> None:
        for name in ("c_x", "c_t", "c_u", "c_e", "c_Theta"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"scale {name} must be positive")

    @classmethod
    def consistent(cls, c_x: float, c_e: float, c_Theta: float, mat: MaterialParams) -> "ScalingSet":
        """Derive the time and displacement scales from the free scales."""
        if min(c_x, c_e, c_Theta) <= 0.0:
            raise ValueError("scales must be positive")
        c_t = c_x * c_x * mat.chi / mat.kappa0
        c_u = c_Theta * c_x * mat.beta / c_e
        return cls(c_x=c_x, c_t=c_t, c_u=c_u, c_e=c_e, c_Theta=c_Theta)


# ---- tensor algebra -------------------------------------------------------

_EYE2 = np.eye(2)


def stress(e: np.ndarray, mat: MaterialParams) -> np.ndarray:
    """Isotropic stress sigma = lam*tr(e)*I + 2*mu*e for (..., 2, 2) strains."""
    e = np.asarray(e, dtype=float)
    tr = e[..., 0, 0] + e[..., 1, 1]
    return mat.lam * tr[..., None, None] * _EYE2 + 2.0 * mat.mu * e


def thermal_strain(e: np.ndarray, theta: np.ndarray, mat: MaterialParams) -> np.ndarray:
    """Effective strain e* = e - a_L*(theta - Theta0)*I."""
    e = np.asarray(e, dtype=float)
    dtheta = np.asarray(theta, dtype=float) - mat.Theta0
    return e - mat.a_L * dtheta[..., None, None] * _EYE2


def thermal_stress(e: np.ndarray, theta: np.ndarray, mat: MaterialParams) -> np.ndarray:
    """Thermoelastic stress sigma* = sigma - beta*(theta - Theta0)*I."""
    dtheta = np.asarray(theta, dtype=float) - mat.Theta0
    return stress(e, mat) - mat.beta * dtheta[..., None, None] * _EYE2


def _contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Frobenius contraction a:b over the trailing (2, 2) axes."""
    return np.einsum("...ij,...ij->...", a, b)


def energy_density_W(e: np.ndarray, mat: MaterialParams) -> np.ndarray:
    """Elastic energy density W = sigma[e]:e (no 1/2 factor)."""
    return _contract(stress(e, mat), np.asarray(e, dtype=float))


def energy_density_Wstar(e: np.ndarray, theta: np.ndarray, mat: MaterialParams) -> np.ndarray:
    """Thermoelastic energy density W* = sigma*:e* (no 1/2 factor)."""
    return _contract(thermal_stress(e, theta, mat), thermal_strain(e, theta, mat))


# ---- nondimensionalization ------------------------------------------------

def _check_scaling(mat: MaterialParams, scaling: ScalingSet) -> None:
    c_t = scaling.c_x ** 2 * mat.chi / mat.kappa0
    c_u = scaling.c_Theta * scaling.c_x * mat.beta / scaling.c_e
    if abs(scaling.c_t - c_t) > _REL_TOL * max(abs(c_t), 1.0):
        raise ValueError(f"c_t = {scaling.c_t} inconsistent with c_x^2*chi/kappa0 = {c_t}")
    if abs(scaling.c_u - c_u) > _REL_TOL * max(abs(c_u), 1.0):
        raise ValueError(f"c_u = {scaling.c_u} inconsistent with c_Theta*c_x*beta/c_e = {c_u}")


def nondimensionalize(mat: MaterialParams, scaling: ScalingSet) -> MaterialParams:
    """Map a dimensional parameter set to its scaled counterpart.

    The returned set has unit conductivity and heat capacity, zero reference
    temperature, unit stress thermal modulus (up to rounding; the beta
    construction invariant is kept exact), and the coupling coefficient
    delta = Theta0*beta^2/(c_e*chi).

    Raises
    ------
    ValueError
        If any scale is nonpositive, the derived-scale identities fail, or
        the dimensional set has Theta0 <= 0 (the scaling divides by it
        conceptually: a zero reference gives a zero coupling range).
    """
    if mat.Theta0 <= 0.0:
        raise ValueError("dimensional parameter sets need Theta0 > 0 to scale")
    delta_dim = mat.beta * mat.Theta0
    if abs(mat.delta - delta_dim) > _REL_TOL * max(abs(delta_dim), 1.0):
        raise ValueError(
            f"dimensional coupling delta = {mat.delta} must equal beta*Theta0 = {delta_dim}"
        )
    _check_scaling(mat, scaling)
    lam = mat.lam / scaling.c_e
    mu = mat.mu / scaling.c_e
    a_L = scaling.c_x * scaling.c_Theta * mat.a_L / scaling.c_u
    beta = a_L * (mat.d * lam + 2.0 * mu)
    theta_stress = mat.beta * scaling.c_Theta    # stress per unit scaled temperature
    return MaterialParams(
        E_Y=mat.E_Y / scaling.c_e,
        nu_P=mat.nu_P,
        lam=lam,
        mu=mu,
        a_L=a_L,
        beta=beta,
        kappa0=1.0,
        chi=1.0,
        Theta0=0.0,
        delta=mat.Theta0 * mat.beta ** 2 / (scaling.c_e * mat.chi),
        gamma_star=scaling.c_e * mat.gamma_star / (scaling.c_x * theta_stress ** 2),
        eps=mat.eps / scaling.c_x,
        alpha=scaling.c_e * mat.alpha / (scaling.c_t * theta_stress ** 2),
        d=mat.d,
        cond_exponent=mat.cond_exponent,
    )


def redimensionalize(mat_nd: MaterialParams, scaling: ScalingSet, *, kappa0: float) -> MaterialParams:
    """Invert `nondimensionalize` given the dimensional conductivity.

    The scaling collapses (chi, kappa0) into the single time scale, so one
    of them must be supplied to reconstruct the pair.
    """
    if kappa0 <= 0.0:
        raise ValueError("kappa0 must be positive")
    lam = mat_nd.lam * scaling.c_e
    mu = mat_nd.mu * scaling.c_e
    a_L = mat_nd.a_L * scaling.c_u / (scaling.c_x * scaling.c_Theta)
    beta = a_L * (mat_nd.d * lam + 2.0 * mu)
    chi = scaling.c_t * kappa0 / scaling.c_x ** 2
    theta_stress = beta * scaling.c_Theta
    Theta0 = mat_nd.delta * scaling.c_e * chi / beta ** 2
    return MaterialParams(
        E_Y=mat_nd.E_Y * scaling.c_e,
        nu_P=mat_nd.nu_P,
        lam=lam,
        mu=mu,
        a_L=a_L,
        beta=beta,
        kappa0=kappa0,
        chi=chi,
        Theta0=Theta0,
        delta=beta * Theta0,
        gamma_star=mat_nd.gamma_star * scaling.c_x * theta_stress ** 2 / scaling.c_e,
        eps=mat_nd.eps * scaling.c_x,
        alpha=mat_nd.alpha * scaling.c_t * theta_stress ** 2 / scaling.c_e,
        d=mat_nd.d,
        cond_exponent=mat_nd.cond_exponent,
    )
