"""Closed-form Mode I crack-tip fields and manufactured coupled solutions.

The tip fields serve as verification oracles for the cracked-domain runs;
the manufactured cases drive the convergence tests.  Everything here is a
pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .physics import MaterialParams


@dataclass(frozen=True)
class ModeIField:
    """Plane-strain Mode I tip field parameters.

    The crack occupies the ray theta = +-pi from the tip; the Kolosov
    constant is locked to 3 - 4*nu at construction.
    """

    K_I: float
    mu: float
    xi: float
    v0: float = 0.0
    tip: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if not 1.0 < self.xi < 3.0:
            raise ValueError(f"Kolosov constant out of (1, 3): {self.xi}")
        if self.v0 < 0.0:
            raise ValueError("crack speed must be nonnegative")

    @classmethod
    def from_engineering(
        cls,
        K_I: float,
        E_Y: float,
        nu_P: float,
        v0: float = 0.0,
        tip: tuple[float, float] = (0.0, 0.0),
    ) -> "ModeIField":
        if not 0.0 < nu_P < 0.5:
            raise ValueError("plane strain needs nu_P in (0, 1/2)")
        return cls(K_I=K_I, mu=E_Y / (2.0 * (1.0 + nu_P)),
                   xi=3.0 - 4.0 * nu_P, v0=v0, tip=tip)


def _check_r(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("tip-field radius must be positive")
    return r


def polar_from_xy(params: ModeIField, x) -> tuple[np.ndarray, np.ndarray]:
    """Tip-centered polar coordinates, theta in (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    dx = x[..., 0] - params.tip[0]
    dy = x[..., 1] - params.tip[1]
    r = np.hypot(dx, dy)
    theta = np.arctan2(dy, dx)
    # arctan2 maps the negative axis to +pi already; fold -pi if it appears
    theta = np.where(theta <= -math.pi, math.pi, theta)
    return r, theta


def displacement(r, theta, params: ModeIField) -> tuple[np.ndarray, np.ndarray]:
    """Near-tip displacement (u1, u2)."""
    r = _check_r(r)
    theta = np.asarray(theta, dtype=float)
    amp = (params.K_I / (2.0 * params.mu)) * np.sqrt(r / (2.0 * math.pi))
    half = 0.5 * theta
    u1 = amp * np.cos(half) * (params.xi - 1.0 + 2.0 * np.sin(half) ** 2)
    u2 = amp * np.sin(half) * (params.xi + 1.0 - 2.0 * np.cos(half) ** 2)
    return u1, u2


def div_u(r, theta, params: ModeIField) -> np.ndarray:
    """Dilatation of the near-tip field."""
    r = _check_r(r)
    theta = np.asarray(theta, dtype=float)
    return (params.K_I * (params.xi - 1.0)
            / (2.0 * params.mu * np.sqrt(2.0 * math.pi * r))
            * np.cos(0.5 * theta))


def ddt_div_u(r, theta, params: ModeIField) -> np.ndarray:
    """Rate of the dilatation under steady tip motion at speed v0.

    Equals -v0 * d(div u)/dx1; changes sign where cos(3*theta/2) does,
    at theta = +-pi/3.
    """
    r = _check_r(r)
    theta = np.asarray(theta, dtype=float)
    return (params.v0 * params.K_I * (params.xi - 1.0)
            / (4.0 * params.mu * np.sqrt(2.0 * math.pi * r ** 3))
            * np.cos(1.5 * theta))


# ---- manufactured solutions ------------------------------------------------

Field2 = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact fields plus the sources that make them solve the coupled system.

    All callables take (points, t) with points of shape (n, 2); vector
    fields return (n, 2).  Boundary values come from the exact fields, which
    vanish on the boundary of the (-1, 1) square for every registered case.
    """

    name: str
    mat: MaterialParams
    u: Field2
    theta: Field2
    body_force: Field2
    heat_source: Field2
    t_end: float


def _case_material() -> MaterialParams:
    return MaterialParams.from_engineering(
        E_Y=1.0, nu_P=0.3, a_L=0.7,
        kappa0=1.0, chi=1.0, Theta0=0.0, delta=0.4,
        gamma_star=1.0, eps=0.1, alpha=1.0e-3,
    )


def _elastic_patch() -> ManufacturedCase:
    mat = _case_material().with_updates(delta=0.0)
    two = 2.0 * mat.lam + 4.0 * mat.mu

    def u(p, t):
        return np.stack([p[:, 0] ** 2, p[:, 1] ** 2], axis=1)

    def zero(p, t):
        return np.zeros(len(p))

    def f(p, t):
        return np.full((len(p), 2), -two)

    return ManufacturedCase(name="elastic_patch", mat=mat, u=u, theta=zero,
                            body_force=f, heat_source=zero, t_end=0.1)


def _heat_trig() -> ManufacturedCase:
    mat = _case_material().with_updates(delta=0.0)

    def theta(p, t):
        return math.exp(-t) * np.cos(0.5 * math.pi * p[:, 0]) * np.cos(0.5 * math.pi * p[:, 1])

    def g(p, t):
        return (0.5 * math.pi ** 2 - 1.0) * theta(p, t)

    def zero_v(p, t):
        return np.zeros((len(p), 2))

    def zero(p, t):
        return np.zeros(len(p))

    return ManufacturedCase(name="heat_trig", mat=mat, u=zero_v, theta=theta,
                            body_force=zero_v, heat_source=g, t_end=0.5)


def _biot_trig() -> ManufacturedCase:
    mat = _case_material()
    lam, mu, beta, delta = mat.lam, mat.mu, mat.beta, mat.delta
    pi = math.pi

    def u(p, t):
        s = math.exp(-t) * np.sin(pi * p[:, 0]) * np.sin(pi * p[:, 1])
        return np.stack([s, s], axis=1)

    def theta(p, t):
        return math.exp(-t) * np.cos(0.5 * pi * p[:, 0]) * np.cos(0.5 * pi * p[:, 1])

    def body_force(p, t):
        s1, c1 = np.sin(pi * p[:, 0]), np.cos(pi * p[:, 0])
        s2, c2 = np.sin(pi * p[:, 1]), np.cos(pi * p[:, 1])
        div_sigma = math.exp(-t) * pi ** 2 * (
            (lam + mu) * c1 * c2 - (lam + 3.0 * mu) * s1 * s2)
        gh1 = np.sin(0.5 * pi * p[:, 0]) * np.cos(0.5 * pi * p[:, 1])
        gh2 = np.cos(0.5 * pi * p[:, 0]) * np.sin(0.5 * pi * p[:, 1])
        grad_theta = -0.5 * pi * math.exp(-t) * np.stack([gh1, gh2], axis=1)
        return np.stack([-div_sigma, -div_sigma], axis=1) + beta * grad_theta

    def heat_source(p, t):
        s1, c1 = np.sin(pi * p[:, 0]), np.cos(pi * p[:, 0])
        s2, c2 = np.sin(pi * p[:, 1]), np.cos(pi * p[:, 1])
        th = theta(p, t)
        ddt_divu = -math.exp(-t) * pi * (c1 * s2 + s1 * c2)
        return -mat.chi * th + 0.5 * pi ** 2 * mat.kappa0 * th + delta * ddt_divu

    return ManufacturedCase(name="biot_trig", mat=mat, u=u, theta=theta,
                            body_force=body_force, heat_source=heat_source,
                            t_end=0.25)


_CASES: dict[str, Callable[[], ManufacturedCase]] = {
    "elastic_patch": _elastic_patch,
    "heat_trig": _heat_trig,
    "biot_trig": _biot_trig,
}


def manufactured_solution(case_id: str) -> ManufacturedCase:
    if case_id not in _CASES:
        raise ValueError(f"unknown case {case_id!r}; known: {sorted(_CASES)}")
    return _CASES[case_id]()
