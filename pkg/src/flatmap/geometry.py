"""Finite-difference verification of the construction's geometric claims.

Everything here is deliberately independent of the complex-analytic route:
Jacobians and Laplacians come from central-difference stencils applied to
black-box field evaluators, so agreement with the constructed quantities is
evidence, not tautology.  Residual sweeps reduce with max-abs over the grid
in a fixed order, keeping reports bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .construction import ConstructionResult

__all__ = [
    "Grid2D",
    "ResidualReport",
    "jacobian",
    "laplacian",
    "curvature_conformal",
    "laplace_beltrami_conformal",
    "pullback_residual",
    "verification_suite",
    "grid_for_domain",
    "DEFAULT_TOLERANCES",
    "REPORT_NAMES",
]

ScalarField = Callable[[float, float], float]
PlaneMap = Callable[[float, float], tuple[float, float]]


@dataclass(frozen=True)
class Grid2D:
    """Row-major rectangular sample grid: index iy * nx + ix."""

    origin: tuple[float, float]
    step: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid needs at least 3 points per axis")
        if not self.step > 0:
            raise ValueError("grid step must be positive")

    def points(self) -> Iterator[tuple[float, float]]:
        x0, y0 = self.origin
        for iy in range(self.ny):
            for ix in range(self.nx):
                yield (x0 + ix * self.step, y0 + iy * self.step)

    @classmethod
    def centered(cls, center: tuple[float, float], span: float,
                 nx: int = 21, ny: int = 21) -> "Grid2D":
        """Square-cell grid whose x-extent is span, centered at center."""
        step = span / (nx - 1)
        x0 = center[0] - span / 2.0
        y0 = center[1] - step * (ny - 1) / 2.0
        return cls((x0, y0), step, nx, ny)

    def meta(self) -> dict:
        return {"origin": [self.origin[0], self.origin[1]],
                "step": self.step, "nx": self.nx, "ny": self.ny}


@dataclass(frozen=True)
class ResidualReport:
    name: str
    max_abs_residual: float
    grid: Grid2D
    tolerance: float
    passed: bool

    @classmethod
    def from_sweep(cls, name: str, residuals, grid: Grid2D,
                   tolerance: float) -> "ResidualReport":
        worst = 0.0
        for r in residuals:
            a = float(abs(r))
            if a > worst:
                worst = a
        return cls(name, worst, grid, float(tolerance), worst <= tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name,
                "max_abs_residual": self.max_abs_residual,
                "tolerance": self.tolerance,
                "pass": self.passed,
                "grid": self.grid.meta()}


# ---------------------------------------------------------------------------
# Stencil operators
# ---------------------------------------------------------------------------

def jacobian(plane_map: PlaneMap, p: tuple[float, float], h: float) -> np.ndarray:
    """Central-difference 2x2 Jacobian at p, O(h^2)."""
    x, y = p
    uxp, vxp = plane_map(x + h, y)
    uxm, vxm = plane_map(x - h, y)
    uyp, vyp = plane_map(x, y + h)
    uym, vym = plane_map(x, y - h)
    inv2h = 1.0 / (2.0 * h)
    return np.array([[(uxp - uxm) * inv2h, (uyp - uym) * inv2h],
                     [(vxp - vxm) * inv2h, (vyp - vym) * inv2h]])


def laplacian(field: ScalarField, p: tuple[float, float], h: float) -> float:
    """Five-point discrete Laplacian at p, O(h^2)."""
    x, y = p
    return (field(x + h, y) + field(x - h, y) + field(x, y + h)
            + field(x, y - h) - 4.0 * field(x, y)) / (h * h)


def curvature_conformal(phi: ScalarField, K0: float, p: tuple[float, float],
                        h: float, exponent_sign: int = -1) -> float:
    """Curvature of the conformally scaled metric, e^(s*2φ) (-Δφ + K0).

    s = -1 is the classical convention (checked against the round sphere in
    stereographic coordinates); s = +1 is exposed because the two cannot be
    told apart on flat examples, where -Δφ + K0 vanishes identically.
    """
    if exponent_sign not in (-1, 1):
        raise ValueError("exponent_sign must be -1 or +1")
    factor = math.exp(exponent_sign * 2.0 * phi(p[0], p[1]))
    return factor * (-laplacian(phi, p, h) + K0)


def laplace_beltrami_conformal(u: ScalarField, phi: ScalarField,
                               p: tuple[float, float], h: float) -> float:
    """Laplace-Beltrami of u in the metric e^{2φ} g0: e^{-2φ} Δu in 2D.

    Vanishes wherever Δu does, for any smooth φ: in two dimensions a
    conformal change of metric does not alter which functions are harmonic.
    """
    return math.exp(-2.0 * phi(p[0], p[1])) * laplacian(u, p, h)


# ---------------------------------------------------------------------------
# Residual sweeps
# ---------------------------------------------------------------------------

def pullback_residual(result: ConstructionResult, phi: ScalarField,
                      grid: Grid2D, h: float,
                      tolerance: float = 1e-5) -> ResidualReport:
    """max over grid of ||J^T J - e^{2φ} I||_inf for the constructed W.

    Covers all three inner products at once: both diagonal entries must hit
    e^{2φ} and the off-diagonal must vanish.
    """
    def residuals():
        for p in grid.points():
            J = jacobian(result.w, p, h)
            M = J.T @ J
            target = math.exp(2.0 * phi(p[0], p[1]))
            yield max(abs(M[0, 0] - target), abs(M[1, 1] - target),
                      abs(M[0, 1]), abs(M[1, 0]))

    return ResidualReport.from_sweep("pullback", residuals(), grid, tolerance)


def grid_for_domain(result: ConstructionResult, nx: int = 21, ny: int = 21,
                    span: float | None = None, margin: float = 0.0) -> Grid2D:
    """Centered grid inscribed in the validated disc, minus a stencil margin.

    span is the x-extent; cells are square, so the y-extent scales by
    (ny-1)/(nx-1).  A requested span is clamped so the grid's half-diagonal
    stays just inside the shrunken disc.
    """
    r = result.domain.radius - margin
    if r <= 0:
        raise ValueError("stencil margin swallows the whole domain")
    aspect = (ny - 1) / (nx - 1)
    limit = 1.99 * r / math.hypot(1.0, aspect)  # half-diagonal at 0.995 r
    if span is None or span > limit:
        span = limit
    c = result.domain.center
    return Grid2D.centered((c.real, c.imag), span, nx, ny)


DEFAULT_TOLERANCES = {
    "lemma1_identity": 1e-8,
    "dual_route": 1e-10,
    "cr_residual": 1e-6,
    "pullback": 1e-5,
    "harmonicity_phi": 1e-5,
    "harmonicity_psi": 1e-5,
    "curvature_flat": 1e-5,
}

REPORT_NAMES = tuple(DEFAULT_TOLERANCES)


def verification_suite(result: ConstructionResult, grid: Grid2D,
                       fd_first_step: float, fd_second_step: float,
                       tolerances: dict[str, float] | None = None,
                       ) -> list[ResidualReport]:
    """All seven residual reports for one constructed isometry.

    fd_first_step feeds the Jacobian and Cauchy-Riemann stencils,
    fd_second_step the Laplacian-based ones (second differences amplify
    roundoff by 1/h^2, so they want a coarser step).  The grid must keep a
    margin of the larger step inside the validated disc.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    phi_f = result.conformal_exponent

    def lemma1():
        for x, y in grid.points():
            gp = result.g_prime(complex(x, y))
            yield result.phi(x, y) + math.log(abs(gp)) - phi_f(x, y)

    def dual_route():
        for x, y in grid.points():
            u = result.h(complex(x, y)) + result.C
            g = complex(result.phi(x, y), result.psi(x, y))
            m = math.exp(g.real)
            yield abs(complex(m * math.cos(g.imag), m * math.sin(g.imag)) - u)

    def cr():
        h = fd_first_step
        inv2h = 1.0 / (2.0 * h)
        for x, y in grid.points():
            gxp = result.g(complex(x + h, y))
            gxm = result.g(complex(x - h, y))
            gyp = result.g(complex(x, y + h))
            gym = result.g(complex(x, y - h))
            phi_x = (gxp.real - gxm.real) * inv2h
            phi_y = (gyp.real - gym.real) * inv2h
            psi_x = (gxp.imag - gxm.imag) * inv2h
            psi_y = (gyp.imag - gym.imag) * inv2h
            yield max(abs(phi_x - psi_y), abs(phi_y + psi_x))

    def harmonicity(field):
        for p in grid.points():
            yield laplacian(field, p, fd_second_step)

    def curvature():
        for p in grid.points():
            for sign in (-1, 1):
                yield curvature_conformal(phi_f, 0.0, p, fd_second_step, sign)

    reports = [
        ResidualReport.from_sweep("lemma1_identity", lemma1(), grid,
                                  tol["lemma1_identity"]),
        ResidualReport.from_sweep("dual_route", dual_route(), grid,
                                  tol["dual_route"]),
        ResidualReport.from_sweep("cr_residual", cr(), grid, tol["cr_residual"]),
        pullback_residual(result, phi_f, grid, fd_first_step, tol["pullback"]),
        ResidualReport.from_sweep("harmonicity_phi", harmonicity(result.phi),
                                  grid, tol["harmonicity_phi"]),
        ResidualReport.from_sweep("harmonicity_psi", harmonicity(result.psi),
                                  grid, tol["harmonicity_psi"]),
        ResidualReport.from_sweep("curvature_flat", curvature(), grid,
                                  tol["curvature_flat"]),
    ]
    assert [r.name for r in reports] == list(REPORT_NAMES)
    return reports
