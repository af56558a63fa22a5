"""Construction of the local isometry W from a conformal exponent Re(f).

Given analytic f, the pipeline is:

    h(z) = ∫_{z0}^{z} exp(f(ξ)) dξ        (straight segments, star-shaped)
    C    = 1 - h(z0)  (= 1)               (normalizes h(z0) + C = 1)
    V    = largest disc about z0 where |h + C - 1| <= 1/2 on sampled circles
    g    = log(h + C)                     (principal branch, g(z0) = 0)
    Φ    = Re g,  Ψ = Im g                (harmonic conjugates)
    W    = (e^Φ cos Ψ, e^Φ sin Ψ)

On V the values of h + C stay in the half-plane Re >= 1/2, so the principal
log is single-valued and nonvanishing; |h + C - 1| is subharmonic, hence its
maximum over a disc sits on the boundary circle and sampling circles is
enough.  Then Φ + log|g'| = Re f with g' = e^{f-g}, and W pulls the flat
metric back to e^{2 Re f} times the identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .contour import (
    DEFAULT_QUADRATURE,
    Disc,
    QuadratureConfig,
    QuadratureError,
    _translate,
)
from .expr import ExprTree, evaluate
from .kernels import (
    PanelLimitError,
    TapeEvalError,
    compile_tape,
    integrate_segment_exp,
)

__all__ = [
    "ConstructionConfig",
    "ConstructionResult",
    "DomainValidationError",
    "OutsideDomainError",
    "choose_constant",
    "validate_domain",
    "build_g",
    "solve_lemma1",
    "isometry_W",
]


class DomainValidationError(Exception):
    """No admissible disc radius found above the floor."""


class OutsideDomainError(Exception):
    """Evaluation requested outside the validated domain."""

    def __init__(self, z: complex, domain: Disc):
        self.z = z
        self.domain = domain
        super().__init__(
            f"point {z} lies outside the validated disc "
            f"|z - {domain.center}| < {domain.radius}")


@dataclass(frozen=True)
class ConstructionConfig:
    basepoint: complex = 0j
    initial_radius: float = 1.0
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE
    boundary_samples: int = 64

    def __post_init__(self):
        if not self.initial_radius > 0:
            raise ValueError("initial_radius must be positive")
        if self.boundary_samples < 16:
            raise ValueError("boundary_samples must be at least 16")


DEFAULT_CONFIG = ConstructionConfig()


class ConstructionResult:
    """The constant C, the validated disc, and evaluators for h, g, Φ, Ψ, W.

    Immutable; all evaluators are pure, so grid sweeps may fan out across
    threads freely.
    """

    def __init__(self, f: ExprTree, C: complex, domain: Disc,
                 quadrature: QuadratureConfig):
        self.f = f
        self.C = C
        self.domain = domain
        self.quadrature = quadrature
        self._tape = compile_tape(f)

    def h(self, z: complex) -> complex:
        """∫ exp(f) from the basepoint to z along the straight segment."""
        if not self.domain.contains(z):
            raise OutsideDomainError(z, self.domain)
        cfg = self.quadrature
        try:
            value, _, _ = integrate_segment_exp(
                self._tape, self.domain.center, complex(z),
                cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
        except TapeEvalError as exc:
            raise _translate(exc, self.f, self._tape) from None
        except PanelLimitError as exc:
            raise QuadratureError(exc.estimate, exc.error_bound, exc.panels) from None
        return value

    def g(self, z: complex) -> complex:
        """Principal-branch log(h + C); vanishes at the basepoint."""
        u = self.h(z) + self.C
        if u == 0:
            raise ArithmeticError("h + C vanished inside the validated domain")
        return cmath.log(u)

    def g_prime(self, z: complex) -> complex:
        """Exact derivative of g, as e^{f - g}."""
        return cmath.exp(evaluate(self.f, complex(z)) - self.g(z))

    def phi(self, x: float, y: float) -> float:
        return self.g(complex(x, y)).real

    def psi(self, x: float, y: float) -> float:
        return self.g(complex(x, y)).imag

    def w(self, x: float, y: float) -> tuple[float, float]:
        """The isometry (e^Φ cos Ψ, e^Φ sin Ψ)."""
        gz = self.g(complex(x, y))
        m = math.exp(gz.real)
        return (m * math.cos(gz.imag), m * math.sin(gz.imag))

    def w_direct(self, x: float, y: float) -> tuple[float, float]:
        """W through the other route, e^g = h + C; for cross-checking."""
        u = self.h(complex(x, y)) + self.C
        return (u.real, u.imag)

    def conformal_exponent(self, x: float, y: float) -> float:
        """Re f, the exponent of the target metric's conformal factor."""
        return evaluate(self.f, complex(x, y)).real


def choose_constant(f: ExprTree, cfg: ConstructionConfig = DEFAULT_CONFIG) -> complex:
    """C with h(z0) + C = 1.

    Segments measured from z0 give h(z0) = 0 and hence C = 1; computing
    1 - h(z0) keeps the normalization correct under any other convention.
    """
    q = cfg.quadrature
    tape = compile_tape(f)
    h0, _, _ = integrate_segment_exp(tape, cfg.basepoint, cfg.basepoint,
                                     q.rel_tol, q.abs_tol, q.max_subdivisions)
    return 1.0 - h0


def _circle_admissible(tape, C: complex, cfg: ConstructionConfig, r: float) -> bool:
    q = cfg.quadrature
    z0 = cfg.basepoint
    for k in range(cfg.boundary_samples):
        theta = 2.0 * math.pi * k / cfg.boundary_samples
        z = z0 + complex(r * math.cos(theta), r * math.sin(theta))
        try:
            h, _, _ = integrate_segment_exp(tape, z0, z, q.rel_tol, q.abs_tol,
                                            q.max_subdivisions)
        except (TapeEvalError, PanelLimitError):
            return False
        if abs(h + C - 1.0) > 0.5:
            return False
    return True


def validate_domain(f: ExprTree, C: complex,
                    cfg: ConstructionConfig = DEFAULT_CONFIG) -> Disc:
    """Largest disc radius (to 1% relative, by bisection) with |h+C-1| <= 1/2.

    The bound is checked at boundary_samples points of each tested circle;
    it keeps h + C in Re >= 1/2, where the principal log is single-valued.
    Raises DomainValidationError when even 1e-6 * initial_radius fails.
    """
    tape = compile_tape(f)
    if _circle_admissible(tape, C, cfg, cfg.initial_radius):
        return Disc(cfg.basepoint, cfg.initial_radius)
    floor = 1e-6 * cfg.initial_radius
    if not _circle_admissible(tape, C, cfg, floor):
        raise DomainValidationError(
            f"no admissible radius above {floor:.3e}; "
            "f grows too violently near the basepoint")
    lo, hi = floor, cfg.initial_radius
    while hi - lo > 0.01 * lo:
        mid = 0.5 * (lo + hi)
        if _circle_admissible(tape, C, cfg, mid):
            lo = mid
        else:
            hi = mid
    return Disc(cfg.basepoint, lo)


def build_g(f: ExprTree, C: complex, V: Disc, z: complex,
            quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Principal log(h(z) + C) for z in V; refuses points outside V."""
    result = ConstructionResult(f, C, V, quadrature)
    return result.g(z)


def solve_lemma1(f: ExprTree,
                 cfg: ConstructionConfig = DEFAULT_CONFIG) -> ConstructionResult:
    """Run the full construction: constant, validated domain, evaluators."""
    C = choose_constant(f, cfg)
    domain = validate_domain(f, C, cfg)
    return ConstructionResult(f, C, domain, cfg.quadrature)


def isometry_W(result: ConstructionResult, p: tuple[float, float]) -> tuple[float, float]:
    """W at p = (x, y); equals h + C viewed as a point of the plane."""
    return result.w(p[0], p[1])
