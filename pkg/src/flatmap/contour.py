"""Contour integrals of exp(f) along segments and polylines.

Straight segments from a basepoint are all the path machinery a star-shaped
domain needs: the integrand exp(f) is analytic, so the integral only depends
on endpoints, and the tests pin that down as a property.  The adaptive rule
is an embedded Gauss-Legendre 7/15 pair with deterministic left-before-right
bisection; the inner loop lives in the kernel backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import kernels
from .expr import DivisionByZeroError, ExprTree, NonFiniteError, Exp
from .kernels import PanelLimitError, TapeEvalError, compile_tape
from .kernels.nodes import GL7_NODES, GL7_WEIGHTS, GL15_NODES, GL15_WEIGHTS

__all__ = [
    "Disc",
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "QuadratureError",
    "RealQuadratureError",
    "integrate_exp_f",
    "integrate_along_polyline",
    "integrate_real",
]


@dataclass(frozen=True)
class Disc:
    """Open disc |z - center| < radius; star-shaped about its center."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")

    def contains(self, z: complex, slack: float = 1e-12) -> bool:
        return abs(z - self.center) <= self.radius * (1.0 + slack)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 2 ** 16

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


class QuadratureError(Exception):
    """Tolerance not reached; carries the best estimate and its error bound."""

    def __init__(self, estimate: complex, error_bound: float, panels: int):
        self.estimate = estimate
        self.error_bound = error_bound
        self.panels = panels
        super().__init__(
            f"quadrature tolerance not reached after {panels} panels; "
            f"best estimate {estimate} with error bound {error_bound:.3e}")


def _translate(exc: TapeEvalError, f: ExprTree, tape) -> Exception:
    if exc.slot < 0:
        # the exp(...) wrapping the integrand, not a node of f itself
        node: ExprTree = Exp(f)
    else:
        node = tape.node_at(exc.slot)
    if exc.kind == kernels.ERR_DIV_ZERO:
        return DivisionByZeroError(node)
    return NonFiniteError(node)


def integrate_exp_f(f: ExprTree, start: complex, end: complex,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """∫ exp(f(ξ)) dξ over the straight segment from start to end.

    Deterministic for a fixed config; the estimated error is kept below
    max(abs_tol, rel_tol * |result|).
    """
    tape = compile_tape(f)
    try:
        value, _, _ = kernels.integrate_segment_exp(
            tape, complex(start), complex(end),
            cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    except TapeEvalError as exc:
        raise _translate(exc, f, tape) from None
    except PanelLimitError as exc:
        raise QuadratureError(exc.estimate, exc.error_bound, exc.panels) from None
    return value


def integrate_along_polyline(f: ExprTree, vertices: list[complex],
                             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Sum of segment integrals of exp(f) along consecutive vertices."""
    if len(vertices) == 0:
        raise ValueError("polyline needs at least one vertex")
    total = 0j
    for a, b in zip(vertices, vertices[1:]):
        total += integrate_exp_f(f, a, b, cfg)
    return total


# ---------------------------------------------------------------------------
# Real-valued adaptive quadrature on the same embedded GL7/15 pair.  Used by
# the product-metric arclength integrals; kept here so there is exactly one
# quadrature scheme in the package.
# ---------------------------------------------------------------------------

class RealQuadratureError(Exception):
    def __init__(self, estimate: float, error_bound: float, panels: int):
        self.estimate = estimate
        self.error_bound = error_bound
        self.panels = panels
        super().__init__(
            f"real quadrature tolerance not reached after {panels} panels")


def integrate_real(func: Callable[[float], float], a: float, b: float,
                   cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Adaptive ∫_a^b func(x) dx for a smooth real integrand on finite [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_real requires finite endpoints")
    d = b - a
    if d == 0:
        return 0.0
    abs_d = abs(d)

    def panel(lo: float, hi: float) -> tuple[float, float]:
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        s15 = 0.0
        for x, w in zip(GL15_NODES, GL15_WEIGHTS):
            v = func(a + (c + h * x) * d)
            if not math.isfinite(v):
                raise ValueError("integrand returned a non-finite value")
            s15 += w * v
        s7 = 0.0
        for x, w in zip(GL7_NODES, GL7_WEIGHTS):
            v = func(a + (c + h * x) * d)
            if not math.isfinite(v):
                raise ValueError("integrand returned a non-finite value")
            s7 += w * v
        return h * s15, h * s7

    total = 0.0
    err_sum = 0.0
    panels = 0
    tol = None
    exhausted = False
    stack = [(0.0, 1.0)]
    while stack:
        lo, hi = stack.pop()
        i15, i7 = panel(lo, hi)
        panels += 1
        if tol is None:
            tol = max(cfg.abs_tol, cfg.rel_tol * abs(i15) * abs_d)
        err = abs(i15 - i7) * abs_d
        if err <= tol * (hi - lo) or exhausted:
            total += i15
            err_sum += err
        elif panels >= cfg.max_subdivisions:
            exhausted = True
            total += i15
            err_sum += err
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi))
            stack.append((lo, mid))
    if exhausted:
        raise RealQuadratureError(d * total, err_sum, panels)
    return d * total