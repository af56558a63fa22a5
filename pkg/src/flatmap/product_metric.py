"""Arclength embedding of product metrics e^{2a(x)}dx² + e^{2b(y)}dy².

Each axis is reparameterized by arclength measured from 0:

    u(x) = ∫_0^x e^{a(t)} dt,    v(y) = ∫_0^y e^{b(t)} dt,

so (u, v) pulls the flat metric back to the product metric exactly, and the
image is the open axis-aligned rectangle whose side lengths are the total
arclengths of the two axes.  Infinite ranges go through a rational
compactification and share the adaptive rule with the contour integrals;
integrals that fail to settle are reported as unbounded sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .contour import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    RealQuadratureError,
    integrate_real,
)

__all__ = [
    "ProductMetricSpec",
    "embed_product",
    "image_side_lengths",
    "arclength_coordinate",
    "gaussian_spec",
    "zero_spec",
]

# divergent improper integrals stall the panel budget quickly at this cap
_SIDE_QUADRATURE = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14,
                                    max_subdivisions=4096)


@dataclass(frozen=True)
class ProductMetricSpec:
    a: Callable[[float], float]
    b: Callable[[float], float]
    x_range: tuple[float, float] = (-math.inf, math.inf)
    y_range: tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        for lo, hi in (self.x_range, self.y_range):
            if not lo < hi:
                raise ValueError("ranges must satisfy lo < hi")


def gaussian_spec() -> ProductMetricSpec:
    """The Gaussian product metric e^{-2x²}dx² + e^{-2y²}dy² on the plane."""
    return ProductMetricSpec(lambda t: -t * t, lambda t: -t * t)


def zero_spec(x_range=(-math.inf, math.inf),
              y_range=(-math.inf, math.inf)) -> ProductMetricSpec:
    """The flat product metric dx² + dy² restricted to a rectangle."""
    return ProductMetricSpec(lambda t: 0.0, lambda t: 0.0, x_range, y_range)


def _exp_weight(func: Callable[[float], float]) -> Callable[[float], float]:
    def weight(t: float) -> float:
        return math.exp(func(t))
    return weight


def _improper(weight: Callable[[float], float], lo: float, hi: float,
              cfg: QuadratureConfig) -> float:
    """∫_lo^hi weight(t) dt with infinite endpoints compactified.

    Substitutions: t = s/(1-s²) for the doubly infinite line, t = c ± s/(1-s)
    for half-lines.  Panel midpoints are dyadic, so s never reaches ±1 and
    the transformed integrand stays finite wherever the original converges.
    """
    lo_inf = math.isinf(lo)
    hi_inf = math.isinf(hi)
    try:
        if not lo_inf and not hi_inf:
            return integrate_real(weight, lo, hi, cfg)
        if lo_inf and hi_inf:
            def g(s: float) -> float:
                om = 1.0 - s * s
                om2 = om * om
                if om2 == 0.0:
                    # subdivision ground down to the compactified endpoint:
                    # only a divergent tail forces panels that deep
                    raise OverflowError
                return weight(s / om) * (1.0 + s * s) / om2
            return integrate_real(g, -1.0, 1.0, cfg)
        if hi_inf:
            def g(s: float) -> float:
                om = 1.0 - s
                om2 = om * om
                if om2 == 0.0:
                    raise OverflowError
                return weight(lo + s / om) / om2
            return integrate_real(g, 0.0, 1.0, cfg)

        def g(s: float) -> float:
            om = 1.0 - s
            om2 = om * om
            if om2 == 0.0:
                raise OverflowError
            return weight(hi - s / om) / om2
        return integrate_real(g, 0.0, 1.0, cfg)
    except (RealQuadratureError, OverflowError):
        return math.inf


def arclength_coordinate(func: Callable[[float], float], x: float,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Signed arclength ∫_0^x e^{func(t)} dt; accepts infinite x."""
    weight = _exp_weight(func)
    if x == 0:
        return 0.0
    if x > 0:
        return _improper(weight, 0.0, x, cfg)
    value = _improper(weight, x, 0.0, cfg)
    return -value


def embed_product(spec: ProductMetricSpec, p: tuple[float, float],
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """The isometric embedding (u(x), v(y)) of the point p = (x, y)."""
    x, y = p
    if not (spec.x_range[0] <= x <= spec.x_range[1]):
        raise ValueError(f"x = {x} outside range {spec.x_range}")
    if not (spec.y_range[0] <= y <= spec.y_range[1]):
        raise ValueError(f"y = {y} outside range {spec.y_range}")
    return (arclength_coordinate(spec.a, x, cfg),
            arclength_coordinate(spec.b, y, cfg))


def image_side_lengths(spec: ProductMetricSpec,
                       cfg: QuadratureConfig = _SIDE_QUADRATURE) -> tuple[float, float]:
    """Side lengths of the open rectangle image; math.inf marks a divergent
    (unbounded) side."""
    lx = _improper(_exp_weight(spec.a), spec.x_range[0], spec.x_range[1], cfg)
    ly = _improper(_exp_weight(spec.b), spec.y_range[0], spec.y_range[1], cfg)
    return (lx, ly)
