"""Command-line pipeline: construct, verify, curvature, embed.

Output is machine-readable (JSON or CSV; floats printed with 17 significant
digits so re-reading reproduces the in-memory doubles exactly) and
byte-identical across re-runs of the same configuration.  Errors go to
stderr as one JSON object; exit codes: 0 success, 2 expression parse error,
3 domain validation failure, 4 I/O error, 5 verification report failed.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .construction import (
    ConstructionConfig,
    DomainValidationError,
    solve_lemma1,
)
from .contour import QuadratureConfig, QuadratureError
from .expr import EvaluationError, ParseError, evaluate, parse
from .geometry import (
    DEFAULT_TOLERANCES,
    Grid2D,
    curvature_conformal,
    grid_for_domain,
    verification_suite,
)
from .kernels import backend_name
from .product_metric import (
    ProductMetricSpec,
    arclength_coordinate,
    gaussian_spec,
    image_side_lengths,
    zero_spec,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_VERIFY_FAILED = 5


# ---------------------------------------------------------------------------
# Deterministic serialization: floats at 17 significant digits round-trip
# exactly and identically on every run.
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    if isinstance(x, bool) or not isinstance(x, float):
        raise TypeError(f"not a float: {x!r}")
    if not math.isfinite(x):
        raise ValueError("refusing to serialize a non-finite float")
    return format(x, ".17g")


def _json(value, out: list[str]):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_fmt(value))
    elif isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        escaped = "".join(c if c >= " " else f"\\u{ord(c):04x}" for c in escaped)
        out.append(f'"{escaped}"')
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, v in enumerate(value):
            if i:
                out.append(",")
            _json(v, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                out.append(",")
            _json(str(k), out)
            out.append(":")
            _json(v, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(document: dict) -> str:
    out: list[str] = []
    _json(document, out)
    return "".join(out) + "\n"


def _emit_error(kind: str, message: str, **extra):
    payload = {"error": {"kind": kind, "message": message, **extra}}
    sys.stderr.write(dumps(payload))


def _warn(message: str):
    sys.stderr.write(f"warning: {message}\n")


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'RE,IM', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _range_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'LO,HI', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _grid_shape(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'NXxNY', got {text!r}")
    nx, ny = int(parts[0]), int(parts[1])
    if nx < 3 or ny < 3:
        raise argparse.ArgumentTypeError("grid needs at least 3x3 points")
    return nx, ny


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="flatmap",
        description="Construct and verify explicit local isometries between "
                    "the flat plane and conformally flat metrics.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_grid_shape, default=(21, 21),
                        metavar="NXxNY", help="sample grid shape (default 21x21)")
    common.add_argument("--span", type=float, default=None,
                        help="grid side length (default: fit the domain)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None,
                        help="output path (csv mode: used as a file prefix); "
                             "default standard output")

    analytic = argparse.ArgumentParser(add_help=False)
    analytic.add_argument("--f", required=True, metavar="EXPR",
                          help="analytic function of z, e.g. 'z^2/4 + i*z'")
    analytic.add_argument("--z0", type=_pair, default=(0.0, 0.0), metavar="RE,IM",
                          help="basepoint (default 0,0)")
    analytic.add_argument("--radius", type=float, default=1.0,
                          help="initial disc radius to validate within")
    analytic.add_argument("--boundary-samples", type=int, default=64)
    analytic.add_argument("--tol-rel", type=float, default=1e-12,
                          help="quadrature relative tolerance")
    analytic.add_argument("--tol-abs", type=float, default=1e-14,
                          help="quadrature absolute tolerance")
    analytic.add_argument("--max-subdivisions", type=int, default=2 ** 16)

    fd = argparse.ArgumentParser(add_help=False)
    fd.add_argument("--fd-jac", type=float, default=None,
                    help="step for first-derivative stencils "
                         "(default 1e-4 * domain radius)")
    fd.add_argument("--fd-lap", type=float, default=None,
                    help="step for Laplacian stencils "
                         "(default 5e-4 * domain radius)")

    p = sub.add_parser("construct", parents=[analytic, common],
                       help="run the construction and emit field grids")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[analytic, common, fd],
                       help="run the construction and all residual reports")
    for name, default in (("lemma1", 1e-8), ("dual-route", 1e-10),
                          ("cr", 1e-6), ("pullback", 1e-5),
                          ("harmonicity", 1e-5), ("curvature", 1e-5)):
        p.add_argument(f"--tol-{name}", type=float, default=default)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curvature", parents=[analytic, common, fd],
                       help="finite-difference curvature sweep of the "
                            "metric with conformal exponent Re f")
    p.add_argument("--k0", type=float, default=0.0,
                   help="curvature of the base metric")
    p.add_argument("--exponent-sign", type=int, choices=(-1, 1), default=-1)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("embed", parents=[common],
                       help="arclength embedding of a product metric")
    p.add_argument("--tol-rel", type=float, default=1e-12,
                   help="quadrature relative tolerance")
    p.add_argument("--tol-abs", type=float, default=1e-14,
                   help="quadrature absolute tolerance")
    p.add_argument("--preset", choices=("gaussian", "zero"), default=None)
    p.add_argument("--a", metavar="EXPR", default=None,
                   help="exponent a(t) on the x axis (expression in z, "
                        "evaluated on the real line)")
    p.add_argument("--b", metavar="EXPR", default=None)
    p.add_argument("--x-range", type=_range_pair, default=(-math.inf, math.inf),
                   metavar="LO,HI", help="use -inf/inf for unbounded")
    p.add_argument("--y-range", type=_range_pair, default=(-math.inf, math.inf),
                   metavar="LO,HI")
    p.set_defaults(func=cmd_embed)
    return ap


# ---------------------------------------------------------------------------
# Output assembly
# ---------------------------------------------------------------------------

def _grid_payload(grid: Grid2D, values: list[float]) -> dict:
    return {"origin": [grid.origin[0], grid.origin[1]], "step": grid.step,
            "nx": grid.nx, "ny": grid.ny, "values": values}


def _write_text(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_grid(grid: Grid2D, columns: dict[str, list[float]]) -> str:
    names = list(columns)
    lines = ["x,y," + ",".join(names)]
    for k, (x, y) in enumerate(grid.points()):
        row = [_fmt(x), _fmt(y)] + [_fmt(columns[n][k]) for n in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _emit_csv(args, sections: list[tuple[str, str]]):
    """sections: (name, csv text).  With --out, one file per section."""
    if args.out is None:
        chunks = []
        for name, text in sections:
            chunks.append(f"# {name}\n{text}")
        sys.stdout.write("".join(chunks))
    else:
        for name, text in sections:
            _write_text(f"{args.out}.{name}.csv", text)


def _emit_json(args, document: dict):
    _write_text(args.out, dumps(document))


def _quadrature_config(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.tol_rel, abs_tol=args.tol_abs,
                            max_subdivisions=args.max_subdivisions)


def _construction_config(args) -> ConstructionConfig:
    return ConstructionConfig(
        basepoint=complex(args.z0[0], args.z0[1]),
        initial_radius=args.radius,
        quadrature=_quadrature_config(args),
        boundary_samples=args.boundary_samples)


def _meta(args, **extra) -> dict:
    meta = {"tool": "flatmap", "version": __version__, "backend": backend_name,
            "subcommand": args.subcommand}
    meta.update(extra)
    return meta


def _domain_grid(args, result, margin: float) -> Grid2D:
    nx, ny = args.grid
    grid = grid_for_domain(result, nx, ny, span=args.span, margin=margin)
    achieved = grid.step * (nx - 1)
    if args.span is not None and achieved < args.span * (1.0 - 1e-12):
        _warn(f"grid span shrunk from {args.span:g} to {achieved:g} to fit "
              f"the validated domain (radius {result.domain.radius:g})")
    return grid


def _fd_steps(args, radius: float) -> tuple[float, float]:
    fd_jac = args.fd_jac if args.fd_jac is not None else 1e-4 * radius
    fd_lap = args.fd_lap if args.fd_lap is not None else 5e-4 * radius
    return fd_jac, fd_lap


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_construct(args) -> int:
    f = parse(args.f)
    result = solve_lemma1(f, _construction_config(args))
    grid = _domain_grid(args, result, margin=0.0)

    phi, psi, w1, w2, cexp = [], [], [], [], []
    for x, y in grid.points():
        gz = result.g(complex(x, y))
        phi.append(gz.real)
        psi.append(gz.imag)
        m = math.exp(gz.real)
        w1.append(m * math.cos(gz.imag))
        w2.append(m * math.sin(gz.imag))
        cexp.append(result.conformal_exponent(x, y))

    meta = _meta(
        args,
        expression=args.f,
        basepoint=[result.domain.center.real, result.domain.center.imag],
        initial_radius=args.radius,
        C=[result.C.real, result.C.imag],
        domain_radius=result.domain.radius,
        tolerances={"quadrature_rel": args.tol_rel,
                    "quadrature_abs": args.tol_abs},
        max_subdivisions=args.max_subdivisions)
    if args.format == "json":
        grids = {"phi": _grid_payload(grid, phi),
                 "psi": _grid_payload(grid, psi),
                 "w1": _grid_payload(grid, w1),
                 "w2": _grid_payload(grid, w2),
                 "conformal_exponent": _grid_payload(grid, cexp)}
        _emit_json(args, {"meta": meta, "grids": grids})
    else:
        sections = [("phi", _csv_grid(grid, {"value": phi})),
                    ("psi", _csv_grid(grid, {"value": psi})),
                    ("w", _csv_grid(grid, {"w1": w1, "w2": w2})),
                    ("conformal_exponent", _csv_grid(grid, {"value": cexp}))]
        _emit_csv(args, sections)
    return EXIT_OK


def cmd_verify(args) -> int:
    f = parse(args.f)
    result = solve_lemma1(f, _construction_config(args))
    fd_jac, fd_lap = _fd_steps(args, result.domain.radius)
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update({
        "lemma1_identity": args.tol_lemma1,
        "dual_route": args.tol_dual_route,
        "cr_residual": args.tol_cr,
        "pullback": args.tol_pullback,
        "harmonicity_phi": args.tol_harmonicity,
        "harmonicity_psi": args.tol_harmonicity,
        "curvature_flat": args.tol_curvature,
    })
    grid = _domain_grid(args, result, margin=1.01 * max(fd_jac, fd_lap))
    reports = verification_suite(result, grid, fd_jac, fd_lap, tolerances)

    all_tols = {name: tolerances[name] for name in sorted(tolerances)}
    all_tols["quadrature_rel"] = args.tol_rel
    all_tols["quadrature_abs"] = args.tol_abs
    meta = _meta(
        args,
        expression=args.f,
        basepoint=[result.domain.center.real, result.domain.center.imag],
        initial_radius=args.radius,
        C=[result.C.real, result.C.imag],
        domain_radius=result.domain.radius,
        fd_steps={"jacobian": fd_jac, "laplacian": fd_lap},
        tolerances=all_tols,
        max_subdivisions=args.max_subdivisions)
    if args.format == "json":
        _emit_json(args, {"meta": meta,
                          "reports": [r.to_dict() for r in reports]})
    else:
        lines = ["name,max_abs_residual,tolerance,pass"]
        for r in reports:
            lines.append(f"{r.name},{_fmt(r.max_abs_residual)},"
                         f"{_fmt(r.tolerance)},{'true' if r.passed else 'false'}")
        _emit_csv(args, [("reports", "\n".join(lines) + "\n")])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def cmd_curvature(args) -> int:
    f = parse(args.f)
    span = args.span if args.span is not None else 1.0
    nx, ny = args.grid
    grid = Grid2D.centered(args.z0, span, nx, ny)
    h = args.fd_lap if args.fd_lap is not None else 1e-3 * (span / 2.0)

    def phi(x: float, y: float) -> float:
        return evaluate(f, complex(x, y)).real

    values = [curvature_conformal(phi, args.k0, p, h, args.exponent_sign)
              for p in grid.points()]
    meta = _meta(args, expression=args.f, k0=args.k0,
                 exponent_sign=args.exponent_sign, fd_step=h)
    if args.format == "json":
        _emit_json(args, {"meta": meta,
                          "grids": {"curvature": _grid_payload(grid, values)}})
    else:
        _emit_csv(args, [("curvature", _csv_grid(grid, {"value": values}))])
    return EXIT_OK


def _embed_spec(args) -> ProductMetricSpec:
    if args.preset == "gaussian":
        base = gaussian_spec()
        return ProductMetricSpec(base.a, base.b, args.x_range, args.y_range)
    if args.preset == "zero":
        return zero_spec(args.x_range, args.y_range)
    if args.a is None or args.b is None:
        raise argparse.ArgumentTypeError(
            "embed needs either --preset or both --a and --b")
    fa, fb = parse(args.a), parse(args.b)

    def on_axis(tree):
        def func(t: float) -> float:
            return evaluate(tree, complex(t, 0.0)).real
        return func

    return ProductMetricSpec(on_axis(fa), on_axis(fb), args.x_range, args.y_range)


def cmd_embed(args) -> int:
    spec = _embed_spec(args)
    # a modest panel budget turns divergent improper integrals around fast
    side_cfg = QuadratureConfig(rel_tol=args.tol_rel, abs_tol=args.tol_abs,
                                max_subdivisions=4096)
    point_cfg = QuadratureConfig(rel_tol=args.tol_rel, abs_tol=args.tol_abs)
    lx, ly = image_side_lengths(spec, side_cfg)
    span = args.span if args.span is not None else 2.0
    nx, ny = args.grid

    def window(rng):
        lo = max(rng[0], -span / 2.0)
        hi = min(rng[1], span / 2.0)
        if not lo < hi:
            lo, hi = rng  # degenerate clip: fall back to the range itself
        return lo, hi

    x_lo, x_hi = window(spec.x_range)
    y_lo, y_hi = window(spec.y_range)
    step = (x_hi - x_lo) / (nx - 1)
    grid = Grid2D((x_lo, y_lo), step, nx, ny)
    # per-axis arclengths, reused across the row-major grid
    xs = [x_lo + i * step for i in range(nx)]
    ys = [y_lo + j * step for j in range(ny)]
    us = [arclength_coordinate(spec.a, x, point_cfg) for x in xs]
    vs = [arclength_coordinate(spec.b, y, point_cfg) for y in ys]
    u_vals = [us[ix] for iy in range(ny) for ix in range(nx)]
    v_vals = [vs[iy] for iy in range(ny) for ix in range(nx)]

    sides = {"u": "unbounded" if math.isinf(lx) else lx,
             "v": "unbounded" if math.isinf(ly) else ly}
    meta = _meta(args, preset=args.preset, side_lengths=sides)
    if args.format == "json":
        _emit_json(args, {"meta": meta,
                          "grids": {"u": _grid_payload(grid, u_vals),
                                    "v": _grid_payload(grid, v_vals)}})
    else:
        side_csv = (f"side,length\nu,{sides['u'] if isinstance(sides['u'], str) else _fmt(sides['u'])}"
                    f"\nv,{sides['v'] if isinstance(sides['v'], str) else _fmt(sides['v'])}\n")
        _emit_csv(args, [("sides", side_csv),
                         ("embedding", _csv_grid(grid, {"u": u_vals, "v": v_vals}))])
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _emit_error("parse", str(exc), offset=exc.offset,
                    expected=list(exc.expected))
        return EXIT_PARSE
    except DomainValidationError as exc:
        _emit_error("domain", str(exc))
        return EXIT_DOMAIN
    except (QuadratureError, EvaluationError, ArithmeticError, ValueError) as exc:
        _emit_error("numeric", str(exc))
        return EXIT_DOMAIN
    except argparse.ArgumentTypeError as exc:
        _emit_error("usage", str(exc))
        return EXIT_PARSE
    except OSError as exc:
        _emit_error("io", str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
