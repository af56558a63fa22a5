#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the two hot kernels (tape evaluation, adaptive segment quadrature)
and an end-to-end verification sweep under each backend.

    python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import statistics
import time

from flatmap.construction import solve_lemma1
from flatmap.expr import parse
from flatmap.geometry import grid_for_domain, verification_suite
from flatmap.kernels import compile_tape, pure

try:
    from flatmap.kernels import _core
except ImportError:
    _core = None

EXPR = "sin(z)/2 + z^2/4 - i*z^3"


def timeit(fn, repeats):
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return statistics.median(best)


def bench_eval(backend, n=20000):
    tape = compile_tape(parse(EXPR))
    pts = [complex(0.001 * k % 0.8, 0.0007 * k % 0.6) for k in range(n)]

    def run():
        for z in pts:
            backend.eval_tape(tape, z)
    return run


def bench_integrate(backend, n=2000):
    tape = compile_tape(parse(EXPR))
    ends = [complex(0.4 + 0.0001 * k, 0.3 - 0.00013 * k) for k in range(n)]

    def run():
        for z in ends:
            backend.integrate_segment_exp(tape, 0j, z, 1e-12, 1e-14, 4096)
    return run


def bench_pipeline():
    # runs in-process, so it reflects whichever backend the package imported
    def run():
        res = solve_lemma1(parse(EXPR))
        grid = grid_for_domain(res, nx=11, ny=11,
                               margin=1e-3 * res.domain.radius)
        verification_suite(res, grid, 1e-4 * res.domain.radius,
                           5e-4 * res.domain.radius)
    return run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = [("pure", pure)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("note: compiled kernel not built "
              "(python setup.py build_ext --inplace); timing fallback only")

    rows = []
    for label, backend in backends:
        t_eval = timeit(bench_eval(backend), args.repeats)
        t_int = timeit(bench_integrate(backend), args.repeats)
        rows.append((label, t_eval, t_int))

    print(f"\nexpression: {EXPR}")
    print(f"{'backend':<10} {'20k tape evals':>16} {'2k segment ints':>16}")
    for label, t_eval, t_int in rows:
        print(f"{label:<10} {t_eval * 1e3:>13.1f} ms {t_int * 1e3:>13.1f} ms")
    if len(rows) == 2:
        print(f"{'speedup':<10} {rows[0][1] / rows[1][1]:>15.1f}x "
              f"{rows[0][2] / rows[1][2]:>15.1f}x")

    from flatmap.kernels import backend_name
    t_pipe = timeit(bench_pipeline(), max(2, args.repeats // 2))
    print(f"\nfull verification sweep under active backend "
          f"({backend_name}): {t_pipe * 1e3:.0f} ms")
    print("run FLATMAP_BACKEND=pure to time the pipeline on the fallback")


if __name__ == "__main__":
    main()
