"""Fallback kernel backend: plain Python scalars + numpy batch evaluation.

Semantics mirror the compiled backend exactly: same opcodes, same binary
exponentiation, same Gauss-Legendre 7/15 embedded pair, same deterministic
left-before-right subdivision with panels accumulated in ascending-t order.
Scalar arithmetic matches the compiled kernel to the last ulp (CPython's
complex multiply and divide use the same formulas); the batched quadrature
path differs only in summation rounding, well below the tolerances anywhere
near the defaults.
"""

from __future__ import annotations

import math

import numpy as np

from .nodes import W7, W15, X7, X15
from .tape import (
    ERR_DIV_ZERO,
    ERR_NONFINITE,
    OP_ADD,
    OP_DIV,
    OP_EXP,
    OP_LIT,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SIN,
    OP_SUB,
    OP_VAR,
    PanelLimitError,
    Tape,
    TapeEvalError,
)

name = "pure"


def eval_tape(tape: Tape, z: complex) -> complex:
    """Single-point tape evaluation on Python complex scalars."""
    regs: list[complex] = [0j] * len(tape)
    ops, a0, a1 = tape.ops, tape.arg0, tape.arg1
    lre, lim = tape.lit_re, tape.lit_im
    for k in range(len(tape)):
        op = ops[k]
        if op == OP_VAR:
            v = z
        elif op == OP_LIT:
            v = complex(lre[k], lim[k])
        elif op == OP_ADD:
            v = regs[a0[k]] + regs[a1[k]]
        elif op == OP_SUB:
            v = regs[a0[k]] - regs[a1[k]]
        elif op == OP_MUL:
            v = regs[a0[k]] * regs[a1[k]]
        elif op == OP_DIV:
            den = regs[a1[k]]
            if den == 0:
                raise TapeEvalError(ERR_DIV_ZERO, k)
            v = regs[a0[k]] / den
        elif op == OP_POW:
            b = regs[a0[k]]
            v = 1 + 0j
            e = int(a1[k])
            while e:
                if e & 1:
                    v = v * b
                e >>= 1
                if e:
                    b = b * b
        elif op == OP_NEG:
            v = -regs[a0[k]]
        else:
            w = regs[a0[k]]
            try:
                if op == OP_EXP:
                    m = math.exp(w.real)
                    v = complex(m * math.cos(w.imag), m * math.sin(w.imag))
                elif op == OP_SIN:
                    v = complex(math.sin(w.real) * math.cosh(w.imag),
                                math.cos(w.real) * math.sinh(w.imag))
                else:
                    v = complex(math.cos(w.real) * math.cosh(w.imag),
                                -math.sin(w.real) * math.sinh(w.imag))
            except OverflowError:
                raise TapeEvalError(ERR_NONFINITE, k) from None
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise TapeEvalError(ERR_NONFINITE, k)
        regs[k] = v
    return regs[-1]


def _eval_tape_batch(tape: Tape, z: np.ndarray) -> np.ndarray:
    """Vectorized tape evaluation over an array of points."""
    n = len(tape)
    ops, a0, a1 = tape.ops, tape.arg0, tape.arg1
    regs = np.empty((n, z.size), dtype=np.complex128)
    with np.errstate(all="ignore"):
        for k in range(n):
            op = ops[k]
            if op == OP_VAR:
                v = z
            elif op == OP_LIT:
                v = np.full(z.size, complex(tape.lit_re[k], tape.lit_im[k]))
            elif op == OP_ADD:
                v = regs[a0[k]] + regs[a1[k]]
            elif op == OP_SUB:
                v = regs[a0[k]] - regs[a1[k]]
            elif op == OP_MUL:
                v = regs[a0[k]] * regs[a1[k]]
            elif op == OP_DIV:
                den = regs[a1[k]]
                if np.any(den == 0):
                    raise TapeEvalError(ERR_DIV_ZERO, k)
                v = regs[a0[k]] / den
            elif op == OP_POW:
                b = regs[a0[k]].copy()
                v = np.ones(z.size, dtype=np.complex128)
                e = int(a1[k])
                while e:
                    if e & 1:
                        v = v * b
                    e >>= 1
                    if e:
                        b = b * b
            elif op == OP_NEG:
                v = -regs[a0[k]]
            elif op == OP_EXP:
                v = np.exp(regs[a0[k]])
            elif op == OP_SIN:
                v = np.sin(regs[a0[k]])
            else:
                v = np.cos(regs[a0[k]])
            if not np.all(np.isfinite(v)):
                raise TapeEvalError(ERR_NONFINITE, k)
            regs[k] = v
    return regs[-1]


_T_ALL = np.concatenate([X15, X7])  # one 22-point batch per panel


def _panel(tape: Tape, z0: complex, d: complex, a: float, b: float):
    """GL15 and GL7 estimates of ∫_a^b exp(f(z0 + t d)) dt."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = c + h * _T_ALL
    xi = z0 + t * d
    w = _eval_tape_batch(tape, xi)
    with np.errstate(all="ignore"):
        vals = np.exp(w)
    if not np.all(np.isfinite(vals)):
        raise TapeEvalError(ERR_NONFINITE, -1)
    i15 = h * np.dot(W15, vals[:15])
    i7 = h * np.dot(W7, vals[15:])
    return complex(i15), complex(i7)


def integrate_segment_exp(tape: Tape, z0: complex, z1: complex,
                          rel_tol: float, abs_tol: float,
                          max_panels: int) -> tuple[complex, float, int]:
    """Adaptive ∫ exp(f) over the straight segment z0 -> z1.

    Returns (value, error bound, panels used).  Deterministic: subdivision
    is always left half first and accepted panels accumulate in ascending-t
    order.  Raises PanelLimitError when the budget runs out, with the best
    estimate attached.
    """
    d = z1 - z0
    if d == 0:
        return 0j, 0.0, 0
    abs_d = abs(d)
    total = 0j
    err_sum = 0.0
    panels = 0
    tol = None
    exhausted = False
    stack = [(0.0, 1.0)]
    while stack:
        a, b = stack.pop()
        i15, i7 = _panel(tape, z0, d, a, b)
        panels += 1
        if tol is None:
            tol = max(abs_tol, rel_tol * abs(i15) * abs_d)
        err = abs(i15 - i7) * abs_d
        if err <= tol * (b - a) or exhausted:
            total += i15
            err_sum += err
        elif panels >= max_panels:
            # budget exhausted: keep current estimates for everything left
            exhausted = True
            total += i15
            err_sum += err
        else:
            m = 0.5 * (a + b)
            stack.append((m, b))
            stack.append((a, m))
    value = d * total
    if exhausted:
        raise PanelLimitError(value, err_sum, panels)
    return value, err_sum, panels
