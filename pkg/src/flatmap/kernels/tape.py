"""Flat postfix tape compiled from an expression tree.

Both kernel backends evaluate the same tape: an array of opcodes in
postorder, each slot holding its operand slot indices (or the literal /
integer exponent inline).  Slot k's value lands in scratch register k, so a
single pass 0..n-1 evaluates the tree and the root value sits in the last
register.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import expr as _e

OP_LIT = 0
OP_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_NEG = 7
OP_EXP = 8
OP_SIN = 9
OP_COS = 10

ERR_NONE = 0
ERR_DIV_ZERO = 1
ERR_NONFINITE = 2


class TapeEvalError(Exception):
    """Raised by a kernel; slot -1 marks the integrand wrapper exp(f)."""

    def __init__(self, kind: int, slot: int):
        self.kind = kind
        self.slot = slot
        what = "division by zero" if kind == ERR_DIV_ZERO else "non-finite value"
        super().__init__(f"{what} at tape slot {slot}")


class PanelLimitError(Exception):
    """Adaptive subdivision hit its panel budget before meeting tolerance."""

    def __init__(self, estimate: complex, error_bound: float, panels: int):
        self.estimate = estimate
        self.error_bound = error_bound
        self.panels = panels
        super().__init__(
            f"tolerance not reached within {panels} panels "
            f"(best estimate {estimate}, error bound {error_bound:.3e})")


@dataclass(frozen=True, eq=False)  # identity semantics; arrays don't compare
class Tape:
    ops: np.ndarray       # int32[n] opcodes
    arg0: np.ndarray      # int32[n] first operand slot, -1 for leaves
    arg1: np.ndarray      # int32[n] second operand slot / integer exponent
    lit_re: np.ndarray    # float64[n] literal value, used when op == OP_LIT
    lit_im: np.ndarray
    nodes: tuple          # source subtree per slot, for error reporting

    def __len__(self) -> int:
        return len(self.ops)

    def node_at(self, slot: int):
        return self.nodes[slot] if 0 <= slot < len(self.nodes) else None


_BINARY = {_e.Add: OP_ADD, _e.Sub: OP_SUB, _e.Mul: OP_MUL, _e.Div: OP_DIV}
_UNARY = {_e.Neg: OP_NEG, _e.Exp: OP_EXP, _e.Sin: OP_SIN, _e.Cos: OP_COS}


@lru_cache(maxsize=256)
def compile_tape(tree: _e.ExprTree) -> Tape:
    ops: list[int] = []
    arg0: list[int] = []
    arg1: list[int] = []
    lre: list[float] = []
    lim: list[float] = []
    nodes: list[_e.ExprTree] = []

    def emit(op, a0, a1, re, im, node) -> int:
        ops.append(op)
        arg0.append(a0)
        arg1.append(a1)
        lre.append(re)
        lim.append(im)
        nodes.append(node)
        return len(ops) - 1

    def walk(node: _e.ExprTree) -> int:
        if isinstance(node, _e.Var):
            return emit(OP_VAR, -1, -1, 0.0, 0.0, node)
        if isinstance(node, _e.Literal):
            return emit(OP_LIT, -1, -1, node.re, node.im, node)
        cls = type(node)
        if cls in _BINARY:
            a = walk(node.left)
            b = walk(node.right)
            return emit(_BINARY[cls], a, b, 0.0, 0.0, node)
        if isinstance(node, _e.Pow):
            a = walk(node.base)
            return emit(OP_POW, a, node.exponent, 0.0, 0.0, node)
        if cls in _UNARY:
            a = walk(node.operand)
            return emit(_UNARY[cls], a, -1, 0.0, 0.0, node)
        raise TypeError(f"cannot compile {node!r}")

    walk(tree)
    as_i32 = lambda xs: np.asarray(xs, dtype=np.int32)
    as_f64 = lambda xs: np.asarray(xs, dtype=np.float64)
    tape = Tape(as_i32(ops), as_i32(arg0), as_i32(arg1),
                as_f64(lre), as_f64(lim), tuple(nodes))
    for arr in (tape.ops, tape.arg0, tape.arg1, tape.lit_re, tape.lit_im):
        arr.setflags(write=False)
    return tape
