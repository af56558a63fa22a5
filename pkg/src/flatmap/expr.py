"""Analytic functions of one complex variable as expression trees.

The grammar covers entire functions (polynomials in z, exp, sin, cos) plus
quotients.  log and non-integer powers are deliberately not accepted as
input: keeping the grammar single-valued means analyticity of quotient-free
trees is decidable by syntax alone, and the one multivalued function the
construction needs (the principal log) is introduced internally with
controlled branch handling.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' unsigned-int)? | '-' factor
    atom   := 'z' | 'i' | number | ident '(' expr ')' | '(' expr ')'
    ident  := 'exp' | 'sin' | 'cos'

Whitespace is insignificant.  `^` takes only a non-negative integer literal
exponent and binds tighter than unary minus.  Constant folding (evaluating
any node whose children are all literals) is the only simplification the
parser applies, so parsing is deterministic and trees compare structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ExprTree",
    "Var",
    "Literal",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Neg",
    "Exp",
    "Sin",
    "Cos",
    "ExprError",
    "ParseError",
    "UnknownIdentifierError",
    "EvaluationError",
    "DivisionByZeroError",
    "NonFiniteError",
    "parse",
    "evaluate",
    "differentiate",
    "fold_constants",
    "to_source",
    "real_part_field",
    "is_entire",
]


class ExprError(Exception):
    """Base class for all expression errors."""


class ParseError(ExprError):
    """Syntax error at a byte offset, with the set of expected tokens."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at byte offset {offset}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    """An identifier outside the function vocabulary exp/sin/cos."""

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset,
                         ("exp", "sin", "cos", "z", "i"))


class EvaluationError(ExprError):
    """Evaluation failed; carries the offending subtree."""

    def __init__(self, message: str, node: "ExprTree"):
        self.node = node
        super().__init__(f"{message} in subexpression {to_source(node)!r}")


class DivisionByZeroError(EvaluationError):
    def __init__(self, node: "ExprTree"):
        super().__init__("division by zero", node)


class NonFiniteError(EvaluationError):
    def __init__(self, node: "ExprTree"):
        super().__init__("result is not finite", node)


# ---------------------------------------------------------------------------
# AST node types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExprTree:
    """Base node; concrete kinds are the subclasses below."""

    __slots__ = ()

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Var(ExprTree):
    __slots__ = ()


@dataclass(frozen=True)
class Literal(ExprTree):
    re: float
    im: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class Add(ExprTree):
    left: ExprTree
    right: ExprTree


@dataclass(frozen=True)
class Sub(ExprTree):
    left: ExprTree
    right: ExprTree


@dataclass(frozen=True)
class Mul(ExprTree):
    left: ExprTree
    right: ExprTree


@dataclass(frozen=True)
class Div(ExprTree):
    left: ExprTree
    right: ExprTree


@dataclass(frozen=True)
class Pow(ExprTree):
    base: ExprTree
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError("integer power requires exponent >= 0")


@dataclass(frozen=True)
class Neg(ExprTree):
    operand: ExprTree


@dataclass(frozen=True)
class Exp(ExprTree):
    operand: ExprTree


@dataclass(frozen=True)
class Sin(ExprTree):
    operand: ExprTree


@dataclass(frozen=True)
class Cos(ExprTree):
    operand: ExprTree


_FUNCTIONS = {"exp": Exp, "sin": Sin, "cos": Cos}


def children(node: ExprTree) -> tuple[ExprTree, ...]:
    if isinstance(node, (Add, Sub, Mul, Div)):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base,)
    if isinstance(node, (Neg, Exp, Sin, Cos)):
        return (node.operand,)
    return ()


def is_entire(node: ExprTree) -> bool:
    """True when the tree has no quotient node, hence is analytic on all of C."""
    if isinstance(node, Div):
        return False
    return all(is_entire(c) for c in children(node))


# ---------------------------------------------------------------------------
# Evaluation
#
# The elementary complex functions are spelled out on (re, im) pairs with the
# same formulas the compiled kernel uses, so both routes agree to the last
# few ulps.  +, -, * and / on Python complex already match the kernel
# (CPython multiplies naively and divides with Smith's algorithm).
# ---------------------------------------------------------------------------

def _cexp(w: complex) -> complex:
    m = math.exp(w.real)
    return complex(m * math.cos(w.imag), m * math.sin(w.imag))


def _csin(w: complex) -> complex:
    return complex(math.sin(w.real) * math.cosh(w.imag),
                   math.cos(w.real) * math.sinh(w.imag))


def _ccos(w: complex) -> complex:
    return complex(math.cos(w.real) * math.cosh(w.imag),
                   -math.sin(w.real) * math.sinh(w.imag))


def _finite(w: complex) -> bool:
    return math.isfinite(w.real) and math.isfinite(w.imag)


def evaluate(node: ExprTree, z: complex) -> complex:
    """Value of the tree at z, by exact structural recursion.

    Every operation either yields a finite complex number or raises:
    DivisionByZeroError at a quotient node with vanishing denominator,
    NonFiniteError when a value overflows.  No NaN or Inf escapes.
    """
    z = complex(z)
    if not _finite(z):
        raise ValueError("evaluation point is not finite")

    def rec(n: ExprTree) -> complex:
        if isinstance(n, Var):
            return z
        if isinstance(n, Literal):
            return n.value
        try:
            if isinstance(n, Add):
                v = rec(n.left) + rec(n.right)
            elif isinstance(n, Sub):
                v = rec(n.left) - rec(n.right)
            elif isinstance(n, Mul):
                v = rec(n.left) * rec(n.right)
            elif isinstance(n, Div):
                num, den = rec(n.left), rec(n.right)
                if den == 0:
                    raise DivisionByZeroError(n)
                v = num / den
            elif isinstance(n, Pow):
                # binary exponentiation, same scheme as the kernels
                base = rec(n.base)
                v = complex(1.0, 0.0)
                e = n.exponent
                while e:
                    if e & 1:
                        v = v * base
                    e >>= 1
                    if e:
                        base = base * base
            elif isinstance(n, Neg):
                v = -rec(n.operand)
            elif isinstance(n, Exp):
                v = _cexp(rec(n.operand))
            elif isinstance(n, Sin):
                v = _csin(rec(n.operand))
            elif isinstance(n, Cos):
                v = _ccos(rec(n.operand))
            else:  # pragma: no cover
                raise TypeError(f"unknown node {n!r}")
        except OverflowError:
            raise NonFiniteError(n) from None
        if not _finite(v):
            raise NonFiniteError(n)
        return v

    return rec(node)


def real_part_field(f: ExprTree, p: tuple[float, float]) -> float:
    """Re(f(x+iy)): the conformal exponent attached to f."""
    return evaluate(f, complex(p[0], p[1])).real


# ---------------------------------------------------------------------------
# Constant folding
# ---------------------------------------------------------------------------

def _fold_node(node: ExprTree) -> ExprTree:
    """Fold one node whose children are already folded.

    A node with all-literal children is replaced by its value, unless that
    value is non-finite or the node divides by zero, in which case the node
    is left in place and the error surfaces at evaluation time.
    """
    kids = children(node)
    if not kids or not all(isinstance(c, Literal) for c in kids):
        return node
    try:
        v = evaluate(node, 0j)
    except EvaluationError:
        return node
    return Literal(v.real, v.imag)


def fold_constants(node: ExprTree) -> ExprTree:
    kids = children(node)
    if not kids:
        return node
    if isinstance(node, (Add, Sub, Mul, Div)):
        rebuilt = type(node)(fold_constants(node.left), fold_constants(node.right))
    elif isinstance(node, Pow):
        rebuilt = Pow(fold_constants(node.base), node.exponent)
    else:
        rebuilt = type(node)(fold_constants(kids[0]))
    return _fold_node(rebuilt)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Tokenizer:
    """Single-pass tokenizer; positions are byte offsets into the UTF-8 source."""

    def __init__(self, source: str):
        self.source = source
        self.pos = 0

    def byte_offset(self, pos: int | None = None) -> int:
        if pos is None:
            pos = self.pos
        return len(self.source[:pos].encode("utf-8"))

    def skip_ws(self):
        while self.pos < len(self.source) and self.source[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.source):
            return ""
        return self.source[self.pos]

    def take(self) -> str:
        ch = self.peek()
        if ch:
            self.pos += 1
        return ch

    def read_number(self) -> float:
        start = self.pos
        s = self.source
        while self.pos < len(s) and s[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(s) and s[self.pos] == ".":
            self.pos += 1
            while self.pos < len(s) and s[self.pos].isdigit():
                self.pos += 1
        if s[start:self.pos] == ".":
            raise ParseError("malformed number", self.byte_offset(start), ("digit",))
        if (self.pos < len(s) and s[self.pos] in "eE"
                and self.pos + 1 < len(s)
                and (s[self.pos + 1].isdigit()
                     or (s[self.pos + 1] in "+-"
                         and self.pos + 2 < len(s) and s[self.pos + 2].isdigit()))):
            self.pos += 2
            while self.pos < len(s) and s[self.pos].isdigit():
                self.pos += 1
        value = float(s[start:self.pos])
        if not math.isfinite(value):
            raise ParseError("number literal overflows double precision",
                             self.byte_offset(start), ("smaller number",))
        return value

    def read_ident(self) -> str:
        start = self.pos
        s = self.source
        while self.pos < len(s) and (s[self.pos].isalnum() or s[self.pos] == "_"):
            self.pos += 1
        return s[start:self.pos]


_ATOM_EXPECTED = ("'z'", "'i'", "number", "function name", "'('")


class _Parser:
    def __init__(self, source: str):
        self.tk = _Tokenizer(source)

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        raise ParseError(message, self.tk.byte_offset(), expected)

    def parse(self) -> ExprTree:
        tree = self.expr()
        self.tk.skip_ws()
        if self.tk.pos < len(self.tk.source):
            self.fail(f"unexpected {self.tk.peek()!r} after expression",
                      ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return tree

    def expr(self) -> ExprTree:
        node = self.term()
        while True:
            ch = self.tk.peek()
            if ch == "+":
                self.tk.take()
                node = _fold_node(Add(node, self.term()))
            elif ch == "-":
                self.tk.take()
                node = _fold_node(Sub(node, self.term()))
            else:
                return node

    def term(self) -> ExprTree:
        node = self.factor()
        while True:
            ch = self.tk.peek()
            if ch == "*":
                self.tk.take()
                node = _fold_node(Mul(node, self.factor()))
            elif ch == "/":
                self.tk.take()
                node = _fold_node(Div(node, self.factor()))
            else:
                return node

    def factor(self) -> ExprTree:
        if self.tk.peek() == "-":
            self.tk.take()
            return _fold_node(Neg(self.factor()))
        node = self.atom()
        if self.tk.peek() == "^":
            self.tk.take()
            self.tk.skip_ws()
            ch = self.tk.peek()
            if not ch.isdigit():
                self.fail(f"exponent must be an unsigned integer, found {ch!r}"
                          if ch else "exponent must be an unsigned integer, found end of input",
                          ("unsigned integer",))
            start = self.tk.pos
            s = self.tk.source
            while self.tk.pos < len(s) and s[self.tk.pos].isdigit():
                self.tk.pos += 1
            node = _fold_node(Pow(node, int(s[start:self.tk.pos])))
        return node

    def atom(self) -> ExprTree:
        ch = self.tk.peek()
        if ch == "":
            self.fail("unexpected end of input", _ATOM_EXPECTED)
        if ch == "(":
            self.tk.take()
            node = self.expr()
            if self.tk.peek() != ")":
                self.fail(f"unclosed parenthesis, found {self.tk.peek()!r}", ("')'",))
            self.tk.take()
            return node
        if ch.isdigit() or ch == ".":
            return Literal(self.tk.read_number())
        if ch.isalpha() or ch == "_":
            start_offset = self.tk.byte_offset()
            name = self.tk.read_ident()
            if name == "z":
                return Var()
            if name == "i":
                return Literal(0.0, 1.0)
            ctor = _FUNCTIONS.get(name)
            if ctor is None:
                raise UnknownIdentifierError(name, start_offset)
            if self.tk.peek() != "(":
                self.fail(f"function {name!r} requires parenthesized argument", ("'('",))
            self.tk.take()
            node = _fold_node(ctor(self.expr()))
            if self.tk.peek() != ")":
                self.fail(f"unclosed function argument, found {self.tk.peek()!r}", ("')'",))
            self.tk.take()
            return node
        self.fail(f"unexpected character {ch!r}", _ATOM_EXPECTED)


def parse(source: str) -> ExprTree:
    """Parse UTF-8 text into the unique constant-folded AST of the grammar."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Printing (inverse of parse up to constant folding)
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _literal_source(node: Literal) -> tuple[str, int]:
    re, im = node.re, node.im
    if im == 0.0:
        text = repr(re)
        return text, (_PREC_NEG if re < 0 else _PREC_ATOM)
    if re == 0.0:
        if im == 1.0:
            return "i", _PREC_ATOM
        if im == -1.0:
            return "-i", _PREC_NEG
        return f"{im!r}*i", _PREC_MUL
    if im == 1.0:
        return f"{re!r} + i", _PREC_ADD
    if im < 0:
        rhs = "i" if im == -1.0 else f"{-im!r}*i"
        return f"{re!r} - {rhs}", _PREC_ADD
    return f"{re!r} + {im!r}*i", _PREC_ADD


def _render(node: ExprTree) -> tuple[str, int]:
    if isinstance(node, Var):
        return "z", _PREC_ATOM
    if isinstance(node, Literal):
        return _literal_source(node)
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        lt = _wrap(node.left, _PREC_ADD)
        rt = _wrap(node.right, _PREC_ADD + 1)  # +/- associate left
        return f"{lt} {op} {rt}", _PREC_ADD
    if isinstance(node, (Mul, Div)):
        op = "*" if isinstance(node, Mul) else "/"
        lt = _wrap(node.left, _PREC_MUL)
        rt = _wrap(node.right, _PREC_MUL + 1)
        return f"{lt} {op} {rt}", _PREC_MUL
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _PREC_NEG), _PREC_NEG
    if isinstance(node, Pow):
        return _wrap(node.base, _PREC_ATOM) + f"^{node.exponent}", _PREC_POW
    name = {Exp: "exp", Sin: "sin", Cos: "cos"}[type(node)]
    return f"{name}({_render(node.operand)[0]})", _PREC_ATOM


def _wrap(node: ExprTree, min_prec: int) -> str:
    text, prec = _render(node)
    if prec < min_prec:
        return f"({text})"
    return text


def to_source(node: ExprTree) -> str:
    """Render to grammar text; parse(to_source(t)) == t for folded trees."""
    return _render(node)[0]


# ---------------------------------------------------------------------------
# Symbolic differentiation
# ---------------------------------------------------------------------------

_ZERO = Literal(0.0)
_ONE = Literal(1.0)


def _is_const(node: ExprTree, value: float) -> bool:
    return isinstance(node, Literal) and node.re == value and node.im == 0.0


def _add(a: ExprTree, b: ExprTree) -> ExprTree:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return _fold_node(Add(a, b))


def _sub(a: ExprTree, b: ExprTree) -> ExprTree:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _fold_node(Neg(b))
    return _fold_node(Sub(a, b))


def _mul(a: ExprTree, b: ExprTree) -> ExprTree:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return _fold_node(Mul(a, b))


def differentiate(f: ExprTree) -> ExprTree:
    """Exact d/dz by the standard rules; only constants are simplified."""
    if isinstance(f, Var):
        return _ONE
    if isinstance(f, Literal):
        return _ZERO
    if isinstance(f, Add):
        return _add(differentiate(f.left), differentiate(f.right))
    if isinstance(f, Sub):
        return _sub(differentiate(f.left), differentiate(f.right))
    if isinstance(f, Mul):
        return _add(_mul(differentiate(f.left), f.right),
                    _mul(f.left, differentiate(f.right)))
    if isinstance(f, Div):
        num = _sub(_mul(differentiate(f.left), f.right),
                   _mul(f.left, differentiate(f.right)))
        return _fold_node(Div(num, _fold_node(Pow(f.right, 2))))
    if isinstance(f, Pow):
        if f.exponent == 0:
            return _ZERO
        if f.exponent == 1:
            return differentiate(f.base)
        down = f.base if f.exponent == 2 else _fold_node(Pow(f.base, f.exponent - 1))
        return _mul(_mul(Literal(float(f.exponent)), down), differentiate(f.base))
    if isinstance(f, Neg):
        return _sub(_ZERO, differentiate(f.operand))
    if isinstance(f, Exp):
        return _mul(Exp(f.operand), differentiate(f.operand))
    if isinstance(f, Sin):
        return _mul(Cos(f.operand), differentiate(f.operand))
    if isinstance(f, Cos):
        return _sub(_ZERO, _mul(Sin(f.operand), differentiate(f.operand)))
    raise TypeError(f"cannot differentiate {f!r}")
