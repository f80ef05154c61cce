"""A tiny expression language for generator functions of one variable ``x``.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := unary ("^" signed_number)?
    unary  := "-" unary | atom
    atom   := number | "x" | "e" | "pi" | ("ln"|"exp"|"sqrt") "(" expr ")" | "(" expr ")"

Note that unary minus binds tighter than ``^``, so ``-x^2`` is ``(-x)^2``.
A minus sign directly in front of a numeric literal is folded into the
literal, which keeps ``parse(to_text(e)) == e`` for every tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ExpressionSyntaxError, NonConstantExponent

__all__ = [
    "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Func", "Expression",
    "parse", "to_text", "differentiate", "compile_expr", "evaluate", "X",
]


@dataclass(frozen=True)
class Const:
    value: float
    name: str | None = None  # "e" or "pi" for the named constants

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"constants must be finite, got {self.value}")


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class Add:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Sub:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Mul:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Div:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: float

    def __post_init__(self):
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")


FUNCTIONS = ("ln", "exp", "sqrt")


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expression"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


Expression = Union[Const, Var, Neg, Add, Sub, Mul, Div, Pow, Func]
X = Var()

# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None, cls=ExpressionSyntaxError):
        tok = tok or self.peek()
        return cls(message, self.text, tok[2])

    def expect(self, value: str) -> None:
        tok = self.advance()
        if tok[1] != value:
            found = tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}", tok)

    def parse(self) -> Expression:
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expression:
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Expression:
        base = self.unary()
        if self.peek()[1] == "^":
            self.advance()
            base = Pow(base, self.signed_number())
        return base

    def signed_number(self) -> float:
        sign = 1.0
        if self.peek()[1] in ("+", "-"):
            sign = -1.0 if self.advance()[1] == "-" else 1.0
        tok = self.peek()
        if tok[0] != "number":
            raise self.error("exponent must be a numeric constant", cls=NonConstantExponent)
        self.advance()
        return sign * float(tok[1])

    def unary(self) -> Expression:
        if self.peek()[1] == "-":
            self.advance()
            if self.peek()[0] == "number":
                return Const(-float(self.advance()[1]))
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expression:
        tok = self.advance()
        kind, value, _ = tok
        if kind == "number":
            return Const(float(value))
        if kind == "name":
            if value == "x":
                return X
            if value == "e":
                return Const(math.e, "e")
            if value == "pi":
                return Const(math.pi, "pi")
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(value, arg)
            raise self.error(f"unknown name {value!r}", tok)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(f"unexpected {value or 'end of input'!r}", tok)


def parse(text: str) -> Expression:
    """Parse generator text into an expression tree."""
    return _Parser(text).parse()


parse_generator = parse


# --------------------------------------------------------------------------
# printing

def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


_ADD, _MUL, _POW, _UNARY, _ATOM = range(5)


def _level(e: Expression) -> int:
    if isinstance(e, (Add, Sub)):
        return _ADD
    if isinstance(e, (Mul, Div)):
        return _MUL
    if isinstance(e, Pow):
        return _POW
    if isinstance(e, Neg) or (isinstance(e, Const) and e.name is None and e.value < 0):
        return _UNARY
    return _ATOM


def _wrap(e: Expression, min_level: int) -> str:
    s = to_text(e)
    return s if _level(e) >= min_level else f"({s})"


def to_text(e: Expression) -> str:
    """Render ``e`` in the grammar accepted by :func:`parse`."""
    if isinstance(e, Const):
        return e.name if e.name else _num(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Neg):
        # "-3" would read back as the literal -3, not Neg(3)
        if isinstance(e.arg, Const) and e.arg.name is None and e.arg.value >= 0:
            return f"-({to_text(e.arg)})"
        return "-" + _wrap(e.arg, _UNARY)
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _UNARY)}^{_num(e.exponent)}"
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return _wrap(e.left, _ADD) + op + _wrap(e.right, _MUL)
    if isinstance(e, (Mul, Div)):
        op = " * " if isinstance(e, Mul) else " / "
        return _wrap(e.left, _MUL) + op + _wrap(e.right, _POW)
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# simplifying constructors and differentiation

def _is_const(e: Expression, value: float | None = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _c(v: float) -> Const:
    return Const(float(v) + 0.0)  # +0.0 turns -0.0 into 0.0


def add(a: Expression, b: Expression) -> Expression:
    if _is_const(a) and _is_const(b):
        return _c(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return Add(a, b)


def sub(a: Expression, b: Expression) -> Expression:
    if _is_const(a) and _is_const(b):
        return _c(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if isinstance(b, Neg):
        return add(a, b.arg)
    if a == b:
        return _c(0.0)
    return Sub(a, b)


def neg(a: Expression) -> Expression:
    if _is_const(a):
        return _c(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a: Expression, b: Expression) -> Expression:
    if _is_const(a) and _is_const(b):
        return _c(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _c(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(b, -1.0):
        return neg(a)
    if _is_const(b):
        a, b = b, a
    if _is_const(a) and isinstance(b, Mul) and _is_const(b.left):
        return mul(_c(a.value * b.left.value), b.right)
    return Mul(a, b)


def div(a: Expression, b: Expression) -> Expression:
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return _c(a.value / b.value)
    if _is_const(a, 0.0):
        return _c(0.0)
    if _is_const(b, 1.0):
        return a
    if a == b:
        return _c(1.0)
    return Div(a, b)


def power(base: Expression, k: float) -> Expression:
    if k == 0.0:
        return _c(1.0)
    if k == 1.0:
        return base
    if _is_const(base) and base.value > 0:
        return _c(base.value ** k)
    if isinstance(base, Pow):
        return power(base.base, base.exponent * k) if _safe_to_merge(base.exponent, k) else Pow(base, k)
    return Pow(base, k)


def _safe_to_merge(inner: float, outer: float) -> bool:
    # (b^m)^k = b^(mk) is only an identity when b^m stays defined for b < 0
    return inner == int(inner) and outer == int(outer)


def differentiate(e: Expression) -> Expression:
    """Symbolic d/dx with light simplification (constant folding, 0/1 rules)."""
    if isinstance(e, Const):
        return _c(0.0)
    if isinstance(e, Var):
        return _c(1.0)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, Add):
        return add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(differentiate(u), v), mul(u, differentiate(v)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = differentiate(u), differentiate(v)
        if _is_const(v):
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2.0))
    if isinstance(e, Pow):
        inner = differentiate(e.base)
        return mul(mul(_c(e.exponent), power(e.base, e.exponent - 1.0)), inner)
    if isinstance(e, Func):
        inner = differentiate(e.arg)
        if e.name == "ln":
            outer = div(_c(1.0), e.arg)
        elif e.name == "exp":
            outer = e
        else:  # sqrt
            outer = div(_c(0.5), e)
        return mul(outer, inner)
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# evaluation

def compile_expr(e: Expression) -> Callable:
    """Build a callable evaluating ``e`` on floats or numpy arrays.

    Invalid operations (log of a negative number, 0/0) yield NaN rather
    than raising; callers check finiteness where it matters.
    """
    if isinstance(e, Const):
        v = e.value
        return lambda x: v + 0.0 * x if isinstance(x, np.ndarray) else v
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Neg):
        f = compile_expr(e.arg)
        return lambda x: -f(x)
    if isinstance(e, Pow):
        f = compile_expr(e.base)
        k = e.exponent
        if k == 2.0:
            return lambda x: _sq(f(x))
        return lambda x: np.power(f(x), k)
    if isinstance(e, Func):
        f = compile_expr(e.arg)
        op = {"ln": np.log, "exp": np.exp, "sqrt": np.sqrt}[e.name]
        return lambda x: op(f(x))
    f, g = compile_expr(e.left), compile_expr(e.right)
    if isinstance(e, Add):
        return lambda x: f(x) + g(x)
    if isinstance(e, Sub):
        return lambda x: f(x) - g(x)
    if isinstance(e, Mul):
        return lambda x: f(x) * g(x)
    if isinstance(e, Div):
        return lambda x: np.divide(f(x), g(x))
    raise TypeError(f"not an expression: {e!r}")


def _sq(v):
    return v * v


def evaluate(e: Expression, x):
    with np.errstate(all="ignore"):
        return compile_expr(e)(x)
