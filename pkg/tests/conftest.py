import math
import random

import pytest

from hardy_means.expression import FUNCTIONS, Add, Const, Div, Func, Mul, Neg, Pow, Sub, X


def random_ast(rng: random.Random, depth: int):
    """Unsimplified expression tree of depth at most ``depth``."""
    if depth <= 1 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.5:
            return X
        if r < 0.6:
            return Const(math.e, "e") if rng.random() < 0.5 else Const(math.pi, "pi")
        return Const(rng.choice([rng.randint(-9, 9), round(rng.uniform(-5, 5), 3), rng.uniform(0, 1)]))
    kind = rng.choice(["neg", "add", "sub", "mul", "div", "pow", "func"])
    sub_ = lambda: random_ast(rng, depth - 1)
    if kind == "neg":
        return Neg(sub_())
    if kind == "pow":
        return Pow(sub_(), rng.choice([2.0, 3.0, -1.0, 0.5, -2.5, 1.25]))
    if kind == "func":
        return Func(rng.choice(FUNCTIONS), sub_())
    return {"add": Add, "sub": Sub, "mul": Mul, "div": Div}[kind](sub_(), sub_())


@pytest.fixture
def ast_rng():
    return random.Random(20240611)


def mp_eval(e, x):
    """Evaluate at mpmath precision; None where the value is undefined or complex."""
    import mpmath

    def go(e):
        if isinstance(e, Const):
            return mpmath.e if e.name == "e" else mpmath.pi if e.name == "pi" else mpmath.mpf(e.value)
        if e is X or type(e) is type(X):
            return x
        if isinstance(e, Neg):
            return -go(e.arg)
        if isinstance(e, Func):
            a = go(e.arg)
            if e.name != "exp" and a <= 0 and not (e.name == "sqrt" and a == 0):
                raise ValueError
            return {"ln": mpmath.log, "exp": mpmath.exp, "sqrt": mpmath.sqrt}[e.name](a)
        if isinstance(e, Pow):
            b = go(e.base)
            if b < 0 and e.exponent != int(e.exponent) or b == 0 and e.exponent < 0:
                raise ValueError
            return mpmath.power(b, mpmath.mpf(e.exponent))
        a, b = go(e.left), go(e.right)
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        if b == 0:
            raise ValueError
        return a / b

    try:
        v = go(e)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    return v if isinstance(v, mpmath.mpf) and mpmath.isfinite(v) else None


def five_point(e, x, h):
    """Fourth-order central difference with step h; None if any sample is undefined."""
    v = [mp_eval(e, x + k * h) for k in (-2, -1, 1, 2)]
    if None in v:
        return None
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
