"""Exact arithmetic support for the rate functions.

Naturals are Python ``int`` and positive rationals are
:class:`fractions.Fraction`.  Counterfunctions (``N -> N``) and threshold
functions (positive rationals in, positive rationals out) are small
expression trees so that iterating or composing them never rounds, and so
that they print back as the expression they were parsed from.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidInputError, ResourceCapError


@dataclass(frozen=True)
class Caps:
    """Limits that turn runaway computations into :class:`ResourceCapError`."""

    iterations: int = 10**6
    bits: int = 2**20


DEFAULT_CAPS = Caps()

#: values above this are reported as capped rather than printed in full
DISPLAY_LIMIT = 10**30


def as_nat(v, name="value"):
    if isinstance(v, bool) or int(v) != v or v < 0:
        raise InvalidInputError(f"{name} must be a natural number, got {v!r}")
    return int(v)


def as_pos(v, name="value"):
    """Parse ``v`` (int, Fraction, or ``"num/den"`` string) as a positive rational."""
    try:
        q = Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InvalidInputError(f"{name} is not a rational number: {v!r}") from None
    if q <= 0:
        raise InvalidInputError(f"{name} must be positive, got {q}")
    return q


def bits_of(v):
    if isinstance(v, Fraction):
        return max(v.numerator.bit_length(), v.denominator.bit_length())
    return int(v).bit_length()


def check_bits(v, caps, stage):
    b = bits_of(v)
    if b > caps.bits:
        lb = 2 ** caps.bits if not isinstance(v, Fraction) else None
        raise ResourceCapError(f"{stage}: magnitude of {b} bits exceeds cap of {caps.bits}", stage=stage, lower_bound=lb)
    return v


def format_nat(v):
    """Exact decimal when at most 10^30, else the capped notice."""
    if v > DISPLAY_LIMIT:
        return "≥ 10^30 (capped)"
    return str(v)


def format_pos(q):
    if q.denominator == 1:
        return format_nat(q.numerator)
    if max(q.numerator, q.denominator) > DISPLAY_LIMIT:
        return f"≈ {float(q):.6g} (exact fraction exceeds 10^30 digits limit)"
    return f"{q.numerator}/{q.denominator}"


# -- e^y -----------------------------------------------------------------------

LOG2_E = 1.4426950408889634


def _exp_interval(y, w):
    """Integers ``lo, hi`` with ``lo <= e^y * 2^w <= hi`` for rational ``y > 0``.

    Halves ``y`` until it is at most 1/2, sums the Taylor series with
    directed rounding and a geometric tail bound, then squares back up,
    rounding down for ``lo`` and up for ``hi``.
    """
    s = max(0, math.ceil(math.log2(float(y))) + 1) if y > 0 else 0
    p, q = y.numerator, y.denominator << s  # t = p / q <= 1/2
    one = 1 << w
    lo_term = hi_term = one
    lo = hi = one
    i = 0
    while hi_term > 1:
        i += 1
        lo_term = (lo_term * p) // (q * i)
        hi_term = -((-hi_term * p) // (q * i))
        lo += lo_term
        hi += hi_term
    # t <= 1/2, so the remaining tail is below the last term, i.e. one unit
    hi += 2
    for _ in range(s):
        lo = (lo * lo) >> w
        hi = -((-(hi * hi)) >> w)
    return lo, hi


@lru_cache(maxsize=256)
def exp_floor_bound(y, bits_cap=DEFAULT_CAPS.bits):
    """Certified ``E = floor(e^y) + 1`` for rational ``y >= 0`` (``E = 1`` at 0).

    ``E > e^y`` always holds since ``e^y`` is irrational for rational
    ``y != 0``.  Precision is raised until the enclosing interval pins
    ``floor(e^y)`` down, so ``E - floor(e^y) == 1`` exactly.
    """
    y = Fraction(y)
    if y < 0:
        raise InvalidInputError("exponent must be nonnegative")
    if y == 0:
        return 1
    est_bits = float(y) * LOG2_E
    if est_bits > bits_cap:
        raise ResourceCapError(
            f"e^y with y≈{float(y):.4g} needs ~{est_bits:.3g} bits, cap is {bits_cap}",
            stage="exp bound",
            lower_bound=2 ** bits_cap,
        )
    w = int(est_bits) + max(0, math.ceil(math.log2(float(y)))) + 64
    while True:
        lo, hi = _exp_interval(y, w)
        flo, fhi = lo >> w, hi >> w
        if flo == fhi:
            return fhi + 1
        w *= 2


# -- expressions ---------------------------------------------------------------

class Expr:
    """Node of an expression tree in one variable."""

    def __call__(self, v):
        return self.eval(v)

    def eval(self, v):  # pragma: no cover - abstract
        raise NotImplementedError

    def monotone(self):
        """+1 nondecreasing, -1 nonincreasing, 0 constant, None unknown."""
        return None


def _combine(a, b):
    if a is None or b is None:
        return None
    if a == 0:
        return b
    if b == 0:
        return a
    return a if a == b else None


@dataclass(frozen=True)
class Const(Expr):
    value: object

    def eval(self, v):
        return self.value

    def monotone(self):
        return 0

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var(Expr):
    name: str = "n"

    def eval(self, v):
        return v

    def monotone(self):
        return 1

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def eval(self, v):
        return self.left.eval(v) + self.right.eval(v)

    def monotone(self):
        return _combine(self.left.monotone(), self.right.monotone())

    def __str__(self):
        return f"{self.left}+{self.right}"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def eval(self, v):
        return self.left.eval(v) * self.right.eval(v)

    def monotone(self):
        # operands are nonnegative in both grammars
        return _combine(self.left.monotone(), self.right.monotone())

    def __str__(self):
        return f"{_paren(self.left)}*{_paren(self.right)}"


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def eval(self, v):
        return Fraction(self.left.eval(v)) / self.right.eval(v)

    def monotone(self):
        r = self.right.monotone()
        return _combine(self.left.monotone(), None if r is None else -r)

    def __str__(self):
        return f"{_paren(self.left)}/{_paren(self.right)}"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def eval(self, v):
        return self.base.eval(v) ** self.exponent

    def monotone(self):
        return self.base.monotone()

    def __str__(self):
        return f"{_paren(self.base)}^{self.exponent}"


@dataclass(frozen=True)
class Max(Expr):
    args: tuple

    def eval(self, v):
        return max(a.eval(v) for a in self.args)

    def monotone(self):
        out = 0
        for a in self.args:
            out = _combine(out, a.monotone())
        return out

    def __str__(self):
        return "max(" + ",".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Min(Expr):
    args: tuple

    def eval(self, v):
        return min(a.eval(v) for a in self.args)

    def monotone(self):
        out = 0
        for a in self.args:
            out = _combine(out, a.monotone())
        return out

    def __str__(self):
        return "min(" + ",".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Compose(Expr):
    """``outer(inner(v))``."""

    outer: Expr
    inner: Expr

    def eval(self, v):
        return self.outer.eval(self.inner.eval(v))

    def monotone(self):
        a, b = self.outer.monotone(), self.inner.monotone()
        if a == 0 or b == 0:
            return 0
        if a is None or b is None:
            return None
        return a * b

    def __str__(self):
        return f"compose({self.outer},{self.inner})"


@dataclass(frozen=True)
class Native(Expr):
    """Wraps a Python callable; ``label`` is used for printing."""

    fn: object
    label: str
    direction: int | None = None

    def eval(self, v):
        return self.fn(v)

    def monotone(self):
        return self.direction

    def __str__(self):
        return self.label


def _paren(e):
    return f"({e})" if isinstance(e, (Add, Div)) else str(e)


COUNTER_VARS = ("n",)
THRESHOLD_VARS = ("x", "k", "n", "eta", "xi")


def _build(node, *, exact_int, variables, src):
    rec = lambda n: _build(n, exact_int=exact_int, variables=variables, src=src)  # noqa: E731
    if isinstance(node, ast.Expression):
        return rec(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        if node.value < 0:
            raise InvalidInputError(f"negative literal in {src!r}")
        return Const(node.value if exact_int else Fraction(node.value))
    if isinstance(node, ast.Name) and node.id in variables:
        return Var(node.id)
    if isinstance(node, ast.BinOp):
        op = type(node.op)
        if op is ast.Add:
            return Add(rec(node.left), rec(node.right))
        if op is ast.Mult:
            return Mul(rec(node.left), rec(node.right))
        if op is ast.Div and not exact_int:
            return Div(rec(node.left), rec(node.right))
        if op is ast.Pow and not exact_int and isinstance(node.right, ast.Constant) and isinstance(node.right.value, int):
            return Pow(rec(node.left), int(node.right.value))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        name, args = node.func.id, [rec(a) for a in node.args]
        if name == "max" and len(args) >= 2:
            return Max(tuple(args))
        if name == "min" and len(args) >= 2 and not exact_int:
            return Min(tuple(args))
        if name == "compose" and len(args) == 2:
            return Compose(args[0], args[1])
    raise InvalidInputError(f"unsupported expression element in {src!r}: {ast.dump(node)[:60]}")


def _parse(src, **kw):
    if not isinstance(src, str):
        raise InvalidInputError(f"expression must be a string, got {src!r}")
    try:
        tree = ast.parse(src.strip().replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise InvalidInputError(f"cannot parse expression {src!r}: {e.msg}") from None
    return _build(tree, src=src, **kw)


def counterfunction(src):
    """Parse a counterfunction ``N -> N``.

    Grammar: integer literals, ``n``, ``a+b``, ``a*b``, ``max(a,b)``,
    ``compose(a,b)``.  Every such function is nondecreasing.
    """
    if isinstance(src, Expr):
        return src
    if isinstance(src, int) and not isinstance(src, bool):
        return Const(as_nat(src))
    if callable(src):
        return Native(src, getattr(src, "__name__", "f"))
    return _parse(str(src), exact_int=True, variables=COUNTER_VARS)


def threshold(src):
    """Parse a threshold function over positive rationals.

    Grammar: the counterfunction grammar over rationals plus ``a/b``,
    ``min(a,b)`` and integer powers ``a^k``; the variable may be written
    ``x``, ``k``, ``n``, ``eta`` or ``xi``.
    """
    if isinstance(src, Expr):
        return src
    if isinstance(src, (int, Fraction)):
        return Const(as_pos(src))
    if callable(src):
        return Native(src, getattr(src, "__name__", "delta"))
    return _parse(str(src), exact_int=False, variables=THRESHOLD_VARS)


def shifted(f, c):
    """``n -> f(n) + c``."""
    return f if c == 0 else Add(f, Const(c))


def iterate(fn, start, times, caps=DEFAULT_CAPS, stage="iterate"):
    """``fn^(times)(start)`` with iteration and magnitude caps."""
    if times > caps.iterations:
        raise ResourceCapError(
            f"{stage}: {times} iterations exceed cap of {caps.iterations}", stage=stage
        )
    v = start
    for _ in range(times):
        v = fn(v)
        check_bits(v, caps, stage)
    return v
