"""Exact and certified scalars.

Rational inputs stay in :class:`fractions.Fraction`.  Anything that needs a
square root becomes a :class:`CertifiedScalar`: a lazily evaluated expression
whose value is enclosed by a dyadic interval at any requested working
precision.  Intervals are integer-backed and rounded outward, so no floating
point hardware is involved and results are bit-reproducible.

Working precision ``p`` means every node is rounded to the absolute grid
``2**-p``.  Refinement re-evaluates the expression at a larger ``p``.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction
from math import isqrt
from typing import Union

DEFAULT_PRECISION = 128
DEFAULT_MAX_PRECISION = 1024

# process-wide working / maximum precision, changed via set_precision()
_settings = {"working": DEFAULT_PRECISION, "max": DEFAULT_MAX_PRECISION}


def _working(p):
    return _settings["working"] if p is None else p


def _maximum(p):
    return _settings["max"] if p is None else p


def set_precision(working: int | None = None, maximum: int | None = None) -> tuple[int, int]:
    """Change the default precisions; returns the previous pair."""
    old = (_settings["working"], _settings["max"])
    if working is not None:
        if working <= 0:
            raise ValueError("precision must be positive")
        _settings["working"] = working
    if maximum is not None:
        if maximum < _settings["working"]:
            raise ValueError("maximum precision below working precision")
        _settings["max"] = maximum
    return old


@contextlib.contextmanager
def precision(working: int | None = None, maximum: int | None = None):
    old = set_precision(working, maximum)
    try:
        yield
    finally:
        _settings["working"], _settings["max"] = old


class SignUndecidable(ArithmeticError):
    """The enclosure still contains zero at the maximal precision."""


class NegativeRadicand(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class _InsufficientPrecision(Exception):
    # internal: raised inside an evaluation when an interval straddles zero
    # where a decided sign is required (divisors, radicands)
    pass


def _floor_shift(x: int, k: int) -> int:
    return x >> k


def _ceil_shift(x: int, k: int) -> int:
    return -((-x) >> k)


def _fraction_to_grid(x: Fraction, p: int) -> tuple[int, int]:
    num = x.numerator << p
    den = x.denominator
    lo = num // den
    hi = -((-num) // den)
    return lo, hi


def _isqrt_ceil(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def _sqrt_fraction_exact(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


class CertifiedScalar:
    """A real number known through refinable interval enclosures.

    ``exact`` holds the rational value when it is known symbolically (for
    instance the square root of a perfect square); it is propagated through
    arithmetic and is the only way a certified value can be proven zero
    besides a degenerate ``[0, 0]`` enclosure.
    """

    __slots__ = ("_op", "_args", "_cache", "exact", "precision_bits", "_nonneg")

    def __init__(self, op, args, exact=None, precision_bits=None):
        self._op = op
        self._args = args
        self._cache: dict[int, tuple[int, int]] = {}
        self.exact = exact
        self.precision_bits = _working(precision_bits)
        self._nonneg = False

    @classmethod
    def from_interval(cls, lower, upper, precision_bits=None):
        """Wrap a fixed rational interval; it cannot be refined further."""
        lower, upper = Fraction(lower), Fraction(upper)
        if lower > upper:
            raise ValueError("empty interval")
        exact = lower if lower == upper else None
        return cls("interval", (lower, upper), exact, precision_bits)

    # -- evaluation -------------------------------------------------------

    def _enclose(self, p: int) -> tuple[int, int]:
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        res = self._compute(p)
        self._cache[p] = res
        return res

    def _compute(self, p: int) -> tuple[int, int]:
        op, args = self._op, self._args
        if self.exact is not None and op != "interval":
            return _fraction_to_grid(self.exact, p)
        if op == "interval":
            lo, _ = _fraction_to_grid(args[0], p)
            _, hi = _fraction_to_grid(args[1], p)
            return lo, hi
        if op == "neg":
            lo, hi = _operand(args[0], p)
            return -hi, -lo
        if op == "add":
            a, b = _operand(args[0], p), _operand(args[1], p)
            return a[0] + b[0], a[1] + b[1]
        if op == "sub":
            a, b = _operand(args[0], p), _operand(args[1], p)
            return a[0] - b[1], a[1] - b[0]
        if op == "sq":
            lo, hi = _operand(args[0], p)
            if lo >= 0:
                c = (lo * lo, hi * hi)
            elif hi <= 0:
                c = (hi * hi, lo * lo)
            else:
                c = (0, max(lo * lo, hi * hi))
            return _floor_shift(c[0], p), _ceil_shift(c[1], p)
        if op == "mul":
            a, b = _operand(args[0], p), _operand(args[1], p)
            prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
            return _floor_shift(min(prods), p), _ceil_shift(max(prods), p)
        if op == "div":
            a, b = _operand(args[0], p), _operand(args[1], p)
            if b[0] <= 0 <= b[1]:
                raise _InsufficientPrecision
            los, his = [], []
            for x in a:
                for y in b:
                    n = x << p
                    los.append(n // y)
                    his.append(-((-n) // y))
            return min(los), max(his)
        if op == "sqrt":
            lo, hi = _operand(args[0], p)
            if hi < 0:
                raise NegativeRadicand("radicand is certified negative")
            if lo < 0:
                if not self._nonneg:
                    raise _InsufficientPrecision
                lo = 0
            return isqrt(lo << p), _isqrt_ceil(hi << p)
        raise AssertionError(op)

    def enclosure(self, precision_bits: int | None = None,
                  max_precision_bits: int | None = None) -> tuple[Fraction, Fraction]:
        """Interval of width at most ``2**-precision_bits`` containing the value."""
        target = self.precision_bits if precision_bits is None else precision_bits
        max_precision_bits = max(_maximum(max_precision_bits), target + 8)
        if self.exact is not None:
            return self.exact, self.exact
        p = target + 8
        while True:
            try:
                lo, hi = self._enclose(p)
            except _InsufficientPrecision:
                lo, hi = None, None
            if lo is not None and (hi - lo) << target <= (1 << p):
                return Fraction(lo, 1 << p), Fraction(hi, 1 << p)
            if self._op == "interval":
                if lo is None:
                    raise SignUndecidable("fixed interval cannot be refined")
                return Fraction(lo, 1 << p), Fraction(hi, 1 << p)
            if p >= max_precision_bits:
                if lo is None:
                    raise SignUndecidable(
                        f"enclosure undecided at {max_precision_bits} bits")
                raise SignUndecidable(
                    f"width target 2^-{target} not reached at {max_precision_bits} bits")
            p = min(2 * p, max_precision_bits)

    @property
    def lower(self) -> Fraction:
        return self.enclosure()[0]

    @property
    def upper(self) -> Fraction:
        return self.enclosure()[1]

    def width_log2(self, precision_bits: int | None = None) -> float | None:
        """log2 of the enclosure width, or None for a point enclosure."""
        lo, hi = self.enclosure(precision_bits)
        w = hi - lo
        if w == 0:
            return None
        return (w.numerator.bit_length() - w.denominator.bit_length())

    def contains(self, x) -> bool:
        lo, hi = self.enclosure()
        return lo <= Fraction(x) <= hi

    def midpoint(self, precision_bits: int | None = None) -> Fraction:
        lo, hi = self.enclosure(precision_bits)
        return (lo + hi) / 2

    def __float__(self) -> float:
        return float(self.midpoint(64))

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"CertifiedScalar(exact={self.exact})"
        lo, hi = self.enclosure(64)
        return f"CertifiedScalar([{float(lo)!r}, {float(hi)!r}])"

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return _node("neg", (self,), _exact_of(self), lambda e: -e)

    def __pos__(self):
        return self

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return Fraction(1)
        if n == 2:
            return mul(self, self)
        half = self ** (n // 2)
        res = mul(half, half)
        return mul(res, self) if n % 2 else res


Scalar = Union[Fraction, CertifiedScalar]

_RATIONAL = (int, Fraction)


def _operand(x, p: int) -> tuple[int, int]:
    if isinstance(x, CertifiedScalar):
        return x._enclose(p)
    return _fraction_to_grid(Fraction(x), p)


def _exact_of(x):
    if isinstance(x, CertifiedScalar):
        return x.exact
    return Fraction(x)


def _node(op, args, exact_arg, fn, exact_arg2=None, binary=False):
    prec = max((a.precision_bits for a in args if isinstance(a, CertifiedScalar)),
               default=_settings["working"])
    exact = None
    if binary:
        if exact_arg is not None and exact_arg2 is not None:
            exact = fn(exact_arg, exact_arg2)
    elif exact_arg is not None:
        exact = fn(exact_arg)
    return CertifiedScalar(op, args, exact, prec)


def _check(x):
    if not isinstance(x, (CertifiedScalar,) + _RATIONAL):
        raise TypeError(f"unsupported scalar type {type(x).__name__}")


def add(x, y):
    _check(x), _check(y)
    if isinstance(x, _RATIONAL) and isinstance(y, _RATIONAL):
        return Fraction(x) + Fraction(y)
    return _node("add", (x, y), _exact_of(x), lambda a, b: a + b, _exact_of(y), True)


def sub(x, y):
    _check(x), _check(y)
    if isinstance(x, _RATIONAL) and isinstance(y, _RATIONAL):
        return Fraction(x) - Fraction(y)
    if x is y:
        # symbolic cancellation of a shared subexpression
        return _node("sub", (x, y), Fraction(0), lambda a: a)
    return _node("sub", (x, y), _exact_of(x), lambda a, b: a - b, _exact_of(y), True)


def mul(x, y):
    _check(x), _check(y)
    if isinstance(x, _RATIONAL) and isinstance(y, _RATIONAL):
        return Fraction(x) * Fraction(y)
    for a, b in ((x, y), (y, x)):
        if isinstance(a, _RATIONAL) and a == 0:
            return _node("mul", (a, b), Fraction(0), lambda e: e)
    if x is y:
        return _node("sq", (x,), _exact_of(x), lambda a: a * a)
    return _node("mul", (x, y), _exact_of(x), lambda a, b: a * b, _exact_of(y), True)


def div(x, y):
    _check(x), _check(y)
    if isinstance(y, _RATIONAL):
        if y == 0:
            raise DivisionByZero("division by exact zero")
        if isinstance(x, _RATIONAL):
            return Fraction(x) / Fraction(y)
    elif certified_sign(y) == 0:
        raise DivisionByZero("divisor is provably zero")
    return _node("div", (x, y), _exact_of(x), lambda a, b: a / b, _exact_of(y), True)


def sqrt(x, precision_bits: int | None = None,
         max_precision_bits: int | None = None) -> CertifiedScalar:
    """Certified square root; the radicand must be certified non-negative."""
    _check(x)
    precision_bits = _working(precision_bits)
    sgn = certified_sign(x, max_precision_bits)
    if sgn < 0:
        raise NegativeRadicand("radicand is certified negative")
    ex = _exact_of(x)
    root = _sqrt_fraction_exact(ex) if ex is not None else None
    node = CertifiedScalar("sqrt", (x,), root, precision_bits)
    node._nonneg = True
    if sgn == 0:
        node.exact = Fraction(0)
    return node


def certified_sign(x, max_precision_bits: int | None = None) -> int:
    """Sign of ``x``; zero is only returned when it is provable.

    Raises :class:`SignUndecidable` when the enclosure still straddles zero at
    ``max_precision_bits``.
    """
    if isinstance(x, _RATIONAL):
        return (x > 0) - (x < 0)
    if not isinstance(x, CertifiedScalar):
        raise TypeError(f"unsupported scalar type {type(x).__name__}")
    if x.exact is not None:
        return (x.exact > 0) - (x.exact < 0)
    if x._op == "interval":
        lo, hi = x._args
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if lo == hi == 0:
            return 0
        raise SignUndecidable("fixed interval straddles zero")
    max_precision_bits = _maximum(max_precision_bits)
    p = min(x.precision_bits, max_precision_bits)
    while True:
        try:
            lo, hi = x._enclose(p)
        except _InsufficientPrecision:
            lo, hi = -1, 1
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if lo == hi == 0:
            return 0
        if p >= max_precision_bits:
            raise SignUndecidable(f"sign undecided at {max_precision_bits} bits")
        p = min(2 * p, max_precision_bits)


def is_exact(x) -> bool:
    return isinstance(x, _RATIONAL) or (isinstance(x, CertifiedScalar) and x.exact is not None)


def exact_value(x) -> Fraction:
    """The rational value of an exact scalar; raises TypeError otherwise."""
    if isinstance(x, _RATIONAL):
        return Fraction(x)
    if isinstance(x, CertifiedScalar) and x.exact is not None:
        return x.exact
    raise TypeError("scalar is not exact")


def enclosure(x, precision_bits: int | None = None) -> tuple[Fraction, Fraction]:
    if isinstance(x, _RATIONAL):
        return Fraction(x), Fraction(x)
    return x.enclosure(precision_bits)


def within(x, tol) -> bool:
    """True if ``|x| <= tol`` is certified (exactly for rationals)."""
    if is_exact(x):
        return abs(exact_value(x)) <= tol
    lo, hi = x.enclosure()
    return -tol <= lo and hi <= tol


def to_fraction_approx(x, precision_bits: int | None = None) -> Fraction:
    if is_exact(x):
        return exact_value(x)
    return x.midpoint(precision_bits)


def parse_scalar(text) -> Fraction:
    """Parse "p/q", integers and decimal strings into an exact Fraction."""
    if isinstance(text, _RATIONAL):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass 'p/q' or decimal strings")
    return Fraction(str(text).strip())


def format_scalar(x, digits: int = 17) -> dict | str:
    """Exact values as "p/q" strings, certified ones as decimal + width."""
    if is_exact(x):
        v = exact_value(x)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return {"value": decimal_string(x.midpoint(), digits), "width_log2": x.width_log2()}


def decimal_string(v: Fraction, digits: int = 17) -> str:
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(v.numerator) / Decimal(v.denominator)
    return format(d, "g") if abs(d) < Decimal(10) ** 21 else str(d)
