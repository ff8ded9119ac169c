"""Interval reals: closed intervals with binary64 bounds.

Arithmetic computes each candidate bound exactly (as a Fraction) whenever
the operands are finite and then rounds the lower bound down and the upper
bound up, so every result encloses the exact pointwise image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf


class IntervalDomainError(ArithmeticError):
    """Raised for operations outside the domain (maps to DomainError)."""


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise IntervalDomainError(f"invalid interval [{self.lo}; {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


def point(x: float) -> Interval:
    return Interval(float(x), float(x))


# ---------------------------------------------------------------- rounding


def _down(q: Fraction) -> float:
    try:
        f = float(q)
    except OverflowError:
        return -INF if q < 0 else math.nextafter(INF, 0)
    if math.isinf(f):
        return f if f < 0 else math.nextafter(INF, 0)
    if Fraction(f) > q:
        f = math.nextafter(f, -INF)
    return f


def _up(q: Fraction) -> float:
    try:
        f = float(q)
    except OverflowError:
        return INF if q > 0 else math.nextafter(-INF, 0)
    if math.isinf(f):
        return f if f > 0 else math.nextafter(-INF, 0)
    if Fraction(f) < q:
        f = math.nextafter(f, INF)
    return f


def _finite(*xs: float) -> bool:
    return all(math.isfinite(x) for x in xs)


def _from_exact(values) -> Interval:
    return Interval(_down(min(values)), _up(max(values)))


def _widen(lo: float, hi: float) -> Interval:
    if math.isnan(lo) or math.isnan(hi):
        raise IntervalDomainError("undefined interval operation")
    return Interval(math.nextafter(lo, -INF) if math.isfinite(lo) else lo,
                    math.nextafter(hi, INF) if math.isfinite(hi) else hi)


# ---------------------------------------------------------------- construction


def from_literal(text: str) -> Interval:
    """A real literal denotes the binary64 point nearest to its decimal value."""
    q = Fraction(text)
    try:
        f = float(q)
    except OverflowError:
        raise IntervalDomainError(f"real literal {text} out of range") from None
    if math.isinf(f):
        raise IntervalDomainError(f"real literal {text} out of range")
    return point(f)


def hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def from_int(n: int) -> Interval:
    q = Fraction(n)
    try:
        f = float(n)
    except OverflowError:
        raise IntervalDomainError("integer too large for a real") from None
    if Fraction(f) == q:
        return point(f)
    lo, hi = _down(q), _up(q)
    if math.isinf(lo) or math.isinf(hi):
        raise IntervalDomainError("integer too large for a real")
    return Interval(lo, hi)


def to_int(r: Interval) -> int:
    """Truncate the midpoint toward zero."""
    if not _finite(r.lo, r.hi):
        raise IntervalDomainError("cannot convert an unbounded real to an integer")
    mid = (Fraction(r.lo) + Fraction(r.hi)) / 2
    return int(mid)


def auto_to_int(r: Interval) -> int | None:
    """The automatic conversion only applies to points with an integral value."""
    if r.is_point and math.isfinite(r.lo) and r.lo == math.floor(r.lo):
        return int(r.lo)
    return None


# ---------------------------------------------------------------- arithmetic


def neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def add(a: Interval, b: Interval) -> Interval:
    if _finite(a.lo, a.hi, b.lo, b.hi):
        return Interval(_down(Fraction(a.lo) + Fraction(b.lo)), _up(Fraction(a.hi) + Fraction(b.hi)))
    return _widen(a.lo + b.lo, a.hi + b.hi)


def sub(a: Interval, b: Interval) -> Interval:
    return add(a, neg(b))


def mul(a: Interval, b: Interval) -> Interval:
    if _finite(a.lo, a.hi, b.lo, b.hi):
        xs = (Fraction(a.lo), Fraction(a.hi))
        ys = (Fraction(b.lo), Fraction(b.hi))
        return _from_exact([x * y for x in xs for y in ys])
    prods = []
    for x in (a.lo, a.hi):
        for y in (b.lo, b.hi):
            p = x * y
            prods.append(0.0 if math.isnan(p) else p)
    return _widen(min(prods), max(prods))


def div(a: Interval, b: Interval) -> Interval:
    if b.lo <= 0 <= b.hi:
        raise IntervalDomainError("division by an interval containing zero")
    if _finite(a.lo, a.hi, b.lo, b.hi):
        xs = (Fraction(a.lo), Fraction(a.hi))
        ys = (Fraction(b.lo), Fraction(b.hi))
        return _from_exact([x / y for x in xs for y in ys])
    quots = [x / y for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    return _widen(min(quots), max(quots))


def pow_int(a: Interval, n: int) -> Interval:
    if n == 0:
        return point(1.0)
    if n < 0:
        if a.lo <= 0 <= a.hi:
            raise IntervalDomainError("negative power of an interval containing zero")
        if not _finite(a.lo, a.hi):
            return div(point(1.0), pow_int(a, -n))
        # exact, so a tiny bound cannot underflow to zero first
        return _from_exact([Fraction(a.lo) ** n, Fraction(a.hi) ** n])
    if not _finite(a.lo, a.hi):
        cands = [a.lo ** n, a.hi ** n]
        if n % 2 == 0 and a.lo <= 0 <= a.hi:
            cands.append(0.0)
        return _widen(min(cands), max(cands))
    lo, hi = Fraction(a.lo), Fraction(a.hi)
    cands = [lo ** n, hi ** n]
    if n % 2 == 0 and lo <= 0 <= hi:
        cands.append(Fraction(0))
    return _from_exact(cands)


def pow(a: Interval, b: Interval) -> Interval:
    ib = auto_to_int(b)
    if ib is not None:
        return pow_int(a, ib)
    if a.lo <= 0:
        raise IntervalDomainError("non-integral power of a non-positive real")
    corners = []
    for x in (a.lo, a.hi):
        for y in (b.lo, b.hi):
            try:
                corners.append(math.pow(x, y))
            except OverflowError:
                corners.append(INF)
    lo, hi = min(corners), max(corners)
    # math.pow is accurate to within an ulp or so; widen twice to stay safe
    lo = math.nextafter(math.nextafter(lo, -INF), -INF) if math.isfinite(lo) else lo
    hi = math.nextafter(math.nextafter(hi, INF), INF) if math.isfinite(hi) else hi
    return Interval(max(lo, 0.0), hi)


# ---------------------------------------------------------------- order


def compare(a: Interval, b: Interval) -> int | None:
    """-1, 0, 1, or None when the two intervals are unrelated."""
    if a.lo == b.lo and a.hi == b.hi:
        return 0
    if a.hi < b.lo:
        return -1
    if b.hi < a.lo:
        return 1
    return None


def leq(a: Interval, b: Interval) -> bool:
    return a.hi < b.lo or (a.lo == b.lo and a.hi == b.hi)


# ---------------------------------------------------------------- text


def format_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def render(r: Interval) -> str:
    if r.is_point:
        return format_float(r.lo)
    return f"[{format_float(r.lo)}; {format_float(r.hi)}]"


def to_decimal_string(r: Interval) -> str:
    return render(r)


def parse_real(text: str) -> Interval:
    """Parse a string into a real (used by string :> real)."""
    s = text.strip()
    if s.startswith("[") and s.endswith("]") and ";" in s:
        lo, hi = s[1:-1].split(";", 1)
        return hull(parse_real(lo), parse_real(hi))
    if s.lower().lstrip("+-") in ("inf", "infinity"):
        return point(float(s))
    try:
        Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise IntervalDomainError(f"not a real: {text!r}") from None
    # nearest point, like literals, so rendered bounds read back unchanged
    return from_literal(s)
