"""Outward-rounded interval arithmetic on doubles.

Each elementary operation first computes the round-to-nearest double, then
checks on which side of the exact result it landed and moves the wrong
endpoint one step with ``nextafter``. The side is decided exactly: by the
TwoSum error term for addition, and by comparing exact rationals for
multiplication, division and square root. Those results are therefore the
tightest double enclosures. ``log`` relies on the platform library being
faithful and pads each endpoint by two ulps, unless ``QDIV_VERIFIED_LOG`` is
set, in which case a rational series with an explicit remainder bound is used.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import CertifyOverflow, DivisionByIntervalContainingZero, DomainError

INF = math.inf
LOG_PAD_ULPS = 2


def _down(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, -INF)
    return x


def _up(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, INF)
    return x


def _finite(*xs):
    for x in xs:
        if not math.isfinite(x):
            raise CertifyOverflow("interval endpoint left the double range")


def _bracket(r: float, exact: Fraction):
    """Tightest ``(lo, hi)`` around ``exact`` given its nearest double ``r``."""
    _finite(r)
    fr = Fraction(r)
    if fr == exact:
        return r, r
    if fr > exact:
        lo, hi = _down(r), r
    else:
        lo, hi = r, _up(r)
    _finite(lo, hi)
    return lo, hi


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with finite double endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("interval endpoints must not be NaN")
        _finite(lo, hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    def contains(self, x) -> bool:
        """Exact containment test; ``x`` may be a float, Fraction or int."""
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        q = Fraction(x)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        if not self.intersects(other):
            raise DomainError(f"disjoint intervals {self} and {other}")
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        return iadd(self, other)

    def __radd__(self, other):
        return iadd(other, self)

    def __sub__(self, other):
        return isub(self, other)

    def __rsub__(self, other):
        return isub(other, self)

    def __mul__(self, other):
        return imul(self, other)

    def __rmul__(self, other):
        return imul(other, self)

    def __truediv__(self, other):
        return idiv(self, other)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def to_hex(self):
        return {"lo": self.lo.hex(), "hi": self.hi.hex()}


def _iv(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, Fraction):
        return interval_from_rational(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return interval_from_rational(Fraction(x))
    return Interval.point(float(x))


def interval_from_rational(q) -> Interval:
    """Tightest double interval containing the rational ``q``.

    Raises
    ------
    CertifyOverflow
        If ``|q|`` is beyond the double range.
    """
    q = Fraction(q)
    try:
        r = q.numerator / q.denominator  # correctly rounded
    except OverflowError:
        raise CertifyOverflow(f"rational {q} exceeds the double range") from None
    lo, hi = _bracket(r, q)
    return Interval(lo, hi)


def _two_sum(a: float, b: float):
    s = a + b
    bp = s - a
    err = (a - (s - bp)) + (b - bp)
    return s, err


def _add_bounds(a: float, b: float):
    s, err = _two_sum(a, b)
    _finite(s)
    if err == 0.0:
        return s, s
    return (s, _up(s)) if err > 0 else (_down(s), s)


def iadd(x, y) -> Interval:
    x, y = _iv(x), _iv(y)
    lo, _ = _add_bounds(x.lo, y.lo)
    _, hi = _add_bounds(x.hi, y.hi)
    return Interval(lo, hi)


def isub(x, y) -> Interval:
    x, y = _iv(x), _iv(y)
    return iadd(x, Interval(-y.hi, -y.lo))


def _mul_bounds(a: float, b: float):
    r = a * b
    if r == 0.0 and a != 0.0 and b != 0.0:
        # underflow to zero: the exact product is a tiny nonzero number
        return (_down(0.0), 0.0) if (a > 0) != (b > 0) else (0.0, _up(0.0))
    return _bracket(r, Fraction(a) * Fraction(b))


def imul(x, y) -> Interval:
    x, y = _iv(x), _iv(y)
    bounds = [_mul_bounds(a, b) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    return Interval(min(b[0] for b in bounds), max(b[1] for b in bounds))


def _div_bounds(a: float, b: float):
    r = a / b
    if r == 0.0 and a != 0.0:
        return (_down(0.0), 0.0) if (a > 0) != (b > 0) else (0.0, _up(0.0))
    return _bracket(r, Fraction(a) / Fraction(b))


def idiv(x, y) -> Interval:
    """``x / y`` for ``0`` not in ``y``."""
    x, y = _iv(x), _iv(y)
    if y.lo <= 0.0 <= y.hi:
        raise DivisionByIntervalContainingZero(f"divisor {y} contains zero")
    bounds = [_div_bounds(a, b) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    return Interval(min(b[0] for b in bounds), max(b[1] for b in bounds))


def _sqrt_bounds(a: float):
    r = math.sqrt(a)
    fr = Fraction(r)
    sq, fa = fr * fr, Fraction(a)
    if sq == fa:
        return r, r
    return (_down(r), r) if sq > fa else (r, _up(r))


def isqrt(x) -> Interval:
    x = _iv(x)
    if x.lo < 0.0:
        raise DomainError(f"sqrt of an interval with negative part {x}")
    return Interval(_sqrt_bounds(x.lo)[0], _sqrt_bounds(x.hi)[1])


# -- logarithm -------------------------------------------------------------------

_LN2_CACHE = {}


def _atanh_series(z: Fraction, rel: Fraction):
    """Rational ``(lo, hi)`` with ``lo <= atanh(z) <= hi`` for ``0 <= |z| <= 1/2``."""
    if z == 0:
        return Fraction(0), Fraction(0)
    z2 = z * z
    term = z
    total = Fraction(0)
    k = 0
    while True:
        total += term / (2 * k + 1)
        term *= z2
        k += 1
        # remainder of the alternating-free series: |z|^(2k+1) / ((2k+1)(1 - z^2))
        bound = abs(term) / ((2 * k + 1) * (1 - z2))
        if bound <= rel * abs(total):
            break
    if z > 0:
        return total, total + bound
    return total - bound, total


def _ln2_bounds():
    if "v" not in _LN2_CACHE:
        lo, hi = _atanh_series(Fraction(1, 3), Fraction(1, 2**80))
        _LN2_CACHE["v"] = (2 * lo, 2 * hi)
    return _LN2_CACHE["v"]


def verified_log_bounds(a: float):
    """Rational enclosure of ``log(a)`` for a positive double, independent of libm."""
    m, e = math.frexp(a)  # a = m 2^e with m in [1/2, 1)
    fm = Fraction(m)
    if fm < Fraction(2, 3):
        fm *= 2
        e -= 1
    # fm in [2/3, 4/3): z = (fm - 1)/(fm + 1) has |z| <= 1/5
    z = (fm - 1) / (fm + 1)
    zlo, zhi = _atanh_series(z, Fraction(1, 2**70))
    l2lo, l2hi = _ln2_bounds()
    if e >= 0:
        return 2 * zlo + e * l2lo, 2 * zhi + e * l2hi
    return 2 * zlo + e * l2hi, 2 * zhi + e * l2lo


def _use_verified_log() -> bool:
    return os.environ.get("QDIV_VERIFIED_LOG", "") not in ("", "0")


def _log_bounds(a: float):
    if a == 1.0:
        return 0.0, 0.0
    if _use_verified_log():
        lo, hi = verified_log_bounds(a)
        return interval_from_rational(lo).lo, interval_from_rational(hi).hi
    r = math.log(a)
    return _down(r, LOG_PAD_ULPS), _up(r, LOG_PAD_ULPS)


def ilog(x) -> Interval:
    x = _iv(x)
    if not x.lo > 0.0:
        raise DomainError(f"log of an interval reaching {x.lo} <= 0")
    return Interval(_log_bounds(x.lo)[0], _log_bounds(x.hi)[1])


# -- eta(x) = x log x ----------------------------------------------------------------

# 1/e and -1/e as enclosures; exp is padded like log
_INV_E = Interval(_down(math.exp(-1.0), LOG_PAD_ULPS), _up(math.exp(-1.0), LOG_PAD_ULPS))


def _eta_point(a: float) -> Interval:
    if a == 0.0:
        return Interval(0.0, 0.0)
    p = Interval.point(a)
    return imul(p, ilog(p))


def ieta(x) -> Interval:
    """Enclosure of ``eta(x) = x log x`` over ``x`` (``eta(0) = 0``).

    ``eta`` decreases on ``[0, 1/e]`` and increases afterwards; an interval
    straddling ``1/e`` gets the minimum ``-1/e`` as its lower endpoint.
    """
    x = _iv(x)
    if x.lo < 0.0:
        raise DomainError(f"eta of an interval with negative part {x}")
    e_lo, e_hi = _eta_point(x.lo), _eta_point(x.hi)
    if x.hi <= _INV_E.lo:
        return Interval(e_hi.lo, e_lo.hi)
    if x.lo >= _INV_E.hi:
        return Interval(e_lo.lo, e_hi.hi)
    return Interval(-_INV_E.hi, max(e_lo.hi, e_hi.hi, -_INV_E.lo))


def isum(items) -> Interval:
    """Left-to-right interval sum (fixed order, hence bitwise reproducible)."""
    total = Interval(0.0, 0.0)
    for it in items:
        total = iadd(total, it)
    return total
