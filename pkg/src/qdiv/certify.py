"""Certified enclosures of quantum Jensen-Shannon quadratic forms.

Points are block-diagonal: an exact rational 2x2 block plus an optional
diagonal tail of nonnegative rationals. ``Tr eta`` of such a point is
``eta(lambda_+) + eta(lambda_-) + sum eta(tail)``, with the 2x2 eigenvalues
from the closed form ``(tr +- sqrt(disc)) / 2``. The trace, the discriminant
and the determinant are computed exactly in rationals and only then turned
into intervals.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import instances
from .errors import CoeffSumNonzero, DomainError, NotPositiveDefinite
from .interval import (
    Interval,
    iadd,
    idiv,
    ieta,
    imul,
    interval_from_rational,
    isqrt,
    isub,
    isum,
)

Rational = Fraction


@dataclass(frozen=True)
class SymMatrix2:
    """Exact ``[[a, b], [b, d]]``."""

    a: Fraction
    b: Fraction
    d: Fraction

    def __post_init__(self):
        for name in ("a", "b", "d"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.b

    @property
    def disc(self) -> Fraction:
        """``tr^2 - 4 det = (a - d)^2 + 4 b^2 >= 0``."""
        return (self.a - self.d) ** 2 + 4 * self.b * self.b

    @property
    def is_pd(self) -> bool:
        return self.a > 0 and self.det > 0

    def __add__(self, other: "SymMatrix2") -> "SymMatrix2":
        return SymMatrix2(self.a + other.a, self.b + other.b, self.d + other.d)

    def scale(self, s) -> "SymMatrix2":
        s = Fraction(s)
        return SymMatrix2(self.a * s, self.b * s, self.d * s)


@dataclass(frozen=True)
class BlockDiag:
    """``block (+) diag(tail)`` with exact rational entries."""

    block: SymMatrix2
    tail: tuple = ()

    def __post_init__(self):
        tail = tuple(Fraction(v) for v in self.tail)
        if any(v < 0 for v in tail):
            raise DomainError("diagonal tail entries must be nonnegative")
        object.__setattr__(self, "tail", tail)

    @property
    def n(self) -> int:
        return 2 + len(self.tail)

    def midpoint(self, other: "BlockDiag") -> "BlockDiag":
        if len(self.tail) != len(other.tail):
            raise DomainError("block-diagonal points of different sizes")
        half = Fraction(1, 2)
        return BlockDiag((self.block + other.block).scale(half),
                         tuple(half * (u + v) for u, v in zip(self.tail, other.tail)))

    def exact_trace(self) -> Fraction:
        return self.block.trace + sum(self.tail, Fraction(0))


def _as_block(p) -> BlockDiag:
    if isinstance(p, BlockDiag):
        return p
    if isinstance(p, SymMatrix2):
        return BlockDiag(p)
    a, b, d = p
    return BlockDiag(SymMatrix2(a, b, d))


def eigvals_2x2_interval(x: SymMatrix2):
    """Enclosures of ``lambda_+`` and ``lambda_-`` of a symmetric 2x2 matrix.

    ``lambda_-`` is the intersection of ``(tr - sqrt(disc)) / 2`` and
    ``det / lambda_+``; the second form avoids cancellation when
    ``lambda_-`` is small.
    """
    tr = interval_from_rational(x.trace)
    s = isqrt(interval_from_rational(x.disc))
    half = Interval.point(0.5)
    lam_plus = imul(iadd(tr, s), half)
    lam_minus = imul(isub(tr, s), half)
    if lam_plus.lo > 0.0:
        alt = idiv(interval_from_rational(x.det), lam_plus)
        if alt.intersects(lam_minus):
            lam_minus = lam_minus.intersect(alt)
    return lam_plus, lam_minus


def tr_eta_2x2_interval(x: SymMatrix2) -> Interval:
    """Enclosure of ``Tr eta(X) = eta(lambda_+) + eta(lambda_-)`` for a PD 2x2 matrix."""
    if not x.is_pd:
        raise NotPositiveDefinite(f"{x} is not positive definite")
    lp, lm = eigvals_2x2_interval(x)
    if not lm.lo > 0.0:
        raise NotPositiveDefinite(f"could not certify lambda_- > 0 for {x}")
    return iadd(ieta(lp), ieta(lm))


def tr_eta_interval(p: BlockDiag) -> Interval:
    parts = [tr_eta_2x2_interval(p.block)]
    parts += [ieta(interval_from_rational(v)) for v in p.tail]
    return isum(parts)


def j_interval(p: BlockDiag, q: BlockDiag, tau_denominator: int,
               cache: Optional[dict] = None) -> Interval:
    """``J(P, Q) = (Tr eta(P) + Tr eta(Q) - 2 Tr eta((P + Q)/2)) / (2 n)`` with ``tau = Tr / n``."""

    def te(x):
        if cache is None:
            return tr_eta_interval(x)
        if x not in cache:
            cache[x] = tr_eta_interval(x)
        return cache[x]

    m = p.midpoint(q)
    num = isub(iadd(te(p), te(q)), imul(Interval.point(2.0), te(m)))
    return idiv(num, interval_from_rational(Fraction(2 * tau_denominator)))


class Quantity(enum.Enum):
    S2 = "S2"
    S3 = "S3"
    CUSTOM = "Custom"


class CertVerdict(enum.Enum):
    PROVED_POSITIVE = "ProvedPositive"
    PROVED_NEGATIVE = "ProvedNegative"
    INCONCLUSIVE = "Inconclusive"


def _frac_json(q: Fraction):
    return {"num": q.numerator, "den": q.denominator}


def _inputs_listing(points: Sequence[BlockDiag], c, tau_denominator: int) -> dict:
    return {
        "points": [
            {"block": [_frac_json(p.block.a), _frac_json(p.block.b), _frac_json(p.block.d)],
             "tail": [_frac_json(v) for v in p.tail]}
            for p in points
        ],
        "c": [_frac_json(Fraction(v)) for v in c],
        "tau_denominator": tau_denominator,
    }


def digest(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class Certificate:
    quantity: Quantity
    enclosure: Interval
    inputs: dict = field(repr=False)
    inputs_digest: str = ""

    @property
    def verdict(self) -> CertVerdict:
        if self.enclosure.lo > 0.0:
            return CertVerdict.PROVED_POSITIVE
        if self.enclosure.hi < 0.0:
            return CertVerdict.PROVED_NEGATIVE
        return CertVerdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity.value,
            "lo": self.enclosure.lo.hex(),
            "hi": self.enclosure.hi.hex(),
            "lo_decimal": repr(self.enclosure.lo),
            "hi_decimal": repr(self.enclosure.hi),
            "verdict": self.verdict.value,
            "inputs": self.inputs,
            "digest": self.inputs_digest,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def certify_quad_form(points, c, tau_denominator: Optional[int] = None,
                      quantity: Quantity = Quantity.CUSTOM) -> Certificate:
    """Enclose ``sum_ij c_i c_j J(P_i, P_j)`` for block-diagonal PD points.

    The diagonal terms are exactly zero and are left out; the off-diagonal
    sum runs over ``i < j`` in a fixed order and is doubled.

    Raises
    ------
    CoeffSumNonzero
        If ``sum c != 0`` in exact arithmetic.
    DomainError
        If a point cannot be certified positive definite, or sizes disagree.
    """
    pts = [_as_block(p) for p in points]
    coeffs = [Fraction(v) for v in c]
    if len(coeffs) != len(pts):
        raise DomainError(f"{len(pts)} points but {len(coeffs)} coefficients")
    if sum(coeffs, Fraction(0)) != 0:
        raise CoeffSumNonzero(f"coefficients sum to {sum(coeffs, Fraction(0))}, not 0")
    if not pts:
        raise DomainError("need at least one point")
    n = pts[0].n
    if any(p.n != n for p in pts):
        raise DomainError("all points must have the same size")
    tau_n = n if tau_denominator is None else int(tau_denominator)
    if tau_n < 1:
        raise DomainError("tau_denominator must be positive")
    cache: dict = {}
    terms = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            w = 2 * coeffs[i] * coeffs[j]
            if w == 0:
                continue
            terms.append(imul(interval_from_rational(w), j_interval(pts[i], pts[j], tau_n, cache)))
    enclosure = isum(terms)
    inputs = _inputs_listing(pts, coeffs, tau_n)
    return Certificate(quantity, enclosure, inputs, digest(inputs))


def s2_points():
    return [BlockDiag(SymMatrix2(a, b, d)) for a, b, d in instances.ENTRIES]


def s3_points(T: int = instances.TRACE_BUDGET):
    return [BlockDiag(SymMatrix2(*blk), (tail,)) for blk, tail in instances.density_blocks(T)]


def certify_S2() -> Certificate:
    return certify_quad_form(s2_points(), instances.COEFFS, 2, Quantity.S2)


def certify_S3(T: int = instances.TRACE_BUDGET) -> Certificate:
    return certify_quad_form(s3_points(T), instances.COEFFS, 3, Quantity.S3)
