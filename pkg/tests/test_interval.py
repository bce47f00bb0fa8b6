import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiv import interval as iv
from qdiv.errors import CertifyOverflow, DivisionByIntervalContainingZero, DomainError
from qdiv.interval import Interval

from oracles import fuzz, mpf_to_fraction


def ulp(x):
    return math.ulp(x)


def test_construction():
    with pytest.raises(DomainError):
        Interval(2.0, 1.0)
    with pytest.raises(CertifyOverflow):
        Interval(0.0, math.inf)
    with pytest.raises(DomainError):
        Interval(math.nan, 1.0)


def test_from_rational():
    assert iv.interval_from_rational(Fraction(1, 2)) == Interval(0.5, 0.5)
    for q in (Fraction(1, 40), Fraction(37, 40), Fraction(-1, 3)):
        x = iv.interval_from_rational(q)
        assert x.contains(q) and x.lo < x.hi
        assert x.hi == math.nextafter(x.lo, math.inf)
    with pytest.raises(CertifyOverflow):
        iv.interval_from_rational(Fraction(10**400))


def test_elementary_examples():
    assert iv.iadd(Interval(1, 1), Interval(2, 2)) == Interval(3, 3)
    assert iv.imul(Interval(1, 2), Interval(-1, 3)) == Interval(-2, 6)
    third = iv.idiv(Interval(1, 1), Interval(3, 3))
    assert third.contains(Fraction(1, 3)) and third.width <= 2 * ulp(1 / 3)
    with pytest.raises(DivisionByIntervalContainingZero):
        iv.idiv(Interval(1, 1), Interval(-1, 1))


def test_sqrt_and_log():
    assert iv.isqrt(Interval(4, 4)) == Interval(2, 2)
    s29 = iv.isqrt(Interval(29, 29))
    with mp.workprec(200):
        assert s29.contains(mpf_to_fraction(mp.sqrt(29)))
    assert s29.width <= ulp(5.4)
    assert iv.ilog(Interval(1, 1)) == Interval(0.0, 0.0)
    lg = iv.ilog(Interval(2, 2))
    assert lg.width <= 4 * ulp(math.log(2))
    with pytest.raises(DomainError):
        iv.ilog(Interval(0.0, 1.0))
    with pytest.raises(DomainError):
        iv.isqrt(Interval(-1.0, 1.0))


def test_overflow():
    big = Interval(1e308, 1e308)
    with pytest.raises(CertifyOverflow):
        iv.iadd(big, big)
    with pytest.raises(CertifyOverflow):
        iv.imul(big, Interval(10.0, 10.0))


def test_underflow_keeps_sign_information():
    tiny = Interval(1e-200, 1e-200)
    p = iv.imul(tiny, tiny)
    assert p.lo == 0.0 and p.hi > 0.0


def test_eta_grid_straddling_inverse_e():
    with mp.workprec(200):
        inv_e = mp.e ** -1
        for k in range(-20, 21):
            x = float(inv_e) + k * 1e-3
            lo_x, hi_x = x - 2e-3, x + 2e-3
            enc = iv.ieta(Interval(max(lo_x, 0.0), hi_x))
            for p in np.linspace(max(lo_x, 0.0), hi_x, 17):
                pm = mp.mpf(float(p))
                val = pm * mp.log(pm) if p > 0 else mp.mpf(0)
                assert enc.contains(mpf_to_fraction(val))
        # interval containing 1/e must reach down to -1/e
        enc = iv.ieta(Interval(0.3, 0.4))
        assert enc.lo <= float(-inv_e) and enc.contains(mpf_to_fraction(-inv_e))


def test_eta_at_zero():
    assert iv.ieta(Interval(0.0, 0.0)) == Interval(0.0, 0.0)


@settings(max_examples=300, deadline=None)
@given(a=st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6),
       b=st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6))
def test_tightness_of_basic_ops(a, b):
    x, y = iv.interval_from_rational(a), iv.interval_from_rational(b)
    s = iv.iadd(x, y)
    assert s.contains(a + b)
    p = iv.imul(x, y)
    assert p.contains(a * b)
    # single op adds at most 2 ulps per endpoint beyond the input widths
    assert s.width <= x.width + y.width + 2 * ulp(max(abs(s.lo), abs(s.hi)))


def test_verified_log_bounds():
    with mp.workprec(300):
        for a in (1e-300, 0.1, 0.5, 0.999999, 1.5, 2.0, 1e10, 1.7e308):
            lo, hi = iv.verified_log_bounds(a)
            ref = mpf_to_fraction(mp.log(mp.mpf(a)))
            assert lo <= ref <= hi
            assert float(hi - lo) <= 1e-18 * max(1.0, abs(float(ref)))


def test_verified_log_switch(monkeypatch):
    monkeypatch.setenv("QDIV_VERIFIED_LOG", "1")
    x = iv.ilog(Interval(3.0, 3.0))
    assert x.contains(Fraction(math.log(3.0))) or x.width <= 2 * ulp(1.1)
    with mp.workprec(200):
        assert x.contains(mpf_to_fraction(mp.log(3)))


def test_fuzz_sample(rng):
    failures, first = fuzz(rng, 5000)
    assert failures == 0, first
