import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiv import scalar
from qdiv.errors import DomainError

# 50-digit mpmath values of log((x + y)/2) - log(x)/2 - log(y)/2
DELTA_SQ_1_E2 = 0.4337808304830271870264946849
DELTA_SQ_1_4 = 0.2231435513142097557662950903
DELTA_SQ_1_9 = 0.5108256237659906832055140963

positive = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)


def test_diagonal_is_zero():
    assert scalar.delta_s_sq(1.0, 1.0) == 0.0
    assert scalar.delta_s_sq(3.7, 3.7) == 0.0


def test_frozen_values():
    assert scalar.delta_s_sq(1.0, math.e**2) == pytest.approx(DELTA_SQ_1_E2, rel=1e-14)
    assert scalar.delta_s_sq(1.0, 4.0) == pytest.approx(DELTA_SQ_1_4, rel=1e-14)
    assert scalar.delta_s_sq(1.0, 9.0) == pytest.approx(DELTA_SQ_1_9, rel=1e-14)


def test_near_diagonal_accuracy():
    # r = (x - y)/(x + y), delta^2 = r^2/2 + r^4/4 + ...
    x, y = 1.0, 1.0 + 1e-9
    r = (x - y) / (x + y)
    assert scalar.delta_s_sq(x, y) == pytest.approx(0.5 * r * r, rel=1e-8)


def test_domain():
    with pytest.raises(DomainError):
        scalar.delta_s_sq(0.0, 1.0)
    with pytest.raises(DomainError):
        scalar.delta_s_sq(-1.0, 1.0)
    with pytest.raises(DomainError):
        scalar.delta_s_sq_quadrature(1.0, 2.0, rel_tol=1e-15)


def test_vectorized():
    out = scalar.delta_s_sq(np.array([1.0, 2.0]), 4.0)
    assert out.shape == (2,)


@settings(max_examples=200, deadline=None)
@given(x=positive, y=positive)
def test_symmetry_and_scale_invariance(x, y):
    d = scalar.delta_s_sq(x, y)
    assert d == scalar.delta_s_sq(y, x)
    assert scalar.delta_s_sq(3.0 * x, 3.0 * y) == pytest.approx(d, rel=1e-12, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(x=positive, y=positive, z=positive)
def test_triangle(x, y, z):
    assert scalar.scalar_triangle_check(x, y, z)


@pytest.mark.parametrize("x,y", [(1.0, math.e**2), (1.0, 4.0), (0.01, 300.0), (5.0, 5.000001)])
def test_quadrature_matches_closed_form(x, y):
    res = scalar.delta_s_sq_quad(x, y, rel_tol=1e-10)
    exact = scalar.delta_s_sq(x, y)
    assert abs(res.value - exact) <= 1e-9 * exact
    assert res.error >= 0


def test_quadrature_equal_arguments():
    assert scalar.delta_s_sq_quadrature(2.0, 2.0) == 0.0


def test_mpmath_sweep_extreme_ratios(rng):
    import mpmath as mp

    mp.mp.dps = 40
    worst = 0.0
    for _ in range(500):
        x, y = np.exp(rng.uniform(-30, 30, size=2))
        exact = mp.log((mp.mpf(x) + y) / 2) - mp.log(x) / 2 - mp.log(y) / 2
        if exact > 0:
            worst = max(worst, abs(float((scalar.delta_s_sq(x, y) - exact) / exact)))
    assert worst <= 1e-14
