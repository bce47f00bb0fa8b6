import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiv import divergence as dv
from qdiv import scalar
from qdiv.divergence import GeneratorKind, JensenGenerator
from qdiv.errors import DimensionMismatch, DomainError, InvalidGenerator, NotPositiveDefinite
from qdiv.linalg import HermitianMatrix, norm_tau
from qdiv.sampling import random_invertible, random_pd, random_psd

X = [np.array(m, dtype=float) for m in
     ([[2, 1], [1, 1]], [[9, 2], [2, 1]], [[2, 1], [1, 7]], [[8, 5], [5, 8]], [[8, 8], [8, 9]])]

# 50-digit mpmath values from the closed-form 2x2 eigenvalues
D_TAU_SQ_X1_X4 = 0.38545443118978027552206862503
D_TAU_SQ_X2_X3 = 0.44797992819965616000567895558
QJSD_X1_X2 = 0.63172622344723861819830674410


def test_frozen_d_tau_values():
    assert dv.d_tau_sq(X[0], X[3]).squared == pytest.approx(D_TAU_SQ_X1_X4, rel=1e-13)
    assert dv.d_tau_sq(X[1], X[2]).squared == pytest.approx(D_TAU_SQ_X2_X3, rel=1e-13)


def test_frozen_qjsd_value():
    assert dv.qjsd(X[0], X[1]).squared == pytest.approx(QJSD_X1_X2, rel=1e-13)


def test_identity_against_diag_e2():
    # d_tau(I, diag(1, e^2))^2 = delta_s(1, e^2)^2 / 2
    v = dv.d_tau_sq(np.eye(2), np.diag([1.0, math.e**2]))
    assert v.squared == pytest.approx(0.5 * scalar.delta_s_sq(1.0, math.e**2), rel=1e-14)


def test_one_by_one_routes_to_scalar():
    assert dv.d_tau_sq([[1.0]], [[4.0]]).squared == scalar.delta_s_sq(1.0, 4.0)


def test_orthogonal_pure_states():
    v = dv.qjsd(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert v.squared == pytest.approx(math.log(2) / 2, rel=1e-15)


def test_errors():
    with pytest.raises(NotPositiveDefinite):
        dv.d_tau_sq(np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(DimensionMismatch):
        dv.d_tau_sq(np.eye(2), np.eye(3))
    with pytest.raises(DomainError):
        dv.qjsd(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(DomainError):
        dv.d_tau_shifted_sq(np.eye(2), np.eye(2), 0.0)


def test_divergence_value_clamps_roundoff_only():
    assert dv.DivergenceValue.from_squared(-1e-15, 2).squared == 0.0
    with pytest.raises(Exception):
        dv.DivergenceValue.from_squared(-1e-3, 2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_congruence_and_scaling(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_pd(n, rng), random_pd(n, rng)
    s = random_invertible(n, rng)
    ref = dv.d_tau(a, b)
    sa = HermitianMatrix(s.conj().T @ a.array @ s)
    sb = HermitianMatrix(s.conj().T @ b.array @ s)
    assert abs(dv.d_tau(sa, sb) - ref) <= 1e-8 * (1 + ref)
    for c in (1e-3, 1.0, 1e3):
        assert abs(dv.d_tau_sq(a * c, b * c).squared - ref**2) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_qjsd_homogeneity(seed, n):
    rng = np.random.default_rng(seed)
    a = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
    b = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
    j = dv.qjsd(a, b).squared
    assert dv.qjsd(a * 7.0, b * 7.0).squared == pytest.approx(7.0 * j, rel=1e-10, abs=1e-13)


def test_qjsd_shifted_large_t_is_stable(rng):
    a, b = random_psd(3, rng), random_psd(3, rng)
    # J(A + t, B + t) ~ C / t with C > 0, never negative or noisy
    vals = [dv.qjsd_shifted(a, b, t).squared for t in (1e2, 1e4, 1e6, 1e8)]
    ratios = [v * t for v, t in zip(vals, (1e2, 1e4, 1e6, 1e8))]
    assert all(v > 0 for v in vals)
    assert ratios[-1] == pytest.approx(ratios[-2], rel=1e-5)


def test_integral_representation(rng):
    for _ in range(8):
        n = int(rng.integers(1, 5))
        a = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
        b = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
        ref = dv.qjsd(a, b).squared
        val = dv.qjsd_by_integral(a, b)
        assert abs(val - ref) <= 1e-6 * ref


def test_integral_orthogonal_pure_states():
    val = dv.qjsd_by_integral(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert val == pytest.approx(math.log(2) / 2, rel=1e-8)


def test_integral_report_fields():
    rep = dv.qjsd_integral_report(X[0], X[1])
    assert rep.value == pytest.approx(QJSD_X1_X2, rel=1e-7)
    assert rep.error_bound >= 0
    assert 0 < rep.split < rep.t_max
    # d_tau_t^2 decays like t^-p with p = 2
    assert rep.decay_exponent == pytest.approx(2.0, abs=0.05)


def test_generator_validation():
    with pytest.raises(InvalidGenerator):
        JensenGenerator.custom(0.0, ())
    with pytest.raises(InvalidGenerator):
        JensenGenerator.custom(-1.0, ())
    with pytest.raises(InvalidGenerator):
        JensenGenerator.custom(0.0, ((0.0, 1.0),))
    assert JensenGenerator.neg_log_shifted(2.0).nu_atoms == ((2.0, 0.5),)
    assert JensenGenerator.eta().kind is GeneratorKind.ETA


def test_jensen_square_is_quarter_norm(rng):
    a, b = random_psd(3, rng), random_psd(3, rng)
    v = dv.jensen_f(a, b, JensenGenerator.square())
    assert v.squared == pytest.approx(0.25 * norm_tau(a.array - b.array) ** 2, rel=1e-13)


def test_jensen_eta_routes_to_qjsd():
    assert dv.jensen_f(X[0], X[1], JensenGenerator.eta()).squared == dv.qjsd(X[0], X[1]).squared


def test_fk_determinant():
    assert dv.fk_determinant(X[3]) == pytest.approx(math.sqrt(39), rel=1e-14)


def test_metric_suite_random_points(rng):
    pts = [random_pd(3, rng) for _ in range(6)]
    rep = dv.metric_suite(pts, "sdiv", rng=rng, n_congruence=5)
    assert rep.ok, rep.to_dict()
    assert rep.n_triples == 216
    psd = [random_psd(3, rng, rank=2) for _ in range(5)]
    assert dv.metric_suite(psd, "qjsd").ok


def test_pairwise_table_symmetric():
    sq, rt = dv.pairwise_table(X, "qjsd")
    assert np.array_equal(sq, sq.T)
    assert np.all(np.diag(sq) == 0)
    np.testing.assert_allclose(rt**2, sq, rtol=1e-15)
