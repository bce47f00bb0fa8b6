
import numpy as np
import pytest

from qdiv import instances, kernel, scalar
from qdiv.divergence import qjsd
from qdiv.errors import CoeffSumNonzero, DimensionError, InvalidKernel, NotCnd, ParseError, TraceBudgetError
from qdiv.kernel import KernelConfig, Verdict

# sum_ij c_i c_j J(X_i, X_j) at 50 digits (mpmath, closed-form 2x2 spectra)
S2_ORACLE = 9.8113517061951741139679870532
S3_ORACLE = 0.16012057450648454929858066638


def euclid_kernel(p):
    return np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)


@pytest.fixture
def s2_kernel():
    return kernel.build_divergence_kernel(instances.matrices(), "qjsd")


def test_config_validation():
    with pytest.raises(InvalidKernel):
        KernelConfig(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(InvalidKernel):
        KernelConfig(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(InvalidKernel):
        KernelConfig(np.zeros((2, 3)))
    with pytest.raises(CoeffSumNonzero):
        KernelConfig(np.zeros((2, 2)), coeffs=[1.0, 1.0])


def test_quad_form(s2_kernel):
    assert kernel.quad_form(s2_kernel, np.zeros(5)) == 0.0
    assert kernel.quad_form(s2_kernel, instances.COEFFS) == pytest.approx(S2_ORACLE, rel=1e-12)
    with pytest.raises(CoeffSumNonzero):
        kernel.quad_form(s2_kernel, [1, 0, 0, 0, 0])


def test_s3_quad_form():
    cfg = kernel.build_divergence_kernel(instances.densities(), "qjsd")
    assert kernel.quad_form(cfg, instances.COEFFS) == pytest.approx(S3_ORACLE, rel=1e-10)


def test_hyperplane_basis():
    for m in range(2, 8):
        q = kernel.hyperplane_basis(m)
        np.testing.assert_allclose(q.T @ q, np.eye(m - 1), atol=1e-15)
        np.testing.assert_allclose(q.sum(axis=0), 0.0, atol=1e-15)


def test_euclidean_is_cnd(rng):
    for m in (3, 5, 9):
        k = euclid_kernel(rng.normal(size=(m, 2)))
        v = kernel.cnd_test(k)
        assert v.verdict is Verdict.CND and v.witness is None


def test_two_points_always_cnd():
    assert kernel.cnd_test(np.array([[0.0, 5.0], [5.0, 0.0]])).is_cnd
    assert kernel.cnd_test(np.zeros((1, 1))).is_cnd


def test_counterexample_not_cnd(s2_kernel):
    v = kernel.cnd_test(s2_kernel)
    assert v.verdict is Verdict.NOT_CND
    assert abs(v.witness.sum()) <= 1e-12
    assert kernel.quad_form(s2_kernel, v.witness) > 0
    # the witness carried by the config is reported as such
    cfg = KernelConfig(s2_kernel.K, coeffs=instances.COEFFS)
    v2 = kernel.cnd_test(cfg)
    assert v2.method is kernel.Method.GIVEN_WITNESS and v2.quad_form_value > 0


def _kernel_with_top(m, top):
    # symmetric S with prescribed spectrum on 1^perp; subtracting (d 1^T + 1 d^T)/2
    # zeroes the diagonal without changing the quadratic form on 1^perp
    q = kernel.hyperplane_basis(m)
    lam = np.full(m - 1, -1.0)
    lam[0] = top
    s = (q * lam) @ q.T
    d = np.diag(s)
    k = s - 0.5 * (d[:, None] + d[None, :])
    np.fill_diagonal(k, 0.0)
    return KernelConfig(k)


def test_verdict_bands():
    tol = _kernel_with_top(5, 0.0).tol_cnd
    assert kernel.cnd_test(_kernel_with_top(5, 0.0)).verdict is Verdict.CND
    mid = _kernel_with_top(5, 3.0 * tol)
    assert mid.tol_cnd < 3.0 * tol <= 10 * mid.tol_cnd
    v = kernel.cnd_test(mid)
    assert v.verdict is Verdict.INDETERMINATE and not v.is_cnd
    assert v.max_centered_eig == pytest.approx(3.0 * tol, rel=1e-3)
    assert kernel.cnd_test(_kernel_with_top(5, 1e-3)).verdict is Verdict.NOT_CND


def test_schoenberg(s2_kernel, rng):
    k = euclid_kernel(rng.normal(size=(6, 3)))
    cfg = KernelConfig(k)
    for _, e in kernel.schoenberg_test(cfg, (0.01, 0.1, 1.0)):
        assert e >= -cfg.tol_cnd
    sweep = kernel.schoenberg_test(s2_kernel, np.logspace(-3, 0, 10))
    assert min(e for _, e in sweep) < -s2_kernel.tol_cnd
    assert kernel.schoenberg_test(np.zeros((1, 1)), (0.5, 2.0)) == [(0.5, 1.0), (2.0, 1.0)]
    assert len(kernel.schoenberg_test(cfg)) == 20


def test_schoenberg_derivative(s2_kernel):
    d = kernel.schoenberg_derivative(s2_kernel, instances.COEFFS, 1e-6)
    q = kernel.quad_form(s2_kernel, instances.COEFFS)
    assert abs(d + q) <= 1e-4 * q


def test_embed_gram(rng):
    k = euclid_kernel(np.array([[0.0], [1.0], [3.0]]))
    g = kernel.embed_gram(k)
    w = np.linalg.eigvalsh(g)
    assert w.min() >= -1e-12 and np.sum(w > 1e-9) == 1
    np.testing.assert_allclose(kernel.gram_distances(g), k, atol=1e-10)
    assert np.all(kernel.embed_gram(np.zeros((3, 3))) == 0)
    x = np.array([1.0, 2.0, 4.0, 8.0])
    ks = scalar.delta_s_sq(x[:, None], x[None, :])
    gs = kernel.embed_gram(ks, basepoint=2)
    assert np.linalg.eigvalsh(gs).min() >= -KernelConfig(ks).tol_cnd
    np.testing.assert_allclose(kernel.gram_distances(gs), ks, atol=1e-10)


def test_embed_gram_rejects_non_cnd(s2_kernel):
    with pytest.raises(NotCnd):
        kernel.embed_gram(s2_kernel)


def test_build_single_point():
    cfg = kernel.build_divergence_kernel([np.eye(2)], "sdiv")
    assert cfg.K.shape == (1, 1) and cfg.K[0, 0] == 0.0


def test_block_embed_identity_scaling():
    x, y = instances.matrices()[:2]
    ref = qjsd(x, y).squared
    for n in (2, 3, 4, 8):
        v = qjsd(kernel.block_embed(x, n), kernel.block_embed(y, n)).squared
        assert abs(v - 2.0 / n * ref) <= 1e-12
    np.testing.assert_array_equal(kernel.block_embed(x, 2).array, x)


def test_block_embed_zero_trace_scaling():
    x, y = instances.matrices()[2:4]
    rho = kernel.block_embed(x, 3, "pad_zero_trace", 40)
    assert np.trace(rho.array) == pytest.approx(1.0, abs=1e-15)
    sigma = kernel.block_embed(y, 3, "pad_zero_trace", 40)
    ref = qjsd(rho, sigma).squared
    for n in (4, 6, 8):
        v = qjsd(kernel.block_embed(x, n, "pad_zero_trace", 40),
                 kernel.block_embed(y, n, "pad_zero_trace", 40)).squared
        assert abs(v - 3.0 / n * ref) <= 1e-12


def test_block_embed_errors():
    with pytest.raises(DimensionError):
        kernel.block_embed(np.eye(3), 2)
    with pytest.raises(TraceBudgetError):
        kernel.block_embed(instances.matrices()[1], 3, "pad_zero_trace", 10)
    with pytest.raises(DimensionError):
        kernel.block_embed(np.eye(2), 2, "pad_zero_trace", 40)


def test_kernel_json_roundtrip(s2_kernel):
    v = kernel.cnd_test(s2_kernel)
    text = s2_kernel.to_json(v)
    d = __import__("json").loads(text)
    assert d["verdict"] == "not_cnd" and d["m"] == 5
    back = KernelConfig.from_json(text)
    np.testing.assert_array_equal(back.K, s2_kernel.K)
    with pytest.raises(ParseError):
        KernelConfig.from_json("{not json")
