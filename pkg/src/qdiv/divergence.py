"""Matrix divergences under the normalized trace ``tau = (1/n) Tr``.

* ``d_tau_sq``: trace-log (S-)divergence on positive definite matrices.
* ``d_tau_shifted_sq``: the same after shifting both arguments by ``t I``.
* ``qjsd``: quantum Jensen-Shannon divergence, the trace Jensen gap of ``x log x``.
* ``qjsd_by_integral``: QJSD recomputed as ``int_0^inf d_tau_shifted_sq(A, B, t) dt``.
* ``jensen_f``: Jensen gap of an operator convex generator given by its
  quadratic coefficient and a finite list of Stieltjes atoms.

All of them only need the spectra of ``A``, ``B`` and ``(A + B)/2``. A shift by
``t I`` moves every eigenvalue by ``t`` and leaves eigenvectors alone, so
shifted quantities never trigger a new eigendecomposition.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import scalar
from .errors import (
    DomainError,
    InvalidGenerator,
    NumericalInconsistency,
)
from .linalg import (
    HermitianMatrix,
    as_hermitian,
    clamped_eigenvalues,
    eta,
    norm_tau,
    require_pd,
    require_psd,
    same_dimension,
)
from .quadrature import integrate

log = logging.getLogger(__name__)

TOL_TRI = 1e-10


@dataclass(frozen=True)
class DivergenceValue:
    squared: float
    root: float

    @classmethod
    def from_squared(cls, value: float, n: int = 1) -> "DivergenceValue":
        """Clamp roundoff negatives in ``(-1e-12 n, 0)``; anything below is a bug."""
        tol = 1e-12 * n
        value = float(value)
        if value < 0.0:
            if value <= -tol:
                raise NumericalInconsistency(f"squared divergence {value:.3e} is negative beyond {tol:.1e}")
            log.debug("clamping squared divergence %.3e to 0", value)
            value = 0.0
        return cls(value, math.sqrt(value))

    def __float__(self):
        return self.squared


# -- spectral kernels -------------------------------------------------------


def _log1p_minus_x(r):
    # log(1 + r) - r without cancellation for small r
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-3
    rs = np.where(small, r, 0.0)
    series = -rs**2 / 2 + rs**3 / 3 - rs**4 / 4 + rs**5 / 5 - rs**6 / 6
    return np.where(small, series, np.log1p(np.where(small, 0.0, r)) - r)


def _eta1p_minus_x(r):
    # (1 + r) log(1 + r) - r = sum_{k>=2} (-1)^k r^k / (k (k - 1))
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 1e-3
    rs = np.where(small, r, 0.0)
    series = rs**2 / 2 - rs**3 / 6 + rs**4 / 12 - rs**5 / 20 + rs**6 / 30
    rl = np.where(small, 0.0, r)
    return np.where(small, series, (1 + rl) * np.log1p(rl) - rl)


def _log_gap(wa, wb, wm, t):
    """``tau log(M + t) - tau log(A + t)/2 - tau log(B + t)/2`` from spectra.

    ``t`` may be an array (vectorized over shifts). For ``t`` above the
    spectral radius the common ``log t`` and the linear terms are removed
    analytically (they cancel because ``tau`` is linear), leaving only the
    second-order remainders.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(t)
    top = max(wa[0], wb[0], wm[0], 0.0)
    big = t >= top
    if np.any(big):
        tb = t[big][None, :]
        out[big] = (np.mean(_log1p_minus_x(wm[:, None] / tb), axis=0)
                    - 0.5 * np.mean(_log1p_minus_x(wa[:, None] / tb), axis=0)
                    - 0.5 * np.mean(_log1p_minus_x(wb[:, None] / tb), axis=0))
    sm = ~big
    if np.any(sm):
        ts = t[sm][None, :]
        out[sm] = (np.mean(np.log(wm[:, None] + ts), axis=0)
                   - 0.5 * np.mean(np.log(wa[:, None] + ts), axis=0)
                   - 0.5 * np.mean(np.log(wb[:, None] + ts), axis=0))
    return out


def _eta_gap(wa, wb, wm, t=0.0):
    """``J_eta(A + t, B + t)`` from spectra; stable for large ``t``."""
    top = max(wa[0], wb[0], wm[0], 0.0)
    if t > 0 and t >= top:
        # J(A + t, B + t) = t J(I + A/t, I + B/t) and eta(1 + r) = r + (eta1p - r)
        return t * (0.5 * np.mean(_eta1p_minus_x(wa / t)) + 0.5 * np.mean(_eta1p_minus_x(wb / t))
                    - np.mean(_eta1p_minus_x(wm / t)))
    return float(0.5 * np.mean(eta(wa + t)) + 0.5 * np.mean(eta(wb + t)) - np.mean(eta(wm + t)))


def _spectra_pd(a, b):
    a = require_pd(a, "A")
    b = require_pd(b, "B")
    n = same_dimension(a, b)
    m = HermitianMatrix(0.5 * (a.array + b.array))
    return n, np.asarray(a.eigenvalues), np.asarray(b.eigenvalues), np.asarray(m.eigenvalues)


def _spectra_psd(a, b):
    a = require_psd(a, "A")
    b = require_psd(b, "B")
    n = same_dimension(a, b)
    m = HermitianMatrix(0.5 * (a.array + b.array))
    return n, clamped_eigenvalues(a), clamped_eigenvalues(b), clamped_eigenvalues(m)


# -- public operations ---------------------------------------------------------


def d_tau_sq(a, b) -> DivergenceValue:
    """Trace-log divergence ``tau log((A+B)/2) - tau log(A)/2 - tau log(B)/2``.

    Parameters
    ----------
    a, b : HermitianMatrix or array_like
        Positive definite matrices of the same size. 1x1 inputs are routed
        through :func:`qdiv.scalar.delta_s_sq`.

    Raises
    ------
    NotPositiveDefinite, DimensionMismatch
    """
    a, b = as_hermitian(a), as_hermitian(b)
    if a.n == 1 and b.n == 1:
        require_pd(a, "A")
        require_pd(b, "B")
        return DivergenceValue.from_squared(scalar.delta_s_sq(a.array[0, 0].real, b.array[0, 0].real))
    n, wa, wb, wm = _spectra_pd(a, b)
    val = np.mean(np.log(wm)) - 0.5 * np.mean(np.log(wa)) - 0.5 * np.mean(np.log(wb))
    return DivergenceValue.from_squared(val, n)


def d_tau(a, b) -> float:
    return d_tau_sq(a, b).root


def d_tau_shifted_sq(a, b, t: float) -> DivergenceValue:
    """``d_tau(A + tI, B + tI)^2`` for positive semidefinite ``A, B`` and ``t > 0``."""
    if not t > 0 or not math.isfinite(t):
        raise DomainError(f"shift t must be positive and finite, got {t}")
    n, wa, wb, wm = _spectra_psd(a, b)
    return DivergenceValue.from_squared(_log_gap(wa, wb, wm, t)[0], n)


def qjsd(a, b) -> DivergenceValue:
    """Quantum Jensen-Shannon divergence ``J_{tau, eta}(A, B)``.

    ``tau(eta(A))/2 + tau(eta(B))/2 - tau(eta((A+B)/2))`` with
    ``eta(x) = x log x`` and ``eta(0) = 0``. Tiny negative eigenvalues of
    PSD-certified inputs are clamped to zero.
    """
    n, wa, wb, wm = _spectra_psd(a, b)
    return DivergenceValue.from_squared(_eta_gap(wa, wb, wm), n)


def qjsd_shifted(a, b, t: float) -> DivergenceValue:
    """``J_{tau, eta}(A + tI, B + tI)``, evaluated without cancellation for large ``t``."""
    if not t >= 0:
        raise DomainError(f"shift t must be nonnegative, got {t}")
    n, wa, wb, wm = _spectra_psd(a, b)
    return DivergenceValue.from_squared(_eta_gap(wa, wb, wm, t), n)


@dataclass(frozen=True)
class IntegralReport:
    value: float
    error_bound: float
    head: float
    tail: float
    split: float
    t_max: float
    decay_exponent: float
    n_intervals: int


def qjsd_integral_report(a, b, rel_tol: float = 1e-8, eps: float = 1e-10) -> IntegralReport:
    """Integrate ``d_tau_shifted_sq(A, B, t)`` over ``t in (0, inf)``.

    The range is split at ``T* = 10 (1 + ||A|| + ||B||)``. Both pieces are
    integrated in ``u = log t`` with adaptive Gauss-Kronrod; the head
    ``(0, eps)`` is approximated by integrating ``g(eps) + s log(t/eps)``
    (``s`` from a second sample at ``eps/10``) and the tail beyond
    ``t_max = 1e8 T*`` by ``C / t_max`` with ``C = g(t_max) t_max^2``. Both
    corrections are included in the value and in the error bound.
    """
    if not 1e-12 < rel_tol < 1e-2:
        raise DomainError(f"rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")
    n, wa, wb, wm = _spectra_psd(a, b)
    if np.array_equal(as_hermitian(a).array, as_hermitian(b).array):
        return IntegralReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, float("nan"), 0)

    def g(t):
        return _log_gap(wa, wb, wm, t)

    def gu(u):
        t = np.exp(u)
        return g(t) * t

    split = 10.0 * (1.0 + abs(wa[0]) + abs(wb[0]))
    t_max = 1e8 * split
    g_eps, g_eps10 = (float(v) for v in g(np.array([eps, 0.1 * eps])))
    # g ~ g(eps) + s log(t / eps) on (0, eps]: logarithmic blow-up for singular inputs
    slope = (g_eps - g_eps10) / math.log(10.0)
    head = eps * (g_eps - slope)
    g_tmax = float(g(t_max)[0])
    tail = g_tmax * t_max
    inner = integrate(gu, math.log(eps), math.log(split), rel_tol=0.1 * rel_tol, abs_tol=1e-300)
    outer = integrate(gu, math.log(split), math.log(t_max), rel_tol=0.1 * rel_tol, abs_tol=1e-300)
    g_mid = float(g(split * 1e4)[0])
    exponent = float("nan")
    if g_mid > 0 and g_tmax > 0:
        exponent = -math.log(g_tmax / g_mid) / math.log(t_max / (split * 1e4))
        log.debug("observed tail decay exponent of d_tau_t^2: %.4f", exponent)
    value = float(inner.value + outer.value + head + tail)
    err = float(inner.error + outer.error + abs(head) + abs(tail))
    return IntegralReport(value, err, float(head), float(tail), float(split), float(t_max), exponent,
                          inner.n_intervals + outer.n_intervals)


def qjsd_by_integral(a, b, rel_tol: float = 1e-8) -> float:
    """QJSD recomputed as ``int_0^inf d_tau(A + tI, B + tI)^2 dt``.

    Raises
    ------
    DomainError
        If ``rel_tol`` is outside ``(1e-12, 1e-2)`` or an input is not PSD.
    QuadratureFailure
        If the adaptive integrator runs out of panels.
    """
    return qjsd_integral_report(a, b, rel_tol).value


class GeneratorKind(enum.Enum):
    ETA = "eta"
    SQUARE = "square"
    NEG_LOG_SHIFTED = "neglog_shifted"
    CUSTOM = "custom"


@dataclass(frozen=True)
class JensenGenerator:
    """Operator convex generator ``f`` described through ``f'``.

    ``f'(x) = a + b x + sum_k w_k x / (x + t_k)``; the constant ``a``
    contributes an affine term to ``f`` and drops out of every Jensen gap.
    ``kind=ETA`` stands for ``x log x`` whose measure is ``dt / t``
    (continuous, so it carries no atoms and is evaluated in closed form).
    """

    kind: GeneratorKind = GeneratorKind.CUSTOM
    b: float = 0.0
    nu_atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.nu_atoms)
        object.__setattr__(self, "nu_atoms", atoms)
        object.__setattr__(self, "b", float(self.b))
        if not (self.b >= 0 and math.isfinite(self.b)):
            raise InvalidGenerator(f"b must be finite and nonnegative, got {self.b}")
        for t, w in atoms:
            if not (t > 0 and w > 0 and math.isfinite(t) and math.isfinite(w)):
                raise InvalidGenerator(f"atoms need t > 0 and weight > 0, got ({t}, {w})")
        if self.kind is GeneratorKind.SQUARE and (self.b <= 0 or atoms):
            raise InvalidGenerator("square generator needs b > 0 and no atoms")
        if self.kind is GeneratorKind.NEG_LOG_SHIFTED and (self.b != 0 or len(atoms) != 1):
            raise InvalidGenerator("shifted -log generator is a single atom with b = 0")
        if self.kind is GeneratorKind.ETA and (self.b != 0 or atoms):
            raise InvalidGenerator("the eta generator takes no parameters")
        if self.kind is GeneratorKind.CUSTOM and self.b == 0 and not atoms:
            raise InvalidGenerator("affine generator: need b > 0 or at least one atom")

    @classmethod
    def eta(cls):
        return cls(GeneratorKind.ETA)

    @classmethod
    def square(cls, b: float = 2.0):
        """``f(x) = (b/2) x^2``; the default ``b = 2`` is ``f(x) = x^2``."""
        return cls(GeneratorKind.SQUARE, b)

    @classmethod
    def neg_log_shifted(cls, s: float = 1.0):
        """``f(x) = -log(x + s)``, i.e. a single atom of mass ``1/s`` at ``t = s``."""
        return cls(GeneratorKind.NEG_LOG_SHIFTED, 0.0, ((s, 1.0 / s),))

    @classmethod
    def custom(cls, b: float = 0.0, atoms: Sequence = ()):
        return cls(GeneratorKind.CUSTOM, b, tuple(atoms))

    def scalar_f(self, x):
        """Representative ``f`` with the affine part fixed to zero at ``x = 1``."""
        x = np.asarray(x, dtype=float)
        if self.kind is GeneratorKind.ETA:
            return eta(x)
        out = 0.5 * self.b * x**2
        for t, w in self.nu_atoms:
            out = out + w * ((x - 1.0) - t * np.log((x + t) / (1.0 + t)))
        return out


def jensen_f(a, b, g: JensenGenerator) -> DivergenceValue:
    """Jensen gap of ``g`` through its decomposition.

    ``(b/8) ||A - B||_{2,tau}^2 + sum_k w_k t_k d_tau(A + t_k, B + t_k)^2``.
    The ``ETA`` kind returns :func:`qjsd`.
    """
    if not isinstance(g, JensenGenerator):
        raise InvalidGenerator(f"expected a JensenGenerator, got {type(g).__name__}")
    if g.kind is GeneratorKind.ETA:
        return qjsd(a, b)
    n, wa, wb, wm = _spectra_psd(a, b)
    a, b = as_hermitian(a), as_hermitian(b)
    val = 0.125 * g.b * norm_tau(a.array - b.array) ** 2
    if g.nu_atoms:
        ts = np.array([t for t, _ in g.nu_atoms])
        ws = np.array([w for _, w in g.nu_atoms])
        val += float(np.sum(ws * ts * _log_gap(wa, wb, wm, ts)))
    return DivergenceValue.from_squared(val, n)


def fk_determinant(a) -> float:
    """Fuglede-Kadison determinant ``exp(tau(log A)) = det(A)^{1/n}``."""
    a = require_pd(a, "A")
    return math.exp(float(np.mean(np.log(a.eigenvalues))))


# -- metric property suites -----------------------------------------------------


class MetricMode(enum.Enum):
    TRACE_LOG = "sdiv"
    QJSD_ROOT = "qjsd"
    JENSEN_ROOT = "jensen"


def distance_function(mode, generator: Optional[JensenGenerator] = None):
    """Return ``f(A, B) -> DivergenceValue`` for a mode."""
    mode = MetricMode(mode)
    if mode is MetricMode.TRACE_LOG:
        return d_tau_sq
    if mode is MetricMode.QJSD_ROOT:
        return qjsd
    if generator is None:
        raise InvalidGenerator("JensenRoot mode needs a generator")
    return lambda a, b: jensen_f(a, b, generator)


@dataclass
class SuiteReport:
    """Outcome of a metric-axiom sweep over a finite point set."""

    mode: str
    n_points: int
    n_triples: int = 0
    triangle_violations: int = 0
    worst_triangle_margin: float = -math.inf
    worst_triangle: Optional[tuple] = None
    symmetry_violations: int = 0
    worst_symmetry_gap: float = 0.0
    identity_anomalies: int = 0
    congruence_checks: int = 0
    congruence_max_dev: float = 0.0
    congruence_violations: int = 0
    scaling_checks: int = 0
    scaling_max_dev: float = 0.0
    scaling_violations: int = 0

    @property
    def violations(self) -> int:
        return (self.triangle_violations + self.symmetry_violations + self.identity_anomalies
                + self.congruence_violations + self.scaling_violations)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        self.n_points += other.n_points
        self.n_triples += other.n_triples
        self.triangle_violations += other.triangle_violations
        if other.worst_triangle_margin > self.worst_triangle_margin:
            self.worst_triangle_margin = other.worst_triangle_margin
            self.worst_triangle = other.worst_triangle
        self.symmetry_violations += other.symmetry_violations
        self.worst_symmetry_gap = max(self.worst_symmetry_gap, other.worst_symmetry_gap)
        self.identity_anomalies += other.identity_anomalies
        self.congruence_checks += other.congruence_checks
        self.congruence_max_dev = max(self.congruence_max_dev, other.congruence_max_dev)
        self.congruence_violations += other.congruence_violations
        self.scaling_checks += other.scaling_checks
        self.scaling_max_dev = max(self.scaling_max_dev, other.scaling_max_dev)
        self.scaling_violations += other.scaling_violations
        return self

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_points": self.n_points,
            "n_triples": self.n_triples,
            "triangle_violations": self.triangle_violations,
            "worst_triangle_margin": self.worst_triangle_margin,
            "symmetry_violations": self.symmetry_violations,
            "worst_symmetry_gap": self.worst_symmetry_gap,
            "identity_anomalies": self.identity_anomalies,
            "congruence_checks": self.congruence_checks,
            "congruence_max_dev": self.congruence_max_dev,
            "congruence_violations": self.congruence_violations,
            "scaling_checks": self.scaling_checks,
            "scaling_max_dev": self.scaling_max_dev,
            "scaling_violations": self.scaling_violations,
            "violations": self.violations,
        }


def _random_invertible(n, rng, cond=1e3, complex_=True):
    from .sampling import random_invertible

    return random_invertible(n, rng, cond=cond, complex_=complex_)


def metric_suite(points, mode="sdiv", generator: Optional[JensenGenerator] = None, *,
                 rng=None, n_congruence: int = 0, scales=(1e-3, 1.0, 1e3),
                 tol_tri: float = TOL_TRI, tol_congruence: float = 1e-8,
                 tol_scaling: float = 1e-12) -> SuiteReport:
    """Check the metric axioms of a root divergence on a finite point set.

    Every ordered triple is tested for the triangle inequality of the root
    distance, every pair for symmetry, and distinct points for a nonzero
    distance. In ``sdiv`` mode, additionally ``n_congruence`` random
    invertible ``S`` (condition number <= 1e3, drawn from ``rng``) test
    ``d(S*AS, S*BS) = d(A, B)``, and each scale ``c`` tests
    ``d(cA, cB) = d(A, B)``; in ``qjsd`` mode the scale test is
    ``J(cA, cB) = c J(A, B)``.
    """
    pts = [as_hermitian(p) for p in points]
    mode = MetricMode(mode)
    dist = distance_function(mode, generator)
    m = len(pts)
    rep = SuiteReport(mode.value, m)
    if m == 0:
        return rep
    same_dimension(*pts)
    d = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            dij = dist(pts[i], pts[j]).root
            dji = dist(pts[j], pts[i]).root
            gap = abs(dij - dji)
            rep.worst_symmetry_gap = max(rep.worst_symmetry_gap, gap)
            if gap > tol_tri:
                rep.symmetry_violations += 1
            if dij == 0.0 and not np.array_equal(pts[i].array, pts[j].array):
                rep.identity_anomalies += 1
            d[i, j] = d[j, i] = dij
    # margin[i, j, k] = d(i, k) - d(i, j) - d(j, k)
    margin = d[:, None, :] - d[:, :, None] - d[None, :, :]
    rep.n_triples = m**3
    idx = np.unravel_index(np.argmax(margin), margin.shape)
    rep.worst_triangle_margin = float(margin[idx])
    rep.worst_triangle = tuple(int(i) for i in idx)
    rep.triangle_violations = int(np.sum(margin > tol_tri))

    if mode is MetricMode.TRACE_LOG and m >= 2:
        if n_congruence and rng is None:
            raise ValueError("congruence checks need an rng")
        n = pts[0].n
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
        for k in range(n_congruence):
            i, j = pairs[k % len(pairs)]
            s = _random_invertible(n, rng)
            sa = HermitianMatrix(s.conj().T @ pts[i].array @ s)
            sb = HermitianMatrix(s.conj().T @ pts[j].array @ s)
            dev = abs(d_tau(sa, sb) - d[i, j])
            rep.congruence_checks += 1
            rep.congruence_max_dev = max(rep.congruence_max_dev, dev)
            if dev > tol_congruence * (1.0 + d[i, j]):
                rep.congruence_violations += 1
        for c in scales:
            for i, j in pairs:
                dev = abs(d_tau_sq(pts[i] * c, pts[j] * c).squared - d_tau_sq(pts[i], pts[j]).squared)
                rep.scaling_checks += 1
                rep.scaling_max_dev = max(rep.scaling_max_dev, dev)
                if dev > tol_scaling:
                    rep.scaling_violations += 1
    elif mode is MetricMode.QJSD_ROOT and m >= 2:
        for c in scales:
            for i in range(m):
                for j in range(i + 1, m):
                    ref = qjsd(pts[i], pts[j]).squared
                    dev = abs(qjsd(pts[i] * c, pts[j] * c).squared - c * ref)
                    rel = dev / max(c * ref, 1e-300)
                    rep.scaling_checks += 1
                    rep.scaling_max_dev = max(rep.scaling_max_dev, rel)
                    if dev > 1e-10 * max(c * ref, 1e-12):
                        rep.scaling_violations += 1
    return rep


def pairwise_table(points, mode="sdiv", generator: Optional[JensenGenerator] = None):
    """Symmetric ``(squared, root)`` tables over all pairs of points."""
    from ._parallel import ordered_map

    pts = [as_hermitian(p) for p in points]
    if pts:
        same_dimension(*pts)
    dist = distance_function(mode, generator)
    m = len(pts)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    vals = ordered_map(lambda ij: dist(pts[ij[0]], pts[ij[1]]), pairs)
    sq = np.zeros((m, m))
    rt = np.zeros((m, m))
    for (i, j), v in zip(pairs, vals):
        sq[i, j] = sq[j, i] = v.squared
        rt[i, j] = rt[j, i] = v.root
    return sq, rt

