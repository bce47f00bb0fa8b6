"""Generalized s-numbers of matrices and the rearrangement inequalities built on them.

For an ``n x n`` positive matrix under ``tau = (1/n) Tr`` the s-number
function ``t -> mu_X(t)`` is a step function: on the panel ``((k-1)/n, k/n]``
it equals the k-th largest eigenvalue. Every integral over ``(0, 1)`` of a
function of ``mu`` is therefore an exact average over the panels, and no
quadrature is involved anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scalar
from .divergence import d_tau_sq
from .errors import DomainError
from .linalg import (
    HermitianMatrix,
    apply_function,
    apply_to_eigenvalues,
    as_hermitian,
    clamped_eigenvalues,
    require_pd,
    require_psd,
    same_dimension,
    tol_psd,
    trace_tau,
)

TOL_BOUND = 1e-10


@dataclass(frozen=True)
class SingularProfile:
    """Panel values of ``mu_X``, largest first (right-continuous step function)."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, t: float) -> float:
        """``mu_X(t)`` for ``t in (0, 1]``; the value on ``((k-1)/n, k/n]`` is ``values[k-1]``."""
        if not 0.0 < t <= 1.0:
            raise DomainError(f"t must lie in (0, 1], got {t}")
        k = math.ceil(t * self.n - 1e-12) - 1
        return float(self.values[min(max(k, 0), self.n - 1)])

    def integral(self, f, upto: int | None = None) -> float:
        """``int_0^{u/n} f(mu(t)) dt`` as the panel sum ``(1/n) sum_{k <= u} f(values[k])``."""
        vals = self.values if upto is None else self.values[:upto]
        return float(np.sum(f(vals))) / self.n


def profile(a) -> SingularProfile:
    """Descending eigenvalue profile of a positive semidefinite matrix."""
    a = require_psd(a, "A")
    return SingularProfile(clamped_eigenvalues(a))


def trace_formula_check(a, f="id"):
    """Both sides of ``tau(f(A)) = int_0^1 f(mu_A(t)) dt``.

    The left side goes through the functional calculus ``U f(Lambda) U*``
    followed by the diagonal trace; the right side is the panel sum.

    Returns
    -------
    lhs, rhs : float
    """
    a = require_psd(a, "A")
    lhs = trace_tau(apply_function(a, f))
    prof = profile(a)
    rhs = prof.integral(lambda v: apply_to_eigenvalues(v, f, tol_psd(a)))
    return lhs, rhs


def trace_formula_tolerance(a, f="id") -> float:
    a = as_hermitian(a)
    fw = apply_to_eigenvalues(clamped_eigenvalues(a), f, tol_psd(a))
    return 1e-11 * a.n * max(float(np.max(np.abs(fw))), 1e-300)


# convex increasing functions on [0, inf) accepted by the Fack-Kosaki check
def _square(x):
    return np.square(x)


def _expm1(x):
    return np.expm1(x)


def hinge(c: float):
    def f(x):
        return np.maximum(np.asarray(x, dtype=float) - c, 0.0)

    f.__name__ = f"hinge_{c:g}"
    return f


CONVEX_INCREASING = {"square": _square, "expm1": _expm1}


def convex_increasing(name):
    """Look up a registered convex increasing function: ``square``, ``expm1`` or ``hinge:<c>``."""
    if callable(name) and getattr(name, "__name__", "").startswith("hinge_"):
        return name
    if isinstance(name, str):
        if name in CONVEX_INCREASING:
            return CONVEX_INCREASING[name]
        if name.startswith("hinge:"):
            return hinge(float(name.split(":", 1)[1]))
    raise DomainError(f"unknown convex increasing function {name!r}; "
                      f"use one of {sorted(CONVEX_INCREASING)} or 'hinge:<c>'")


@dataclass(frozen=True)
class BoundReport:
    """Outcome of an inequality check ``lower <= upper``."""

    lower: float
    upper: float
    tol: float = TOL_BOUND

    @property
    def margin(self) -> float:
        return self.upper - self.lower

    @property
    def violated(self) -> bool:
        return self.lower > self.upper + self.tol

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "margin": self.margin,
                "violated": self.violated}


def _pair(x, y, pd=False):
    req = require_pd if pd else require_psd
    x = req(x, "X")
    y = req(y, "Y")
    same_dimension(x, y)
    return x, y


def fk_sum_bound_check(x, y, f="square", u_panels: int | None = None,
                       tol: float = TOL_BOUND) -> BoundReport:
    """Fack-Kosaki: ``int_0^u f(mu_{X+Y}) <= int_0^u f(mu_X + mu_Y)`` with ``u = u_panels / n``."""
    x, y = _pair(x, y)
    n = x.n
    if u_panels is None:
        u_panels = n
    if not 1 <= u_panels <= n:
        raise DomainError(f"u_panels must lie in 1..{n}, got {u_panels}")
    fn = convex_increasing(f)
    s = profile(HermitianMatrix(x.array + y.array))
    px, py = profile(x), profile(y)
    lhs = s.integral(fn, u_panels)
    rhs = SingularProfile(px.values + py.values).integral(fn, u_panels)
    return BoundReport(lhs, rhs, tol)


def log_sum_lower_check(x, y, tol: float = TOL_BOUND) -> BoundReport:
    """``tau(log(X + Y)) >= int_0^1 log(mu_X + mu_Y)``, both from independent spectra."""
    x, y = _pair(x, y, pd=True)
    upper = float(np.mean(np.log(HermitianMatrix(x.array + y.array).eigenvalues)))
    lower = float(np.mean(np.log(x.eigenvalues + y.eigenvalues)))
    return BoundReport(lower, upper, tol)


def d1_mu_identity_check(x):
    """Both sides of ``d_tau(I, X)^2 = int_0^1 delta_s(1, mu_X)^2``."""
    x = require_pd(x, "X")
    lhs = d_tau_sq(np.eye(x.n), x).squared
    rhs = float(np.mean(scalar.delta_s_sq(1.0, x.eigenvalues)))
    return lhs, rhs


def dst_lower_check(s, t, tol: float = TOL_BOUND) -> BoundReport:
    """``d_tau(S, T)^2 >= int_0^1 delta_s(mu_S, mu_T)^2``."""
    s, t = _pair(s, t, pd=True)
    lower = float(np.mean(scalar.delta_s_sq(s.eigenvalues, t.eigenvalues)))
    return BoundReport(lower, d_tau_sq(s, t).squared, tol)


def minkowski_check(s, t, tol: float = TOL_BOUND) -> BoundReport:
    """Panel-wise assembled bound ``||delta(1, mu_T)|| <= ||delta(1, mu_S)|| + ||delta(mu_S, mu_T)||``.

    Norms are in ``L^2(0, 1)``, i.e. root-mean-square over the panels.
    """
    s, t = _pair(s, t, pd=True)
    ms, mt = s.eigenvalues, t.eigenvalues

    def l2(v):
        return math.sqrt(float(np.mean(v)))

    lower = l2(scalar.delta_s_sq(1.0, mt))
    upper = l2(scalar.delta_s_sq(1.0, ms)) + l2(scalar.delta_s_sq(ms, mt))
    return BoundReport(lower, upper, tol)
