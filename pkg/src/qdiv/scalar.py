"""The scalar divergence on (0, inf) and its Laplace-type integral representation.

``delta_s(x, y)^2 = log((x + y)/2) - log(x)/2 - log(y)/2`` is the squared
distance of a Hilbert-space embedding, since it equals
``1/2 * int_0^inf (exp(-r x/2) - exp(-r y/2))^2 dr / r``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .quadrature import QuadResult, integrate

TOL_TRI = 1e-12

# exp(-r_max * min(x, y) / 2) < 1e-18
_TAIL_LOG = math.log(1e18)


def _check_positive(*vals):
    for v in vals:
        arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError(f"arguments must be finite and positive, got {v!r}")


def delta_s_sq(x, y):
    """Squared scalar divergence.

    Near the diagonal it is evaluated as ``-1/2 * log1p(-r^2)`` with
    ``r = (x - y)/(x + y)``. For ``|r| > 1/2`` the product ``1 - r^2`` would
    lose digits, so the ratio ``q = min/max`` is used instead:
    ``log1p(q) - log 2 - log(q)/2``. Accepts scalars or broadcastable arrays.
    """
    _check_positive(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = (x - y) / (x + y)
    q = np.minimum(x, y) / np.maximum(x, y)
    near = -0.5 * np.log1p(-np.minimum(r * r, 0.25))
    far = np.log1p(q) - math.log(2.0) - 0.5 * np.log(q)
    out = np.where(np.abs(r) <= 0.5, near, far)
    if out.ndim == 0:
        return float(out)
    return out


def delta_s(x, y):
    return np.sqrt(delta_s_sq(x, y))


def integrand(r, x: float, y: float):
    """``(exp(-r x/2) - exp(-r y/2))^2 / r``, the integrand of the representation (without the 1/2)."""
    r = np.asarray(r, dtype=float)
    lo, hi = min(x, y), max(x, y)
    diff = np.exp(-0.5 * r * lo) * -np.expm1(-0.5 * r * (hi - lo))
    return diff * diff / r


def quadrature_window(x: float, y: float):
    """Truncation window ``[r_min, r_max]`` and the analytic bounds on what it drops."""
    lo, hi = min(x, y), max(x, y)
    r_min = 1e-12 * (2.0 / hi)
    r_max = 2.0 * _TAIL_LOG / lo
    # (e^{-rx/2} - e^{-ry/2})^2 / r <= r (y - x)^2 / 4 near 0
    head = (hi - lo) ** 2 * r_min**2 / 16.0
    # integrand <= e^{-r lo} / r beyond r_max
    tail = 0.5 * math.exp(-r_max * lo) / (r_max * lo)
    return r_min, r_max, head, tail


def delta_s_sq_quad(x: float, y: float, rel_tol: float = 1e-10) -> QuadResult:
    """Quadrature of the integral representation, with the error budget attached.

    Integration runs in ``u = log r`` so that ``dr / r = du``; both the
    polynomial head and the exponential tail become smooth.
    """
    _check_positive(x, y)
    if not 1e-14 < rel_tol < 1e-2:
        raise DomainError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")
    x, y = float(x), float(y)
    if x == y:
        return QuadResult(0.0, 0.0, 0)
    r_min, r_max, head, tail = quadrature_window(x, y)
    lo, hi = min(x, y), max(x, y)

    def f(u):
        r = np.exp(u)
        diff = np.exp(-0.5 * r * lo) * -np.expm1(-0.5 * r * (hi - lo))
        return 0.5 * diff * diff

    res = integrate(f, math.log(r_min), math.log(r_max), rel_tol=0.25 * rel_tol, abs_tol=1e-300)
    return QuadResult(res.value, res.error + head + tail, res.n_intervals)


def delta_s_sq_quadrature(x: float, y: float, rel_tol: float = 1e-10) -> float:
    """``delta_s(x, y)^2`` computed from the integral representation by adaptive quadrature.

    Raises
    ------
    DomainError
        For nonpositive arguments or ``rel_tol`` outside ``(1e-14, 1e-2)``.
    QuadratureFailure
        If adaptive refinement exceeds the panel budget.
    """
    return delta_s_sq_quad(x, y, rel_tol).value


def scalar_triangle_check(x: float, y: float, z: float, tol: float = TOL_TRI) -> bool:
    """``delta_s(x, z) <= delta_s(x, y) + delta_s(y, z) + tol``."""
    _check_positive(x, y, z)
    return delta_s(x, z) <= delta_s(x, y) + delta_s(y, z) + tol
