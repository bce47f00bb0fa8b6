"""Dense Hermitian linear algebra.

Everything in qdiv is built on the spectral decomposition computed here: a
cyclic Jacobi eigensolver for complex Hermitian matrices, functional calculus
``f(M) = U f(Lambda) U*``, the normalized trace ``tau = (1/n) Tr`` and the
matrix geometric mean.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, EigFailure, NotPositiveDefinite

MAX_SWEEPS = 100
MAX_DIMENSION = 64


class HermitianMatrix:
    """Immutable dense Hermitian matrix.

    The constructor symmetrizes its input, ``M <- (M + M*) / 2``, so the stored
    entries are exactly Hermitian. Real input stays real (dtype float64).
    The spectral decomposition is computed lazily and cached.

    Parameters
    ----------
    data : array_like, shape (n, n)
        Matrix entries. Anything accepted by ``np.asarray``.
    """

    def __init__(self, data):
        if isinstance(data, HermitianMatrix):
            self._a = data._a
            return
        a = np.array(data)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if np.iscomplexobj(a):
            a = a.astype(np.complex128)
            if not np.any(a.imag):
                a = a.real.copy()
        else:
            a = a.astype(np.float64)
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix entries must be finite")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self._a = a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._a)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(n={self.n}, {np.array2string(self._a, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and np.array_equal(self._a, other._a)

    __hash__ = None

    def __add__(self, other):
        return HermitianMatrix(self._a + _raw(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HermitianMatrix(self._a - _raw(other))

    def __mul__(self, c):
        c = float(c)
        return HermitianMatrix(c * self._a)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return HermitianMatrix(self._a / float(c))

    def shift(self, t: float) -> "HermitianMatrix":
        """Return ``M + t I``; the cached spectrum is shifted, not recomputed."""
        out = HermitianMatrix(self._a + t * np.eye(self.n))
        if "spectral" in self.__dict__:
            sd = self.__dict__["spectral"]
            out.__dict__["spectral"] = SpectralDecomposition(sd.eigenvalues + t, sd.eigenvectors)
        return out

    @cached_property
    def spectral(self) -> "SpectralDecomposition":
        return _jacobi_decompose(self._a)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return self.spectral.eigenvalues


Matrixish = Union[HermitianMatrix, np.ndarray, list]


def _raw(x) -> np.ndarray:
    return x._a if isinstance(x, HermitianMatrix) else np.asarray(x)


def as_hermitian(x) -> HermitianMatrix:
    return x if isinstance(x, HermitianMatrix) else HermitianMatrix(x)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending and the matching unitary eigenvectors.

    The descending order is the generalized s-number profile of a positive
    matrix: eigenvalue ``k`` is the value on the panel ``((k-1)/n, k/n]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _sym_schur2(app, aqq, apq_abs):
    # Golub & Van Loan sym.schur2: zeroes the (p, q) entry of a real 2x2 block.
    theta = (aqq - app) / (2.0 * apq_abs)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def _off_norm(a, mask):
    return float(np.sqrt(np.sum(np.abs(a[mask]) ** 2)))


def _jacobi_decompose(m: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    n = m.shape[0]
    a = np.array(m, copy=True)
    complex_ = np.iscomplexobj(a)
    v = np.eye(n, dtype=a.dtype)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return _sorted(np.real(np.diag(a)).copy(), v)
    tiny = 1e-300
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = _off_norm(a, offmask)
        if off <= 1e-17 * scale or off < tiny:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                apq_abs = abs(apq)
                if apq_abs < tiny:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # skip rotations that cannot change the diagonal in floating point
                if apq_abs < 1e-18 * (abs(app) + abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                c, s = _sym_schur2(app, aqq, apq_abs)
                if complex_:
                    ph = np.conj(apq / apq_abs)
                    g = np.array([[c, s], [-s * ph, c * ph]])
                else:
                    ph = 1.0 if apq > 0 else -1.0
                    g = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        off = _off_norm(a, offmask)
        if off > 1e-12 * scale:
            raise EigFailure(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    return _sorted(np.real(np.diag(a)).copy(), v)


def _sorted(w, v) -> SpectralDecomposition:
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = np.ascontiguousarray(v[:, order])
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def spectral(m: Matrixish) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises
    ------
    EigFailure
        If the off-diagonal mass has not vanished after ``MAX_SWEEPS`` sweeps.
    """
    return as_hermitian(m).spectral


def eigenvalues(m: Matrixish) -> np.ndarray:
    return as_hermitian(m).eigenvalues


def inf_norm(m: Matrixish) -> float:
    """Induced infinity norm (max absolute row sum)."""
    a = _raw(m)
    return float(np.max(np.sum(np.abs(a), axis=1)))


def tol_psd(m: Matrixish) -> float:
    h = as_hermitian(m)
    return 1e-10 * h.n * inf_norm(h)


class Positivity(enum.Enum):
    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class PositivityClass:
    kind: Positivity
    min_eig: float

    @property
    def is_pd(self) -> bool:
        return self.kind is Positivity.POSITIVE_DEFINITE

    @property
    def is_psd(self) -> bool:
        return self.kind is not Positivity.INDEFINITE


def classify(m: Matrixish) -> PositivityClass:
    h = as_hermitian(m)
    lam = float(h.eigenvalues[-1])
    tol = tol_psd(h)
    if lam > tol:
        kind = Positivity.POSITIVE_DEFINITE
    elif lam > -tol:
        kind = Positivity.POSITIVE_SEMIDEFINITE
    else:
        kind = Positivity.INDEFINITE
    return PositivityClass(kind, lam)


def require_pd(m: Matrixish, name: str = "matrix") -> HermitianMatrix:
    h = as_hermitian(m)
    pc = classify(h)
    if not pc.is_pd:
        raise NotPositiveDefinite(f"{name} is not positive definite (min eigenvalue {pc.min_eig:.3e})")
    return h


def require_psd(m: Matrixish, name: str = "matrix") -> HermitianMatrix:
    h = as_hermitian(m)
    pc = classify(h)
    if not pc.is_psd:
        raise DomainError(f"{name} is not positive semidefinite (min eigenvalue {pc.min_eig:.3e})")
    return h


def clamped_eigenvalues(m: Matrixish) -> np.ndarray:
    """Descending eigenvalues with values in ``(-tol_psd, 0)`` set to zero."""
    h = as_hermitian(m)
    w = np.array(h.eigenvalues)
    tol = tol_psd(h)
    w[(w < 0) & (w > -tol)] = 0.0
    return w


def same_dimension(*ms: HermitianMatrix) -> int:
    n = ms[0].n
    for m in ms[1:]:
        if m.n != n:
            raise DimensionMismatch(f"dimension mismatch: {n} vs {m.n}")
    return n


# name -> (callable, lower bound of domain, lower bound included)
_NAMED = {
    "log": (np.log, 0.0, False),
    "sqrt": (np.sqrt, 0.0, True),
    "exp": (np.exp, -math.inf, False),
    "square": (np.square, -math.inf, False),
    "id": (lambda x: np.asarray(x, dtype=float), -math.inf, False),
}


def eta(x):
    """``x log x`` with the continuous extension ``eta(0) = 0``."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log(safe), 0.0)


_NAMED["eta"] = (eta, 0.0, True)


def scalar_function(f):
    """Resolve ``f`` (a name or callable) to ``(callable, lower, closed)``."""
    if isinstance(f, str):
        try:
            return _NAMED[f]
        except KeyError:
            raise DomainError(f"unknown function {f!r}; known: {sorted(_NAMED)}") from None
    return f, None, None


def apply_to_eigenvalues(w: np.ndarray, f, tol: float = 0.0) -> np.ndarray:
    fn, lower, closed = scalar_function(f)
    w = np.array(w, dtype=float)
    if lower is not None and lower == 0.0:
        w[(w < 0) & (w > -tol)] = 0.0
    if lower is not None and np.isfinite(lower):
        bad = w < lower if closed else w <= lower
        if np.any(bad):
            raise DomainError(f"eigenvalue {w[bad][0]:.3e} outside the domain of {f}")
    with np.errstate(all="ignore"):
        fw = np.asarray(fn(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError(f"{f} is not finite on the spectrum {w}")
    return fw


def apply_function(m: Matrixish, f: Union[str, Callable]) -> HermitianMatrix:
    """Functional calculus ``U f(Lambda) U*``.

    ``f`` is either a registered name (``log``, ``sqrt``, ``exp``, ``square``,
    ``eta``, ``id``) or a vectorized callable. For functions whose domain is
    ``[0, inf)`` or ``(0, inf)``, eigenvalues in ``(-tol_psd, 0)`` are clamped
    to zero first.
    """
    h = as_hermitian(m)
    sd = h.spectral
    fw = apply_to_eigenvalues(sd.eigenvalues, f, tol_psd(h))
    u = sd.eigenvectors
    out = HermitianMatrix((u * fw) @ u.conj().T)
    out.__dict__["spectral"] = _sorted(fw.copy(), u.copy())
    return out


def trace_tau(m: Matrixish) -> float:
    """Normalized trace ``(1/n) Tr``."""
    a = _raw(m)
    return float(np.real(np.trace(a))) / a.shape[0]


def norm_tau(m: Matrixish) -> float:
    """``||X||_{2,tau} = tau(X* X)^{1/2}``."""
    a = _raw(m)
    return math.sqrt(float(np.sum(np.abs(a) ** 2)) / a.shape[0])


def geometric_mean(a: Matrixish, b: Matrixish) -> HermitianMatrix:
    """Matrix geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``."""
    a = require_pd(a, "A")
    b = require_pd(b, "B")
    same_dimension(a, b)
    sd = a.spectral
    u = sd.eigenvectors
    s = np.sqrt(sd.eigenvalues)
    a_half = (u * s) @ u.conj().T
    a_mhalf = (u / s) @ u.conj().T
    inner = apply_function(HermitianMatrix(a_mhalf @ b.array @ a_mhalf), "sqrt")
    return HermitianMatrix(a_half @ inner.array @ a_half)


def check_dimension(m: HermitianMatrix) -> None:
    if m.n > MAX_DIMENSION:
        raise DimensionMismatch(f"n={m.n} exceeds the supported envelope n <= {MAX_DIMENSION}")
