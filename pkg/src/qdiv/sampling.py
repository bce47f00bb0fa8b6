"""Random test instances: Hermitian, positive (semi)definite and invertible matrices.

Every generator takes a ``numpy.random.Generator`` so that suites are
reproducible from a single seed.
"""

import numpy as np

from .linalg import HermitianMatrix


def random_unitary(n, rng, complex_=True):
    z = rng.normal(size=(n, n))
    if complex_:
        z = z + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng, bound=10.0, complex_=True):
    a = rng.uniform(-bound, bound, size=(n, n))
    if complex_:
        a = a + 1j * rng.uniform(-bound, bound, size=(n, n))
    # symmetrizing keeps |entry| <= bound
    return HermitianMatrix(a)


def random_pd(n, rng, low=0.05, high=20.0, complex_=True):
    """Positive definite matrix with eigenvalues log-uniform in ``[low, high]``."""
    w = np.exp(rng.uniform(np.log(low), np.log(high), size=n))
    u = random_unitary(n, rng, complex_)
    return HermitianMatrix((u * w) @ u.conj().T)


def random_psd(n, rng, rank=None, low=0.05, high=20.0, complex_=True):
    """Positive semidefinite matrix; ``rank < n`` produces exact zero eigenvalues."""
    if rank is None:
        rank = n
    w = np.zeros(n)
    w[:rank] = np.exp(rng.uniform(np.log(low), np.log(high), size=rank))
    u = random_unitary(n, rng, complex_)
    return HermitianMatrix((u * w) @ u.conj().T)


def random_density(n, rng, rank=None, complex_=True):
    """PSD matrix with unit normalized trace ``tau(rho) = 1``."""
    p = random_psd(n, rng, rank=rank, complex_=complex_)
    return HermitianMatrix(p.array * (n / np.real(np.trace(p.array))))


def random_invertible(n, rng, cond=1e3, complex_=True):
    """Invertible matrix with singular values log-uniform in ``[1, cond]``."""
    s = np.exp(rng.uniform(0.0, np.log(cond), size=n))
    s[0], s[-1] = 1.0, cond
    u = random_unitary(n, rng, complex_)
    v = random_unitary(n, rng, complex_)
    return (u * s) @ v.conj().T
