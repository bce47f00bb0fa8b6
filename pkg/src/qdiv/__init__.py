"""Trace-logarithmic and quantum Jensen-Shannon divergences on positive matrices.

Modules
-------
linalg       Hermitian spectral decomposition and functional calculus.
scalar       The scalar divergence and its integral representation.
divergence   Matrix divergences, Jensen generators, metric suites.
rearrange    Eigenvalue step functions and rearrangement inequalities.
kernel       CND tests, Schoenberg sweeps and Hilbert embeddings.
interval     Outward-rounded interval arithmetic.
certify      Interval certificates for quadratic forms of QJSD kernels.
opgen        Operator convex generators and the Jensen gap decomposition.
"""

from .divergence import (
    DivergenceValue,
    JensenGenerator,
    d_tau,
    d_tau_shifted_sq,
    d_tau_sq,
    jensen_f,
    qjsd,
    qjsd_by_integral,
    qjsd_shifted,
)
from .certify import Certificate, certify_S2, certify_S3, certify_quad_form
from .errors import QdivError
from .kernel import KernelConfig, Verdict, cnd_test, schoenberg_test
from .linalg import HermitianMatrix, apply_function, spectral, trace_tau
from .opgen import GeneratorSpec, decomposition_check, jensen_gap_direct
from .scalar import delta_s, delta_s_sq

__all__ = [
    "Certificate",
    "DivergenceValue",
    "GeneratorSpec",
    "HermitianMatrix",
    "JensenGenerator",
    "KernelConfig",
    "QdivError",
    "Verdict",
    "apply_function",
    "certify_S2",
    "certify_S3",
    "certify_quad_form",
    "cnd_test",
    "d_tau",
    "d_tau_shifted_sq",
    "d_tau_sq",
    "decomposition_check",
    "delta_s",
    "delta_s_sq",
    "jensen_f",
    "jensen_gap_direct",
    "qjsd",
    "qjsd_by_integral",
    "qjsd_shifted",
    "schoenberg_test",
    "spectral",
    "trace_tau",
]

__version__ = "0.1.0"
