"""The five integer 2x2 matrices and the coefficient vector of the CND counterexample."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# (a, b, d) of [[a, b], [b, d]]
ENTRIES = (
    (2, 1, 1),
    (9, 2, 1),
    (2, 1, 7),
    (8, 5, 8),
    (8, 8, 9),
)
COEFFS = (-10, 10, 10, -20, 10)
TRACE_BUDGET = 40


def determinant(abd) -> int:
    a, b, d = abd
    return a * d - b * b


def matrices():
    """``X_1 .. X_5`` as float arrays (all entries are small integers, hence exact)."""
    return [np.array([[a, b], [b, d]], dtype=float) for a, b, d in ENTRIES]


def density_blocks(T: int = TRACE_BUDGET):
    """Exact ``(X_i / T, 1 - Tr(X_i) / T)`` pairs as Fractions."""
    out = []
    for a, b, d in ENTRIES:
        block = (Fraction(a, T), Fraction(b, T), Fraction(d, T))
        out.append((block, 1 - Fraction(a + d, T)))
    return out


def densities(T: int = TRACE_BUDGET):
    """``rho_i = X_i / T (+) (1 - Tr X_i / T)`` as 3x3 float arrays."""
    out = []
    for (a, b, d), tail in density_blocks(T):
        r = np.zeros((3, 3))
        r[:2, :2] = [[float(a), float(b)], [float(b), float(d)]]
        r[2, 2] = float(tail)
        out.append(r)
    return out
