"""Operator convex Jensen generators with explicit Nevanlinna data.

A generator is described by ``b >= 0`` and a finite list of atoms
``(t, w)``: ``f'(x) = a + b x + sum_k w_k x / (x + t_k)``. Integrating with
the affine part fixed to zero at ``x = 1`` gives

    f(x) = (b/2) x^2 + sum_k w_k k_t(x),   k_t(x) = (x - 1) - t log((x + t)/(1 + t)),

and the trace Jensen gap splits as
``(b/8) ||A - B||_{2,tau}^2 + sum_k w_k t_k d_tau(A + t_k, B + t_k)^2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .divergence import (
    JensenGenerator,
    SuiteReport,
    d_tau_shifted_sq,
    metric_suite,
)
from .errors import DomainError, InvalidGenerator, ParseError
from .linalg import apply_function, as_hermitian, eta, norm_tau, require_psd, same_dimension, trace_tau

DECOMP_REL_TOL = 1e-9


def k_t(x, t: float):
    """``(x - 1) - t log((x + t)/(1 + t))``, whose derivative is ``x / (x + t)``."""
    x = np.asarray(x, dtype=float)
    return (x - 1.0) - t * np.log((x + t) / (1.0 + t))


def reconstruct_f(b: float, atoms) -> Callable:
    def f(x):
        x = np.asarray(x, dtype=float)
        out = 0.5 * b * x * x
        for t, w in atoms:
            out = out + w * k_t(x, t)
        return out

    return f


@dataclass(frozen=True)
class GeneratorSpec:
    """Named generator: a closed form ``f`` together with its data ``(b, atoms)``.

    ``continuous`` marks generators whose measure is not a finite list of
    atoms (only ``eta`` with ``dt / t``); those go through the QJSD routines.
    """

    name: str
    b: float = 0.0
    nu_atoms: tuple = ()
    f: Optional[Callable] = field(default=None, compare=False, repr=False)
    provenance: str = ""
    continuous: bool = False

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.nu_atoms)
        object.__setattr__(self, "nu_atoms", atoms)
        object.__setattr__(self, "b", float(self.b))
        if not (self.b >= 0 and math.isfinite(self.b)):
            raise InvalidGenerator(f"b must be finite and nonnegative, got {self.b}")
        for t, w in atoms:
            if not (t > 0 and w > 0 and math.isfinite(t) and math.isfinite(w)):
                raise InvalidGenerator(f"atoms need t > 0 and w > 0, got ({t}, {w})")
        if not self.continuous and self.b == 0 and not atoms:
            raise InvalidGenerator(f"{self.name}: affine generator (b = 0 and no atoms)")
        if self.f is None:
            object.__setattr__(self, "f", eta if self.continuous else reconstruct_f(self.b, atoms))
        f0 = float(np.asarray(self.f(np.array([0.0])))[0])
        if not math.isfinite(f0):
            raise InvalidGenerator(f"{self.name}: f(0) must be finite")

    @property
    def reconstructed_f(self) -> Callable:
        if self.continuous:
            raise DomainError(f"{self.name} has a continuous measure; no finite reconstruction")
        return reconstruct_f(self.b, self.nu_atoms)

    def to_generator(self) -> JensenGenerator:
        if self.continuous:
            return JensenGenerator.eta()
        return JensenGenerator.custom(self.b, self.nu_atoms)

    def to_dict(self) -> dict:
        d = {"name": self.name, "b": self.b, "atoms": [list(a) for a in self.nu_atoms]}
        if self.continuous:
            d["continuous"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        try:
            name = str(d["name"])
            if d.get("continuous"):
                return REGISTRY["eta"] if name == "eta" else cls(name, continuous=True)
            return cls(name, float(d.get("b", 0.0)), tuple(tuple(a) for a in d.get("atoms", [])))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidGenerator):
                raise
            raise ParseError(f"malformed generator JSON: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None


def _neglog(s):
    def f(x):
        return -np.log(np.asarray(x, dtype=float) + s)

    return f


def _mixed_closed(x):
    # 0.25 x^2 + 2 k_{1/2}(x) + k_3(x), written out without k_t
    x = np.asarray(x, dtype=float)
    return (0.25 * x * x + 3.0 * (x - 1.0) - np.log((2.0 * x + 1.0) / 3.0)
            - 3.0 * np.log((x + 3.0) / 4.0))


REGISTRY = {
    "square": GeneratorSpec("square", 2.0, (), lambda x: np.square(x), "f(x) = x^2"),
    "half_square": GeneratorSpec("half_square", 1.0, (), lambda x: 0.5 * np.square(x), "f(x) = x^2/2"),
    "neglog1": GeneratorSpec("neglog1", 0.0, ((1.0, 1.0),), _neglog(1.0), "f(x) = -log(x + 1)"),
    "neglog2": GeneratorSpec("neglog2", 0.0, ((2.0, 0.5),), _neglog(2.0), "f(x) = -log(x + 2)"),
    "mixed": GeneratorSpec("mixed", 0.5, ((0.5, 2.0), (3.0, 1.0)), _mixed_closed,
                           "b = 1/2 plus atoms (1/2, 2) and (3, 1)"),
    "eta": GeneratorSpec("eta", continuous=True, provenance="f(x) = x log x, measure dt/t"),
}

DISCRETE = tuple(k for k, v in REGISTRY.items() if not v.continuous)


def get(name) -> GeneratorSpec:
    if isinstance(name, GeneratorSpec):
        return name
    try:
        return REGISTRY[name]
    except KeyError:
        raise InvalidGenerator(f"unknown generator {name!r}; known: {sorted(REGISTRY)}") from None


def _gap(a, b, f) -> float:
    m = as_hermitian(0.5 * (a.array + b.array))
    return (0.5 * trace_tau(apply_function(a, f)) + 0.5 * trace_tau(apply_function(b, f))
            - trace_tau(apply_function(m, f)))


def jensen_gap_direct(a, b, spec, f: Optional[Callable] = None) -> float:
    """``(1/2) tau f(A) + (1/2) tau f(B) - tau f((A + B)/2)`` by functional calculus.

    ``f`` defaults to the closed form attached to ``spec``.
    """
    spec = get(spec)
    a = require_psd(a, "A")
    b = require_psd(b, "B")
    same_dimension(a, b)
    return _gap(a, b, spec.f if f is None else f)


def decomposed_gap(a, b, spec) -> float:
    """``(b/8) ||A - B||_{2,tau}^2 + sum_k w_k t_k d_tau(A + t_k, B + t_k)^2``."""
    spec = get(spec)
    if spec.continuous:
        raise DomainError(f"{spec.name}: decomposition needs a finite list of atoms")
    a = require_psd(a, "A")
    b = require_psd(b, "B")
    same_dimension(a, b)
    val = 0.125 * spec.b * norm_tau(a.array - b.array) ** 2
    for t, w in spec.nu_atoms:
        val += w * t * d_tau_shifted_sq(a, b, t).squared
    return val


def decomposition_check(a, b, spec):
    """Direct gap of the reconstructed ``f`` against the decomposition.

    Returns
    -------
    direct, decomposed : float
        Expected to agree within ``1e-9 (1 + |direct|)``.
    """
    spec = get(spec)
    if spec.continuous:
        raise DomainError(f"{spec.name}: decomposition needs a finite list of atoms")
    return jensen_gap_direct(a, b, spec, spec.reconstructed_f), decomposed_gap(a, b, spec)


def decomposition_agrees(direct: float, decomposed: float, rel_tol: float = DECOMP_REL_TOL) -> bool:
    return abs(direct - decomposed) <= rel_tol * (1.0 + abs(direct))


def metric_from_generator(points, spec, **kwargs) -> SuiteReport:
    """Metric-axiom report for ``sqrt(J_f)`` over a point set."""
    spec = get(spec)
    if spec.continuous:
        return metric_suite(points, "qjsd", **kwargs)
    return metric_suite(points, "jensen", spec.to_generator(), **kwargs)


def eta_gap_direct(a, b) -> float:
    """Direct gap for ``eta``; kept apart from :func:`qjsd` so the two can be compared."""
    return jensen_gap_direct(a, b, "eta")

