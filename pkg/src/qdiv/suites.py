"""Randomized property suites behind ``qdiv verify``.

Every check is a pure function ``check(inputs, params) -> excess`` where
``inputs`` holds matrices and ``excess > 0`` means a violation. Suites draw
inputs from a seeded generator and call the checks; a failing instance is
stored as plain JSON (matrices plus parameters) and can be re-run with
:func:`replay` without the generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import instances, kernel, opgen, rearrange, scalar
from .divergence import (
    d_tau,
    d_tau_shifted_sq,
    d_tau_sq,
    metric_suite,
    qjsd,
    qjsd_by_integral,
    qjsd_shifted,
)
from .errors import DomainError
from .io import matrix_to_dict, parse_matrix
from .linalg import HermitianMatrix
from .sampling import random_invertible, random_pd, random_psd

DIMS = (2, 3, 4, 8)

DEFAULT_TOLERANCES = {
    "tol_tri": 1e-10,
    "tol_bound": 1e-10,
    "tol_congruence": 1e-8,
    "tol_scaling": 1e-12,
    "tol_integral": 1e-5,
    "integral_rel_tol": 1e-8,
    "tol_derivative": 1e-4,
    "tol_decomp": 1e-9,
    "tol_roundtrip": 1e-10,
    "tol_kt": 1e-10,
}


# -- checks: (inputs, params) -> excess ---------------------------------------------


def _triangle_excess(pts, mode, params, generator=None):
    rep = metric_suite(pts, mode, generator, scales=(), tol_tri=params["tol_tri"])
    return max(rep.worst_triangle_margin - params["tol_tri"],
               rep.worst_symmetry_gap - params["tol_tri"],
               1.0 if rep.identity_anomalies else -1.0)


def check_triangle_sdiv(inp, params):
    return _triangle_excess(inp["points"], "sdiv", params)


def check_triangle_qjsd(inp, params):
    return _triangle_excess(inp["points"], "qjsd", params)


def check_triangle_jensen(inp, params):
    return _triangle_excess(inp["points"], "jensen", params,
                            opgen.get(params["generator"]).to_generator())


def check_congruence(inp, params):
    a, b = inp["A"], inp["B"]
    s = np.asarray(inp["S"].array if isinstance(inp["S"], HermitianMatrix) else inp["S"])
    ref = d_tau(a, b)
    sa = HermitianMatrix(s.conj().T @ a.array @ s)
    sb = HermitianMatrix(s.conj().T @ b.array @ s)
    return abs(d_tau(sa, sb) - ref) - params["tol_congruence"] * (1.0 + ref)


def check_scaling(inp, params):
    a, b, c = inp["A"], inp["B"], params["c"]
    return abs(d_tau_sq(a * c, b * c).squared - d_tau_sq(a, b).squared) - params["tol_scaling"]


def check_fk(inp, params):
    r = rearrange.fk_sum_bound_check(inp["X"], inp["Y"], params["f"], params["u_panels"],
                                     params["tol_bound"])
    return r.lower - r.upper - r.tol


def check_log_sum(inp, params):
    r = rearrange.log_sum_lower_check(inp["X"], inp["Y"], params["tol_bound"])
    return r.lower - r.upper - r.tol


def check_dst_lower(inp, params):
    r = rearrange.dst_lower_check(inp["X"], inp["Y"], params["tol_bound"])
    return r.lower - r.upper - r.tol


def check_minkowski(inp, params):
    r = rearrange.minkowski_check(inp["X"], inp["Y"], params["tol_bound"])
    return r.lower - r.upper - r.tol


def check_d1_identity(inp, params):
    lhs, rhs = rearrange.d1_mu_identity_check(inp["X"])
    return abs(lhs - rhs) - params["tol_bound"]


def check_trace_formula(inp, params):
    lhs, rhs = rearrange.trace_formula_check(inp["X"], params["f"])
    return abs(lhs - rhs) - rearrange.trace_formula_tolerance(inp["X"], params["f"])


def check_integral(inp, params):
    a, b = inp["A"], inp["B"]
    ref = qjsd(a, b).squared
    val = qjsd_by_integral(a, b, params["integral_rel_tol"])
    return abs(val - ref) / max(ref, 1e-300) - params["tol_integral"]


def shifted_derivative(a, b, t: float, h: Optional[float] = None) -> float:
    """Central difference of ``F(t) = J(A + tI, B + tI)``."""
    h = 1e-3 * t if h is None else h
    return (qjsd_shifted(a, b, t + h).squared - qjsd_shifted(a, b, t - h).squared) / (2.0 * h)


def check_derivative(inp, params):
    a, b, t = inp["A"], inp["B"], params["t"]
    ref = d_tau_shifted_sq(a, b, t).squared
    fd = shifted_derivative(a, b, t)
    return abs(fd + ref) / max(ref, 1e-300) - params["tol_derivative"]


def check_decomposition(inp, params):
    direct, dec = opgen.decomposition_check(inp["A"], inp["B"], params["generator"])
    return abs(direct - dec) - params["tol_decomp"] * (1.0 + abs(direct))


def check_closed_form(inp, params):
    spec = opgen.get(params["generator"])
    closed = opgen.jensen_gap_direct(inp["A"], inp["B"], spec)
    dec = opgen.decomposed_gap(inp["A"], inp["B"], spec)
    return abs(closed - dec) - params["tol_decomp"] * (1.0 + abs(closed))


def check_kt_gap(inp, params):
    t = params["t"]
    gap = opgen.jensen_gap_direct(inp["A"], inp["B"], "square", lambda x: opgen.k_t(x, t))
    return abs(gap - t * d_tau_shifted_sq(inp["A"], inp["B"], t).squared) - params["tol_kt"]


def _kernel_of(inp):
    return kernel.KernelConfig(np.asarray(inp["K"], dtype=float))


def check_euclid_cnd(inp, params):
    cfg = _kernel_of(inp)
    v = kernel.cnd_test(cfg)
    return -1.0 if v.is_cnd else 1.0


def check_schoenberg_forward(inp, params):
    cfg = _kernel_of(inp)
    mins = kernel.schoenberg_test(cfg, (0.01, 0.1, 1.0))
    return max(-e for _, e in mins) - cfg.tol_cnd


def check_embed_roundtrip(inp, params):
    cfg = _kernel_of(inp)
    g = kernel.embed_gram(cfg)
    rt = float(np.max(np.abs(kernel.gram_distances(g) - cfg.K)))
    psd = -float(np.min(np.linalg.eigvalsh(g))) - cfg.tol_cnd
    return max(rt - params["tol_roundtrip"], psd)


def check_counterexample(inp, params):
    cfg = kernel.build_divergence_kernel(inp["points"], "qjsd")
    v = kernel.cnd_test(cfg)
    q = kernel.quad_form(cfg, params["c"])
    mins = kernel.schoenberg_test(cfg)
    worst = min(e for _, e in mins)
    bad = (v.verdict is not kernel.Verdict.NOT_CND) or q <= 0 or worst >= -cfg.tol_cnd
    return 1.0 if bad else -q


CHECKS: dict = {
    "triangle_sdiv": check_triangle_sdiv,
    "triangle_qjsd": check_triangle_qjsd,
    "triangle_jensen": check_triangle_jensen,
    "congruence": check_congruence,
    "scaling": check_scaling,
    "fk": check_fk,
    "log_sum": check_log_sum,
    "dst_lower": check_dst_lower,
    "minkowski": check_minkowski,
    "d1_identity": check_d1_identity,
    "trace_formula": check_trace_formula,
    "integral": check_integral,
    "derivative": check_derivative,
    "decomposition": check_decomposition,
    "closed_form": check_closed_form,
    "kt_gap": check_kt_gap,
    "euclid_cnd": check_euclid_cnd,
    "schoenberg_forward": check_schoenberg_forward,
    "embed_roundtrip": check_embed_roundtrip,
    "counterexample": check_counterexample,
}


# -- serialization of instances ---------------------------------------------------


def _encode(v):
    if isinstance(v, HermitianMatrix):
        return {"matrix": matrix_to_dict(v)}
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v):
            return {"array_re": v.real.tolist(), "array_im": v.imag.tolist()}
        return {"array_re": v.tolist()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    return v


def _decode(v):
    if isinstance(v, dict) and "matrix" in v:
        return parse_matrix(v["matrix"])
    if isinstance(v, dict) and "array_re" in v:
        a = np.array(v["array_re"], dtype=float)
        if "array_im" in v:
            a = a + 1j * np.array(v["array_im"], dtype=float)
        return a
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def encode_instance(suite, check, inputs, params) -> dict:
    return {"suite": suite, "check": check,
            "inputs": {k: _encode(v) for k, v in inputs.items()}, "params": dict(params)}


def replay(record: dict) -> float:
    """Re-run a stored instance; returns its excess (``> 0`` is a violation)."""
    try:
        fn = CHECKS[record["check"]]
    except KeyError:
        raise DomainError(f"unknown check {record.get('check')!r}") from None
    inputs = {k: _decode(v) for k, v in record["inputs"].items()}
    return float(fn(inputs, record["params"]))


# -- suites ---------------------------------------------------------------------------


@dataclass
class CheckStats:
    count: int = 0
    violations: int = 0
    worst_excess: float = -math.inf
    worst_instance: Optional[dict] = None

    def to_dict(self):
        return {"count": self.count, "violations": self.violations, "worst_excess": self.worst_excess}


@dataclass
class SuiteRun:
    suite: str
    seed: int
    trials: int
    tolerances: dict
    checks: dict = field(default_factory=dict)

    def run(self, check: str, inputs: dict, params: Optional[dict] = None):
        params = {**self.tolerances, **(params or {})}
        excess = float(CHECKS[check](inputs, params))
        st = self.checks.setdefault(check, CheckStats())
        st.count += 1
        if excess > 0:
            st.violations += 1
        if excess > st.worst_excess:
            st.worst_excess = excess
            if excess > 0:
                st.worst_instance = encode_instance(self.suite, check, inputs, params)
        return excess

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.checks.values())

    def replays(self) -> list:
        return [s.worst_instance for _, s in sorted(self.checks.items()) if s.worst_instance]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "tolerances": dict(sorted(self.tolerances.items())),
            "checks": {k: v.to_dict() for k, v in sorted(self.checks.items())},
            "violations": self.violations,
            "replay": self.replays(),
        }


def _dim(rng, dims=DIMS):
    return int(dims[rng.integers(len(dims))])


def _complex(rng):
    return bool(rng.integers(2))


def suite_metric(run: SuiteRun, rng):
    for _ in range(run.trials):
        n = _dim(rng)
        cx = _complex(rng)
        pd = [random_pd(n, rng, complex_=cx) for _ in range(3)]
        run.run("triangle_sdiv", {"points": pd})
        ranks = rng.integers(1, n + 1, size=3)
        psd = [random_psd(n, rng, rank=int(r), complex_=cx) for r in ranks]
        run.run("triangle_qjsd", {"points": psd})
        run.run("congruence", {"A": pd[0], "B": pd[1], "S": random_invertible(n, rng, complex_=cx)})
        c = float(10.0 ** rng.uniform(-3, 3))
        run.run("scaling", {"A": pd[0], "B": pd[1]}, {"c": c})


FK_FUNCTIONS = ("square", "expm1", "hinge")


def suite_rearrange(run: SuiteRun, rng):
    for _ in range(run.trials):
        n = _dim(rng)
        cx = _complex(rng)
        # spectra kept in [0, 4] so exp(x) - 1 stays moderate
        x = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), low=0.05, high=2.0, complex_=cx)
        y = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), low=0.05, high=2.0, complex_=cx)
        fname = FK_FUNCTIONS[rng.integers(len(FK_FUNCTIONS))]
        if fname == "hinge":
            fname = f"hinge:{float(np.round(rng.uniform(0.0, 3.0), 3))}"
        u = int(rng.integers(1, n + 1))
        run.run("fk", {"X": x, "Y": y}, {"f": fname, "u_panels": u})
        s = random_pd(n, rng, complex_=cx)
        t = random_pd(n, rng, complex_=cx)
        run.run("log_sum", {"X": s, "Y": t})
        run.run("dst_lower", {"X": s, "Y": t})
        run.run("minkowski", {"X": s, "Y": t})
        run.run("d1_identity", {"X": s})
        f = ("id", "square", "log", "eta")[rng.integers(4)]
        run.run("trace_formula", {"X": s}, {"f": f})


def suite_integral(run: SuiteRun, rng):
    for k in range(run.trials):
        n = int(rng.integers(1, 5))
        cx = _complex(rng)
        a = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), complex_=cx)
        b = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), complex_=cx)
        if qjsd(a, b).squared == 0.0:
            continue
        run.run("integral", {"A": a, "B": b})
        if k < 10 or run.trials <= 10:
            for t in (0.1, 1.0, 10.0):
                run.run("derivative", {"A": a, "B": b}, {"t": t})


def suite_decomposition(run: SuiteRun, rng):
    for _ in range(run.trials):
        n = int(rng.integers(1, 9))
        cx = _complex(rng)
        a = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), complex_=cx)
        b = random_pd(n, rng, complex_=cx) if rng.integers(2) else random_psd(
            n, rng, rank=int(rng.integers(1, n + 1)), complex_=cx)
        for g in opgen.DISCRETE:
            run.run("decomposition", {"A": a, "B": b}, {"generator": g})
            run.run("closed_form", {"A": a, "B": b}, {"generator": g})
        t = float(10.0 ** rng.uniform(-2, 2))
        run.run("kt_gap", {"A": a, "B": b}, {"t": t})
        c = random_psd(n, rng, rank=int(rng.integers(1, n + 1)), complex_=cx)
        g = opgen.DISCRETE[rng.integers(len(opgen.DISCRETE))]
        run.run("triangle_jensen", {"points": [a, b, c]}, {"generator": g})


def suite_schoenberg(run: SuiteRun, rng):
    pts = [HermitianMatrix(x) for x in instances.matrices()]
    run.run("counterexample", {"points": pts}, {"c": list(instances.COEFFS)})
    for _ in range(run.trials):
        m = int(rng.integers(2, 9))
        if rng.integers(2):
            d = int(rng.integers(1, 5))
            p = rng.normal(size=(m, d))
            k = np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)
        else:
            x = np.exp(rng.uniform(-3, 3, size=m))
            k = scalar.delta_s_sq(x[:, None], x[None, :])
            k = np.asarray(k, dtype=float)
        np.fill_diagonal(k, 0.0)
        k = 0.5 * (k + k.T)
        inp = {"K": k}
        run.run("euclid_cnd", inp)
        run.run("schoenberg_forward", inp)
        run.run("embed_roundtrip", inp)


SUITES: dict = {
    "metric": suite_metric,
    "rearrange": suite_rearrange,
    "integral": suite_integral,
    "schoenberg": suite_schoenberg,
    "decomposition": suite_decomposition,
}


def run_suite(name: str, seed: int, trials: int, tolerances: Optional[dict] = None) -> SuiteRun:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    if trials < 0:
        raise DomainError("trials must be nonnegative")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    run = SuiteRun(name, int(seed), int(trials), tol)
    SUITES[name](run, np.random.default_rng(seed))
    return run
