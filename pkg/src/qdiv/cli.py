"""Command line interface: ``qdiv div | verify | certify | plotdata``.

Exit codes: 0 pass, 1 violation, 2 parse error, 3 domain error,
4 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

import numpy as np

from . import certify, instances, kernel, opgen, suites
from .divergence import d_tau_shifted_sq, pairwise_table, qjsd_shifted
from .errors import InvalidGenerator, InvalidKernel, ParseError, QdivError
from .io import load_json, load_matrices, parse_certify_instance

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_INCONCLUSIVE = 4


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_mode(mode: str):
    if mode in ("sdiv", "qjsd"):
        return mode, None
    if mode.startswith("jensen:"):
        spec = opgen.get(mode.split(":", 1)[1])
        if spec.continuous:
            return "qjsd", None
        return "jensen", spec.to_generator()
    raise ParseError(f"unknown mode {mode!r}; use sdiv, qjsd or jensen:<name>")


# -- div -----------------------------------------------------------------------------


def cmd_div(args) -> int:
    mats = load_matrices(args.matrices)
    mode, gen = _parse_mode(args.mode)
    sq, rt = pairwise_table(mats, mode, gen)
    m = len(mats)
    if args.format == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "squared", "root"])
        for i in range(m):
            for j in range(m):
                w.writerow([i, j, repr(float(sq[i, j])), repr(float(rt[i, j]))])
        text = buf.getvalue()
    else:
        text = _dump({"mode": args.mode, "m": m, "n": mats[0].n,
                      "squared": sq.tolist(), "root": rt.tolist()})
    _emit(text, args.output)
    return EXIT_OK


# -- verify --------------------------------------------------------------------------


def _tolerance_overrides(args) -> dict:
    out = {}
    for name in suites.DEFAULT_TOLERANCES:
        v = getattr(args, name, None)
        if v is not None:
            out[name] = v
    return out


def _verify_kernel(args) -> int:
    if not args.kernel:
        raise ParseError("the kernel check needs --kernel FILE")
    cfg = kernel.KernelConfig.from_dict(load_json(args.kernel))
    v = kernel.cnd_test(cfg)
    d = cfg.to_dict(v)
    d["witness"] = None if v.witness is None else v.witness.tolist()
    d["max_centered_eig"] = v.max_centered_eig
    d["tol_cnd"] = v.tol
    d["schoenberg"] = [[b, e] for b, e in kernel.schoenberg_test(cfg)]
    _emit(_dump(d), args.output)
    if v.verdict is kernel.Verdict.CND:
        return EXIT_OK
    if v.verdict is kernel.Verdict.NOT_CND:
        return EXIT_VIOLATION
    return EXIT_INCONCLUSIVE


def cmd_verify(args) -> int:
    if args.replay:
        rec = load_json(args.replay)
        excess = suites.replay(rec)
        _emit(_dump({"check": rec.get("check"), "excess": excess, "violated": excess > 0}), args.output)
        return EXIT_VIOLATION if excess > 0 else EXIT_OK
    if args.suite is None:
        raise ParseError("verify needs a suite name or --replay FILE")
    if args.suite == "kernel":
        return _verify_kernel(args)
    if args.seed is None:
        raise ParseError("randomized suites need --seed")
    run = suites.run_suite(args.suite, args.seed, args.trials, _tolerance_overrides(args))
    report = run.to_dict()
    if args.replay_dir and run.violations:
        d = Path(args.replay_dir)
        d.mkdir(parents=True, exist_ok=True)
        for rec in report["replay"]:
            (d / f"replay_{args.suite}_{rec['check']}_seed{args.seed}.json").write_text(_dump(rec))
    _emit(_dump(report), args.output)
    return EXIT_VIOLATION if run.violations else EXIT_OK


# -- certify -------------------------------------------------------------------------


def cmd_certify(args) -> int:
    target = args.target
    if target.lower() == "s2":
        cert = certify.certify_S2()
    elif target.lower() == "s3":
        cert = certify.certify_S3()
    else:
        points, c, tau = parse_certify_instance(load_json(target))
        cert = certify.certify_quad_form(points, c, tau)
    _emit(cert.to_json() + "\n", args.output)
    if cert.verdict is certify.CertVerdict.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- plotdata ------------------------------------------------------------------------


def _pair(args):
    if args.matrices:
        mats = load_matrices(args.matrices)
        if len(mats) < 2:
            raise ParseError("plotdata needs a file with at least two matrices")
        return mats[0], mats[1]
    x = instances.matrices()
    return x[0], x[1]


def cmd_plotdata(args) -> int:
    grid = np.logspace(np.log10(args.min), np.log10(args.max), args.points)
    if args.kind == "shifted_distance":
        a, b = _pair(args)
        rows = [(t, d_tau_shifted_sq(a, b, t).squared) for t in grid]
        header = ("t", "d_tau_t_sq")
    elif args.kind == "qjsd_tail":
        a, b = _pair(args)
        rows = [(t, qjsd_shifted(a, b, t).squared) for t in grid]
        header = ("t", "qjsd_shifted")
    else:
        if args.kernel:
            cfg = kernel.KernelConfig.from_dict(load_json(args.kernel))
        else:
            cfg = kernel.build_divergence_kernel(instances.matrices(), "qjsd")
        rows = kernel.schoenberg_test(cfg, grid)
        header = ("beta", "min_eig")
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for x, y in rows:
        w.writerow([repr(float(x)), repr(float(y))])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

_PLOT_DEFAULTS = {"shifted_distance": (1e-3, 1e3), "qjsd_tail": (1.0, 1e4), "schoenberg_sweep": (1e-4, 10.0)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdiv", description="Matrix divergences, metric checks and certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("div", help="pairwise divergence table")
    d.add_argument("matrices", help="matrix JSON file")
    d.add_argument("--mode", default="sdiv", help="sdiv, qjsd or jensen:<generator> (default: sdiv)")
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_div)

    v = sub.add_parser("verify", help="randomized property suites")
    v.add_argument("suite", nargs="?", choices=sorted(suites.SUITES) + ["kernel"])
    v.add_argument("--seed", type=int)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--kernel", help="kernel JSON file (suite 'kernel')")
    v.add_argument("--replay", help="re-run a stored failing instance")
    v.add_argument("--replay-dir", help="write replay files for failing checks here")
    v.add_argument("-o", "--output")
    for name, default in suites.DEFAULT_TOLERANCES.items():
        v.add_argument("--" + name.replace("_", "-"), dest=name, type=float,
                       help=f"default {default:g}")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("certify", help="interval certificate (s2, s3 or an instance file)")
    c.add_argument("target")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_certify)

    g = sub.add_parser("plotdata", help="two-column CSV series")
    g.add_argument("kind", choices=sorted(_PLOT_DEFAULTS))
    g.add_argument("--matrices", help="matrix JSON file (first two matrices are used)")
    g.add_argument("--kernel", help="kernel JSON file for schoenberg_sweep")
    g.add_argument("--min", type=float)
    g.add_argument("--max", type=float)
    g.add_argument("--points", type=int, default=50)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "plotdata":
        lo, hi = _PLOT_DEFAULTS[args.kind]
        args.min = lo if args.min is None else args.min
        args.max = hi if args.max is None else args.max
        if not (0 < args.min < args.max) or args.points < 2:
            print("qdiv: need 0 < --min < --max and --points >= 2", file=sys.stderr)
            return EXIT_DOMAIN
    try:
        return args.func(args)
    except (ParseError, InvalidKernel, InvalidGenerator) as exc:
        print(f"qdiv: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except QdivError as exc:
        print(f"qdiv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
