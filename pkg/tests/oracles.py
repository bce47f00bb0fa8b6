"""Independent 200-bit reference evaluation for the interval fuzz."""

from fractions import Fraction

import mpmath as mp

from qdiv import interval as iv

OPS = ("add", "sub", "mul", "div", "sqrt", "log", "eta")


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if not man:
        return Fraction(0)
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


def random_rational(rng) -> Fraction:
    num = int(rng.integers(-10**6, 10**6 + 1))
    den = int(rng.integers(1, 10**6 + 1))
    return Fraction(num, den)


def run_chain(rng, length=3):
    """One random chain. Returns ``(interval, oracle_fraction, ops)``."""
    with mp.workprec(200):
        q = random_rational(rng)
        x = iv.interval_from_rational(q)
        ref = mp.mpf(q.numerator) / q.denominator
        ops = []
        for _ in range(length):
            op = OPS[int(rng.integers(len(OPS)))]
            if op in ("sqrt", "log", "eta") and not x.lo > 0:
                op = "add"
            if op == "div":
                r = random_rational(rng)
                if r == 0:
                    op = "add"
            if op in ("add", "sub", "mul", "div"):
                r = r if op == "div" else random_rational(rng)
                y = iv.interval_from_rational(r)
                yr = mp.mpf(r.numerator) / r.denominator
                if op == "add":
                    x, ref = iv.iadd(x, y), ref + yr
                elif op == "sub":
                    x, ref = iv.isub(x, y), ref - yr
                elif op == "mul":
                    x, ref = iv.imul(x, y), ref * yr
                else:
                    x, ref = iv.idiv(x, y), ref / yr
            elif op == "sqrt":
                x, ref = iv.isqrt(x), mp.sqrt(ref)
            elif op == "log":
                x, ref = iv.ilog(x), mp.log(ref)
            else:
                x, ref = iv.ieta(x), ref * mp.log(ref)
            ops.append(op)
        return x, mpf_to_fraction(ref), ops


def fuzz(rng, n_chains: int):
    """Count enclosures that miss the oracle; returns ``(failures, first_failure)``."""
    failures = 0
    first = None
    for _ in range(n_chains):
        x, ref, ops = run_chain(rng)
        if not x.contains(ref):
            failures += 1
            if first is None:
                first = (x, ref, ops)
    return failures, first
