"""Command line front end.

Exit codes: 0 success / verified, 1 a verification did not reproduce,
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import prod

from sympy import isprime

from . import __version__
from .arith import DomainError, FactorizationBudgetError, to_decimal
from .families import (FAMILIES, INTERPRETATIONS, cyclotomic_deficiency_bound,
                       density_constant, enumerate_residue_configs, possible_m,
                       possible_m_symmetric, search_family, verify_family)
from .mqfield import MQField, PrecisionError, max_sign_bits
from .quadfield import QuadUnit, fundamental_unit, genus_relation_report, m_of_unit
from .repro import CRITERIA, run_criterion
from .unitgroup import classify_biquadratic, saturate, signature_rank

SCHEMA = "unitsig/1"
BIG_DIGITS = 10 ** 4


def _num(v) -> str:
    """Exact decimal string for ints / Fractions."""
    v = Fraction(v)
    if v.denominator == 1:
        return to_decimal(v.numerator)
    return f"{to_decimal(v.numerator)}/{v.denominator}"


def _unit_repr(u: QuadUnit, full: bool) -> dict:
    digits = u.digits()
    out = {"digits": digits, "norm": u.norm}
    if full or digits < BIG_DIGITS:
        out["epsilon"] = str(u)
        out["x"], out["y"] = _num(u.x), _num(u.y)
    else:
        s = str(u)
        out["epsilon"] = None
        out["leading_digits"] = to_decimal(u.floor())[:30]
        out["sha256"] = hashlib.sha256(s.encode()).hexdigest()
    return out


def _radicands(args, tokens: list[str]) -> list[int]:
    """Integers, or with --primes comma separated prime groups ("3,7 11,19"),
    each multiplied out after checking the primes are distinct."""
    out = []
    for tok in tokens:
        parts = tok.split(",") if args.primes else [tok]
        try:
            vals = [int(p) for p in parts if p]
        except ValueError:
            raise DomainError(f"not an integer: {tok!r}") from None
        if args.primes:
            if any(not isprime(p) for p in vals) or len(set(vals)) != len(vals):
                raise DomainError(f"{tok!r} is not a list of distinct primes")
        if len(vals) != 1 and not args.primes:
            raise DomainError(f"bad radicand {tok!r}")
        out.append(prod(vals))
    return out


def _radicand(args, tokens: list[str]) -> int:
    vals = _radicands(args, tokens)
    if args.primes:
        if len(set(prime_factors_all(tokens))) != sum(len(t.split(",")) for t in tokens):
            raise DomainError("primes must be distinct")
        return prod(vals)
    if len(vals) != 1:
        raise DomainError("expected one radicand (use --primes for a prime list)")
    return vals[0]


def prime_factors_all(tokens: list[str]) -> list[int]:
    return [int(p) for t in tokens for p in t.split(",") if p]


# -- commands ---------------------------------------------------------------------------


def cmd_unit(args) -> dict:
    d = _radicand(args, args.d)
    u = fundamental_unit(d)
    rep = {"d": d, **_unit_repr(u, args.full)}
    text = [f"d = {d}", f"epsilon = {rep['epsilon'] or '<' + str(rep['digits']) + ' digits>'}",
            f"norm = {u.norm}"]
    return {"json": rep, "text": text}


def cmd_m(args) -> dict:
    d = _radicand(args, args.d)
    u = fundamental_unit(d)
    rep = {"d": d, "norm": u.norm}
    text = [f"d = {d}, norm {u.norm}"]
    if u.norm == 1:
        md = m_of_unit(d, u)
        rep.update(m=md.m, A=_num(md.A), B=_num(md.B))
        text.append(f"m = {md.m}, A = {_num(md.A)}, B = {_num(md.B)}")
        text.append(f"sqrt(eps) = ({_num(md.A)} - ({_num(md.B)})*sqrt({d})) / sqrt({md.m})")
    else:
        rep["m"] = None
        text.append("m undefined for norm -1")
    g = genus_relation_report(d)
    rep["genus"] = {"relation_primes": list(g.relation_primes), "case": g.relation_case}
    text.append(g.describe())
    return {"json": rep, "text": text}


def analyze_report(K: MQField, full: bool = False) -> dict:
    U = saturate(K)
    R = signature_rank(U)
    subs = []
    for r in U.records:
        row = {"mask": r.mask, "subset": list(r.subset), "radicand": r.radicand,
               **_unit_repr(r.unit, full), "m": r.mdata.m if r.mdata else None}
        subs.append(row)
    rep = {
        "field": list(K.radicands),
        "degree": K.degree,
        "subfields": subs,
        "generators": U.names(),
        "provenance": [[_num(e) for e in p] for p in U.provenance],
        "adjunctions": U.adjunctions,
        "signature_matrix": ["".join(map(str, row)) for row in U.signature_matrix().rows],
        "rank": R.rank,
        "deficiency": R.deficiency,
        "exact": R.exact,
    }
    if not R.exact:
        rep["note"] = "2-saturation only: rank is a lower bound, deficiency an upper bound"
    if K.t == 2:
        case = classify_biquadratic(U)
        rep["kuroda_case"] = str(case) if case else None
    return rep


def _analyze_text(rep: dict) -> list[str]:
    out = [f"K = Q({', '.join('sqrt ' + str(d) for d in rep['field'])}), degree {rep['degree']}"]
    out.append("  S      r_S            norm  m           epsilon")
    for s in rep["subfields"]:
        eps = s["epsilon"] or f"<{s['digits']} digits, {s['leading_digits']}..., sha256 {s['sha256'][:16]}>"
        if len(eps) > 60 and s["digits"] > 40:
            eps = f"<{s['digits']} digits> " + eps[:40] + "..."
        out.append(f"  {''.join(map(str, s['subset'])):6s} {s['radicand']:<14d} {s['norm']:+d}    "
                   f"{str(s['m']):11s} {eps}")
    out.append("generators: " + ", ".join(rep["generators"]))
    out.append("signature matrix:")
    out += ["  " + " ".join(row) for row in rep["signature_matrix"]]
    out.append(f"rank {rep['rank']}, deficiency {rep['deficiency']}"
               + ("" if rep["exact"] else " (bounds: 2-saturation only)"))
    if "kuroda_case" in rep:
        out.append(f"Kuroda case {rep['kuroda_case']}")
    return out


def cmd_analyze(args) -> dict:
    K = MQField(tuple(_radicands(args, args.d)))
    rep = analyze_report(K, args.full)
    return {"json": rep, "text": _analyze_text(rep)}


def cmd_classify(args) -> dict:
    ds = _radicands(args, args.d)
    if len(ds) != 2:
        raise DomainError("classify needs exactly two radicands")
    K = MQField(tuple(ds))
    U = saturate(K)
    case = classify_biquadratic(U)
    R = signature_rank(U)
    rep = {"field": list(K.radicands), "case": str(case) if case else None,
           "group": case.text if case else None, "generators": U.names(),
           "rank": R.rank, "deficiency": R.deficiency}
    return {"json": rep, "text": [f"case {rep['case']}: {rep['group']}",
                                  "generators: " + ", ".join(U.names()),
                                  f"rank {R.rank}, deficiency {R.deficiency}"]}


def cmd_possible_m(args) -> dict:
    if args.q:
        qs = args.q
        mode = args.kind or ("3mod4" if all(q % 4 == 3 for q in qs) else "1mod4")
        C = possible_m(qs, args.symbols) if mode == "3mod4" else possible_m_symmetric(qs, args.symbols)
        vals = C.values()
    else:
        if not args.symbols:
            raise DomainError("give primes or --n with --symbols")
        n = args.n
        if n is None:
            k = len(args.symbols)
            n = next((n for n in range(2, 20) if n * (n - 1) // 2 == k), None)
            if n is None:
                raise DomainError(f"{k} symbols do not fit any prime count")
        mode = args.kind or "3mod4"
        C = possible_m(n, args.symbols) if mode == "3mod4" else possible_m_symmetric(n, args.symbols)
        vals = None
    rep = {"mode": mode, "candidates": C.labels(), "values": vals}
    text = [f"{len(C)} candidate(s): " + (", ".join(C.labels()) or "none")]
    if vals:
        text.append("values: " + ", ".join(map(str, vals)))
    if not len(C) and mode == "1mod4":
        text.append("no admissible m: the fundamental unit has norm -1")
    return {"json": rep, "text": text}


def cmd_search(args) -> dict:
    rows = search_family(args.family, args.bound, args.limit)
    width = max((len(r) for r in rows), default=0)
    header = ["p" + str(i + 1) for i in range(width)] if args.family != "rank3-n2+1" else ["n"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(buf.getvalue())
    rep = {"family": args.family, "bound": args.bound, "count": len(rows),
           "results": [list(r) for r in rows]}
    return {"json": rep, "text": buf.getvalue().rstrip("\n").split("\n")}


def cmd_verify(args) -> dict:
    v = verify_family(args.family, args.params)
    rep = {"family": v.family, "params": list(v.params), "status": v.status, "reason": v.reason,
           "checks": [{"name": c.name, "expected": _jsonable(c.expected), "actual": _jsonable(c.actual),
                       "ok": c.ok} for c in v.checks]}
    text = [f"{v.family} {v.params}: {v.status}" + (f" ({v.reason})" if v.reason else "")]
    for c in v.checks:
        text.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.name}: expected {c.expected}, got {c.actual}")
    code = 0 if v.passed else (2 if not v.in_family else 1)
    return {"json": rep, "text": text, "code": code}


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(a) for a in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return _num(x) if abs(x) >= 2 ** 53 or isinstance(x, Fraction) else int(x)
    return str(x)


def cmd_density(args) -> dict:
    D = density_constant(args.bound)
    rep = {"bound": args.bound, "lo": _num(D.lo), "hi": _num(D.hi),
           "lo_decimal": f"{float(D.lo):.12f}", "hi_decimal": f"{float(D.hi):.12f}",
           "width": f"{float(D.width):.3e}", "leading_factor": _num(D.leading)}
    return {"json": rep, "text": [f"C in {D} (width {float(D.width):.2e})"]}


def cmd_enumerate(args) -> dict:
    C = enumerate_residue_configs(args.interpretation)
    rep = {"interpretation": C.interpretation, "count": C.count, "total": C.total}
    if args.list:
        rep["configs"] = [list(c) for c in C.configs]
    text = [f"{C.count} of {C.total} configurations ({C.interpretation})"]
    if args.list:
        text += [" ".join(f"{v:+d}" for v in c) for c in C.configs]
    return {"json": rep, "text": text}


def cmd_cyclo(args) -> dict:
    B = cyclotomic_deficiency_bound(args.n)
    rep = {"n": B.n, "t": B.t, "primes_3mod4": list(B.primes), "witness": list(B.witness)}
    wit = ", ".join(f"sqrt {w}" for w in B.witness)
    return {"json": rep, "text": [f"deficiency of Q(zeta_{B.n})^+ >= {B.t}"
                                  + (f", witness Q({wit})" if B.witness else "")]}


def _run_one(args_tuple):
    n, seed, bits = args_tuple
    max_sign_bits.set(bits)
    return run_criterion(n, seed)


def cmd_reproduce(args) -> dict:
    nums = [c[0] for c in CRITERIA]
    if args.section:
        bad = [s for s in args.section if s not in nums]
        if bad:
            raise DomainError(f"unknown criterion {bad}; choose from 1..{len(nums)}")
        nums = [n for n in nums if n in args.section]
    jobs = [(n, args.seed, max_sign_bits.get()) for n in nums]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    rep = {"criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
                        for r in results],
           "passed": sum(r.passed for r in results), "total": len(results)}
    if args.timing:
        for row, r in zip(rep["criteria"], results):
            row["seconds"] = round(r.seconds, 3)
    text = [r.line() + (f" ({r.seconds:.1f}s)" if args.timing else "") for r in results]
    text.append(f"{rep['passed']}/{rep['total']} criteria reproduced")
    return {"json": rep, "text": text, "code": 0 if rep["passed"] == rep["total"] else 1}


# -- parser -------------------------------------------------------------------------------


def _symbol(s: str) -> int:
    # accepts 1, -1, +1 or the shorthand + and -
    v = {"+": 1, "-": -1}.get(s)
    if v is None:
        try:
            v = int(s)
        except ValueError:
            v = 0
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("symbols are +1 or -1")
    return v


def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps their defaults
    # from clobbering values given before the subcommand
    c = argparse.ArgumentParser(add_help=False)

    def add(*names, **kw):
        if suppress:
            kw["default"] = argparse.SUPPRESS
        c.add_argument(*names, **kw)
    add("--json", action="store_true", default=False, help="machine readable output")
    add("--max-bits", type=int, default=None, help="cap for exact sign refinement")
    add("--threads", type=int, default=1)
    add("--seed", type=int, default=0, help="seed for sampled property checks")
    add("--full", action="store_true", default=False, help="print huge units exactly")
    add("--primes", action="store_true", default=False,
        help="treat arguments as prime lists (unit/m multiply them)")
    add("--timing", action="store_true", default=False, help="include timings (non-deterministic)")
    return c


def build_parser() -> argparse.ArgumentParser:
    top, common = _common(False), _common(True)
    p = argparse.ArgumentParser(prog="unitsig", parents=[top],
                                description="Unit signature ranks of multiquadratic fields")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("unit", parents=[common], help="fundamental unit of Q(sqrt d)")
    s.add_argument("d", nargs="+")
    s.set_defaults(func=cmd_unit)

    s = sub.add_parser("m", parents=[common], help="m-invariant and sqrt presentation")
    s.add_argument("d", nargs="+")
    s.set_defaults(func=cmd_m)

    s = sub.add_parser("analyze", parents=[common], help="unit group and signature rank")
    s.add_argument("d", nargs="+")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("classify", parents=[common], help="Kuroda case of a biquadratic field")
    s.add_argument("d", nargs="+")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("possible-m", parents=[common], help="residue-symbol candidates for m")
    s.add_argument("q", type=int, nargs="*")
    s.add_argument("--symbols", type=_symbol, nargs="+", default=None)
    s.add_argument("--n", type=int, default=None, help="prime count in symbolic mode")
    s.add_argument("--kind", choices=("3mod4", "1mod4"), default=None)
    s.set_defaults(func=cmd_possible_m)

    s = sub.add_parser("search", parents=[common], help="parameter search for a family")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--limit", type=int, default=None)
    s.add_argument("--csv", default=None, help="also write CSV to this file")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("verify", parents=[common], help="verify a family member")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("params", type=int, nargs="+")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("density", parents=[common], help="enclosure of the density constant")
    s.add_argument("--bound", type=int, default=10 ** 5)
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("enumerate-configs", parents=[common], help="count residue configurations")
    s.add_argument("--interpretation", choices=INTERPRETATIONS, default="for-all")
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("cyclotomic-bound", parents=[common], help="deficiency bound for Q(zeta_n)^+")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_cyclo)

    s = sub.add_parser("verify-paper", parents=[common], help="run the acceptance criteria")
    s.add_argument("--section", type=int, nargs="+", default=None,
                   help="criterion numbers to run (default all)")
    s.set_defaults(func=cmd_reproduce)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    token = max_sign_bits.set(args.max_bits) if args.max_bits else None
    t0 = time.perf_counter()
    try:
        out = args.func(args)
    except (DomainError, FactorizationBudgetError, PrecisionError) as e:
        print(f"error: {e}", file=stderr)
        return 2
    finally:
        if token is not None:
            max_sign_bits.reset(token)
    code = out.get("code", 0)
    if args.json:
        doc = {"schema": SCHEMA, "command": args.command, **out["json"]}
        if args.timing:
            doc["seconds"] = round(time.perf_counter() - t0, 3)
        print(json.dumps(doc, sort_keys=False), file=stdout)
    else:
        for line in out["text"]:
            print(line, file=stdout)
        if args.timing:
            print(f"({time.perf_counter() - t0:.2f}s)", file=stdout)
    return code


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
