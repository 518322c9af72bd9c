"""Reproduction harness: the twelve acceptance checks, each returning a
pass/fail result with a one-line detail."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable

from sympy import primerange

from .arith import residue_symbol
from .families import (DEFICIENCY3_EXAMPLE, OCTUPLE_EXAMPLE, PRIME_TRIQUAD_DEFICIENCY,
                       density_constant, enumerate_residue_configs, octuple_field,
                       verify_family)
from .mqfield import MQField, is_square
from .quadfield import fundamental_unit, m_of_unit
from .unitgroup import (_embed_unit, kubota_square_class, same_lattice, saturate,
                        signature_rank, subfield_signature_rank, subfield_units,
                        tp_independent_lower_bound)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}: {self.detail}"


def _fail_list(bad: list, limit: int = 5) -> str:
    head = ", ".join(map(str, bad[:limit]))
    return f"{len(bad)} exceptions: {head}" + (" ..." if len(bad) > limit else "")


def c1_units() -> tuple[bool, str, dict]:
    got = {d: (str(fundamental_unit(d)), fundamental_unit(d).norm) for d in (145, 82)}
    want = {145: ("12 + 1*sqrt(145)", -1), 82: ("9 + 1*sqrt(82)", -1)}
    return got == want, "; ".join(f"d={d}: {u} (norm {n})" for d, (u, n) in got.items()), {}


def c2_m_laws() -> tuple[bool, str, dict]:
    bad = []
    n1 = 0
    for q in primerange(3, 500):
        if q % 4 != 3:
            continue
        n1 += 1
        want = 2 * q if q % 8 == 3 else 2
        if m_of_unit(q).m != want:
            bad.append(q)
    qs = [q for q in primerange(3, 200) if q % 4 == 3]
    n2 = 0
    for q1, q2 in combinations(qs, 2):
        n2 += 1
        want = q1 if residue_symbol(q1, q2) == 1 else q2
        if m_of_unit(q1 * q2).m != want:
            bad.append((q1, q2))
    return not bad, f"{n1} primes, {n2} pairs" + (f"; {_fail_list(bad)}" if bad else ""), {}


def c3_dirichlet() -> tuple[bool, str, dict]:
    bad = []
    ps = [p for p in primerange(2, 10 ** 4) if p % 4 == 1]
    bad += [p for p in ps if fundamental_unit(p).norm != -1]
    good = [2] + [p for p in primerange(3, 10 ** 5 // 5 + 1) if p % 4 == 1]
    pairs = 0
    for i, p1 in enumerate(good):
        for p2 in good[i + 1:]:
            if p1 * p2 >= 10 ** 5:
                break
            if residue_symbol(p1, p2) == -1:
                pairs += 1
                if fundamental_unit(p1 * p2).norm != -1:
                    bad.append((p1, p2))
    small = [p for p in primerange(2, 150) if p == 2 or p % 4 == 1]
    triples = 0
    for tri in combinations(small, 3):
        syms = [residue_symbol(a, b) if b != 2 else residue_symbol(b, a)
                for a, b in combinations(tri, 2)]
        if syms.count(-1) >= 2:
            triples += 1
            if fundamental_unit(tri[0] * tri[1] * tri[2]).norm != -1:
                bad.append(tri)
    detail = f"{len(ps)} primes, {pairs} pairs, {triples} triples"
    return not bad, detail + (f"; {_fail_list(bad)}" if bad else ", zero exceptions"), {}


def c4_biquadratic() -> tuple[bool, str, dict]:
    qs = [q for q in primerange(3, 200) if q % 4 == 3]
    bad = []
    n = 0
    for pair in combinations(qs, 2):
        n += 1
        v = verify_family("q3mod4-pairs", pair)
        if not v.passed:
            bad.append(pair)
    return not bad, f"{n} pairs" + (f"; {_fail_list(bad)}" if bad else " all match"), {}


def c5_n2plus1() -> tuple[bool, str, dict]:
    bad, valid = [], []
    for n in range(2, 31):
        v = verify_family("rank3-n2+1", (n,))
        if v.in_family:
            valid.append(n)
            if not v.passed:
                bad.append(n)
    R = signature_rank(saturate(MQField((2, 5))))
    ok = not bad and R.rank == 4
    return ok, f"valid n = {valid}; n = 1 -> rank {R.rank}" + (f"; failed {bad}" if bad else ""), {}


def c6_deficiency3() -> tuple[bool, str, dict]:
    v = verify_family("deficiency3", DEFICIENCY3_EXAMPLE)
    ms = next(c.actual for c in v.checks if c.name == "m-triple")
    R = signature_rank(v.system)
    ok = v.passed and ms == (22043, 47, 77) and R.deficiency == 3
    return ok, f"m = {ms}, generators {', '.join(v.system.names())}, deficiency {R.deficiency}", {}


def c7_triquadratic() -> tuple[bool, str, dict]:
    got = {}
    for ps, want in PRIME_TRIQUAD_DEFICIENCY.items():
        got[ps] = signature_rank(saturate(MQField(ps))).deficiency
    low = []
    n = 0
    for tri in combinations(list(primerange(2, 100)), 3):
        n += 1
        r = signature_rank(saturate(MQField(tri))).rank
        if r < 3:
            low.append((tri, r))
    ok = got == PRIME_TRIQUAD_DEFICIENCY and not low
    detail = "deficiencies " + str(tuple(got.values())) + f"; {n} triples"
    return ok, detail + (f", rank < 3: {_fail_list(low)}" if low else ", all rank >= 3"), {}


def c8_octuple() -> tuple[bool, str, dict]:
    K = octuple_field(OCTUPLE_EXAMPLE)
    recs = subfield_units(K)
    big = recs[-1]
    q = OCTUPLE_EXAMPLE
    m = big.mdata.m if big.mdata else None
    tp = all(r.norm == 1 for r in recs)
    U = saturate(K, recs)
    R = signature_rank(U)
    digits = big.unit.digits()
    facts = {
        "m": (m == 6113479 == q[2] * q[4] * q[6], m),
        "totally positive": (tp, tp),
        "adjunctions": (U.adjunctions == 0, U.adjunctions),
        "rank": (R.rank == 1, R.rank),
        "deficiency": (R.deficiency == 7, R.deficiency),
        "digits": (abs(digits - 8154) <= 1, digits),
    }
    ok = all(f[0] for f in facts.values())
    detail = ", ".join(f"{k} {v[1]}{'' if v[0] else ' (!)'}" for k, v in facts.items())
    if U.adjunctions:
        detail += "; adjoined " + ", ".join(n for n in U.names() if "(" in n)
    return ok, detail, {"facts": {k: v[1] for k, v in facts.items()}}


def c9_configs() -> tuple[bool, str, dict]:
    counts = {it: enumerate_residue_configs(it).count for it in ("for-all", "uniqueness")}
    match = [it for it, c in counts.items() if c == 14080]
    ok = counts["for-all"] == 14080
    return ok, f"for-all {counts['for-all']}, uniqueness {counts['uniqueness']}" + \
        (f"; 14080 from {', '.join(match)}" if match else ""), {"counts": counts}


def c10_density() -> tuple[bool, str, dict]:
    D = density_constant(10 ** 5)
    ok = D.contains(Fraction(6810, 10 ** 4)) and D.width < Fraction(1, 1000)
    return ok, f"C in {D}, width {float(D.width):.2e}", {}


def c11_qmulti() -> tuple[bool, str, dict]:
    out = []
    ok = True
    for ps in ((3, 7, 11, 19), (3, 7, 11, 19, 23, 31)):
        t = len(ps) // 2
        K = MQField(tuple(ps[2 * i] * ps[2 * i + 1] for i in range(t)))
        r = tp_independent_lower_bound(K)
        ok &= r >= t
        out.append(f"t={t}: bound {r}")
    return ok, ", ".join(out), {}


# -- property suite -------------------------------------------------------------------------


def _random_field(rng: random.Random, t: int, pool: list[int]) -> MQField:
    while True:
        ds = tuple(sorted(rng.sample(pool, t)))
        try:
            return MQField(ds)
        except ValueError:
            continue


def prop_sign_characters(rng: random.Random, fields: int = 100) -> list:
    pool = [d for d in range(2, 200) if MQField._ok_radicand(d)]
    bad = []
    for _ in range(fields):
        K = _random_field(rng, rng.choice((2, 3)), pool)
        for rec in subfield_units(K):
            e = _embed_unit(K, rec)
            chi = [e.sign_at(g) for g in K.embeddings()]
            for g, h in product(K.embeddings(), repeat=2):
                if chi[g ^ h] != chi[g] * chi[h]:
                    bad.append((K.radicands, rec.mask))
                    break
    return bad


def _all_minus_one_primes(t: int) -> tuple[int, ...]:
    ps = [p for p in primerange(5, 400) if p % 4 == 1]
    for tup in combinations(ps, t):
        if all(residue_symbol(a, b) == -1 for a, b in combinations(tup, 2)):
            return tup
    raise RuntimeError("no prime tuple found")


def prop_subfield_rank(rng: random.Random, fields: int = 50) -> list:
    pool = [d for d in range(2, 200) if MQField._ok_radicand(d)]
    bad = []
    for _ in range(fields):
        K = _random_field(rng, rng.choice((1, 2, 3)), pool)
        if subfield_signature_rank(K) > K.t + 1:
            bad.append(K.radicands)
    for t in (1, 2, 3):
        K = MQField(_all_minus_one_primes(t))
        if subfield_signature_rank(K) != t + 1:
            bad.append(("equality", K.radicands))
    return bad


def prop_kubota(limit: int = 100) -> tuple[list, int]:
    bad, applicable = [], 0
    for p1, p2 in combinations(list(primerange(2, limit)), 2):
        K = MQField((p1, p2))
        recs = subfield_units(K)
        if any(r.norm != 1 for r in recs):
            continue
        applicable += 1
        units = [_embed_unit(K, r) for r in recs]
        for n in product((0, 1), repeat=3):
            if not any(n):
                continue
            u = K.one()
            for e, k in zip(units, n):
                if k:
                    u = u * e
            root = is_square(u)
            if root is not None and root * root != u:
                bad.append(((p1, p2), n, "unsound"))
            if (root is not None) != kubota_square_class(K, n, recs):
                bad.append(((p1, p2), n, "disagree"))
    return bad, applicable


def prop_monotonicity(rng: random.Random, samples: int = 200) -> list:
    pool = [d for d in range(2, 120) if MQField._ok_radicand(d)]
    bad = []
    cache: dict = {}
    for _ in range(samples):
        K = _random_field(rng, 2, pool)
        if K.radicands not in cache:
            cache[K.radicands] = signature_rank(saturate(K)).deficiency
        S = rng.randrange(1, K.degree)
        r = K.basis_radicands[S]
        dq = 0 if fundamental_unit(r).norm == -1 else 1
        if dq > cache[K.radicands]:
            bad.append((K.radicands, r))
    return bad


def prop_idempotence(rng: random.Random, fields: int = 40) -> list:
    pool = [d for d in range(2, 150) if MQField._ok_radicand(d)]
    bad = []
    for _ in range(fields):
        K = _random_field(rng, 2, pool)
        U = saturate(K)
        V = saturate(K, start=U)
        # adjunctions are cumulative, so a second pass must add none
        if U.adjunctions > 3 or V.adjunctions != U.adjunctions or not same_lattice(U.provenance, V.provenance):
            bad.append((K.radicands, U.adjunctions, V.adjunctions))
        before = subfield_signature_rank(K)
        if signature_rank(U).rank < before:
            bad.append((K.radicands, "rank decreased"))
    return bad


def c12_properties(seed: int = 0) -> tuple[bool, str, dict]:
    rng = random.Random(seed)
    parts = {
        "sign characters": prop_sign_characters(rng),
        "subfield rank": prop_subfield_rank(rng),
    }
    kub, applicable = prop_kubota()
    parts["is_square/m-criterion"] = kub
    parts["monotonicity"] = prop_monotonicity(rng)
    parts["idempotence"] = prop_idempotence(rng)
    ok = not any(parts.values())
    detail = ", ".join(f"{k} {'ok' if not v else _fail_list(v, 2)}" for k, v in parts.items())
    return ok, detail + f" ({applicable} m-criterion fields)", {}


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "fundamental units", c1_units),
    (2, "m-laws", c2_m_laws),
    (3, "norm -1 criteria", c3_dirichlet),
    (4, "biquadratic classification", c4_biquadratic),
    (5, "n^2+1 family", c5_n2plus1),
    (6, "deficiency-3 example", c6_deficiency3),
    (7, "prime triquadratics", c7_triquadratic),
    (8, "octuple example", c8_octuple),
    (9, "configuration count", c9_configs),
    (10, "density constant", c10_density),
    (11, "deficiency >= t", c11_qmulti),
    (12, "property suites", c12_properties),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    num, title, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    ok, detail, data = fn(seed) if num == 12 else fn()
    return CriterionResult(num, title, ok, detail, time.perf_counter() - t0, data)


def run_all(numbers=None, seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(n, seed) for n, _, _ in CRITERIA if numbers is None or n in numbers]
