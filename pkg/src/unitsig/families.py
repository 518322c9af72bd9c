"""Residue-symbol constraints on m, verifiers and searches for the named
families of fields, the residue-configuration count, the density constant
and the cyclotomic deficiency bound."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import prod
from typing import Any, Iterable, Sequence

from sympy import isprime, primerange

from .arith import (DomainError, PrimePattern, is_squarefree, primes_matching,
                    residue_symbol, symbol_pattern)
from .mqfield import MQField
from .quadfield import fundamental_unit
from .unitgroup import (UnitSystem, classify_biquadratic, same_lattice, saturate,
                        signature_rank, subfield_units, subfield_units_for,
                        tp_independent_lower_bound)

# (q_i/q_j), i < j in lexicographic order
DEFICIENCY3_SYMBOLS = (-1, -1, -1, -1, 1, 1, -1, 1, 1, 1, -1, 1, 1, -1, -1)
DEFICIENCY3_EXAMPLE = (31, 47, 67, 7, 19, 11)
OCTUPLE_SYMBOLS = (
    -1, -1, -1, -1, 1, -1, 1,
    1, -1, 1, 1, -1, -1,
    1, -1, 1, -1, -1,
    1, -1, 1, 1,
    -1, 1, -1,
    1, 1,
    1,
)
OCTUPLE_EXAMPLE = (11, 67, 991, 47, 31, 7, 199, 19)

FAMILIES = ("rank4", "rank3-n2+1", "q3mod4-pairs", "deficiency3", "prime-triquad-min",
            "octuple", "qmulti", "composite")
_ALIASES = {"rank3-n²+1": "rank3-n2+1", "rank3-n^2+1": "rank3-n2+1"}


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _mask(idx: Iterable[int]) -> int:
    return sum(1 << i for i in idx)


def _idx(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


# -- residue assignments -------------------------------------------------------------


@dataclass(frozen=True)
class ResidueAssignment:
    """Symbols (q_i/q_j) for i < j.  ``reciprocity = -1`` for primes = 3 mod 4,
    where (q_j/q_i) = -(q_i/q_j); ``+1`` when the symbols are symmetric."""
    n: int
    symbols: tuple[int, ...]
    primes: tuple[int, ...] | None = None
    reciprocity: int = -1

    def __post_init__(self):
        if len(self.symbols) != self.n * (self.n - 1) // 2:
            raise DomainError(f"{self.n} primes need {self.n * (self.n - 1) // 2} symbols")
        if any(s not in (1, -1) for s in self.symbols):
            raise DomainError("symbols must be +1 or -1")
        if self.primes is not None:
            if len(self.primes) != self.n or len(set(self.primes)) != self.n:
                raise DomainError("primes must be distinct")
            if tuple(_symbols_of(self.primes)) != self.symbols:
                raise DomainError("symbols inconsistent with the primes")

    @classmethod
    def of_primes(cls, primes: Sequence[int], reciprocity: int = -1) -> "ResidueAssignment":
        primes = tuple(primes)
        return cls(len(primes), tuple(_symbols_of(primes)), primes, reciprocity)

    def sym(self, i: int, j: int) -> int:
        """(q_i/q_j), 0-based, any order."""
        if i == j:
            raise DomainError("symbol of a prime with itself")
        if i < j:
            return self.symbols[_pair_index(self.n, i, j)]
        return self.reciprocity * self.symbols[_pair_index(self.n, j, i)]

    def restrict(self, slots: Sequence[int]) -> "ResidueAssignment":
        vals = [self.sym(slots[a], slots[b]) for a, b in _pairs(len(slots))]
        ps = tuple(self.primes[s] for s in slots) if self.primes else None
        return ResidueAssignment(len(slots), tuple(vals), ps, self.reciprocity)


def _pair_index(n: int, i: int, j: int) -> int:
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def _symbols_of(primes: Sequence[int]) -> list[int]:
    return [residue_symbol(primes[i], primes[j]) for i, j in _pairs(len(primes))]


@dataclass(frozen=True)
class MCandidateSet:
    n: int
    subsets: tuple[int, ...]                 # bitmasks over the prime slots
    primes: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.subsets)

    def __iter__(self):
        return iter(self.subsets)

    def __contains__(self, item) -> bool:
        if isinstance(item, int) and self.primes is not None and item not in self.subsets:
            return item in self.values()
        return item in self.subsets

    def labels(self) -> list[str]:
        return ["*".join(f"q{i + 1}" for i in _idx(S)) for S in self.subsets]

    def values(self) -> list[int]:
        if not self.primes:
            raise DomainError("symbolic candidate set has no numeric values")
        return [prod(self.primes[i] for i in _idx(S)) for S in self.subsets]


def _num_holds_3mod4(a: ResidueAssignment, S1: int) -> bool:
    full = (1 << a.n) - 1
    S2 = full ^ S1
    I1, I2 = _idx(S1), _idx(S2)
    for j in I2:
        if prod(a.sym(i, j) for i in I1) != 1:
            return False
    for i in I1:
        if prod(a.sym(j, i) for j in I2) != -1:
            return False
    return True


def possible_m(arg, symbols: Sequence[int] | None = None) -> MCandidateSet:
    """Divisors prod_{S1} q_i of prod q_i (n even, all q = 3 mod 4) that can be
    the m of the fundamental unit of Q(sqrt(q_1...q_n)).

    ``arg`` is a ResidueAssignment, a list of concrete primes, or a prime
    count n together with the symbol values.
    """
    a = _assignment(arg, symbols, -1)
    if a.n % 2 or a.n < 2:
        raise DomainError("possible_m needs an even number of primes")
    if a.primes and any(p % 4 != 3 for p in a.primes):
        raise DomainError("possible_m needs primes = 3 mod 4")
    full = (1 << a.n) - 1
    return MCandidateSet(a.n, tuple(S for S in range(1, full) if _num_holds_3mod4(a, S)), a.primes)


def _assignment(arg, symbols, reciprocity: int) -> ResidueAssignment:
    if isinstance(arg, ResidueAssignment):
        return arg
    if isinstance(arg, int):
        if symbols is None:
            raise DomainError("symbolic mode needs the symbol values")
        return ResidueAssignment(arg, tuple(symbols), None, reciprocity)
    primes = tuple(arg)
    if any(not isprime(p) for p in primes):
        raise DomainError("all entries must be prime")
    a = ResidueAssignment.of_primes(primes, reciprocity)
    if symbols is not None and tuple(symbols) != a.symbols:
        raise DomainError("given symbols disagree with the primes")
    return a


def possible_m_symmetric(arg, symbols: Sequence[int] | None = None) -> MCandidateSet:
    """Candidates for p_1 = 2 or 1 mod 4 and p_2, ..., p_t = 1 mod 4, where the
    symbols (with (p/2) read as (2/p)) are symmetric."""
    a = _assignment(arg, symbols, 1)
    if a.primes:
        ps = a.primes
        if any(p % 4 != 1 for p in ps[1:]) or not (ps[0] == 2 or ps[0] % 4 == 1):
            raise DomainError("need p_1 = 2 or 1 mod 4 and the others = 1 mod 4")
    full = (1 << a.n) - 1
    out = []
    for S in range(1, full):
        inside, outside = _idx(S), _idx(full ^ S)
        if all(prod(a.sym(i, j) for i in inside) == 1 for j in outside) and \
           all(prod(a.sym(i, j) for i in outside) == 1 for j in inside):
            out.append(S)
    return MCandidateSet(a.n, tuple(out), a.primes)


def possible_m_three_primes(arg, symbols: Sequence[int] | None = None) -> MCandidateSet:
    a = _assignment(arg, symbols, 1)
    if a.n != 3:
        raise DomainError("exactly three primes")
    return possible_m_symmetric(a)


def constraint_row(n: int, S1: int) -> tuple[str, ...]:
    """The constraints imposed by m = prod_{S1} q_i, as a row over the symbols
    (q_i/q_j), i < j: '+1', '-1', 's', '-s' or '' (unconstrained)."""
    k = n * (n - 1) // 2
    sols = [v for v in product((1, -1), repeat=k)
            if _num_holds_3mod4(ResidueAssignment(n, v), S1)]
    if not sols:
        return ("x",) * k
    cols = list(zip(*sols))
    out = []
    free = [c for c in range(k) if len(set(cols[c])) == 2]
    # one sign variable s tying the non-constant constrained columns
    anchor = None
    for c in range(k):
        if len(set(cols[c])) == 1:
            out.append("+1" if cols[c][0] == 1 else "-1")
            continue
        others = [d for d in free if d != c]
        tied = [d for d in others if all(sv[c] * sv[d] == sols[0][c] * sols[0][d] for sv in sols)]
        if not tied:
            out.append("")
            continue
        if anchor is None:
            anchor = c
        out.append("s" if all(sv[c] == sv[anchor] for sv in sols) else "-s")
    return tuple(out)


def constraint_table(n: int = 4) -> dict[str, tuple[str, ...]]:
    return {"*".join(f"q{i + 1}" for i in _idx(S)): constraint_row(n, S)
            for S in sorted(range(1, (1 << n) - 1), key=lambda S: (bin(S).count("1"), _idx(S)))}


# -- verdicts ------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    ok: bool


@dataclass
class Verdict:
    family: str
    params: tuple
    in_family: bool
    reason: str = ""
    checks: list[Check] = field(default_factory=list)
    system: UnitSystem | None = None

    @property
    def passed(self) -> bool:
        return self.in_family and all(c.ok for c in self.checks)

    @property
    def status(self) -> str:
        if not self.in_family:
            return "not in family"
        return "pass" if self.passed else "fail"

    def check(self, name: str, expected, actual, ok: bool | None = None) -> bool:
        ok = (expected == actual) if ok is None else ok
        self.checks.append(Check(name, expected, actual, ok))
        return ok


def half(n: int, *idx: int) -> tuple[Fraction, ...]:
    """Provenance of sqrt(prod e_i), 1-based indices."""
    return tuple(Fraction(1, 2) if i + 1 in idx else Fraction(0) for i in range(n))


def whole(n: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(k + 1 == i)) for k in range(n))


def _units_check(v: Verdict, U: UnitSystem, expected: list, label: str) -> None:
    v.check("fundamental system", label, ", ".join(U.names()), same_lattice(U.provenance, expected))


def _rank_checks(v: Verdict, U: UnitSystem, rank: int | None, deficiency: int | None) -> None:
    R = signature_rank(U)
    if rank is not None:
        v.check("signature rank", rank, R.rank)
    if deficiency is not None:
        v.check("deficiency", deficiency, R.deficiency)


def _primes_ok(ps: Sequence[int]) -> str:
    if any(not isinstance(p, int) or not isprime(p) for p in ps):
        return "parameters must be primes"
    if len(set(ps)) != len(ps):
        return "primes must be distinct"
    return ""


def verify_family(family_id: str, params: Sequence[int]) -> Verdict:
    fam = _ALIASES.get(family_id, family_id)
    if fam not in _VERIFIERS:
        raise DomainError(f"unknown family {family_id!r}; choose from {', '.join(FAMILIES)}")
    params = tuple(params)
    return _VERIFIERS[fam](Verdict(fam, params, True))


def _not_in(v: Verdict, reason: str) -> Verdict:
    v.in_family = False
    v.reason = reason
    return v


def _v_rank4(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) != 2 or _primes_ok(ps):
        return _not_in(v, _primes_ok(ps) or "need two primes")
    p1, p2 = ps
    if p2 % 4 != 1 or not (p1 == 2 or p1 % 4 == 1):
        return _not_in(v, "need p2 = 1 mod 4 and p1 = 2 or 1 mod 4")
    if fundamental_unit(p1 * p2).norm != -1:
        return _not_in(v, f"fundamental unit of Q(sqrt {p1 * p2}) has norm +1")
    K = MQField((p1, p2))
    U = v.system = saturate(K)
    _units_check(v, U, [whole(3, 1), whole(3, 2), half(3, 1, 2, 3)], "e1, e2, sqrt(e1*e2*e3)")
    _rank_checks(v, U, 4, 0)
    case = classify_biquadratic(U)
    v.check("Kuroda case", "(c)2", str(case))
    return v


def _v_n2(v: Verdict) -> Verdict:
    if len(v.params) != 1:
        return _not_in(v, "need one integer n")
    n = v.params[0]
    a, b = n * n + 1, (n + 1) ** 2 + 1
    if n <= 1:
        return _not_in(v, "need n > 1 (n = 1 gives Q(sqrt 2, sqrt 5), signature rank 4)")
    if n % 5 == 2:
        return _not_in(v, "n = 2 mod 5: gcd(n^2+1, (n+1)^2+1) = 5")
    if not (is_squarefree(a) and is_squarefree(b)):
        return _not_in(v, "n^2+1 and (n+1)^2+1 must be squarefree")
    K = MQField((a, b))
    U = v.system = saturate(K)
    N = n * (n + 1) + 1
    for rec, (x, d) in zip(U.records, ((n, a), (n + 1, b), (N, N * N + 1))):
        v.check(f"unit of Q(sqrt {d})", f"{x} + 1*sqrt({d})", str(rec.unit))
        v.check(f"norm in Q(sqrt {d})", -1, rec.norm)
    v.check("adjunctions", 0, U.adjunctions)
    _units_check(v, U, [whole(3, i) for i in (1, 2, 3)], "e1, e2, e3")
    _rank_checks(v, U, 3, 1)
    return v


def q3mod4_prediction(q1: int, q2: int) -> tuple[int, int]:
    """(rank, deficiency) by the mod 8 case table."""
    r1, r2 = q1 % 8, q2 % 8
    if r1 == r2 == 3:
        return 3, 1
    if r1 == r2 == 7:
        return 2, 2
    a, b = (q1, q2) if r1 == 7 else (q2, q1)      # a = 7, b = 3 mod 8
    return (3, 1) if residue_symbol(a, b) == 1 else (2, 2)


def _m_prime_3mod4(q: int) -> int:
    return 2 * q if q % 8 == 3 else 2


def _v_pairs(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) != 2 or _primes_ok(ps):
        return _not_in(v, _primes_ok(ps) or "need two primes")
    q1, q2 = ps
    if q1 % 4 != 3 or q2 % 4 != 3:
        return _not_in(v, "primes must be = 3 mod 4")
    K = MQField((q1, q2))
    U = v.system = saturate(K)
    ms = [r.mdata.m if r.mdata else None for r in U.records]
    m3 = q1 if residue_symbol(q1, q2) == 1 else q2
    v.check("m-triple", (_m_prime_3mod4(q1), _m_prime_3mod4(q2), m3), tuple(ms))
    _units_check(v, U, [half(3, 1, 2), half(3, 3), whole(3, 2)], "sqrt(e1*e2), sqrt(e3), e2")
    rank, defi = q3mod4_prediction(q1, q2)
    _rank_checks(v, U, rank, defi)
    return v


def _symbol_hypothesis(ps: Sequence[int], symbols: Sequence[int]) -> str:
    if _primes_ok(ps):
        return _primes_ok(ps)
    if any(p % 4 != 3 for p in ps):
        return "primes must be = 3 mod 4"
    got = _symbols_of(ps)
    bad = [f"({ps[i]}/{ps[j]})" for (i, j), g, e in zip(_pairs(len(ps)), got, symbols) if g != e]
    return "symbol pattern violated at " + ", ".join(bad) if bad else ""


def _m_label(ps: Sequence[int], m: int) -> str:
    return "*".join(f"q{i + 1}" for i, p in enumerate(ps) if m % p == 0)


def _v_def3(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) != 6:
        return _not_in(v, "need six primes")
    why = _symbol_hypothesis(ps, DEFICIENCY3_SYMBOLS)
    if why:
        return _not_in(v, why)
    q = ps
    K = MQField((q[0] * q[1] * q[2] * q[3], q[0] * q[1] * q[4] * q[5]))
    U = v.system = saturate(K)
    expect = (q[1] * q[2] * q[3], q[1], q[3] * q[5])
    got = tuple(r.mdata.m if r.mdata else None for r in U.records)
    v.check("m-triple", expect, got)
    a = ResidueAssignment.of_primes(q)
    for slots, m in zip(((0, 1, 2, 3), (0, 1, 4, 5), (2, 3, 4, 5)), expect):
        C = possible_m(a.restrict(slots))
        v.check(f"predicted m for q{'q'.join(str(s + 1) for s in slots)}", [m], C.values())
    v.check("all units totally positive", True, all(r.norm == 1 for r in U.records))
    v.check("adjunctions", 0, U.adjunctions)
    _units_check(v, U, [whole(3, i) for i in (1, 2, 3)], "e1, e2, e3")
    _rank_checks(v, U, 1, 3)
    return v


PRIME_TRIQUAD_DEFICIENCY = {
    (5, 13, 37): 0, (5, 13, 17): 1, (5, 13, 29): 2,
    (3, 7, 11): 3, (7, 23, 71): 4, (7, 23, 127): 5,
}


def _v_triquad(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) != 3 or _primes_ok(ps):
        return _not_in(v, _primes_ok(ps) or "need three primes")
    K = MQField(tuple(ps))
    U = v.system = saturate(K)
    R = signature_rank(U)
    v.check("signature rank >= 3", ">= 3", R.rank, R.rank >= 3)
    known = PRIME_TRIQUAD_DEFICIENCY.get(tuple(sorted(ps)))
    if known is not None:
        v.check("deficiency", known, R.deficiency)
    return v


OCTUPLE_M = {1: (1, 2, 3), 2: (1,), 3: (3, 5), 4: (6,), 5: (6, 7), 6: (5,)}   # 0-based slots
OCTUPLE_M7 = ((0, 5, 6), (2, 4, 6), (0, 2, 4, 5))


def octuple_field(q: Sequence[int]) -> MQField:
    return MQField((q[0] * q[1] * q[2] * q[3], q[0] * q[1] * q[4] * q[5], q[0] * q[1] * q[6] * q[7]))


def _v_octuple(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) != 8:
        return _not_in(v, "need eight primes")
    why = _symbol_hypothesis(ps, OCTUPLE_SYMBOLS)
    if why:
        return _not_in(v, why)
    K = octuple_field(ps)
    recs = subfield_units(K)
    for rec in recs:
        if rec.mask in OCTUPLE_M:
            exp = prod(ps[i] for i in OCTUPLE_M[rec.mask])
            v.check(f"m for Q(sqrt {_m_label(ps, rec.radicand)})",
                    _m_label(ps, exp), _m_label(ps, rec.mdata.m) if rec.mdata else "norm -1")
    big = recs[-1]
    C = possible_m(ResidueAssignment.of_primes(ps))
    v.check("candidates for the degree-8 radicand", sorted(_mask(s) for s in OCTUPLE_M7),
            sorted(C.subsets))
    v.check("m of the degree-8 radicand in candidates", True,
            bool(big.mdata) and big.mdata.m in C.values())
    v.check("all seven units totally positive", True, all(r.norm == 1 for r in recs))
    U = v.system = saturate(K, recs)
    v.check("adjunctions", 0, U.adjunctions)
    _rank_checks(v, U, 1, 7)
    return v


def _v_qmulti(v: Verdict) -> Verdict:
    ps = v.params
    if len(ps) < 2 or len(ps) % 2 or _primes_ok(ps):
        return _not_in(v, _primes_ok(ps) or "need an even number of primes")
    if any(p % 4 != 3 for p in ps):
        return _not_in(v, "primes must be = 3 mod 4")
    t = len(ps) // 2
    K = MQField(tuple(ps[2 * i] * ps[2 * i + 1] for i in range(t)))
    recs = subfield_units(K)
    gens = [1 << i for i in range(t)]
    for i in range(t):
        a, b = ps[2 * i], ps[2 * i + 1]
        rec = recs[gens[i] - 1]
        v.check(f"m for Q(sqrt {a * b})", a if residue_symbol(a, b) == 1 else b,
                rec.mdata.m if rec.mdata else None)
    r_gen = tp_independent_lower_bound(K, recs, masks=gens)
    v.check("independent totally positive units among eps_i", t, r_gen)
    r_all = tp_independent_lower_bound(K, recs)
    v.check("deficiency lower bound >= t", f">= {t}", r_all, r_all >= t)
    if t <= 3:
        U = v.system = saturate(K, recs)
        R = signature_rank(U)
        v.check("deficiency >= t", f">= {t}", R.deficiency, R.deficiency >= t)
        v.check("lower bound <= deficiency", f"<= {R.deficiency}", r_all, r_all <= R.deficiency)
    return v


def _blocks(ps: Sequence[int]) -> list[tuple[int, ...]] | None:
    """Split a parameter list into deficiency-3 sextuples and octuples."""
    out, i = [], 0
    while i < len(ps):
        for size, syms in ((6, DEFICIENCY3_SYMBOLS), (8, OCTUPLE_SYMBOLS)):
            blk = tuple(ps[i:i + size])
            if len(blk) == size and not _symbol_hypothesis(blk, syms):
                out.append(blk)
                i += size
                break
        else:
            return None
    return out


def composite_field(blocks: Sequence[Sequence[int]]) -> tuple[MQField, list[int]]:
    """The composite field and the masks of the subfields of its blocks."""
    rads, masks = [], []
    for blk in blocks:
        off = len(rads)
        if len(blk) == 6:
            q = blk
            rads += [q[0] * q[1] * q[2] * q[3], q[0] * q[1] * q[4] * q[5]]
            masks += [m << off for m in (1, 2, 3)]
        else:
            rads += list(octuple_field(blk).radicands)
            masks += [m << off for m in range(1, 8)]
    return MQField(tuple(rads)), masks


def _v_composite(v: Verdict) -> Verdict:
    ps = v.params
    if _primes_ok(ps):
        return _not_in(v, _primes_ok(ps))
    blocks = _blocks(ps)
    if not blocks or len(blocks) < 1:
        return _not_in(v, "parameters must split into deficiency-3 sextuples or octuples")
    K, masks = composite_field(blocks)
    recs = subfield_units_for(K, masks)
    want = len(masks)
    v.check("block units totally positive", True, all(r.norm == 1 for r in recs))
    r = tp_independent_lower_bound(K, recs, masks=masks)
    v.check(f"independent totally positive units (deficiency >= {want})", want, r)
    return v


_VERIFIERS = {
    "rank4": _v_rank4, "rank3-n2+1": _v_n2, "q3mod4-pairs": _v_pairs, "deficiency3": _v_def3,
    "prime-triquad-min": _v_triquad, "octuple": _v_octuple, "qmulti": _v_qmulti,
    "composite": _v_composite,
}


# -- searches ----------------------------------------------------------------------


def deficiency3_pattern(excluded: Iterable[int] = ()) -> PrimePattern:
    p = symbol_pattern(6, DEFICIENCY3_SYMBOLS)
    return PrimePattern(p.slots, p.congruences, p.symbols, frozenset(excluded))


def octuple_pattern(excluded: Iterable[int] = ()) -> PrimePattern:
    p = symbol_pattern(8, OCTUPLE_SYMBOLS)
    return PrimePattern(p.slots, p.congruences, p.symbols, frozenset(excluded))


def search_family(family_id: str, bound: int, limit: int | None = None) -> list[tuple[int, ...]]:
    """Parameter tuples of a family up to ``bound`` in increasing order
    (hypotheses only; run verify_family to check the predictions)."""
    fam = _ALIASES.get(family_id, family_id)
    out: list[tuple[int, ...]] = []

    def add(tup) -> bool:
        out.append(tuple(tup))
        return limit is not None and len(out) >= limit

    if fam == "rank3-n2+1":
        for n in range(2, bound + 1):
            if n % 5 != 2 and is_squarefree(n * n + 1) and is_squarefree((n + 1) ** 2 + 1):
                if add((n,)):
                    break
        return out
    ps = list(primerange(2, bound + 1))
    if fam == "rank4":
        for p1, p2 in combinations(ps, 2):
            for a, b in ((p1, p2), (p2, p1)):
                if b % 4 == 1 and (a == 2 or a % 4 == 1) and fundamental_unit(a * b).norm == -1:
                    if add((a, b)):
                        return out
                    break
        return out
    if fam == "q3mod4-pairs":
        for pair in combinations([p for p in ps if p % 4 == 3], 2):
            if add(pair):
                break
        return out
    if fam == "prime-triquad-min":
        for tri in combinations(ps, 3):
            if add(tri):
                break
        return out
    if fam == "qmulti":
        for quad in combinations([p for p in ps if p % 4 == 3], 4):
            if add(quad):
                break
        return out
    if fam == "deficiency3":
        return primes_matching(deficiency3_pattern(), bound, limit)
    if fam == "octuple":
        return primes_matching(octuple_pattern(), bound, limit)
    if fam == "composite":
        return disjoint_sextuples(bound, 2, limit)
    raise DomainError(f"unknown family {family_id!r}")


def disjoint_sextuples(bound: int, count: int = 2, limit: int | None = 1) -> list[tuple[int, ...]]:
    """Concatenations of ``count`` deficiency-3 sextuples with pairwise
    disjoint primes, greedy in lexicographic order."""
    out = []
    for first in primes_matching(deficiency3_pattern(), bound):
        chosen = [first]
        used = set(first)
        while len(chosen) < count:
            nxt = primes_matching(deficiency3_pattern(used), bound, 1)
            if not nxt:
                break
            chosen.append(nxt[0])
            used |= set(nxt[0])
        if len(chosen) == count:
            out.append(tuple(p for blk in chosen for p in blk))
            if limit is not None and len(out) >= limit:
                break
    return out


# -- residue configuration count ------------------------------------------------------

INTERPRETATIONS = ("for-all", "uniqueness")
_D1, _D2 = 0b001111, 0b110011               # q1q2q3q4, q1q2q5q6


@dataclass
class ConfigCount:
    interpretation: str
    count: int
    configs: list[tuple[int, ...]]
    total: int = 1 << 15


def _lift(S: int, slots: Sequence[int]) -> int:
    return sum(1 << slots[i] for i in _idx(S))


def _triple_ok(m1: int, m2: int, m3: int) -> bool:
    forbidden = {0, _D1, _D2, _D1 ^ _D2}
    for n1, n2, n3 in product((0, 1), repeat=3):
        if n1 | n2 | n3 and ((m1 * n1) ^ (m2 * n2) ^ (m3 * n3)) in forbidden:
            return False
    return True


def enumerate_residue_configs(interpretation: str = "for-all") -> ConfigCount:
    """Configurations of the 15 symbols (q_i/q_j), 1 <= i < j <= 6, for which
    every admissible m-triple for q1q2q3q4, q1q2q5q6, q3q4q5q6 leaves no
    product of the fundamental units a square.

    ``for-all``: every candidate triple must pass (candidate sets nonempty).
    ``uniqueness``: each candidate set is a single value and that triple passes.
    """
    if interpretation not in INTERPRETATIONS:
        raise DomainError(f"interpretation must be one of {INTERPRETATIONS}")
    slot_sets = ((0, 1, 2, 3), (0, 1, 4, 5), (2, 3, 4, 5))
    cache: dict[tuple, tuple[int, ...]] = {}
    configs = []
    for vals in product((-1, 1), repeat=15):
        vals = tuple(-v for v in vals)          # start from all -1
        a = ResidueAssignment(6, vals)
        cands = []
        for slots in slot_sets:
            sub = a.restrict(slots)
            key = sub.symbols
            if key not in cache:
                cache[key] = possible_m(sub).subsets
            cands.append([_lift(S, slots) for S in cache[key]])
        if interpretation == "uniqueness":
            ok = all(len(c) == 1 for c in cands) and _triple_ok(*(c[0] for c in cands))
        else:
            ok = all(cands) and all(_triple_ok(*t) for t in product(*cands))
        if ok:
            configs.append(vals)
    configs.sort()
    return ConfigCount(interpretation, len(configs), configs)


# -- density constant -----------------------------------------------------------------


@dataclass(frozen=True)
class DensityInterval:
    bound: int
    lo: Fraction
    hi: Fraction
    leading: Fraction = Fraction(18, 25)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __str__(self) -> str:
        return f"[{float(self.lo):.10f}, {float(self.hi):.10f}]"


def density_constant(prime_bound: int, bits: int = 96) -> DensityInterval:
    """Enclosure of (1 - 7/25) * prod_{p = 1 mod 4, p > 5} (1 - 4/p^2).

    The partial product over p <= bound is rounded outward to ``bits`` bits;
    the tail lies in [1 - 4/bound, 1] since sum_{n > B} 4/n^2 < 4/B.
    """
    if prime_bound < 1000:
        raise DomainError("prime_bound must be at least 1000")
    num = 18
    den = 25
    for p in primerange(7, prime_bound + 1):
        if p % 4 == 1:
            num *= p * p - 4
            den *= p * p
    scale = 1 << bits
    hi = Fraction(-((-num * scale) // den), scale)         # ceiling
    lo_part = Fraction((num * scale) // den, scale)        # floor
    tail = Fraction(prime_bound - 4, prime_bound)
    tail_lo = Fraction((tail.numerator * scale) // tail.denominator, scale)
    return DensityInterval(prime_bound, lo_part * tail_lo, hi)


def count_valid_n(x: int) -> int:
    """#{2 <= n <= x : n != 2 mod 5, n^2+1 and (n+1)^2+1 squarefree} (report only)."""
    return sum(1 for n in range(2, x + 1)
               if n % 5 != 2 and is_squarefree(n * n + 1) and is_squarefree((n + 1) ** 2 + 1))


# -- cyclotomic bound -------------------------------------------------------------------


@dataclass(frozen=True)
class CyclotomicBound:
    n: int
    t: int
    primes: tuple[int, ...]
    witness: tuple[int, ...]            # radicands q1q2, q3q4, ...


def cyclotomic_deficiency_bound(n: int) -> CyclotomicBound:
    from .arith import prime_factors
    if n < 1:
        raise DomainError("n must be positive")
    qs = tuple(p for p in prime_factors(n) if p % 4 == 3) if n > 1 else ()
    t = len(qs) // 2
    return CyclotomicBound(n, t, qs, tuple(qs[2 * i] * qs[2 * i + 1] for i in range(t)))
