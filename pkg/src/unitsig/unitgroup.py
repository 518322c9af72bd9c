"""Unit groups of multiquadratic fields assembled from the fundamental units of
the quadratic subfields by 2-saturation, and their signature ranks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .arith import DomainError, prime_factors
from .mqfield import MQElement, MQField, is_square
from .quadfield import MData, QuadUnit, fundamental_unit, m_of_unit


# -- F_2 linear algebra on int bitsets ----------------------------------------


def gf2_rank(rows: Sequence[int]) -> int:
    basis: dict[int, int] = {}          # pivot bit -> row
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def gf2_kernel(rows: Sequence[int]) -> list[int]:
    """Basis of {x : XOR of rows[i] over bits i of x is 0}."""
    basis: dict[int, tuple[int, int]] = {}
    kernel = []
    for i, r in enumerate(rows):
        comb = 1 << i
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = (r, comb)
                break
            br, bc = basis[top]
            r ^= br
            comb ^= bc
        if not r:
            kernel.append(comb)
    return kernel


def span(vectors: Sequence[int]) -> set[int]:
    out = {0}
    for v in vectors:
        out |= {v ^ w for w in out}
    return out


def _bits(v: int) -> str:
    return format(v, "b")


# -- data types ------------------------------------------------------------------


@dataclass(frozen=True)
class SubfieldUnitRecord:
    mask: int
    subset: tuple[int, ...]
    radicand: int
    unit: QuadUnit
    mdata: MData | None

    @property
    def norm(self) -> int:
        return self.unit.norm


@dataclass(frozen=True)
class SignatureMatrix:
    rows: tuple[tuple[int, ...], ...]

    def rank(self) -> int:
        return gf2_rank([int("".join(map(str, reversed(r))), 2) for r in self.rows])

    def __str__(self) -> str:
        return "\n".join(" ".join(map(str, r)) for r in self.rows)


@dataclass
class UnitSystem:
    """-1 together with independent units; ``provenance[i]`` gives generator i
    as exponents over the subfield fundamental units, in record order."""
    field: MQField
    records: list[SubfieldUnitRecord]
    generators: list[MQElement]
    provenance: list[tuple[Fraction, ...]]
    complete: bool = False
    adjunctions: int = 0
    signatures: list[tuple[int, ...]] = field(default_factory=list)

    def signature_matrix(self) -> SignatureMatrix:
        minus = tuple([1] * self.field.degree)
        return SignatureMatrix((minus,) + tuple(self.signatures))

    def names(self) -> list[str]:
        return [provenance_name(p) for p in self.provenance]

    def square_root_span(self) -> set[int]:
        """For lattices inside (1/2)Z^n: the F_2 space W with the group equal to
        <-1, subfield units> + (1/2)W.  Bit i <-> record i."""
        vecs = []
        for p in self.provenance:
            if any((2 * e).denominator != 1 for e in p):
                raise DomainError("provenance not half-integral")
            vecs.append(sum(1 << i for i, e in enumerate(p) if (2 * e).numerator % 2))
        return span(vecs)


def provenance_name(p: Sequence[Fraction]) -> str:
    nz = [(i + 1, e) for i, e in enumerate(p) if e]
    if not nz:
        return "1"
    if all(e == Fraction(1, 2) for _, e in nz):
        return "sqrt(" + "*".join(f"e{i}" for i, _ in nz) + ")"
    parts = []
    for i, e in nz:
        parts.append(f"e{i}" if e == 1 else f"e{i}^({e})")
    return "*".join(parts)


# -- operations ----------------------------------------------------------------------


def subfield_units(K: MQField) -> list[SubfieldUnitRecord]:
    out = []
    for S, r in K.quadratic_subfields():
        eps = fundamental_unit(r)
        md = m_of_unit(r, eps) if eps.norm == 1 else None
        out.append(SubfieldUnitRecord(S, K.subset(S), r, eps, md))
    return out


def _embed_unit(K: MQField, rec: SubfieldUnitRecord) -> MQElement:
    return K.quadratic(rec.mask, rec.unit.x, rec.unit.y)


def _unit_signature(K: MQField, rec: SubfieldUnitRecord) -> tuple[int, ...]:
    # eps > 0 at g iff g fixes sqrt(r_S) or the norm is +1
    return tuple(1 if (bin(g & rec.mask).count("1") & 1 and rec.norm == -1) else 0
                 for g in K.embeddings())


def square_class(n: int) -> frozenset[int]:
    return frozenset(p for p in prime_factors(n)) if n > 1 else frozenset()


def _class_bits(primes: Sequence[int], cls: frozenset[int]) -> int:
    return sum(1 << primes.index(p) for p in cls)


def kubota_square_class(K: MQField, exponents: Sequence[int],
                        records: list[SubfieldUnitRecord] | None = None) -> bool:
    """Whether prod eps_S^{n_S} is a square in K, by the m-criterion:
    the square class of prod m_S^{n_S} must be that of some r_T."""
    records = records or subfield_units(K)
    if len(exponents) != len(records):
        raise DomainError(f"need {len(records)} exponents")
    cls: frozenset[int] = frozenset()
    for n, rec in zip(exponents, records):
        if n % 2 == 0:
            continue
        if rec.mdata is None:
            raise DomainError(f"unit of Q(sqrt {rec.radicand}) has norm -1; use is_square")
        cls = cls ^ square_class(rec.mdata.m)
    return cls in {square_class(r) for r in K.basis_radicands}


def _characters(K: MQField, e: MQElement, signature: tuple[int, ...] | None = None) -> int:
    """Signs at the real embeddings followed by quadratic characters at split
    primes; every square has all of them trivial."""
    sig = signature if signature is not None else e.signature()
    v = sum(b << g for g, b in enumerate(sig))
    off = K.degree
    for k, (p, roots) in enumerate(K.split_primes):
        r = e.residue(p, roots)
        if r and pow(r, (p - 1) // 2, p) != 1:
            v |= 1 << (off + k)
    return v


def _product(K: MQField, gens: Sequence[MQElement], mask: int) -> MQElement:
    out = K.one()
    for i, g in enumerate(gens):
        if mask >> i & 1:
            out = out * g
    return out


def saturate(K: MQField, records: list[SubfieldUnitRecord] | None = None,
             canonical: bool = True, start: UnitSystem | None = None) -> UnitSystem:
    """2-saturate <-1, subfield units> inside K (or continue from ``start``).

    Each round looks for products +-prod g_i (exponents 0/1) with trivial
    characters, tests them with the exact tower square root, and replaces the
    lowest-index factor by the root.  Stops when no product is a square.
    """
    if start is not None:
        records = start.records
        gens, prov, sigs = list(start.generators), list(start.provenance), list(start.signatures)
        done = start.adjunctions
    else:
        records = records or subfield_units(K)
        gens = [_embed_unit(K, r) for r in records]
        prov = [tuple(Fraction(int(i == j)) for j in range(len(gens))) for i in range(len(gens))]
        sigs = [_unit_signature(K, r) for r in records]
        done = 0
    n = len(gens)
    minus_char = (1 << K.degree) - 1            # -1: negative everywhere, square mod p = 1 mod 4
    chars = [_characters(K, g, s) for g, s in zip(gens, sigs)]
    adjunctions = 0
    while True:
        found = None
        for x in _kernel_elements(gf2_kernel([minus_char] + chars)):
            # bit 0 of x is -1, bits 1.. are generators
            mask = x >> 1
            if not mask:
                continue
            u = _product(K, gens, mask)
            if x & 1:
                u = -u
            root = is_square(u)
            if root is not None:
                found = (mask, root)
                break
        if found is None:
            break
        mask, root = found
        j = (mask & -mask).bit_length() - 1
        prov[j] = tuple(sum(prov[i][k] for i in range(n) if mask >> i & 1) / 2 for k in range(n))
        gens[j] = root
        sigs[j] = root.signature()
        chars[j] = _characters(K, root, sigs[j])
        adjunctions += 1
    system = UnitSystem(K, records, gens, prov, complete=K.t <= 3,
                        adjunctions=done + adjunctions,
                        signatures=sigs)
    return canonicalize(system) if canonical else system


def _kernel_elements(basis: list[int]) -> list[int]:
    return sorted(span(basis) - {0})


# -- canonical generator sets ---------------------------------------------------------


def _hnf_rows(prov: list[tuple[Fraction, ...]]) -> tuple[list[tuple[Fraction, ...]], list[list[int]]]:
    """Upper triangular basis of the lattice spanned by ``prov`` together with
    integer combinations expressing each new row in the old generators."""
    n = len(prov)
    rows = [list(p) for p in prov]
    combos = [[int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        # Euclid on column col among rows col..n-1
        while True:
            nz = [r for r in range(col, n) if rows[r][col] != 0]
            if not nz:
                raise DomainError("provenance lattice is not of full rank")
            piv = min(nz, key=lambda r: abs(rows[r][col]))
            rows[col], rows[piv] = rows[piv], rows[col]
            combos[col], combos[piv] = combos[piv], combos[col]
            done = True
            for r in range(col + 1, n):
                if rows[r][col] != 0:
                    q = int(rows[r][col] // rows[col][col])
                    rows[r] = [a - q * b for a, b in zip(rows[r], rows[col])]
                    combos[r] = [a - q * b for a, b in zip(combos[r], combos[col])]
                    if rows[r][col] != 0:
                        done = False
            if done:
                break
        if rows[col][col] < 0:
            rows[col] = [-a for a in rows[col]]
            combos[col] = [-a for a in combos[col]]
    for col in range(n - 1, -1, -1):
        for r in range(col):
            q = rows[r][col] // rows[col][col]
            q = int(q)
            if q:
                rows[r] = [a - q * b for a, b in zip(rows[r], rows[col])]
                combos[r] = [a - q * b for a, b in zip(combos[r], combos[col])]
    return [tuple(r) for r in rows], combos


def same_lattice(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> bool:
    """Whether two provenance lists generate the same group modulo -1."""
    return _hnf_rows([tuple(r) for r in a])[0] == _hnf_rows([tuple(r) for r in b])[0]


def canonicalize(U: UnitSystem) -> UnitSystem:
    """Re-express the generators as the Hermite basis of their provenance
    lattice (same group, reproducible presentation)."""
    rows, combos = _hnf_rows(U.provenance)
    if rows == list(U.provenance):
        return U
    K = U.field
    gens, sigs = [], []
    for combo in combos:
        e = K.one()
        sig = [0] * K.degree
        for c, g, s in zip(combo, U.generators, U.signatures):
            if c:
                e = e * (g ** c)
                if c % 2:
                    sig = [a ^ b for a, b in zip(sig, s)]
        if sig[0]:
            e = -e
            sig = [1 - b for b in sig]
        gens.append(e)
        sigs.append(tuple(sig))
    return UnitSystem(K, U.records, gens, rows, U.complete, U.adjunctions, sigs)


# -- ranks ------------------------------------------------------------------------


@dataclass(frozen=True)
class RankResult:
    rank: int
    deficiency: int
    exact: bool          # False: rank is a lower bound / deficiency an upper bound


def signature_rank(U: UnitSystem) -> RankResult:
    rank = U.signature_matrix().rank()
    return RankResult(rank, U.field.degree - rank, U.complete)


def subfield_signature_rank(K: MQField, records: list[SubfieldUnitRecord] | None = None) -> int:
    records = records or subfield_units(K)
    rows = [(1 << K.degree) - 1] + [sum(b << g for g, b in enumerate(_unit_signature(K, r)))
                                    for r in records]
    return gf2_rank(rows)


def tp_independent_lower_bound(K: MQField, records: list[SubfieldUnitRecord] | None = None,
                               masks: Sequence[int] | None = None) -> int:
    """F_2-rank of the m-classes of norm +1 subfield units modulo the classes
    of the radicands; deficiency(K) is at least this."""
    if records is None:
        if masks is None:
            records = subfield_units(K)
        else:
            records = [r for r in subfield_units_for(K, masks)]
    elif masks is not None:
        records = [r for r in records if r.mask in set(masks)]
    ms = [r.mdata.m for r in records if r.mdata is not None]
    primes = sorted(set().union(*(square_class(x) for x in list(K.radicands) + ms)))
    rad = [_class_bits(primes, square_class(d)) for d in K.radicands]
    mvec = [_class_bits(primes, square_class(m)) for m in ms]
    return gf2_rank(rad + mvec) - gf2_rank(rad)


def subfield_units_for(K: MQField, masks: Sequence[int]) -> list[SubfieldUnitRecord]:
    out = []
    for S in masks:
        r = K.basis_radicands[S]
        eps = fundamental_unit(r)
        md = m_of_unit(r, eps) if eps.norm == 1 else None
        out.append(SubfieldUnitRecord(S, K.subset(S), r, eps, md))
    return out


# -- Kuroda cases for t = 2 ----------------------------------------------------------

_E1, _E2, _E3 = 1, 2, 4
KURODA_B = {
    "b1": [],
    "b2": [_E1],
    "b3": [_E1, _E2],
    "b4": [_E1 | _E2],
    "b5": [_E1 | _E2, _E3],
    "b6": [_E1 | _E2, _E2 | _E3],
    "b7": [_E1 | _E2 | _E3],
}
KURODA_C = {"c1": [], "c2": [_E1 | _E2 | _E3]}
KURODA_TEXT = {
    "b1": "<-1, e1, e2, e3>",
    "b2": "<-1, sqrt(e1), e2, e3>",
    "b3": "<-1, sqrt(e1), sqrt(e2), e3>",
    "b4": "<-1, sqrt(e1*e2), e2, e3>",
    "b5": "<-1, sqrt(e1*e2), sqrt(e3), e2>",
    "b6": "<-1, sqrt(e1*e2), sqrt(e2*e3), sqrt(e3*e1)>",
    "b7": "<-1, e1, e2, sqrt(e1*e2*e3)>",
    "c1": "<-1, e1, e2, e3>",
    "c2": "<-1, e1, e2, sqrt(e1*e2*e3)>",
}


def _permute(v: int, perm: tuple[int, ...]) -> int:
    return sum(1 << perm[i] for i in range(3) if v >> i & 1)


@dataclass(frozen=True)
class KurodaCase:
    label: str
    permutation: tuple[int, ...]     # template subfield i -> our subfield permutation[i]

    @property
    def text(self) -> str:
        return KURODA_TEXT[self.label]

    def __str__(self) -> str:
        return f"({self.label[0]}){self.label[1]}"


def classify_biquadratic(U: UnitSystem) -> KurodaCase | None:
    K = U.field
    if K.t != 2:
        raise DomainError("Kuroda classification needs a biquadratic field")
    W = U.square_root_span()
    table = KURODA_C if all(r.norm == -1 for r in U.records) else KURODA_B
    for label, gens in table.items():
        for perm in permutations(range(3)):
            if span([_permute(v, perm) for v in gens]) == W:
                return KurodaCase(label, perm)
    return None


def analyze(radicands: Sequence[int]) -> tuple[UnitSystem, RankResult]:
    K = MQField(tuple(radicands))
    U = saturate(K)
    return U, signature_rank(U)
