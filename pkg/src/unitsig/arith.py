"""Integer utilities: factorization, squarefree parts, residue symbols and
prime searches with congruence / quadratic residue constraints."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import sys
from math import isqrt
from typing import Iterable, Iterator, Sequence

from sympy import factorint, isprime, primerange

# Everything this package factors is a squarefree radicand or a small
# product of radicands; anything above this is refused rather than guessed.
FACTOR_BUDGET_BITS = 160


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class FactorizationBudgetError(ArithmeticError):
    """Raised instead of returning an unverified factorization."""


@dataclass(frozen=True)
class SquarefreeDecomp:
    s: int
    c: int


def factorize(n: int, budget_bits: int = FACTOR_BUDGET_BITS) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as increasing ``(p, e)`` pairs."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    if n.bit_length() > budget_bits:
        raise FactorizationBudgetError(
            f"{n.bit_length()}-bit input exceeds the {budget_bits}-bit budget (unfactored)")
    return _factor_cached(n)


@lru_cache(maxsize=65536)
def _factor_cached(n: int) -> list[tuple[int, int]]:
    fac = sorted(factorint(n).items())
    check = 1
    for p, e in fac:
        if not isprime(p):
            raise FactorizationBudgetError(f"composite factor {p} of {n}")
        check *= p ** e
    if check != n:
        raise FactorizationBudgetError(f"factorization of {n} does not multiply back")
    return fac


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def squarefree_part(n: int) -> SquarefreeDecomp:
    """Write ``n = s * c**2`` with ``s`` squarefree."""
    if n == 0:
        raise DomainError("squarefree part of 0 is undefined")
    if n < 0:
        raise DomainError("squarefree_part expects a positive integer")
    s = c = 1
    for p, e in factorize(n):
        if e & 1:
            s *= p
        c *= p ** (e >> 1)
    return SquarefreeDecomp(s, c)


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in factorize(n))


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def decimal_digits(n: int) -> int:
    """Number of decimal digits of |n| (1 for 0), without str()."""
    n = abs(n)
    if n < 10:
        return 1
    k = int((n.bit_length() - 1) * 0.30102999566398120)
    while 10 ** k <= n:
        k += 1
    while 10 ** (k - 1) > n:
        k -= 1
    return k


def to_decimal(n: int) -> str:
    """str(n) regardless of the interpreter's int-to-str digit limit."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        return str(n)
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        return str(n)
    finally:
        sys.set_int_max_str_digits(old)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive ``n``."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def symbol2(p: int) -> int:
    """(2/p) for odd p; also stands in for (p/2) under that convention."""
    if p % 2 == 0:
        raise DomainError("symbol2 needs an odd argument")
    return 1 if p % 8 in (1, 7) else -1


def residue_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for a prime p, with (a/2) read as (2/a)."""
    if p == 2:
        return symbol2(a)
    return jacobi(a, p)


# -- constrained prime search -------------------------------------------------


@dataclass(frozen=True)
class Congruence:
    slot: int
    modulus: int
    residues: frozenset[int]

    @classmethod
    def of(cls, slot: int, modulus: int, *residues: int) -> "Congruence":
        return cls(slot, modulus, frozenset(r % modulus for r in residues))


@dataclass(frozen=True)
class Symbol:
    """Constraint (q_i / q_j) = value on the primes in slots i and j."""
    i: int
    j: int
    value: int


@dataclass(frozen=True)
class PrimePattern:
    slots: int
    congruences: tuple[Congruence, ...] = ()
    symbols: tuple[Symbol, ...] = ()
    excluded: frozenset[int] = field(default_factory=frozenset)

    def check(self, primes: Sequence[int]) -> bool:
        if len(primes) != self.slots or len(set(primes)) != self.slots:
            return False
        if any(p in self.excluded or not isprime(p) for p in primes):
            return False
        for c in self.congruences:
            if primes[c.slot] % c.modulus not in c.residues:
                return False
        return all(residue_symbol(primes[s.i], primes[s.j]) == s.value for s in self.symbols)


def symbol_pattern(slots: int, values: Sequence[int], modulus: int = 4,
                   residue: int = 3) -> PrimePattern:
    """Pattern with every slot ``= residue mod modulus`` and the pairwise
    symbols (q_i/q_j), i < j, given in lexicographic order."""
    pairs = [(i, j) for i in range(slots) for j in range(i + 1, slots)]
    if len(values) != len(pairs):
        raise DomainError(f"{slots} slots need {len(pairs)} symbol values, got {len(values)}")
    return PrimePattern(
        slots,
        tuple(Congruence.of(k, modulus, residue) for k in range(slots)),
        tuple(Symbol(i, j, v) for (i, j), v in zip(pairs, values)),
    )


def iter_primes_matching(pattern: PrimePattern, bound: int) -> Iterator[tuple[int, ...]]:
    """Lexicographic depth-first search over slot assignments."""
    pool = [p for p in primerange(2, bound + 1) if p not in pattern.excluded]
    per_slot = []
    for k in range(pattern.slots):
        cons = [c for c in pattern.congruences if c.slot == k]
        per_slot.append([p for p in pool if all(p % c.modulus in c.residues for c in cons)])
    # symbols checkable once the later slot of the pair is filled
    by_last: list[list[Symbol]] = [[] for _ in range(pattern.slots)]
    for s in pattern.symbols:
        by_last[max(s.i, s.j)].append(s)

    chosen: list[int] = []

    def extend(k: int) -> Iterator[tuple[int, ...]]:
        if k == pattern.slots:
            yield tuple(chosen)
            return
        for p in per_slot[k]:
            if p in chosen:
                continue
            chosen.append(p)
            if all(residue_symbol(chosen[s.i], chosen[s.j]) == s.value for s in by_last[k]):
                yield from extend(k + 1)
            chosen.pop()

    yield from extend(0)


def primes_matching(pattern: PrimePattern, bound: int,
                    limit: int | None = None) -> list[tuple[int, ...]]:
    out = []
    for tup in iter_primes_matching(pattern, bound):
        out.append(tup)
        if limit is not None and len(out) >= limit:
            break
    return out


def primes_in_class(bound: int, modulus: int, residues: Iterable[int]) -> list[int]:
    res = {r % modulus for r in residues}
    return [p for p in primerange(2, bound + 1) if p % modulus in res]
