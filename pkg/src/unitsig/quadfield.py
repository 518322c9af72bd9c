"""Real quadratic fields Q(sqrt d): fundamental units, the m-invariant of a
norm +1 unit and the square-root presentation it gives, plus the classical
norm-sign criteria and the genus relation report."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import isqrt, prod

from .arith import DomainError, decimal_digits, factorize, is_squarefree, residue_symbol, to_decimal


class ConsistencyError(ArithmeticError):
    """An internal exact identity failed to hold."""


@dataclass(frozen=True)
class QuadField:
    d: int

    def __post_init__(self):
        if self.d <= 1 or not is_squarefree(self.d):
            raise DomainError(f"d = {self.d} must be a squarefree integer > 1")

    @property
    def D(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d


@dataclass(frozen=True)
class QuadUnit:
    """x + y*sqrt(d); for d = 1 mod 4 the coordinates may be half-integers."""
    d: int
    x: Fraction
    y: Fraction
    norm: int

    def __str__(self) -> str:
        return format_quadratic(self.x, self.y, self.d)

    def gt_one(self) -> bool:
        # x, y >= 1/2 and d >= 2 already force x + y sqrt d > 1
        return self.x > 0 and self.y > 0

    def conjugate(self) -> "QuadUnit":
        return QuadUnit(self.d, self.x, -self.y, self.norm)

    def floor(self) -> int:
        """Integer part of x + y sqrt d (for x, y > 0)."""
        X, Y = int(2 * self.x), int(2 * self.y)
        return (X + isqrt(Y * Y * self.d)) // 2

    def digits(self) -> int:
        return decimal_digits(self.floor())


@dataclass(frozen=True)
class MData:
    m: int
    A: Fraction
    B: Fraction


def format_quadratic(x: Fraction, y: Fraction, d: int) -> str:
    def term(v: Fraction) -> str:
        if v.denominator == 1:
            return to_decimal(v.numerator)
        return f"{to_decimal(v.numerator)}/{v.denominator}"
    if y == 0:
        return term(x)
    sign = "-" if y < 0 else "+"
    return f"{term(x)} {sign} {term(abs(y))}*sqrt({d})"


def _check_radicand(d: int) -> None:
    if not isinstance(d, int) or d <= 1 or not is_squarefree(d):
        raise DomainError(f"d = {d} must be a squarefree integer > 1")


@lru_cache(maxsize=4096)
def fundamental_unit(d: int) -> QuadUnit:
    """Fundamental unit > 1 of the maximal order of Q(sqrt d).

    Expands w = (P + sqrt d)/Q with (P, Q) = (1, 2) when d = 1 mod 4 and (0, 1)
    otherwise, tracking the convergents p_k/q_k.  When the complete quotient
    returns to x_1 after l steps, p_{l-1} - q_{l-1} * conj(w) is the unit.
    """
    _check_radicand(d)
    P, Q = (1, 2) if d % 4 == 1 else (0, 1)
    s = isqrt(d)
    pm2, pm1 = 0, 1
    qm2, qm1 = 1, 0
    first = None
    length = 0
    while True:
        a = (P + s) // Q
        pm2, pm1 = pm1, a * pm1 + pm2
        qm2, qm1 = qm1, a * qm1 + qm2
        P = a * Q - P
        Q = (d - P * P) // Q
        if first is None:
            first = (P, Q)
        elif (P, Q) == first:
            break
        length += 1
    p, q = pm2, qm2
    if d % 4 == 1:
        x, y = Fraction(2 * p - q, 2), Fraction(q, 2)
    else:
        x, y = Fraction(p), Fraction(q)
    norm = x * x - d * y * y
    if norm not in (1, -1) or norm != (-1) ** length:
        raise ConsistencyError(f"continued fraction for d = {d} gave norm {norm}")
    return QuadUnit(d, x, y, int(norm))


def unit_norm(d: int) -> int:
    return fundamental_unit(d).norm


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def m_of_unit(d: int, eps: QuadUnit | None = None, fundamental: bool = True) -> MData:
    """m = squarefree part of Norm(eps + 1), with A, B of alpha = A + B sqrt d.

    Only primes dividing the discriminant are inspected; Norm(eps + 1) = 2x + 2
    can have thousands of digits and is never factored.
    """
    field = QuadField(d)
    if eps is None:
        eps = fundamental_unit(d)
    if eps.d != d:
        raise DomainError("unit belongs to a different field")
    if eps.norm != 1:
        raise DomainError("m undefined for norm -1")
    x, y = eps.x, eps.y
    if not (x > 1 and y > 0):
        raise DomainError("m_of_unit expects a unit > 1")
    n_plus = 2 * x + 2                       # Norm(eps + 1)
    n_minus = 2 * x - 2                      # -Norm(eps - 1)
    if n_plus.denominator != 1 or n_minus.denominator != 1:
        raise ConsistencyError("Norm(eps +- 1) not integral")
    n_plus, n_minus = int(n_plus), int(n_minus)
    m = 1
    for p, _ in factorize(field.D):
        if _valuation(n_plus, p) & 1:
            m *= p
    cof = n_plus // m
    if isqrt(cof) ** 2 != cof:
        raise ConsistencyError(f"Norm(eps+1)/m not a square for d = {d}")
    if field.D % m:
        raise ConsistencyError(f"m = {m} does not divide D = {field.D}")
    if fundamental and m in (1, d):
        raise ConsistencyError(f"fundamental unit of d = {d} gave m = {m}")
    A = Fraction(isqrt(m * n_plus), 2)
    t, r = divmod(m * n_minus, d)
    if r or isqrt(t) ** 2 != t:
        raise ConsistencyError(f"m * Norm(eps-1) / d not a square for d = {d}")
    B = -Fraction(isqrt(t), 2)
    # m * eps = (A - B sqrt d)^2
    if A * A - d * B * B != m or A * A + d * B * B != m * x or -2 * A * B != m * y:
        raise ConsistencyError(f"m-identities fail for d = {d}")
    return MData(m, A, B)


def sqrt_unit_presentation(d: int, eps: QuadUnit | None = None,
                           fundamental: bool = True) -> tuple[Fraction, Fraction, int]:
    """(A, B, m) with sqrt(eps) = (A - B sqrt d) / sqrt m, all roots positive."""
    md = m_of_unit(d, eps, fundamental)
    return md.A, md.B, md.m


# -- norm sign criteria ---------------------------------------------------------


@dataclass(frozen=True)
class NormPrediction:
    guaranteed_minus_one: bool
    reason: str | None = None

    def __str__(self) -> str:
        return f"GuaranteedMinusOne({self.reason})" if self.guaranteed_minus_one else "Unknown"


def _pair_symbol(p: int, q: int) -> int:
    # symmetric for p, q in {2} u {1 mod 4}
    return residue_symbol(p, q) if q != 2 else residue_symbol(q, p)


def predict_norm_sign(d: int | list[int]) -> NormPrediction:
    """Sufficient conditions for the fundamental unit to have norm -1.

    ``d`` may be given as the integer or as its list of prime factors.
    """
    if isinstance(d, int):
        _check_radicand(d)
        primes = [p for p, _ in factorize(d)]
    else:
        primes = sorted(d)
        if len(set(primes)) != len(primes):
            raise DomainError("radicand must be squarefree")
    if not all(p == 2 or p % 4 == 1 for p in primes) or primes.count(2) > 1:
        return NormPrediction(False)
    t = len(primes)
    if t == 1:
        if primes[0] % 4 == 1:
            return NormPrediction(True, "prime = 1 mod 4")
        return NormPrediction(False)
    syms = [_pair_symbol(p, q) for p, q in combinations(primes, 2)]
    if t == 2 and syms[0] == -1:
        return NormPrediction(True, "two primes with (p1/p2) = -1")
    if t == 3 and sum(1 for s in syms if s == -1) >= 2:
        return NormPrediction(True, "three primes, at least two symbols -1")
    if t % 2 == 1 and all(s == -1 for s in syms):
        return NormPrediction(True, "odd number of primes, all symbols -1")
    return NormPrediction(False)


# -- genus relation ---------------------------------------------------------------


@dataclass(frozen=True)
class GenusReport:
    d: int
    norm: int
    m: int | None
    relation_primes: tuple[int, ...]
    relation_case: int
    omega_exists: bool

    def describe(self) -> str:
        over = "*".join(map(str, self.relation_primes))
        if self.relation_case == 1:
            return (f"d = {self.d}: norm +1, m = {self.m}; strict class relation over {{{over}}};"
                    f" case (1): a prime = 3 mod 4 divides d, no element of norm -1")
        if self.relation_case == 2:
            return (f"d = {self.d}: norm +1, m = {self.m}; strict class relation over {{{over}}};"
                    f" case (2): an element of norm -1 exists but the unit has norm +1")
        return f"d = {self.d}: norm -1; strict class relation over {{{over}}}; case (3)"


def genus_relation_report(d: int) -> GenusReport:
    """Predicted trivial product of ramified prime classes (report only)."""
    _check_radicand(d)
    eps = fundamental_unit(d)
    primes_d = tuple(p for p, _ in factorize(d))
    has_3mod4 = any(p % 4 == 3 for p in primes_d)
    if eps.norm == -1:
        return GenusReport(d, -1, None, primes_d, 3, True)
    m = m_of_unit(d, eps).m
    primes_m = tuple(p for p, _ in factorize(m))
    return GenusReport(d, 1, m, primes_m, 1 if has_3mod4 else 2, not has_3mod4)


def m_candidates(d: int) -> list[int]:
    """Divisors of D allowed for the m of a fundamental norm +1 unit."""
    D = QuadField(d).D
    ps = [p for p, _ in factorize(D)]
    out = []
    for k in range(len(ps) + 1):
        for c in combinations(ps, k):
            m = prod(c)
            if m not in (1, d):
                out.append(m)
    return sorted(out)
