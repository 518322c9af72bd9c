"""Exact arithmetic in real multiquadratic fields K = Q(sqrt d_1, ..., sqrt d_t).

Elements are stored over the product basis e_S = sqrt(prod_{i in S} d_i),
indexed by bitmasks S (bit i-1 <-> d_i), as integer numerators over one
positive common denominator.  Then e_S * e_T = (prod_{i in S & T} d_i) e_{S ^ T},
and the embedding g (a bitmask of flipped square roots) sends e_S to
(-1)^{|S & g|} e_S.  The reduced basis sqrt(r_S) is e_S / c_S.
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt, prod
from typing import Iterable, Sequence

from sympy import primerange
from sympy.ntheory import sqrt_mod

from .arith import DomainError, is_squarefree, prime_factors, squarefree_part

START_BITS = 128
max_sign_bits: contextvars.ContextVar[int] = contextvars.ContextVar("max_sign_bits", default=1 << 24)


class DegeneratePresentation(DomainError):
    """The radicands are multiplicatively dependent modulo squares."""


class PrecisionError(ArithmeticError):
    """Sign refinement exceeded the configured precision cap."""


def popcount(n: int) -> int:
    return bin(n).count("1")


def _subset(mask: int, t: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(t) if mask >> i & 1)


@lru_cache(maxsize=None)
def _mask_products(ds: tuple[int, ...]) -> tuple[int, ...]:
    out = [1] * (1 << len(ds))
    for S in range(1, 1 << len(ds)):
        low = S & -S
        out[S] = out[S ^ low] * ds[low.bit_length() - 1]
    return tuple(out)


@lru_cache(maxsize=None)
def _reduced(ds: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(r_S, c_S) with prod_{i in S} d_i = r_S * c_S^2, from the prime sets of
    the d_i (the products themselves are never factored)."""
    sets = [frozenset(prime_factors(d)) for d in ds]
    rs, cs = [1], [1]
    acc = [frozenset()]
    for S in range(1, 1 << len(ds)):
        low = S & -S
        i = low.bit_length() - 1
        prev = acc[S ^ low]
        acc.append(prev ^ sets[i])
        rs.append(prod(acc[S]))
        cs.append(cs[S ^ low] * prod(prev & sets[i]))
    return tuple(rs), tuple(cs)


@lru_cache(maxsize=None)
def _split_primes(ds: tuple[int, ...], count: int = 32) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Primes p = 1 mod 4, prime to 2*prod(d), in which every d_i is a square,
    with a chosen root of each d_i mod p.  Reduction modulo p through these
    roots is a ring map K -> F_p, so a square in K maps to a square."""
    out = []
    bad = 2 * prod(ds)
    for p in primerange(5, 10 ** 9):
        if p % 4 != 1 or bad % p == 0:
            continue
        roots = []
        for d in ds:
            r = sqrt_mod(d % p, p)
            if r is None:
                break
            roots.append(r)
        else:
            out.append((p, tuple(roots)))
            if len(out) == count:
                break
    return tuple(out)


@lru_cache(maxsize=None)
def _embed_values(ds: tuple[int, ...], p: int, roots: tuple[int, ...]) -> tuple[int, ...]:
    vals = [1] * (1 << len(ds))
    for S in range(1, 1 << len(ds)):
        low = S & -S
        vals[S] = vals[S ^ low] * roots[low.bit_length() - 1] % p
    return tuple(vals)


# -- low level coefficient vectors (nums, den) over a radicand tuple -----------


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums, den = [-a for a in nums], -den
    g = den
    for a in nums:
        g = gcd(g, a)
        if g == 1:
            break
    if g > 1:
        nums = [a // g for a in nums]
        den //= g
    return tuple(nums), den


def _mul_raw(ds, an, ad, bn, bd):
    P = _mask_products(ds)
    n = len(an)
    out = [0] * n
    for S in range(n):
        a = an[S]
        if not a:
            continue
        for T in range(n):
            b = bn[T]
            if b:
                out[S ^ T] += a * b * P[S & T]
    return _normalize(out, ad * bd)


def _conj_raw(nums, g):
    return tuple(-a if popcount(S & g) & 1 else a for S, a in enumerate(nums))


def _is_zero(nums) -> bool:
    return not any(nums)


def _norm_raw(ds, nums, den):
    """Product of all conjugates, a rational number."""
    n = len(nums)
    pn, pd = (1,) + (0,) * (n - 1), 1
    for g in range(n):
        pn, pd = _mul_raw(ds, pn, pd, _conj_raw(nums, g), den)
    if any(pn[1:]):
        raise ArithmeticError("norm is not rational")
    return Fraction(pn[0], pd)


def _inv_raw(ds, nums, den):
    if _is_zero(nums):
        raise DomainError("inverse of zero")
    n = len(nums)
    pn, pd = (1,) + (0,) * (n - 1), 1
    for g in range(1, n):
        pn, pd = _mul_raw(ds, pn, pd, _conj_raw(nums, g), den)
    N = _norm_raw(ds, nums, den)
    return _normalize([a * N.denominator for a in pn], pd * N.numerator)


def _sign_raw(ds, nums, g: int, cap: int | None = None) -> int:
    """Exact sign of sum_S nums[S] * (+-) sqrt(P_S) via outward-rounded
    fixed-point evaluation, doubling the precision until 0 is excluded."""
    if _is_zero(nums):
        raise DomainError("sign of zero")
    P = _mask_products(ds)
    terms = []
    exact = 0
    for S, a in enumerate(nums):
        if not a:
            continue
        if popcount(S & g) & 1:
            a = -a
        r = isqrt(P[S])
        if r * r == P[S]:
            exact += a * r
        else:
            terms.append((a, P[S]))
    if not terms:
        return 1 if exact > 0 else -1
    cap = max_sign_bits.get() if cap is None else cap
    k = START_BITS
    while True:
        lo = hi = exact << k
        for a, PS in terms:
            v = a * isqrt(PS << (2 * k))     # a * floor(2^k sqrt PS)
            lo += v + min(a, 0)
            hi += v + max(a, 0)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if k >= cap:
            raise PrecisionError(f"sign undetermined at {k} bits")
        k *= 2


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _locally_nonsquare(ds, nums, den, primes: int = 8) -> bool:
    for p, roots in _split_primes(ds)[:primes]:
        if den % p == 0:
            continue
        vals = _embed_values(ds, p, roots)
        r = sum(a * v for a, v in zip(nums, vals)) * den % p     # same symbol as /den
        if r and pow(r, (p - 1) // 2, p) != 1:
            return True
    return False


def _sqrt_raw(ds, nums, den):
    """Square root of nums/den in Q(sqrt ds) by descent through the tower
    Q(sqrt d_1, ..., sqrt d_{j-1})(sqrt d_j); None when there is none."""
    nums, den = _normalize(list(nums), den)
    if _is_zero(nums):
        return nums, 1
    if not ds:
        r = _rational_sqrt(Fraction(nums[0], den))
        return None if r is None else ((r.numerator,), r.denominator)
    if _locally_nonsquare(ds, nums, den):
        return None
    sub = ds[:-1]
    delta = ds[-1]
    half = len(nums) // 2
    an, bn = nums[:half], nums[half:]
    if _is_zero(bn):
        r = _sqrt_raw(sub, an, den)
        if r is not None:
            return _normalize(list(r[0]) + [0] * half, r[1])
        r = _sqrt_raw(sub, an, den * delta)        # a = delta * y^2
        if r is not None:
            return _normalize([0] * half + list(r[0]), r[1])
        return None
    # u = a + b e;  if u = (x + y e)^2 then a^2 - delta b^2 = (x^2 - delta y^2)^2
    aa = _mul_raw(sub, an, den, an, den)
    bb = _mul_raw(sub, bn, den, bn, den)
    Nn, Nd = _normalize([x * bb[1] - delta * y * aa[1] for x, y in zip(aa[0], bb[0])],
                        aa[1] * bb[1])
    w = _sqrt_raw(sub, Nn, Nd)
    if w is None:
        return None
    wn, wd = w
    for sgn in (1, -1):
        # h = (a + w')/2 should be x^2
        hn, hd = _normalize([x * wd + sgn * y * den for x, y in zip(an, wn)], 2 * den * wd)
        if _is_zero(hn):
            continue
        x = _sqrt_raw(sub, hn, hd)
        if x is None:
            continue
        xin, xid = _inv_raw(sub, *x)
        yn, yd = _mul_raw(sub, bn, 2 * den, xin, xid)    # y = b / (2x)
        cand = _normalize([a * yd for a in x[0]] + [b * x[1] for b in yn], x[1] * yd)
        sq = _mul_raw(ds, *cand, *cand)
        if sq == (tuple(nums), den):
            return cand
    return None


# -- public types ------------------------------------------------------------


@dataclass(frozen=True)
class MQField:
    """K = Q(sqrt d_1, ..., sqrt d_t) with verified degree 2^t."""
    radicands: tuple[int, ...]

    def __post_init__(self):
        ds = tuple(int(d) for d in self.radicands)
        object.__setattr__(self, "radicands", ds)
        for d in ds:
            if not self._ok_radicand(d):
                raise DomainError(f"radicand {d} must be a squarefree integer > 1")
        seen: dict[int, int] = {}
        for S, r in enumerate(_reduced(ds)[0]):
            if r in seen:
                a, b = _subset(seen[r], len(ds)), _subset(S, len(ds))
                raise DegeneratePresentation(
                    f"degenerate presentation: subsets {a} and {b} give the same "
                    f"quadratic subfield Q(sqrt {r})")
            seen[r] = S

    @property
    def t(self) -> int:
        return len(self.radicands)

    @property
    def degree(self) -> int:
        return 1 << self.t

    @cached_property
    def products(self) -> tuple[int, ...]:
        return _mask_products(self.radicands)

    @staticmethod
    def _ok_radicand(d) -> bool:
        return isinstance(d, int) and d > 1 and is_squarefree(d)

    @property
    def basis_radicands(self) -> tuple[int, ...]:
        return _reduced(self.radicands)[0]

    @property
    def cofactors(self) -> tuple[int, ...]:
        return _reduced(self.radicands)[1]

    def subset(self, mask: int) -> tuple[int, ...]:
        return _subset(mask, self.t)

    def embeddings(self) -> range:
        return range(self.degree)

    # constructors
    def element(self, coords: Sequence) -> "MQElement":
        """Element with rational coordinates over the product basis e_S."""
        if len(coords) != self.degree:
            raise DomainError(f"need {self.degree} coordinates")
        fr = [Fraction(c) for c in coords]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        nums, den = _normalize([int(c * den) for c in fr], den)
        return MQElement(self, nums, den)

    def _raw(self, nums, den) -> "MQElement":
        nums, den = _normalize(list(nums), den)
        return MQElement(self, nums, den)

    def rational(self, q) -> "MQElement":
        q = Fraction(q)
        return self._raw([q.numerator] + [0] * (self.degree - 1), q.denominator)

    def one(self) -> "MQElement":
        return self.rational(1)

    def basis(self, mask: int) -> "MQElement":
        nums = [0] * self.degree
        nums[mask] = 1
        return self._raw(nums, 1)

    def sqrt_of_radicand(self, mask: int) -> "MQElement":
        """sqrt(r_S) = e_S / c_S, positive at the identity embedding."""
        nums = [0] * self.degree
        nums[mask] = 1
        return self._raw(nums, self.cofactors[mask])

    def quadratic(self, mask: int, x, y) -> "MQElement":
        """Image of x + y sqrt(r_S) from the subfield Q(sqrt r_S)."""
        if mask == 0:
            return self.rational(Fraction(x) + Fraction(y))
        coords = [Fraction(0)] * self.degree
        coords[0] = Fraction(x)
        coords[mask] = Fraction(y) / self.cofactors[mask]
        return self.element(coords)

    def quadratic_subfields(self) -> list[tuple[int, int]]:
        return [(S, self.basis_radicands[S]) for S in range(1, self.degree)]

    def contains_sqrt(self, n: int) -> bool:
        """Whether the rational integer n > 0 is a square in K."""
        return squarefree_part(n).s in self.basis_radicands

    @cached_property
    def split_primes(self):
        return _split_primes(self.radicands)


@dataclass(frozen=True, eq=False)
class MQElement:
    field: MQField
    nums: tuple[int, ...]
    den: int

    # coordinates
    def coord(self, mask: int) -> Fraction:
        return Fraction(self.nums[mask], self.den)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(self.coord(S) for S in range(len(self.nums)))

    def reduced_coords(self) -> tuple[Fraction, ...]:
        """Coordinates over the reduced basis sqrt(r_S)."""
        return tuple(self.coord(S) * c for S, c in enumerate(self.field.cofactors))

    def is_zero(self) -> bool:
        return _is_zero(self.nums)

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def __eq__(self, other) -> bool:
        if isinstance(other, MQElement):
            return self.field == other.field and self.nums == other.nums and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coord(0) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.radicands, self.nums, self.den))

    # arithmetic
    def _coerce(self, other) -> "MQElement":
        if isinstance(other, MQElement):
            if other.field != self.field:
                raise DomainError("elements of different fields")
            return other
        return self.field.rational(other)

    def __add__(self, other):
        o = self._coerce(other)
        return self.field._raw([a * o.den + b * self.den for a, b in zip(self.nums, o.nums)],
                               self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return MQElement(self.field, tuple(-a for a in self.nums), self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        n, d = _mul_raw(self.field.radicands, self.nums, self.den, o.nums, o.den)
        return MQElement(self.field, n, d)

    __rmul__ = __mul__

    def inv(self) -> "MQElement":
        n, d = _inv_raw(self.field.radicands, self.nums, self.den)
        return MQElement(self.field, n, d)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # Galois action and signs
    def apply_galois(self, g: int) -> "MQElement":
        return MQElement(self.field, _conj_raw(self.nums, g), self.den)

    def norm(self) -> Fraction:
        return _norm_raw(self.field.radicands, self.nums, self.den)

    def sign_at(self, g: int) -> int:
        return _sign_raw(self.field.radicands, self.nums, g)

    def signature(self) -> tuple[int, ...]:
        """Additive signs over the embeddings in increasing mask order."""
        return tuple(0 if self.sign_at(g) > 0 else 1 for g in self.field.embeddings())

    def is_totally_positive(self) -> bool:
        return not any(self.signature())

    def residue(self, p: int, roots: tuple[int, ...]) -> int | None:
        """Image in F_p under e_S -> prod of chosen roots; None if p divides den."""
        if self.den % p == 0:
            return None
        vals = _embed_values(self.field.radicands, p, roots)
        return sum(a * v for a, v in zip(self.nums, vals)) * pow(self.den, -1, p) % p

    def sqrt(self) -> "MQElement | None":
        return is_square(self)

    def approx(self, digits: int = 20) -> str:
        """Decimal approximation at the identity embedding (display only)."""
        P = self.field.products
        k = digits * 4 + 64
        tot = sum(a * isqrt(PS << (2 * k)) for a, PS in zip(self.nums, P))
        val = Fraction(tot, self.den << k)
        return f"{float(val):.{digits}g}" if abs(val) < 10 ** 300 else f"~10^{len(str(int(val))) - 1}"

    def __repr__(self) -> str:
        parts = []
        for S, c in enumerate(self.coords):
            if c:
                parts.append(str(c) if S == 0 else f"{c}*e{''.join(map(str, self.field.subset(S)))}")
        return f"MQElement({' + '.join(parts) or '0'} in Q{self.field.radicands})"


def is_square(u: MQElement) -> MQElement | None:
    """A square root of u in its field, positive at the identity embedding,
    or None.  Every returned root has been verified by exact squaring."""
    r = _sqrt_raw(u.field.radicands, u.nums, u.den)
    if r is None:
        return None
    v = MQElement(u.field, *r)
    if v.is_zero():
        return v
    if v.sign_at(0) < 0:
        v = -v
    if v * v != u:
        raise ArithmeticError("square root failed verification")
    return v


def construct(*radicands: int) -> MQField:
    if len(radicands) == 1 and isinstance(radicands[0], (tuple, list)):
        radicands = tuple(radicands[0])
    return MQField(tuple(radicands))


def apply_galois(e: MQElement, g: int) -> MQElement:
    return e.apply_galois(g)


def sign_at(e: MQElement, g: int) -> int:
    return e.sign_at(g)


def signature(e: MQElement) -> tuple[int, ...]:
    return e.signature()


def quadratic_subfields(K: MQField) -> list[tuple[tuple[int, ...], int]]:
    return [(K.subset(S), r) for S, r in K.quadratic_subfields()]


def embedding_from_bits(bits: Iterable[int]) -> int:
    """EmbeddingIndex from the bit vector (g_1, ..., g_t)."""
    return sum(1 << i for i, b in enumerate(bits) if b)
