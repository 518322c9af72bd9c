from math import isqrt, prod

import pytest
from hypothesis import given, strategies as st

from unitsig.arith import (DomainError, FactorizationBudgetError, decimal_digits, factorize,
                           is_square, is_squarefree, jacobi, primes_in_class,
                           primes_matching, residue_symbol, squarefree_part, symbol2,
                           symbol_pattern, to_decimal)


def trial_factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return sorted(out.items())


def euler_symbol(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def brute_is_prime(n):
    return n > 1 and all(n % k for k in range(2, isqrt(n) + 1))


@given(st.integers(1, 10 ** 7))
def test_factorize_matches_trial_division(n):
    assert factorize(n) == trial_factor(n)


@given(st.integers(1, 10 ** 6))
def test_squarefree_part_recombines(n):
    sf = squarefree_part(n)
    assert sf.s * sf.c ** 2 == n
    assert is_squarefree(sf.s)


@given(st.integers(-50, 10 ** 6))
def test_is_square(n):
    assert is_square(n) == (n >= 0 and isqrt(n) ** 2 == n)


@given(st.integers(-10 ** 6, 10 ** 6), st.sampled_from([3, 5, 7, 11, 13, 97, 101, 1009]))
def test_residue_symbol_is_euler_criterion(a, p):
    assert residue_symbol(a, p) == euler_symbol(a, p)


@given(st.integers(-10 ** 4, 10 ** 4), st.integers(1, 2000).map(lambda k: 2 * k + 1))
def test_jacobi_is_multiplicative_over_factors(a, n):
    want = prod(euler_symbol(a, p) ** e for p, e in trial_factor(n)) if n > 1 else 1
    assert jacobi(a, n) == want


def test_second_supplement_convention():
    # (p/2) is +1 for p = +-1 mod 8 and -1 for p = +-3 mod 8
    assert [symbol2(p) for p in (7, 17, 3, 5, 11, 13)] == [1, 1, -1, -1, -1, -1]


def test_jacobi_rejects_even_modulus():
    with pytest.raises(DomainError):
        jacobi(2, 10)
    with pytest.raises(DomainError):
        squarefree_part(0)


def test_factorization_budget():
    with pytest.raises(FactorizationBudgetError):
        factorize((1 << 127) - 1 << 100, budget_bits=64)


@given(st.integers(0, 10 ** 40))
def test_decimal_digits(n):
    assert decimal_digits(n) == len(str(n))


def test_to_decimal_beyond_conversion_limit():
    n = 7 ** 20000
    s = to_decimal(n)
    assert decimal_digits(n) == len(s)
    assert s.endswith(str(n % 10 ** 50).zfill(50)) and s.startswith("913")


def test_primes_in_class_match_brute_force():
    want = [p for p in range(2, 300) if brute_is_prime(p) and p % 8 in (3, 5)]
    assert primes_in_class(300, 8, (3, 5)) == want


def test_primes_matching_honours_symbols():
    # three primes = 3 mod 4 with (q1/q2) = -1, (q1/q3) = 1, (q2/q3) = -1
    pat = symbol_pattern(3, [-1, 1, -1])
    found = primes_matching(pat, 60, limit=20)
    assert found
    for q in found:
        assert all(x % 4 == 3 for x in q) and len(set(q)) == 3
        assert residue_symbol(q[0], q[1]) == -1
        assert residue_symbol(q[0], q[2]) == 1
        assert residue_symbol(q[1], q[2]) == -1
    # oracle: every tuple below the bound satisfying the constraints is found
    qs = [p for p in range(3, 60) if brute_is_prime(p) and p % 4 == 3]
    brute = [(a, b, c) for a in qs for b in qs for c in qs if len({a, b, c}) == 3
             and euler_symbol(a, b) == -1 and euler_symbol(a, c) == 1 and euler_symbol(b, c) == -1]
    assert sorted(primes_matching(pat, 60)) == sorted(brute)
