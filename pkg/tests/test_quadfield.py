from fractions import Fraction
from itertools import combinations
from math import isqrt

import pytest
from hypothesis import assume, given, strategies as st
from sympy import primerange

from unitsig.arith import DomainError, is_squarefree, residue_symbol
from unitsig.quadfield import (fundamental_unit, genus_relation_report, m_candidates,
                               m_of_unit, predict_norm_sign, sqrt_unit_presentation)


def pell_oracle(d, ymax=20000):
    """Smallest unit > 1 by scanning Y in X^2 - d Y^2 = +-4 (half-integral units
    allowed only for d = 1 mod 4)."""
    for Y in range(1, ymax):
        for s in (-4, 4):
            X2 = d * Y * Y + s
            X = isqrt(X2) if X2 > 0 else None
            if X is None or X * X != X2:
                continue
            if d % 4 != 1 and (X % 2 or Y % 2):
                continue
            return Fraction(X, 2), Fraction(Y, 2), s // 4
    return None


SMALL_D = [d for d in range(2, 400) if is_squarefree(d)]


def test_fundamental_unit_matches_brute_force():
    checked = 0
    for d in SMALL_D:
        want = pell_oracle(d)
        if want is None:        # unit too large for the scan
            continue
        u = fundamental_unit(d)
        assert (u.x, u.y, u.norm) == want, d
        checked += 1
    assert checked > 180


def test_known_units():
    # frozen values
    assert str(fundamental_unit(145)) == "12 + 1*sqrt(145)" and fundamental_unit(145).norm == -1
    assert str(fundamental_unit(82)) == "9 + 1*sqrt(82)" and fundamental_unit(82).norm == -1
    u = fundamental_unit(5)
    assert (u.x, u.y, u.norm) == (Fraction(1, 2), Fraction(1, 2), -1)
    assert (fundamental_unit(3).x, fundamental_unit(3).y) == (2, 1)
    # d = 94 has a comparatively large unit
    u = fundamental_unit(94)
    assert (u.x, u.y, u.norm) == (2143295, 221064, 1)


def test_long_period_unit_has_many_digits():
    u = fundamental_unit(9999991)
    assert u.x * u.x - 9999991 * u.y * u.y == u.norm
    assert u.digits() > 100


@pytest.mark.parametrize("d", [0, 1, 4, 12, -5])
def test_bad_radicands(d):
    with pytest.raises(DomainError):
        fundamental_unit(d)


@given(st.integers(2, 5000))
def test_unit_norm_equation(d):
    assume(is_squarefree(d))
    u = fundamental_unit(d)
    assert u.x * u.x - d * u.y * u.y == u.norm and u.gt_one()


@given(st.integers(2, 5000))
def test_m_identities(d):
    assume(is_squarefree(d))
    u = fundamental_unit(d)
    assume(u.norm == 1)
    A, B, m = sqrt_unit_presentation(d)
    # m * eps = (A - B sqrt d)^2
    assert A * A + d * B * B == m * u.x
    assert -2 * A * B == m * u.y
    assert A * A - d * B * B == m
    assert m in m_candidates(d)


def test_m_law_single_primes():
    for q in primerange(3, 400):
        if q % 4 == 3:
            assert m_of_unit(q).m == (2 * q if q % 8 == 3 else 2)


def test_m_law_prime_pairs():
    qs = [q for q in primerange(3, 120) if q % 4 == 3]
    for q1, q2 in combinations(qs, 2):
        assert m_of_unit(q1 * q2).m == (q1 if residue_symbol(q1, q2) == 1 else q2)


def test_m_rejected_for_norm_minus_one():
    with pytest.raises(DomainError):
        m_of_unit(145)


def test_predict_norm_sign_is_sound():
    for d in range(2, 3000):
        if is_squarefree(d) and predict_norm_sign(d).guaranteed_minus_one:
            assert fundamental_unit(d).norm == -1, d


def test_predict_norm_sign_examples():
    assert predict_norm_sign(13).guaranteed_minus_one
    assert predict_norm_sign([5, 13]).guaranteed_minus_one      # (5/13) = -1
    assert not predict_norm_sign(3).guaranteed_minus_one
    assert str(predict_norm_sign(34)) == "Unknown"              # (2/17) = 1
    assert predict_norm_sign(5 * 13 * 2).guaranteed_minus_one


def test_genus_report_cases():
    assert genus_relation_report(3 * 7).relation_case == 1
    assert genus_relation_report(145).relation_case == 3
    r = genus_relation_report(34)
    assert r.norm == 1 and r.relation_case == 2
