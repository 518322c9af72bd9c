from fractions import Fraction
from itertools import combinations, product
from math import prod

import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange

from unitsig.arith import DomainError, residue_symbol
from unitsig.families import (DEFICIENCY3_EXAMPLE, DEFICIENCY3_SYMBOLS, OCTUPLE_EXAMPLE,
                              PRIME_TRIQUAD_DEFICIENCY, constraint_table, count_valid_n,
                              cyclotomic_deficiency_bound, density_constant,
                              disjoint_sextuples, enumerate_residue_configs, possible_m,
                              possible_m_three_primes, q3mod4_prediction, search_family,
                              verify_family)
from unitsig.quadfield import fundamental_unit, m_of_unit

Q3 = [q for q in primerange(3, 200) if q % 4 == 3]
P1 = [p for p in primerange(2, 120) if p == 2 or p % 4 == 1]

# constraint table for four primes = 3 mod 4, copied by hand;
# columns (q1/q2), (q1/q3), (q1/q4), (q2/q3), (q2/q4), (q3/q4)
TABLE4 = {
    "q1": ("+1", "+1", "+1", "", "", ""),
    "q2": ("-1", "", "", "+1", "+1", ""),
    "q3": ("", "-1", "", "-1", "", "+1"),
    "q4": ("", "", "-1", "", "-1", "-1"),
    "q1*q2": ("", "s", "-s", "s", "-s", ""),
    "q1*q3": ("s", "", "-s", "-s", "", "-s"),
    "q1*q4": ("s", "-s", "", "", "-s", "s"),
    "q2*q3": ("s", "s", "", "", "s", "s"),
    "q2*q4": ("s", "", "s", "s", "", "-s"),
    "q3*q4": ("", "s", "s", "-s", "-s", ""),
    "q1*q2*q3": ("", "", "+1", "", "+1", "+1"),
    "q1*q2*q4": ("", "+1", "", "+1", "", "-1"),
    "q1*q3*q4": ("+1", "", "", "-1", "-1", ""),
    "q2*q3*q4": ("-1", "-1", "-1", "", "", ""),
}

# three primes = 1 mod 4 (or 2); columns (p1/p2), (p1/p3), (p2/p3)
TABLE3 = {
    "q1": ("+1", "+1", ""), "q2": ("+1", "", "+1"), "q3": ("", "+1", "+1"),
    "q1*q2": ("", "+1", "+1"), "q1*q3": ("+1", "", "+1"), "q2*q3": ("+1", "+1", ""),
}


def row_allows(row, syms):
    for s in (1, -1):
        want = {"+1": 1, "-1": -1, "s": s, "-s": -s}
        if all(e == "" or want[e] == v for e, v in zip(row, syms)):
            return True
    return False


def test_constraint_table_literal():
    assert constraint_table(4) == TABLE4


@pytest.mark.parametrize("syms", list(product((1, -1), repeat=6)))
def test_possible_m_matches_table(syms):
    got = possible_m(4, syms).labels()
    want = [k for k, row in TABLE4.items() if row_allows(row, syms)]
    assert sorted(got) == sorted(want)


@pytest.mark.parametrize("syms", list(product((1, -1), repeat=3)))
def test_three_prime_candidates_match_table(syms):
    got = possible_m_three_primes(3, syms).labels()
    want = [k for k, row in TABLE3.items() if row_allows(row, syms)]
    assert sorted(got) == sorted(want)


@settings(max_examples=40)
@given(st.lists(st.sampled_from(Q3[:25]), min_size=4, max_size=4, unique=True))
def test_actual_m_is_always_a_candidate(qs):
    # oracle: the m computed from the fundamental unit itself
    assert m_of_unit(prod(qs)).m in possible_m(qs).values()


@settings(max_examples=30)
@given(st.lists(st.sampled_from(P1), min_size=3, max_size=3, unique=True))
def test_three_prime_candidates_contain_actual_m(ps):
    if ps[0] != 2 and 2 in ps:
        ps = [2] + [p for p in ps if p != 2]
    d = prod(ps)
    if fundamental_unit(d).norm == 1:
        assert m_of_unit(d).m in possible_m_three_primes(ps).values()


def test_possible_m_examples():
    c = possible_m((7, 11, 19, 23))
    assert c.labels() == ["q1*q2", "q4", "q1*q2*q4"] and c.values() == [77, 23, 1771]
    assert possible_m_three_primes((5, 13, 17)).labels() == []
    with pytest.raises(DomainError):
        possible_m((7, 11, 19))
    with pytest.raises(DomainError):
        possible_m((5, 11, 19, 23))


@pytest.mark.parametrize("pair", list(combinations(Q3[:14], 2)))
def test_q3mod4_pairs(pair):
    q1, q2 = pair
    v = verify_family("q3mod4-pairs", pair)
    assert v.passed, v.checks
    # frozen law: the rank is 3 or 2 according to the (2/q) pattern
    r, dfc = q3mod4_prediction(q1, q2)
    assert r + dfc == 4


def test_deficiency3_example():
    assert tuple(residue_symbol(a, b) for a, b in combinations(DEFICIENCY3_EXAMPLE, 2)) \
        == DEFICIENCY3_SYMBOLS
    assert verify_family("deficiency3", DEFICIENCY3_EXAMPLE).passed


def test_deficiency3_search_hits_all_verify():
    hits = search_family("deficiency3", 200, 3)
    assert hits[0] == (3, 7, 19, 67, 139, 167)
    for h in hits:
        assert verify_family("deficiency3", h).passed


@pytest.mark.parametrize("primes,dfc", sorted(PRIME_TRIQUAD_DEFICIENCY.items()))
def test_prime_triquadratic_table(primes, dfc):
    from unitsig.unitgroup import analyze
    _, R = analyze(primes)
    assert R.deficiency == dfc
    assert verify_family("prime-triquad-min", primes).passed


def test_octuple_example_verdict():
    # The subfield m-values hold, but two square roots exist (sqrt(e1 e2 e5) and
    # sqrt(e3 e4 e7)), so the seven subfield units are not a fundamental system.
    v = verify_family("octuple", OCTUPLE_EXAMPLE)
    assert v.in_family and v.status == "fail"
    bad = {c.name: c.actual for c in v.checks if not c.ok}
    assert bad == {"adjunctions": 2, "signature rank": 3, "deficiency": 5}


@pytest.mark.parametrize("family,params", [
    ("rank4", (2, 5)), ("rank4", (5, 13)), ("rank3-n2+1", (4,)),
    ("prime-triquad-min", (3, 7, 11)), ("qmulti", (3, 7, 11, 19)),
])
def test_verify_examples(family, params):
    assert verify_family(family, params).passed


@pytest.mark.parametrize("family,params", [
    ("rank4", (2, 5, 13)), ("rank3-n2+1", (1,)), ("q3mod4-pairs", (3, 5)),
    ("deficiency3", (3, 7, 11, 19, 23, 31)),
])
def test_outside_family(family, params):
    v = verify_family(family, params)
    assert not v.in_family and v.status == "not in family"


def test_unknown_family():
    with pytest.raises(DomainError):
        verify_family("nope", (3,))


@pytest.mark.slow
def test_composite_from_search():
    blocks = disjoint_sextuples(200, count=2, limit=1)
    assert blocks and len(blocks[0]) == 12 and len(set(blocks[0])) == 12
    assert verify_family("composite", blocks[0]).passed


def test_config_count():
    c = enumerate_residue_configs("for-all")
    assert c.count == 14080 and c.total == 2 ** 15
    assert DEFICIENCY3_SYMBOLS in c.configs
    assert enumerate_residue_configs("uniqueness").count == 6400


def test_density_interval():
    iv = density_constant(10 ** 5)
    assert iv.contains(Fraction("0.6810")) and float(iv.width) < 3e-5
    # float oracle for the partial product
    c = 18 / 25
    for p in primerange(7, 10 ** 5):
        if p % 4 == 1:
            c *= 1 - 4 / p ** 2
    # the partial product is the upper end; the tail only lowers it
    assert abs(float(iv.hi) - c) < 1e-12 and iv.lo < Fraction(c)
    coarse = density_constant(1000)
    assert coarse.lo <= iv.lo and iv.hi <= coarse.hi
    with pytest.raises(DomainError):
        density_constant(10)


def test_count_valid_n():
    brute = 0
    for n in range(2, 31):
        sq = lambda x: all(x % (k * k) for k in range(2, int(x ** 0.5) + 1))
        brute += n % 5 != 2 and sq(n * n + 1) and sq((n + 1) ** 2 + 1)
    assert count_valid_n(30) == brute


def test_cyclotomic_bound():
    b = cyclotomic_deficiency_bound(3 * 7 * 11 * 19 * 5)
    assert b.t == 2 and b.witness == (21, 209)
    assert cyclotomic_deficiency_bound(5).t == 0
