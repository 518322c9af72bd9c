from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange

from unitsig.arith import DomainError
from unitsig.families import OCTUPLE_EXAMPLE, octuple_field
from unitsig.mqfield import MQField, is_square
from unitsig.unitgroup import (_embed_unit, analyze, classify_biquadratic, gf2_kernel,
                               gf2_rank, kubota_square_class, provenance_name, same_lattice,
                               saturate, signature_rank, span, subfield_signature_rank,
                               subfield_units, tp_independent_lower_bound)

Q3 = [q for q in primerange(3, 80) if q % 4 == 3]
SMALL = [p for p in primerange(2, 60)]


def brute_rank(vectors):
    """F_2 rank by enumerating the span."""
    seen = {0}
    for v in vectors:
        seen |= {s ^ v for s in seen}
    return len(seen).bit_length() - 1


@given(st.lists(st.integers(0, 2 ** 10 - 1), max_size=8))
def test_gf2_rank_matches_span_size(rows):
    assert gf2_rank(rows) == brute_rank(rows)
    assert len(span(rows)) == 2 ** gf2_rank(rows)


@given(st.lists(st.integers(0, 2 ** 6 - 1), min_size=1, max_size=6))
def test_gf2_kernel(rows):
    ker = gf2_kernel(rows)
    assert len(ker) == len(rows) - gf2_rank(rows)
    for x in ker:
        acc = 0
        for i, r in enumerate(rows):
            if x >> i & 1:
                acc ^= r
        assert acc == 0


def test_provenance_names():
    h = Fraction(1, 2)
    assert provenance_name((h, h, 0)) == "sqrt(e1*e2)"
    assert provenance_name((1, 0, 0)) == "e1"
    assert provenance_name((Fraction(1, 4), 0, h)) == "e1^(1/4)*e3^(1/2)"


def test_q3_q11():
    # frozen example: Q(sqrt 3, sqrt 11)
    U, R = analyze((3, 11))
    assert (R.rank, R.deficiency, R.exact) == (3, 1, True)
    assert str(classify_biquadratic(U)) == "(b)5"
    assert tp_independent_lower_bound(U.field) == 1
    for g in U.generators:
        assert g.norm() in (1, -1)


def test_q2_q5_has_full_rank():
    U, R = analyze((2, 5))
    assert R.rank == 4 and R.deficiency == 0
    assert subfield_signature_rank(U.field) == 3 and U.adjunctions == 1


def test_class_c_field():
    # every subfield unit of norm -1: 2, 5, 10
    U, R = analyze((2, 5))
    assert all(r.norm == -1 for r in U.records)
    assert classify_biquadratic(U).label in ("c1", "c2")


def kubota_span(K, records):
    """Half-exponent vectors v with prod eps^v a square, from the m-criterion."""
    n = len(records)
    return {sum(1 << i for i in range(n) if v[i]) for v in product((0, 1), repeat=n)
            if kubota_square_class(K, v, records)}


@pytest.mark.parametrize("pair", list(combinations(Q3[:9], 2)))
def test_saturation_agrees_with_m_criterion(pair):
    K = MQField(pair)
    U = saturate(K)
    recs = U.records
    assert all(r.norm == 1 for r in recs)      # primes = 3 mod 4
    assert U.square_root_span() == kubota_span(K, recs)


@pytest.mark.parametrize("ds", [(2, 3), (5, 7), (3, 5), (2, 7), (6, 7), (3, 17), (13, 19)])
def test_saturation_agrees_with_m_criterion_mixed(ds):
    K = MQField(ds)
    U = saturate(K)
    recs = U.records
    if any(r.norm == -1 for r in recs):
        # m-criterion not applicable; check soundness with exact roots instead
        for v in range(1, 8):
            u = K.one()
            for i in range(3):
                if v >> i & 1:
                    u = u * _embed_unit(K, recs[i])
            assert (is_square(u) is not None) == (v in U.square_root_span())
        with pytest.raises(DomainError):
            kubota_square_class(K, [1, 1, 1], recs)
    else:
        assert U.square_root_span() == kubota_span(K, recs)


def test_generators_are_units_with_recorded_signatures():
    U, _ = analyze((3, 7, 11))
    for g, s in zip(U.generators, U.signatures):
        assert g.norm() in (1, -1)
        assert g.signature() == s


def test_provenance_is_exact():
    # g^(2^k) = +-prod eps_i^(2^k p_i), checked by exact multiplication
    U, _ = analyze((3, 7, 11))
    K = U.field
    units = [_embed_unit(K, r) for r in U.records]
    assert any(e.denominator == 4 for p in U.provenance for e in p)
    for g, p in zip(U.generators, U.provenance):
        k = max(e.denominator for e in p)
        rhs = K.one()
        for u, e in zip(units, p):
            rhs = rhs * u ** int(e * k)
        assert g ** k in (rhs, -rhs)


@settings(max_examples=15)
@given(st.lists(st.sampled_from(SMALL), min_size=2, max_size=3, unique=True))
def test_saturation_is_idempotent(ps):
    K = MQField(tuple(ps))
    U = saturate(K, canonical=False)
    V = saturate(K, start=U, canonical=False)
    assert V.adjunctions == U.adjunctions
    assert same_lattice(U.provenance, V.provenance)
    assert signature_rank(U) == signature_rank(saturate(K))


@settings(max_examples=15)
@given(st.lists(st.sampled_from(SMALL), min_size=2, max_size=3, unique=True))
def test_rank_bounds(ps):
    K = MQField(tuple(ps))
    U = saturate(K)
    R = signature_rank(U)
    assert subfield_signature_rank(K) <= R.rank <= K.degree
    assert tp_independent_lower_bound(K) <= R.deficiency


def test_canonical_presentation_is_reproducible():
    K = MQField((3, 7, 11))
    a, b = saturate(K), saturate(MQField((3, 7, 11)))
    assert a.provenance == b.provenance and a.names() == b.names()


def test_octuple_example_true_values():
    # Computed with two independent routes (exact tower square roots and the
    # m-criterion): two extra square roots exist, sqrt(e1 e2 e5) and sqrt(e3 e4 e7),
    # so the group is larger than the subfield units alone suggest.
    K = octuple_field(OCTUPLE_EXAMPLE)
    recs = subfield_units(K)
    assert all(r.norm == 1 for r in recs)
    assert tp_independent_lower_bound(K, recs) == 5
    assert kubota_square_class(K, [1, 1, 0, 0, 1, 0, 0], recs)
    assert kubota_square_class(K, [0, 0, 1, 1, 0, 0, 1], recs)
    U = saturate(K, recs)
    R = signature_rank(U)
    assert (R.rank, R.deficiency) == (3, 5)
    assert U.square_root_span() == kubota_span(K, recs)
    assert all(_embed_unit(K, r).is_totally_positive() for r in recs)
