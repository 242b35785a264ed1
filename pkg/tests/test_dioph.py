"""Exact Diophantine layer: invariants, RP^3 and RP^4 searches."""

import json
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genpentagram import dioph
from genpentagram.errors import DegeneratePlanes, RepeatedEntries

from oracles import elementary_symmetric_bruteforce, vandermonde_solution

distinct_tuples = st.lists(st.integers(-9, 9), min_size=2, max_size=5, unique=True)
nonzero_triples = st.lists(st.integers(-9, 9).filter(bool), min_size=3, max_size=3, unique=True)


@settings(max_examples=80, deadline=None)
@given(distinct_tuples)
def test_elementary_symmetric_matches_bruteforce(t):
    assert list(dioph.elementary_symmetric(t)) == elementary_symmetric_bruteforce(t)


@settings(max_examples=80, deadline=None)
@given(distinct_tuples)
def test_invariants_solve_the_vandermonde_system(t):
    want = vandermonde_solution(t)
    assert dioph.vandermonde_cramer(t) == want
    assert dioph.symmetric_invariants(t, check=True).M == want


@settings(max_examples=80, deadline=None)
@given(distinct_tuples)
def test_alternating_sign_form_holds_for_odd_length_only(t):
    agrees = dioph.alternating_sign_form(t) == dioph.vandermonde_cramer(t)
    if len(t) % 2 == 1:
        assert agrees
    elif any(dioph.vandermonde_cramer(t)):
        assert not agrees


@settings(max_examples=80, deadline=None)
@given(nonzero_triples)
def test_triple_invariants(t):
    a, b, c = t
    inv = dioph.symmetric_invariants(t)
    assert inv[1] == a * b * c
    assert inv[2] == -(a * b + a * c + b * c)
    assert inv[3] == a + b + c
    assert inv[4] == inv[3] * inv[2] + inv[1]
    assert inv[5] == inv[3] ** 2 + inv[2]
    for x in t:
        assert x**4 == inv[3] * inv[1] + inv[4] * x + inv[5] * x**2


def test_higher_power_expansion():
    t = (2, -3, 5)
    inv = dioph.symmetric_invariants(t)
    for x in t:
        # x^4 = x * x^3 = M1 x + M2 x^2 + M3 x^3, then reduce x^3 once more
        assert x**4 == inv[1] * x + inv[2] * x**2 + inv[3] * (inv[1] + inv[2] * x + inv[3] * x**2)


def test_repeated_entries():
    with pytest.raises(RepeatedEntries):
        dioph.symmetric_invariants((1, 2, 1))


def test_invariants_json():
    data = json.loads(json.dumps(dioph.symmetric_invariants((1, -2, 4)).to_json()))
    assert data["M"] == ["-8", "6", "3"] and data["M5"] == "15"


# --- RP^3 ------------------------------------------------------------------------


def test_ansatz_family_candidate():
    cand = dioph.rp3_candidate(*dioph.ansatz_triples(-2, 3, -5))
    assert cand.c1_holds and cand.rank_full
    assert cand.q == Fraction(1, 8)
    assert cand.gamma3 == Fraction(-30, 6)
    assert json.loads(json.dumps(cand.to_json()))["q"] == "1/8"


def test_level_condition():
    assert dioph.rp3_level_condition(-2, 3, -5) == Fraction(-5 - 1 - 2 * 2, 3 + 5)
    with pytest.raises(ZeroDivisionError):
        dioph.rp3_level_condition(1, 2, 2)


def test_product_condition_failures():
    assert not dioph.rp3_candidate((2, -3, 5), (5, -2, 3), (5, 1, 6)).c1_holds
    assert not dioph.rp3_candidate((5, -2, 3), (-5, 2, 3), (-5, 1, -6)).c1_holds


def test_rp3_search_small_bounds():
    assert dioph.rp3_search(5) == []
    hits = dioph.rp3_search(6)
    keys = [h.key() for h in hits]
    assert len(hits) == 6
    assert ((-6, -5, -1), (-5, 2, 3), (-2, 3, 5)) in keys
    assert ((-4, -3, 1), (-3, -1, 4), (1, 2, 6)) in keys
    assert keys == sorted(keys)
    assert all(h.q == Fraction(1, 8) for h in hits)


def test_rp3_search_is_exhaustive_against_direct_enumeration():
    bound = 3
    vals = [v for v in range(-bound, bound + 1) if v]
    triples = list(combinations(vals, 3))
    want = set()
    for a, b, c in combinations(triples, 3):
        cand = dioph.rp3_candidate(a, b, c)
        if cand.q == Fraction(7, 60):
            want.add(cand.key())
    got = {h.key() for h in dioph.rp3_search(bound, Fraction(7, 60))}
    assert got == want and len(got) == 8


def test_rp3_search_parallel_matches_serial():
    assert [h.key() for h in dioph.rp3_search(6, threads=3)] == \
        [h.key() for h in dioph.rp3_search(6)]


def test_search_bounds():
    with pytest.raises(ValueError):
        dioph.rp3_search(1)
    with pytest.raises(ValueError):
        dioph.rp4_search(1)


# --- RP^4 ------------------------------------------------------------------------

def test_three_plane_rows_satisfy_plus_nine_identity():
    row = dioph.rp4_three_plane_check((7, -1, -7), (3, -1, -3), (6, -3, -4))
    assert row.condition1 and row.rank_full
    assert (row.det_x, row.det_m) == (756, 1680)
    assert 20 * row.det_x == 9 * row.det_m
    assert row.flipped_identity_holds and not row.identity_holds
    assert not row.passes


def test_rp4_search_minus_nine_is_empty():
    assert dioph.rp4_search(5) == []


def test_rp4_search_flipped_small_bound():
    assert dioph.rp4_search(5, flipped=True) == []


def test_two_subspace_ratio_is_three_tenths():
    pairs = dioph.rp4_two_subspace_pairs(7)
    assert len(pairs) == 4
    assert all(dioph.rp4_two_subspace_ratio(a, b) == Fraction(3, 10) for a, b in pairs)


def test_two_subspace_validation():
    with pytest.raises(ValueError):
        dioph.rp4_two_subspace_ratio((1, 2, 3), (1, 2, 4))
    with pytest.raises(DegeneratePlanes):
        dioph.rp4_two_subspace_ratio((1, 5, -6), (1, 5, -6))
