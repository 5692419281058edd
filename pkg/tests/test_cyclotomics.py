from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import pytest
from hypothesis import given, settings, strategies as st

from torsion_units.cyclotomics import (Cyclotomic, add, conj, cyclotomic_polynomial, divisors,
                                       from_json, galois, moebius, mul, normalize, to_json,
                                       totient, trace_over, trace_times_root,
                                       trace_to_rationals)


def z(n, i=1):
    return Cyclotomic.root_of_unity(n, i)


def test_basic_number_theory():
    assert [moebius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert [totient(n) for n in (1, 2, 12, 30, 9240)] == [1, 1, 4, 8, 1920]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert cyclotomic_polynomial(6) == (1, -1, 1)


def test_normalize_examples():
    w = z(3, 2)
    assert w.conductor == 3 and w.coeffs == {0: -1, 1: -1}
    assert z(8, 2) == z(4) and z(8, 2).conductor == 4
    half = normalize(5, {0: Fraction(3, 6)})
    assert half.conductor == 1 and half.to_rational() == Fraction(1, 2)
    assert z(7, 7) == Cyclotomic.rational(1)
    with pytest.raises(ValueError):
        normalize(0, {})


def test_field_operations():
    assert mul(z(5), z(5, 4)) == Cyclotomic.rational(1)
    assert mul(z(4), z(4)) == Cyclotomic.rational(-1)
    assert mul(1 + z(3), 1 + z(3, 2)) == Cyclotomic.rational(1)
    assert add(z(4), z(4, 3)).is_zero()


def test_galois():
    assert galois(z(5), 2) == z(5, 2)
    r = Cyclotomic.rational(Fraction(7, 3))
    assert all(galois(r, j) == r for j in (1, 5, -1))
    assert galois(galois(z(4), 3), 3) == z(4)
    with pytest.raises(ValueError):
        galois(z(6), 3)


def test_trace_examples():
    assert trace_to_rationals(z(5)) == -1
    assert trace_over(Cyclotomic.rational(1), 12) == 4
    minus_one = z(12, 6)
    assert minus_one.conductor == 1 and trace_to_rationals(minus_one) == -1
    assert trace_over(minus_one, 12) == -4


def _brute_trace(n, i):
    """Sum of zeta_n^(i*j) over units j, collected as an exact cyclotomic number."""
    total = Cyclotomic.rational(0)
    for j in range(1, n + 1):
        if gcd(j, n) == 1:
            total = total + z(n, i * j)
    assert total.is_rational()
    return total.to_rational()


@pytest.mark.parametrize("n", range(1, 61))
def test_trace_matches_galois_sum(n):
    for i in range(n):
        assert trace_over(z(n, i), n) == _brute_trace(n, i)


def test_trace_times_root_agrees_with_product():
    a = Cyclotomic(20, {1: 3, 7: -2, 10: 1})
    for N in (20, 40, 60):
        for s in range(-5, 6):
            assert trace_times_root(a, N, s) == trace_over(a * z(N, s), N)
    b = z(5, 2) + 1  # odd field conductor path
    for s in range(15):
        assert trace_times_root(b, 15, s) == trace_over(b * z(15, s), 15)


def test_json_round_trip():
    a = Cyclotomic(15, {1: Fraction(1, 2), 4: -3})
    assert from_json(to_json(a)) == a
    assert to_json(Cyclotomic.rational(5)) == {"conductor": 1, "coeffs": {"0": "5"}}


elements = st.builds(
    lambda n, cs: Cyclotomic(n, {i: Fraction(c) for i, c in enumerate(cs)}),
    st.sampled_from([1, 3, 4, 5, 7, 8, 9, 12, 15, 20]),
    st.lists(st.integers(-5, 5), min_size=1, max_size=8),
)


@settings(max_examples=60, deadline=None)
@given(elements, elements)
def test_ring_laws(a, b):
    assert a + (-a) == Cyclotomic.rational(0)
    assert a * 1 == a
    assert a + b == b + a and a * b == b * a
    assert normalize(a.conductor, a.coeffs) == a
    assert (a * (b + 1)) == a * b + a
    assert hash(a + b) == hash(b + a)


@settings(max_examples=60, deadline=None)
@given(elements, elements, st.integers(-4, 4))
def test_trace_properties(a, b, r):
    M = lcm(a.conductor, b.conductor)
    assert trace_over(a + b, M) == trace_over(a, M) + trace_over(b, M)
    assert trace_to_rationals(a * r) == r * trace_to_rationals(a)
    n = a.conductor
    for j in (j for j in range(1, n + 1) if gcd(j, n) == 1):
        assert trace_to_rationals(galois(a, j)) == trace_to_rationals(a)
    assert trace_over(a, 3 * n) == trace_to_rationals(a) * totient(3 * n) // totient(n)
    assert conj(conj(a)) == a
