import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbsam.exact import (
    ExtReal,
    MultiIndex,
    enumerate_degree_slice,
    format_rational,
    log_with_error,
    parse_rational,
    simplex_count,
)

positive_rationals = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6)


def test_simplex_count_examples():
    assert simplex_count(2, 3) == 10
    assert simplex_count(0, 5) == 1
    assert simplex_count(4, 0) == 1


@given(st.integers(1, 4), st.integers(0, 8))
def test_slice_size_matches_simplex_count(k, n):
    mons = enumerate_degree_slice(k, n)
    assert len(mons) == simplex_count(k - 1, n)
    assert len(set(mons)) == len(mons)
    assert all(m.degree == n and len(m) == k for m in mons)
    assert mons == sorted(mons, reverse=True)


def test_enumerate_examples():
    assert enumerate_degree_slice(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert enumerate_degree_slice(1, 3) == [(3,)]
    assert enumerate_degree_slice(3, 1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_multi_index_rejects_negative():
    with pytest.raises(ValueError):
        MultiIndex((1, -1))
    assert MultiIndex((1, 2)) + MultiIndex((0, 3)) == (1, 5)


def test_log_examples():
    z = log_with_error(1, 53)
    assert z.mid == 0 and z.rad == 0
    two = log_with_error(2, 53)
    with mpmath.workdps(40):
        assert abs(mpmath.mpf(two.mid.numerator) / two.mid.denominator - mpmath.log(2)) <= float(two.rad)
    assert two.rad <= Fraction(1, 2**53)
    assert log_with_error(Fraction(1, 2), 53).mid == -two.mid


@given(positive_rationals, st.sampled_from([32, 53, 96, 160]))
def test_log_error_bound_against_mpmath(q, bits):
    v = log_with_error(q, bits)
    with mpmath.workdps(80):
        ref = mpmath.log(mpmath.mpf(q.numerator) / q.denominator)
        assert abs(mpmath.mpf(v.mid.numerator) / v.mid.denominator - ref) <= mpmath.mpf(v.rad.numerator) / v.rad.denominator
    assert v.rad <= Fraction(1, 2**bits)


def test_log_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_with_error(0)


@given(st.fractions(), st.fractions(min_value=0, max_value=1), st.fractions(), st.fractions(min_value=0, max_value=1))
def test_extreal_interval_arithmetic(a, ra, b, rb):
    x, y = ExtReal(a, ra), ExtReal(b, rb)
    s = x + y
    assert s.lower == x.lower + y.lower and s.upper == x.upper + y.upper
    p = x * y
    corners = [u * v for u in (x.lower, x.upper) for v in (y.lower, y.upper)]
    assert p.lower <= min(corners) and max(corners) <= p.upper


def test_extreal_infinities():
    inf, ninf = ExtReal.pos_inf(), ExtReal.neg_inf()
    assert inf + 3 == inf and ninf.scale(-2) == inf
    assert ExtReal.exact(5).scale(0).is_exact
    with pytest.raises(ArithmeticError):
        inf + ninf
    assert ninf.certainly_le(ExtReal.exact(-10**9))
    assert float(inf) == math.inf


@given(st.fractions())
def test_rational_roundtrip(q):
    assert parse_rational(format_rational(q)) == q
