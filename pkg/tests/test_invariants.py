import csv
import io
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hilbsam.exact import ExtReal
from hilbsam.invariants import (
    MetricSpec,
    chi_sequence,
    closed_form_c,
    estimate_invariant,
    l2_linf_gap,
    lambda1_trend,
    normalized_sequence,
    parse_metric_spec,
    parseval_check,
    random_integer_polynomial,
)
from hilbsam.tube import NEG_INF, LogProfile, dilate, polydisc, random_polytope_profile

F = Fraction
FS = LogProfile.fubini_study


def _h_float(p, u):
    if p.kind == "fubini-study":
        return 0.5 * sum(x * math.log(x) for x in u if x > 0) + float(p.shift)
    vals = [sum(float(a) * x for a, x in zip(q, u)) for q in p.points if NEG_INF not in q]
    return max(vals) + float(p.shift)


def _quad_c(p):
    k = p.dim + 1
    if k == 2:
        mean, _ = integrate.quad(lambda t: _h_float(p, (t, 1 - t)), 0, 1, limit=200, epsabs=1e-12)
    else:
        val, _ = integrate.dblquad(lambda y, x: _h_float(p, (x, y, 1 - x - y)), 0, 1, 0, lambda x: 1 - x,
                                   epsabs=1e-8)
        mean = 2 * val
    return -k * mean


def test_normalized_sequence_examples():
    chis = [(n, ExtReal.exact(n * (n + 1))) for n in range(30)]
    seq = normalized_sequence(chis, 2)
    assert all(v == ExtReal.exact(F(2 * (n + 1), n)) for n, v in seq)
    assert all(v == ExtReal.exact(0) for _, v in normalized_sequence([(n, ExtReal.exact(0)) for n in range(5)], 2))
    fs = normalized_sequence(chi_sequence(MetricSpec.sup_norm(FS(1)), 400), 2)
    assert abs(float(fs[-1][1]) - 0.5) < 0.02


def test_closed_form_examples():
    assert closed_form_c(polydisc(2)) == ExtReal.exact(0)
    for l in range(5):
        c = closed_form_c(dilate(polydisc(l), F(-3, 2)))
        assert abs(c.mid - F(3, 2) * (l + 1)) <= c.rad
    assert closed_form_c(FS(1)) == ExtReal.exact(F(1, 2))
    assert closed_form_c(FS(2)) == ExtReal.exact(F(5, 4))


@pytest.mark.parametrize("l", [1, 2])
def test_fs_closed_form_vs_quadrature(l):
    assert float(closed_form_c(FS(l))) == pytest.approx(_quad_c(FS(l)), abs=1e-7)


@settings(max_examples=8)
@given(st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_polytope_closed_form_vs_quadrature(seed, l):
    p = random_polytope_profile(random.Random(seed), l=l, neg_inf_rate=0)
    assert float(closed_form_c(p)) == pytest.approx(_quad_c(p), abs=2e-5)


def test_closed_form_monte_carlo_radius():
    p = LogProfile.polytope([(0, -1, -1, -1), (-1, 0, -2, 0)])
    est = closed_form_c(p, samples=20000, seed=1)
    ref = closed_form_c(p, samples=400000, seed=2)
    assert abs(est.mid - ref.mid) <= est.rad + ref.rad
    with pytest.raises(ValueError):
        closed_form_c(LogProfile.polytope([(NEG_INF, 0)]))


def test_estimate_examples():
    est = estimate_invariant(MetricSpec.sup_norm(FS(1)), 2, 8, 400)
    assert abs(float(est.c_lower) - 0.5) <= 0.02 and abs(float(est.c_upper) - 0.5) <= 0.02
    assert est.certified and est.certified_lower.certainly_le(ExtReal.exact(F(1, 2)))
    zero = estimate_invariant(MetricSpec.sup_norm(polydisc(1)), 2, 4, 50)
    assert zero.c_lower == zero.c_upper == ExtReal.exact(0)
    two = estimate_invariant(MetricSpec.sup_norm(dilate(polydisc(1), -1)), 2, 4, 50)
    assert two.c_lower == two.c_upper == ExtReal.exact(2)


def test_estimate_edge_cases():
    spec = MetricSpec.sup_norm(FS(1))
    assert estimate_invariant(spec, 3, 3, 40).c_upper == ExtReal.exact(0)
    with pytest.raises(ValueError):
        estimate_invariant(spec, 1)
    degenerate = estimate_invariant(MetricSpec.sup_norm(LogProfile.polytope([(NEG_INF, 0)])), 2, 3, 20)
    assert degenerate.c_upper.tag == "+inf" and degenerate.evidence["reason"].startswith("degenerate")
    l2 = estimate_invariant(MetricSpec.fubini_study_l2(1), 2, 4, 100)
    assert not l2.certified and l2.certified_lower.tag == "-inf"
    assert abs(float(l2.point_estimate) - 0.5) < 0.05


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_per_j_monotone_and_certified(seed):
    p = random_polytope_profile(random.Random(seed), l=1, neg_inf_rate=0)
    est = estimate_invariant(MetricSpec.sup_norm(p), 2, 4, 60)
    lows = [est.per_j[j].fekete.certified_lower for j in sorted(est.per_j)]
    assert all(a <= b for a, b in zip(lows, lows[1:]))
    oracle = closed_form_c(p)
    assert est.certified_lower.certainly_le(oracle + ExtReal.exact(F(1, 10**9)))


def test_estimate_serialization():
    est = estimate_invariant(MetricSpec.sup_norm(FS(1)), 2, 3, 40)
    data = json.loads(est.to_json())
    assert {"c_lower", "c_upper", "certified_lower", "oracle_value", "tolerances"} <= set(data)
    rows = list(csv.reader(io.StringIO(est.to_csv())))
    assert rows[0] == ["j", "n", "chi", "normalized", "fekete_lower", "error_bound"]
    assert len(rows) == 1 + est.j_used * 40
    assert est.to_json() == estimate_invariant(MetricSpec.sup_norm(FS(1)), 2, 3, 40).to_json()


def test_spec_parsing():
    assert parse_metric_spec({"type": "fubini-study", "dim": 1}) == MetricSpec.sup_norm(FS(1))
    spec = MetricSpec.sup_norm(dilate(polydisc(2), F(1, 3)), twist=2)
    assert parse_metric_spec(json.dumps(spec.to_json())) == spec
    assert parse_metric_spec({"metric": "fs-l2", "dim": 2}) == MetricSpec.fubini_study_l2(2)
    with pytest.raises(ValueError):
        parse_metric_spec({"metric": "sup", "dim": 1, "profile": {"type": "fubini-study", "dim": 1}, "twist": "x"})
    with pytest.raises(ValueError):
        parse_metric_spec({"metric": "bergman"})


def test_gap_examples():
    assert l2_linf_gap(1, 0) == ExtReal.exact(0)
    gaps = [float(l2_linf_gap(1, n)) for n in (10, 20, 40, 100)]
    assert all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] <= 0.05


@given(st.integers(1, 2), st.integers(1, 25))
def test_gap_matches_brute_force(l, n):
    from hilbsam.exact import iter_degree_slice

    best = max(0.5 * sum(e * math.log(e / n) for e in m if e)
               - 0.5 * (sum(math.lgamma(e + 1) for e in m) + math.lgamma(l + 1) - math.lgamma(n + l + 1))
               for m in iter_degree_slice(l + 1, n))
    assert float(l2_linf_gap(l, n)) == pytest.approx(best / n, abs=1e-12)


def test_lambda1_trend():
    rows = lambda1_trend(1, 12, with_minkowski=True)
    for n, val, lam, ok, _ in rows:
        # the smallest diagonal entry is the middle binomial weight
        assert lam == min(F(math.factorial(a) * math.factorial(n - a), math.factorial(n + 1)) for a in range(n + 1))
        assert ok
    # (1/2n) ln of the middle weight tends to -ln(2)/2
    vals = [float(v) for _, v, *_ in rows]
    assert abs(vals[-1] + math.log(2) / 2) < abs(vals[1] + math.log(2) / 2)


@given(st.integers(0, 10**6), st.integers(0, 2), st.integers(1, 6))
def test_parseval(seed, l, n):
    poly = random_integer_polynomial(random.Random(seed), l, n)
    res = parseval_check(poly, l, n)
    assert res["ok"] and res["grid_mean"] == pytest.approx(res["coeff_norm_sq"])
