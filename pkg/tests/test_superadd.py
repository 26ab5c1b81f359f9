import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from hilbsam.exact import ExtReal, iter_degree_slice, simplex_count
from hilbsam.superadd import (
    IndexedSequence,
    average_over_fibers,
    check_superadditive,
    check_transport_grid,
    fekete_estimate,
    min_linear_forms,
    normalized_fiber_sums,
    transport_matrix,
)

F = Fraction


def test_transport_examples():
    assert transport_matrix(0, 2, 1).entries == ((F(1, 3), F(1, 3), F(1, 3)),)
    assert transport_matrix(1, 1, 1).entries == ((F(1, 3), F(1, 6)), (F(1, 6), F(1, 3)))
    assert transport_matrix(1, 1, 2).entries == ((F(1, 6), F(1, 6)), (F(1, 6), F(1, 2)))


@given(st.integers(0, 12), st.integers(0, 12), st.integers(1, 5))
def test_transport_constraints_exact(n, m, r):
    T = transport_matrix(n, m, r)
    assert all(T.check().values())
    # independent restatement of the three marginals
    tot_n, tot_m, tot = simplex_count(r, n), simplex_count(r, m), simplex_count(r, n + m)
    for i, row in enumerate(T.entries):
        assert sum(row) == F(simplex_count(r - 1, i), tot_n)
    for j in range(m + 1):
        assert sum(row[j] for row in T.entries) == F(simplex_count(r - 1, j), tot_m)
    for k in range(n + m + 1):
        s = sum(T.entries[i][k - i] for i in range(max(0, k - m), min(n, k) + 1))
        assert s == F(simplex_count(r - 1, k), tot)


def test_transport_grid_small():
    assert check_transport_grid(6, [1, 2, 3]) == []


def _seq(arity, f, bound=40):
    return IndexedSequence(arity, f, bound)


def test_average_examples():
    beta = average_over_fibers(_seq(2, lambda i: F(sum(i))), 1)
    assert all(beta((n,)) == n for n in range(10))
    beta = average_over_fibers(_seq(2, lambda i: F(min(i))), 1)
    for n in range(12):
        assert beta((n,)) == F(sum(min(i, n - i) for i in range(n + 1)), n + 1)


@given(st.lists(st.lists(st.fractions(-5, 5, max_denominator=6), min_size=3, max_size=3), min_size=1, max_size=4),
       st.integers(1, 2))
def test_averaging_preserves_superadditivity(forms, r):
    forms = [f[: r + 1] for f in forms]
    alpha = min_linear_forms(forms)
    assert check_superadditive(alpha, 8)
    beta = average_over_fibers(alpha, r)
    assert check_superadditive(beta, 8)


def test_superadditive_examples():
    assert check_superadditive(_seq(2, lambda i: F(sum(i)) ** 2), 10)
    planted = _seq(1, lambda i: F(1) if i == (2,) else F(i[0]) ** 2)
    bad = check_superadditive(planted, 6)
    assert not bad
    u, v = sorted([tuple(bad.u), tuple(bad.v)])
    assert planted(u) + planted(v) - planted(tuple(map(sum, zip(u, v)))) == bad.excess > 0


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=12))
def test_superadditive_checker_matches_brute_force(vals):
    N = len(vals) - 1
    s = _seq(1, lambda i: F(vals[i[0]]), N)
    brute = all(vals[a] + vals[b] <= vals[a + b] for a in range(N + 1) for b in range(N + 1 - a))
    assert bool(check_superadditive(s, N)) == brute


def test_fekete_examples():
    e = fekete_estimate(lambda n: 3 * n, 100)
    assert e.certified_lower == ExtReal.exact(3) and e.point_estimate == ExtReal.exact(3) and not e.diverges
    e = fekete_estimate(lambda n: ExtReal(F(n) - F(math.isqrt(n)) if math.isqrt(n) ** 2 == n
                                          else F(n - math.sqrt(n)), F(1, 10**6)), 10**4)
    assert abs(float(e.certified_lower) - 0.99) < 1e-9 and e.argmax == 10**4
    assert fekete_estimate(lambda n: n * n, 50).diverges


@given(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=2, max_size=3))
def test_fekete_lower_bound_below_limit(form):
    # a(n) = min over two slopes is linear in n, so the limit is the min slope
    slope = min(form)
    e = fekete_estimate(lambda n: slope * n, 30)
    assert e.certified_lower.certainly_le(ExtReal.exact(slope))


def test_normalized_sums():
    alpha = _seq(2, lambda i: F(sum(i)))
    sums = normalized_fiber_sums(alpha, 1, 10)
    assert [v.mid for _, v in sums] == [1] * 10 and sums.trend == "constant"
    alpha = _seq(2, lambda i: F(min(i)), 400)
    sums = normalized_fiber_sums(alpha, 1, 400)
    assert abs(float(sums[-1][1]) - 0.25) < 0.005
    for n, v in list(sums)[:20]:
        direct = F(sum(min(i) for i in iter_degree_slice(2, n)), n * (n + 1))
        assert v.mid == direct
