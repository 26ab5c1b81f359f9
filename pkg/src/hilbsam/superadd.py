"""Fiber averaging of superadditive sequences, transport matrices, Fekete limits."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .exact import ExtReal, MultiIndex, ext_max, ext_sum, iter_degree_slice, simplex_count

__all__ = [
    "FeketeEstimate",
    "IndexedSequence",
    "NormalizedSums",
    "TransportMatrix",
    "Violation",
    "average_over_fibers",
    "check_superadditive",
    "check_transport_grid",
    "fekete_estimate",
    "min_linear_forms",
    "normalized_fiber_sums",
    "random_min_linear_forms",
    "transport_matrix",
]

DIVERGENCE_THRESHOLD = 10**6


@dataclass(frozen=True)
class IndexedSequence:
    """A deterministic map N^arity -> exact rational or :class:`ExtReal`.

    ``slice_sum``, when given, must return the sum of ``evaluate`` over all
    indices whose leading ``fiber_arity`` coordinates have degree n (with the
    remaining coordinates zero); it lets callers skip per-index evaluation.
    """

    arity: int
    evaluate: Callable
    domain_bound: int
    slice_sum: Optional[Callable] = None
    name: str = ""

    def __call__(self, index):
        index = tuple(index)
        if len(index) != self.arity:
            raise ValueError(f"index {index} has length {len(index)}, expected {self.arity}")
        return self.evaluate(index)


def min_linear_forms(forms: Sequence[Sequence], name: str = "") -> IndexedSequence:
    """The sequence u -> min_k <forms[k], u>, exactly superadditive by concavity."""
    forms = [tuple(Fraction(c) for c in f) for f in forms]
    arity = len(forms[0])
    if any(len(f) != arity for f in forms):
        raise ValueError("all linear forms need the same length")
    den = math.lcm(*[c.denominator for f in forms for c in f])
    int_forms = [tuple(int(c * den) for c in f) for f in forms]

    def evaluate(u):
        return Fraction(min(sum(c * e for c, e in zip(f, u)) for f in int_forms), den)

    return IndexedSequence(arity, evaluate, 10**9, name=name or f"min of {len(forms)} forms")


def random_min_linear_forms(rng: random.Random, arity: int, n_forms: int = 3, max_den: int = 6) -> IndexedSequence:
    forms = [
        [Fraction(rng.randint(-12, 12), rng.randint(1, max_den)) for _ in range(arity)]
        for _ in range(n_forms)
    ]
    return min_linear_forms(forms)


# ---------------------------------------------------------------------------
# transport matrices


@dataclass(frozen=True)
class TransportMatrix:
    """Non-negative (n+1) x (m+1) rational matrix with prescribed binomial marginals."""

    n: int
    m: int
    r: int
    entries: tuple  # tuple of row tuples of Fractions

    def row_targets(self):
        return [Fraction(simplex_count(self.r - 1, i), simplex_count(self.r, self.n)) for i in range(self.n + 1)]

    def column_targets(self):
        return [Fraction(simplex_count(self.r - 1, i), simplex_count(self.r, self.m)) for i in range(self.m + 1)]

    def antidiagonal_targets(self):
        total = self.n + self.m
        return [Fraction(simplex_count(self.r - 1, k), simplex_count(self.r, total)) for k in range(total + 1)]

    def row_sums(self):
        return [sum(row, Fraction(0)) for row in self.entries]

    def column_sums(self):
        return [sum((row[j] for row in self.entries), Fraction(0)) for j in range(self.m + 1)]

    def antidiagonal_sums(self):
        sums = [Fraction(0)] * (self.n + self.m + 1)
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                sums[i + j] += x
        return sums

    def check(self) -> dict:
        """Exact verdict per constraint family."""
        return {
            "nonnegative": all(x >= 0 for row in self.entries for x in row),
            "rows": self.row_sums() == self.row_targets(),
            "columns": self.column_sums() == self.column_targets(),
            "antidiagonals": self.antidiagonal_sums() == self.antidiagonal_targets(),
        }

    def is_valid(self) -> bool:
        return all(self.check().values())


@lru_cache(maxsize=None)
def _transport_scaled(n: int, m: int, r: int):
    """Integer matrix A and denominator d with M = A / d (object ndarray of ints)."""
    P = simplex_count
    if n == 0:
        d = P(r, m)
        return np.array([[P(r - 1, j) for j in range(m + 1)]], dtype=object), d
    if m == 0:
        d = P(r, n)
        return np.array([[P(r - 1, i)] for i in range(n + 1)], dtype=object), d
    # M = pre * (a * M_{n-1,m} (+ zero row) + b * M_{n,m-1} (+ zero column) + E_{n,m})
    pre = Fraction(P(r - 1, n + m), P(r, n + m))
    a = Fraction(P(r, n - 1), P(r - 1, n))
    b = Fraction(P(r, m - 1), P(r - 1, m))
    A1, d1 = _transport_scaled(n - 1, m, r)
    A2, d2 = _transport_scaled(n, m - 1, r)
    ca = pre * a / d1
    cb = pre * b / d2
    ce = pre
    den = math.lcm(ca.denominator, cb.denominator, ce.denominator)
    out = np.zeros((n + 1, m + 1), dtype=object)
    out[:n, :] += A1 * (ca.numerator * (den // ca.denominator))
    out[:, :m] += A2 * (cb.numerator * (den // cb.denominator))
    out[n, m] += ce.numerator * (den // ce.denominator)
    g = math.gcd(den, *[int(x) for x in out.flat])
    if g > 1:
        out = out // g
        den //= g
    return out, den


def transport_matrix(n: int, m: int, r: int) -> TransportMatrix:
    """Build the transport matrix by the zero-padded three-term recursion.

    >>> transport_matrix(1, 1, 1).entries
    ((Fraction(1, 3), Fraction(1, 6)), (Fraction(1, 6), Fraction(1, 3)))
    """
    if r < 1:
        raise ValueError("transport matrices need r >= 1")
    if n < 0 or m < 0:
        raise ValueError("n and m must be natural numbers")
    A, d = _transport_scaled(n, m, r)
    entries = tuple(tuple(Fraction(int(x), d) for x in row) for row in A)
    return TransportMatrix(n, m, r, entries)


def check_transport_grid(n_max: int, r_values) -> list:
    """Exact constraint check over all (n, m) <= n_max; returns the failures."""
    failures = []
    for r in r_values:
        for n in range(n_max + 1):
            for m in range(n_max + 1):
                A, d = _transport_scaled(n, m, r)
                if not _scaled_constraints_hold(A, d, n, m, r):
                    failures.append((n, m, r))
    return failures


def _scaled_constraints_hold(A, d, n, m, r) -> bool:
    P = simplex_count
    if any(x < 0 for x in A.flat):
        return False
    rows = A.sum(axis=1)
    for i in range(n + 1):
        if Fraction(int(rows[i]), d) != Fraction(P(r - 1, i), P(r, n)):
            return False
    cols = A.sum(axis=0)
    for j in range(m + 1):
        if Fraction(int(cols[j]), d) != Fraction(P(r - 1, j), P(r, m)):
            return False
    anti = [0] * (n + m + 1)
    for i in range(n + 1):
        for j in range(m + 1):
            anti[i + j] += A[i, j]
    tot = P(r, n + m)
    return all(Fraction(int(anti[k]), d) == Fraction(P(r - 1, k), tot) for k in range(n + m + 1))


# ---------------------------------------------------------------------------
# fiber averages


def average_over_fibers(alpha: IndexedSequence, r: int) -> IndexedSequence:
    """beta(n, j) = (1/P_r(n)) * sum_{|i| = n} alpha(i, j), with i in N^(r+1)."""
    if alpha.arity < r + 1:
        raise ValueError(f"alpha has arity {alpha.arity}, needs at least r+1 = {r + 1}")
    l = alpha.arity - (r + 1)

    def evaluate(idx):
        n, rest = idx[0], tuple(idx[1:])
        count = simplex_count(r, n)
        if alpha.slice_sum is not None and not any(rest):
            total = alpha.slice_sum(n)
        else:
            total = _sum_values(alpha.evaluate(i + rest) for i in iter_degree_slice(r + 1, n))
        return _divide(total, count)

    def slice_sum(n):
        return evaluate((n,) + (0,) * l)

    return IndexedSequence(1 + l, evaluate, alpha.domain_bound, slice_sum=slice_sum,
                           name=f"fiber average of {alpha.name or 'alpha'}")


def _sum_values(values):
    values = list(values)
    if all(isinstance(v, (int, Fraction)) for v in values):
        den = math.lcm(*[Fraction(v).denominator for v in values]) if values else 1
        return Fraction(sum(int(v * den) for v in values), den)
    return ext_sum(values)


def _divide(total, count):
    if isinstance(total, (int, Fraction)):
        return Fraction(total) / count
    return total.scale(Fraction(1, count))


# ---------------------------------------------------------------------------
# superadditivity check


@dataclass(frozen=True)
class Violation:
    u: MultiIndex
    v: MultiIndex
    excess: object  # s(u) + s(v) - s(u+v) > 0

    def __bool__(self):
        return False


def _indices_up_to(arity: int, bound: int):
    out = []
    for deg in range(bound + 1):
        out.extend(iter_degree_slice(arity, deg))
    return out


def check_superadditive(s: IndexedSequence, degree_bound: int, values: Optional[dict] = None):
    """Exhaustively test s(u) + s(v) <= s(u+v) for |u| + |v| <= degree_bound.

    Returns ``True`` on success and a falsy :class:`Violation` otherwise. Exact
    when the values are rational; for :class:`ExtReal` values a violation is
    reported only when certain.
    """
    if degree_bound > s.domain_bound:
        raise ValueError("degree bound exceeds the sequence's domain")
    idx = _indices_up_to(s.arity, degree_bound)
    if values is None:
        values = {i: s.evaluate(i) for i in idx}
    vals = [values[i] for i in idx]
    if all(isinstance(v, (int, Fraction)) for v in vals):
        return _check_exact(idx, vals, s.arity, degree_bound)
    return _check_interval(idx, [ExtReal.coerce(v) for v in vals], degree_bound)


def _check_exact(idx, vals, arity, bound):
    den = math.lcm(*[Fraction(v).denominator for v in vals])
    ints = [int(Fraction(v) * den) for v in vals]
    if max(abs(x) for x in ints) < kernels.INT64_SAFE // 2:
        base = bound + 1
        size = base ** arity
        dense = np.zeros(size, dtype=np.int64)
        offsets = np.empty(len(idx), dtype=np.int64)
        for pos, (i, x) in enumerate(zip(idx, ints)):
            off = 0
            for e in reversed(i):
                off = off * base + e
            offsets[pos] = off
            dense[off] = x
        degrees = np.fromiter((sum(i) for i in idx), dtype=np.int64, count=len(idx))
        a, b = kernels.superadditive_scan(offsets, degrees, dense, bound)
        if a < 0:
            return True
        u, v = idx[a], idx[b]
        w = tuple(x + y for x, y in zip(u, v))
        table = dict(zip(idx, vals))
        return Violation(MultiIndex(u), MultiIndex(v), table[u] + table[v] - table[w])
    table = dict(zip(idx, vals))
    degs = [sum(i) for i in idx]
    for a, u in enumerate(idx):
        for b in range(a, len(idx)):
            if degs[a] + degs[b] > bound:
                break
            v = idx[b]
            w = tuple(x + y for x, y in zip(u, v))
            excess = table[u] + table[v] - table[w]
            if excess > 0:
                return Violation(MultiIndex(u), MultiIndex(v), excess)
    return True


def _check_interval(idx, vals, bound):
    table = dict(zip(idx, vals))
    degs = [sum(i) for i in idx]
    for a, u in enumerate(idx):
        for b in range(a, len(idx)):
            if degs[a] + degs[b] > bound:
                break
            v = idx[b]
            w = tuple(x + y for x, y in zip(u, v))
            su, sv, sw = table[u], table[v], table[w]
            if sw.tag == "+inf" or su.tag == "-inf" or sv.tag == "-inf":
                continue
            left = su + sv
            if not left.possibly_le(sw):
                return Violation(MultiIndex(u), MultiIndex(v), left - sw)
    return True


# ---------------------------------------------------------------------------
# Fekete


@dataclass(frozen=True)
class FeketeEstimate:
    """Limit estimate of a(n)/n for a superadditive a.

    ``certified_lower`` is max_{n <= n_used} a(n)/n, a valid lower bound for
    the limit sup_n a(n)/n. ``diverges`` is a heuristic flag.
    """

    certified_lower: ExtReal
    point_estimate: ExtReal
    n_used: int
    diverges: bool
    argmax: int = 0
    ratios: tuple = field(default=(), repr=False, compare=False)


def fekete_estimate(a, N: int, threshold=DIVERGENCE_THRESHOLD, spot_check: bool = False) -> FeketeEstimate:
    """Fekete estimate from a(1..N); ``a`` is a callable or a sequence indexed from 1.

    Divergence is flagged when the certified lower bound exceeds ``threshold``
    or when a(n)/n keeps growing on the last three dyadic checkpoints without
    its increments shrinking.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if callable(a):
        values = [ExtReal.coerce(a(n)) for n in range(1, N + 1)]
    else:
        values = [ExtReal.coerce(x) for x in list(a)[:N]]
        if len(values) < N:
            raise ValueError(f"sequence has {len(values)} terms, need {N}")
    if spot_check:
        for n in range(1, N + 1):
            for m in range(1, N + 1 - n):
                if not (values[n - 1] + values[m - 1]).possibly_le(values[n + m - 1]):
                    raise ValueError(f"not superadditive at ({n}, {m})")
    ratios = tuple(v.scale(Fraction(1, n)) for n, v in enumerate(values, start=1))
    best = ext_max(ratios)
    argmax = ratios.index(best) + 1
    point = ratios[-1]
    return FeketeEstimate(best, point, N, _diverges(ratios, best, threshold), argmax, ratios)


def _diverges(ratios, best, threshold) -> bool:
    if best.tag == "+inf":
        return True
    if not best.is_finite:
        return False
    if best.mid > threshold:
        return True
    N = len(ratios)
    if N < 8:
        return False
    g = [ratios[n - 1] for n in (N // 4, N // 2, N)]
    if not all(x.is_finite for x in g):
        return False
    d1 = g[1].mid - g[0].mid
    d2 = g[2].mid - g[1].mid
    noise = g[0].rad + g[1].rad + g[2].rad
    return d1 > noise and d2 > noise and d2 >= d1


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedSums:
    """Values (n, (1/(n P_r(n))) * sum_{|i|=n} alpha(i)) for n = 1..N, plus trend."""

    values: tuple
    trend: str  # "non-decreasing", "non-increasing", "constant" or "mixed"

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def normalized_fiber_sums(alpha: IndexedSequence, r: int, N: int) -> NormalizedSums:
    if alpha.arity != r + 1:
        raise ValueError(f"alpha must have arity r+1 = {r + 1}")
    beta = average_over_fibers(alpha, r)
    out = []
    for n in range(1, N + 1):
        b = beta.slice_sum(n)
        out.append((n, ExtReal.coerce(b).scale(Fraction(1, n))))
    return NormalizedSums(tuple(out), _trend([v for _, v in out]))


def _trend(vals) -> str:
    ups = downs = 0
    for x, y in zip(vals, vals[1:]):
        if not (x.is_finite and y.is_finite):
            continue
        if y.mid > x.mid + x.rad + y.rad:
            ups += 1
        elif y.mid < x.mid - x.rad - y.rad:
            downs += 1
    if ups and downs:
        return "mixed"
    if ups:
        return "non-decreasing"
    if downs:
        return "non-increasing"
    return "constant"
