"""Torus-invariant tubes over P^l in log coordinates.

A profile is either a finite point set in (Q ∪ {-inf})^(l+1), standing for
the downward-closed convex hull of the points, or the Fubini-Study ball
sum exp(2 lambda_i) <= 1. A rational ``shift`` c translates the set by
c·(1, ..., 1), i.e. dilates the tube by e^c. Sup-norms of monomials are
exp(h(m)) for the support function h.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import kernels
from .exact import (
    DEFAULT_PRECISION,
    ExtReal,
    MultiIndex,
    format_rational,
    iter_degree_slice,
    log_with_error,
    parse_rational,
    simplex_count,
)
from .lattice import ChiValue

__all__ = [
    "NEG_INF",
    "LogProfile",
    "dilate",
    "equilibrium_hull",
    "fs_l2_chi",
    "fs_l2_norm_sq",
    "is_uniformly_definite",
    "monomial_norm_table",
    "parse_profile",
    "polydisc",
    "profile_to_json",
    "random_polytope_profile",
    "sup_chi",
    "support_value",
]

NEG_INF = float("-inf")
POLYTOPE, FUBINI_STUDY = "polytope", "fubini-study"


def _coord(x):
    if isinstance(x, str) and x.strip() in ("-inf", "-infinity"):
        return NEG_INF
    if isinstance(x, float) and x == NEG_INF:
        return NEG_INF
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"bad coordinate {x}")
        return Fraction(x)
    return parse_rational(x)


@dataclass(frozen=True)
class LogProfile:
    kind: str
    dim: int
    points: tuple = ()
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in (POLYTOPE, FUBINI_STUDY):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.dim < 0:
            raise ValueError("dimension must be >= 0")
        object.__setattr__(self, "shift", parse_rational(self.shift))
        if self.kind == POLYTOPE:
            pts = tuple(tuple(_coord(x) for x in p) for p in self.points)
            if not pts:
                raise ValueError("polytope profile needs at least one point")
            if any(len(p) != self.dim + 1 for p in pts):
                raise ValueError(f"points must have {self.dim + 1} coordinates")
            object.__setattr__(self, "points", pts)
        elif self.points:
            raise ValueError("Fubini-Study profile takes no points")

    @classmethod
    def polytope(cls, points, shift=0) -> "LogProfile":
        points = list(points)
        if not points:
            raise ValueError("polytope profile needs at least one point")
        return cls(POLYTOPE, len(points[0]) - 1, tuple(points), shift)

    @classmethod
    def fubini_study(cls, l: int, shift=0) -> "LogProfile":
        return cls(FUBINI_STUDY, l, (), shift)

    @property
    def nvars(self) -> int:
        return self.dim + 1


def polydisc(l: int) -> LogProfile:
    return LogProfile.polytope([(0,) * (l + 1)])


def dilate(p: LogProfile, c) -> LogProfile:
    return LogProfile(p.kind, p.dim, p.points, p.shift + parse_rational(c))


def _pairing(point, m):
    """<point, m> with 0·(-inf) = 0; None for -inf."""
    total = Fraction(0)
    for x, e in zip(point, m):
        if e:
            if x == NEG_INF:
                return None
            total += x * e
    return total


def _check_index(p: LogProfile, m) -> MultiIndex:
    m = m if isinstance(m, MultiIndex) else MultiIndex(m)
    if len(m) != p.nvars:
        raise ValueError(f"multi-index {tuple(m)} has length {len(m)}, profile needs {p.nvars}")
    return m


def _entropy(m, n, precision_bits):
    """(1/2) sum m_i ln(m_i/n), with 0 ln 0 = 0."""
    if n == 0:
        return ExtReal.exact(0)
    total = ExtReal.exact(0)
    bits = precision_bits + 2 + len(m).bit_length() + n.bit_length()
    for e in m:
        if e and e != n:
            total = total + log_with_error(Fraction(e, n), bits).scale(e)
    return total.scale(Fraction(1, 2))


def support_value(p: LogProfile, m, precision_bits: int = DEFAULT_PRECISION) -> ExtReal:
    """h(m) = sup over the modeled set of <m, lambda>; the log sup-norm of x^m."""
    m = _check_index(p, m)
    n = m.degree
    if p.kind == FUBINI_STUDY:
        return _entropy(m, n, precision_bits) + ExtReal.exact(p.shift * n)
    best = None
    for point in p.points:
        v = _pairing(point, m)
        if v is not None and (best is None or v > best):
            best = v
    if best is None:
        return ExtReal.neg_inf()
    return ExtReal.exact(best + p.shift * n)


def monomial_norm_table(p: LogProfile, n: int, precision_bits: int = DEFAULT_PRECISION) -> dict:
    """MultiIndex -> -log ||x^m||_sup over the degree-n slice."""
    return {MultiIndex(m): -support_value(p, m, precision_bits) for m in iter_degree_slice(p.nvars, n)}


def _scaled_points(p: LogProfile):
    den = 1
    for point in p.points:
        for x in point:
            if x != NEG_INF:
                den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[0 if x == NEG_INF else int(x * den) for x in point] for point in p.points]
    mask = [[1 if x == NEG_INF else 0 for x in point] for point in p.points]
    return den, ints, mask


def _polytope_slice_sum(p: LogProfile, n: int):
    """(sum over |m| = n of max <point, m>, number of m with h = -inf)."""
    den, ints, mask = _scaled_points(p)
    biggest = max((abs(x) for row in ints for x in row), default=0)
    if biggest * max(n, 1) * 2048 < kernels.INT64_SAFE:
        total, undefined = kernels.polytope_slice_sum(ints, mask, p.nvars, n)
        return Fraction(int(total), den), int(undefined)
    total, undefined = 0, 0
    for m in iter_degree_slice(p.nvars, n):
        vals = [v for v in (_pairing(pt, m) for pt in ints) if v is not None]
        if vals:
            total += max(vals)
        else:
            undefined += 1
    return Fraction(total, den), undefined


def _fs_entropy_sum(l: int, n: int, precision_bits: int) -> ExtReal:
    """Sum over |m| = n of (1/2) sum_i m_i ln(m_i / n), by symmetry in i."""
    if n <= 1:
        return ExtReal.exact(0)
    # sum_m sum_i m_i ln m_i = (l+1) sum_a a ln a #{m : m_0 = a}
    weights = {}
    for a in range(2, n + 1):
        count = simplex_count(l - 1, n - a) if l > 0 else int(a == n)
        if count:
            weights[a] = (l + 1) * a * count
    coeff_total = sum(weights.values()) + n * simplex_count(l, n)
    bits = precision_bits + coeff_total.bit_length() + 4
    acc = ExtReal.exact(0)
    for a, w in weights.items():
        acc = acc + log_with_error(a, bits).scale(w)
    acc = acc - log_with_error(n, bits).scale(n * simplex_count(l, n))
    return acc.scale(Fraction(1, 2))


def sup_chi(p: LogProfile, n: int, precision_bits: int = DEFAULT_PRECISION) -> ExtReal:
    """Sum over the degree-n slice of -h(m): chi-hat of the diagonal norm matching sup-norms."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    count = simplex_count(p.dim, n)
    shift_part = p.shift * n * count
    if p.kind == FUBINI_STUDY:
        return -_fs_entropy_sum(p.dim, n, precision_bits) - ExtReal.exact(shift_part)
    total, undefined = _polytope_slice_sum(p, n)
    if undefined:
        return ExtReal.pos_inf()
    return ExtReal.exact(-total - shift_part)


def is_uniformly_definite(p: LogProfile) -> bool:
    """True iff h(m) >= C |m| for some finite C, i.e. the tube contains a collar of the zero section."""
    if p.kind == FUBINI_STUDY:
        return True
    return any(all(x != NEG_INF for x in point) for point in p.points)


# ---------------------------------------------------------------------------
# equilibrium hull


def _feasible(A, b) -> bool:
    """Exact Phase-I simplex: is {x >= 0 : A x = b} nonempty? Bland's rule."""
    rows = len(A)
    if rows == 0:
        return True
    cols = len(A[0])
    T = []
    for i in range(rows):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        T.append(row + [Fraction(int(k == i)) for k in range(rows)] + [rhs])
    width = cols + rows
    basis = [cols + i for i in range(rows)]
    # objective: minimize sum of artificials; reduced costs c_j - c_B B^-1 A_j
    cost = [Fraction(0)] * cols + [Fraction(1)] * rows + [Fraction(0)]
    z = cost[:]
    for i in range(rows):
        z = [zj - tj for zj, tj in zip(z, T[i])]
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(rows):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded below cannot happen for Phase I
            break
        i = best[1]
        piv = T[i][enter]
        T[i] = [v / piv for v in T[i]]
        for k in range(rows):
            if k != i and T[k][enter]:
                f = T[k][enter]
                T[k] = [a - f * c for a, c in zip(T[k], T[i])]
        if z[enter]:
            f = z[enter]
            z = [a - f * c for a, c in zip(z, T[i])]
        basis[i] = enter
    return -z[-1] == 0


def _dominated(p, others) -> bool:
    """Is p|J in conv{q|J : q finite on J} - R_+^J, J = finite coordinates of p?"""
    J = [i for i, x in enumerate(p) if x != NEG_INF]
    cands = [q for q in others if all(q[i] != NEG_INF for i in J)]
    if not cands:
        return False
    if not J:
        return True
    # sum_q lam_q q_j - s_j = p_j (j in J), sum lam = 1
    k = len(cands)
    A = []
    b = []
    for jj, j in enumerate(J):
        A.append([q[j] for q in cands] + [-int(t == jj) for t in range(len(J))])
        b.append(p[j])
    A.append([1] * k + [0] * len(J))
    b.append(1)
    return _feasible(A, b)


def equilibrium_hull(p: LogProfile) -> LogProfile:
    """Drop points that do not touch the downward-closed convex hull.

    Each removal is certified by an exact LP, so the support function is
    unchanged on every m >= 0.
    """
    if p.kind != POLYTOPE:
        raise ValueError("equilibrium_hull needs a polytope profile (the Fubini-Study ball is already convex)")
    pts = list(dict.fromkeys(p.points))
    i = 0
    while i < len(pts):
        if len(pts) > 1 and _dominated(pts[i], pts[:i] + pts[i + 1:]):
            del pts[i]
        else:
            i += 1
    return LogProfile(POLYTOPE, p.dim, tuple(pts), p.shift)


# ---------------------------------------------------------------------------
# Fubini-Study L^2


def fs_l2_norm_sq(l: int, m) -> Fraction:
    """||x^m||^2 in L^2 for the Fubini-Study metric and probability volume: prod m_i! l! / (n+l)!."""
    m = m if isinstance(m, MultiIndex) else MultiIndex(m)
    if len(m) != l + 1:
        raise ValueError(f"multi-index {tuple(m)} does not live on P^{l}")
    num = math.factorial(l)
    for e in m:
        num *= math.factorial(e)
    return Fraction(num, math.factorial(m.degree + l))


def fs_l2_chi(l: int, n: int) -> ChiValue:
    q = Fraction(1)
    for m in iter_degree_slice(l + 1, n):
        q *= fs_l2_norm_sq(l, m)
    return ChiValue(q, 1)


# ---------------------------------------------------------------------------
# JSON


def parse_profile(obj) -> LogProfile:
    """Build a profile from the JSON schema (dict or JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("profile must be an object with a 'type'")
    kind = obj["type"]
    if kind == "fubini-study":
        return LogProfile.fubini_study(int(obj["dim"]))
    if kind == "polytope":
        pts = obj.get("points")
        if not pts:
            raise ValueError("polytope profile needs points")
        prof = LogProfile(POLYTOPE, int(obj["dim"]), tuple(tuple(pt) for pt in pts))
        return prof
    if kind == "dilate":
        return dilate(parse_profile(obj["inner"]), parse_rational(obj["factor"]))
    raise ValueError(f"unknown profile type {kind!r}")


def profile_to_json(p: LogProfile) -> dict:
    if p.kind == FUBINI_STUDY:
        base = {"type": "fubini-study", "dim": p.dim}
    else:
        base = {
            "type": "polytope",
            "dim": p.dim,
            "points": [["-inf" if x == NEG_INF else format_rational(x) for x in pt] for pt in p.points],
        }
    if p.shift:
        return {"type": "dilate", "factor": format_rational(p.shift), "inner": base}
    return base


def random_polytope_profile(rng: random.Random, l: Optional[int] = None, n_points: Optional[int] = None,
                            neg_inf_rate: float = 0.15) -> LogProfile:
    l = rng.randint(1, 3) if l is None else l
    n_points = rng.randint(1, 7) if n_points is None else n_points
    pts = []
    for _ in range(n_points):
        pt = []
        for _ in range(l + 1):
            if rng.random() < neg_inf_rate:
                pt.append(NEG_INF)
            else:
                pt.append(Fraction(rng.randint(-12, 4), rng.randint(1, 4)))
        pts.append(tuple(pt))
    return LogProfile.polytope(pts)
