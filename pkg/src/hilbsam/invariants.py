"""Arithmetic Hilbert invariants of P^l with torus-invariant metrics.

For a sup-norm family U_j = dilate(T, 1/j) the engine computes, for every j,
the sequence s_j(n) = r chi_n / (n P_{r-1}(n)) with P_{r-1}(n) the number of
degree-n monomials. Since chi_n / P_{r-1}(n) is the fiber average of the
superadditive sequence -log ||x^m||, s_j(n) / r is a Fekete ratio and
max_n s_j(n) is a certified lower bound for its limit. s_j(n) and r! chi_n / n^r
share their limit.

Dilation moves every chi_n by an exact rational, so s_j(n) is exactly affine in
1/j; the j-limit is taken by Richardson steps E_j = j p_j - (j-1) p_{j-1}.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exact import (
    DEFAULT_PRECISION,
    ExtReal,
    ext_max,
    ext_min,
    iter_degree_slice,
    log_with_error,
    simplex_count,
)
from .lattice import MetrizedLattice, first_minimum, minkowski_check
from .superadd import FeketeEstimate, fekete_estimate
from .tube import (
    FUBINI_STUDY,
    NEG_INF,
    LogProfile,
    fs_l2_chi,
    fs_l2_norm_sq,
    is_uniformly_definite,
    parse_profile,
    profile_to_json,
    sup_chi,
    support_value,
)

__all__ = [
    "InvariantEstimate",
    "MetricSpec",
    "PerJ",
    "chi_sequence",
    "closed_form_c",
    "estimate_invariant",
    "fs_l2_lattice",
    "l2_linf_gap",
    "lambda1_trend",
    "normalized_sequence",
    "parse_metric_spec",
    "parseval_check",
    "random_integer_polynomial",
]

SUP, FS_L2 = "sup", "fs-l2"


@dataclass(frozen=True)
class MetricSpec:
    variant: str
    l: int
    profile: Optional[LogProfile] = None
    twist: int = 0

    def __post_init__(self):
        if self.variant not in (SUP, FS_L2):
            raise ValueError(f"unknown metric variant {self.variant!r}")
        if self.l < 0:
            raise ValueError("l must be >= 0")
        if self.variant == SUP:
            if self.profile is None:
                raise ValueError("sup-norm spec needs a profile")
            if self.profile.dim != self.l:
                raise ValueError(f"profile lives on P^{self.profile.dim}, spec on P^{self.l}")

    @classmethod
    def sup_norm(cls, profile: LogProfile, twist: int = 0) -> "MetricSpec":
        return cls(SUP, profile.dim, profile, twist)

    @classmethod
    def fubini_study_l2(cls, l: int, twist: int = 0) -> "MetricSpec":
        return cls(FS_L2, l, None, twist)

    def to_json(self) -> dict:
        out = {"metric": self.variant, "dim": self.l, "twist": self.twist}
        if self.profile is not None:
            out["profile"] = profile_to_json(self.profile)
        return out


def parse_metric_spec(obj) -> MetricSpec:
    """Accept {"metric": "sup"|"fs-l2", ...} or a bare profile (read as a sup-norm spec)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("metric spec must be a JSON object")
    if "metric" not in obj:
        return MetricSpec.sup_norm(parse_profile(obj))
    twist = int(obj.get("twist", 0))
    if obj["metric"] == SUP:
        return MetricSpec.sup_norm(parse_profile(obj["profile"]), twist)
    if obj["metric"] == FS_L2:
        return MetricSpec.fubini_study_l2(int(obj["dim"]), twist)
    raise ValueError(f"unknown metric {obj['metric']!r}")


def _chi_at(spec: MetricSpec, n: int, precision_bits: int) -> ExtReal:
    d = n + spec.twist
    if d < 0:
        return ExtReal.exact(0)
    if spec.variant == FS_L2:
        return fs_l2_chi(spec.l, d).to_extreal(precision_bits)
    return sup_chi(spec.profile, d, precision_bits)


def chi_sequence(spec: MetricSpec, n_max: int, precision_bits: int = DEFAULT_PRECISION) -> list:
    """[(n, chi-hat of the degree-n sections)] for n = 0..n_max, twisted by spec.twist."""
    return [(n, _chi_at(spec, n, precision_bits)) for n in range(n_max + 1)]


def normalized_sequence(chis, r: int) -> list:
    """[(n, r!/n^r chi_n)] for n >= 1."""
    if r < 1:
        raise ValueError("r must be >= 1")
    f = math.factorial(r)
    return [(n, c.scale(Fraction(f, n ** r))) for n, c in chis if n >= 1]


@dataclass(frozen=True)
class PerJ:
    j: int
    limsup_proxy: ExtReal
    liminf_proxy: ExtReal
    fekete: FeketeEstimate
    values: tuple = field(default=(), repr=False, compare=False)  # s_j(1..N)


@dataclass(frozen=True)
class InvariantEstimate:
    r: int
    per_j: dict
    c_upper: ExtReal
    c_lower: ExtReal
    certified_lower: ExtReal
    n_max: int
    j_max: int
    j_used: int
    certified: bool
    chis: tuple = field(default=(), repr=False, compare=False)
    evidence: Optional[dict] = None
    oracle_value: Optional[ExtReal] = None
    tolerance: Fraction = Fraction(1, 100)
    twist: int = 0
    j_independent: bool = False

    @property
    def point_estimate(self) -> ExtReal:
        if not (self.c_lower.is_finite and self.c_upper.is_finite):
            return self.c_upper
        return (self.c_lower + self.c_upper).scale(Fraction(1, 2))

    def summary(self) -> dict:
        out = {
            "r": self.r,
            "n_max": self.n_max,
            "j_max": self.j_max,
            "j_used": self.j_used,
            "c_lower": _num(self.c_lower),
            "c_upper": _num(self.c_upper),
            "certified_lower": _num(self.certified_lower),
            "certified": self.certified,
            "error_bound": _rad(self.c_lower, self.c_upper),
            "oracle_value": None if self.oracle_value is None else _num(self.oracle_value),
            "tolerances": {"j_stabilization": float(self.tolerance)},
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "n", "chi", "normalized", "fekete_lower", "error_bound"])
        for j in sorted(self.per_j):
            pj = self.per_j[j]
            running = None
            for n, s in enumerate(pj.values, start=1):
                running = s if running is None else ext_max([running, s])
                chi = self.chis[n] if self.j_independent else (
                    self.chis[n] - ExtReal.exact(Fraction(_collar(n + self.twist, self.r), j)))
                w.writerow([j, n, _fmt(chi), _fmt(s), _fmt(running), _fmt_rad(s)])
        return buf.getvalue()


def _collar(d: int, r: int) -> int:
    """d P_{r-1}(d): total degree of the degree-d slice, the chi drop per unit of dilation."""
    return d * simplex_count(r - 1, d) if d > 0 else 0


def _num(x: ExtReal):
    return float(x) if x.is_finite else x.tag


def _rad(*xs):
    return float(sum((x.rad for x in xs if x.is_finite), Fraction(0)))


def _fmt(x: ExtReal) -> str:
    return f"{float(x):.17g}" if x.is_finite else x.tag


def _fmt_rad(x: ExtReal) -> str:
    return f"{float(x.rad):.3g}" if x.is_finite else "0"


def _per_j(j, vals, lo, r, n_max) -> PerJ:
    tail = vals[lo - 1:]
    fek = fekete_estimate([v.scale(Fraction(n, r)) for n, v in enumerate(vals, start=1)], n_max)
    return PerJ(j, ext_max(tail), ext_min(tail), fek, vals)


def estimate_invariant(spec: MetricSpec, r: Optional[int] = None, j_max: int = 8, n_max: int = 200,
                       tolerance=Fraction(1, 100), precision_bits: int = DEFAULT_PRECISION) -> InvariantEstimate:
    """Estimate c_lower and c_upper for r (default l+1) from j <= j_max, n <= n_max."""
    l = spec.l
    r = l + 1 if r is None else r
    if r < l + 1:
        raise ValueError(f"r = {r} is below the dimension l+1 = {l + 1}")
    if n_max < 2 or j_max < 1:
        raise ValueError("need n_max >= 2 and j_max >= 1")
    tolerance = Fraction(tolerance)
    if r > l + 1:
        base = estimate_invariant(spec, l + 1, j_max, n_max, tolerance, precision_bits)
        if base.c_upper.is_finite:
            zero = ExtReal.exact(0)
            return InvariantEstimate(r, base.per_j, zero, zero, zero, n_max, j_max, base.j_used, True,
                                     base.chis, {"rule": f"r > {l + 1} with finite invariant"}, None, tolerance,
                                     spec.twist, base.j_independent)
        return InvariantEstimate(r, base.per_j, base.c_upper, base.c_lower, base.certified_lower, n_max, j_max,
                                 base.j_used, base.certified, base.chis, base.evidence, None, tolerance,
                                 spec.twist, base.j_independent)
    chis = [c for _, c in chi_sequence(spec, n_max, precision_bits)]
    bad = next((n for n, c in enumerate(chis) if not c.is_finite), None)
    if bad is not None:
        inf = ExtReal.pos_inf()
        ev = {"j": "all", "n": bad, "reason": "degenerate profile: some monomial has zero sup-norm"}
        return InvariantEstimate(r, {}, inf, inf, inf, n_max, j_max, 0, True, tuple(chis), ev, None, tolerance,
                                 spec.twist, spec.variant == FS_L2)
    counts = [simplex_count(r - 1, n) for n in range(n_max + 1)]
    base = [None] + [chis[n].scale(Fraction(r, n * counts[n])) for n in range(1, n_max + 1)]
    # U_j lowers chi_n by d P(d) / j with d = n + twist, i.e. s(n) by unit[n] / j
    unit = [None] + [Fraction(r * _collar(n + spec.twist, r), n * counts[n]) for n in range(1, n_max + 1)]
    lo = (n_max + 1) // 2
    j_independent = spec.variant == FS_L2
    certified = spec.variant == SUP and spec.twist == 0
    per_j = {}
    prev = None
    extrapolated = None
    proxies_prev = None
    j_used = 0
    stable = False
    for j in range(1, (1 if j_independent else j_max) + 1):
        vals = tuple(base[1:]) if j_independent else tuple(
            b - ExtReal.exact(u / j) for b, u in zip(base[1:], unit[1:]))
        per_j[j] = _per_j(j, vals, lo, r, n_max)
        j_used = j
        if prev is not None:
            # pointwise Richardson step in 1/j, exact for s_j(n) = A(n) + B(n)/j
            extrapolated = tuple(a.scale(j) - b.scale(j - 1) for a, b in zip(vals, prev))
            proxies = (ext_max(extrapolated[lo - 1:]), ext_min(extrapolated[lo - 1:]))
            if proxies_prev is not None and all(
                    abs(a.mid - b.mid) + a.rad + b.rad < tolerance / 4 for a, b in zip(proxies, proxies_prev)):
                stable = True
                break
            proxies_prev = proxies
        prev = vals
    if extrapolated is None:
        only = per_j[j_used]
        c_up, c_lo, c_cert = only.limsup_proxy, only.liminf_proxy, only.fekete.certified_lower.scale(r)
    else:
        tail = extrapolated[lo - 1:]
        c_up, c_lo = ext_max(tail), ext_min(tail)
        c_cert = ext_max(extrapolated)
    if not certified:
        c_cert = ExtReal.neg_inf()  # inputs not known to be superadditive
    evidence = None
    if any(pj.fekete.diverges for pj in per_j.values()):
        j_bad = next(j for j, pj in per_j.items() if pj.fekete.diverges)
        evidence = {"j": j_bad, "n": n_max, "reason": "Fekete ratios still growing"}
    if not stable and not j_independent and j_max > 2:
        evidence = dict(evidence or {}, j_stabilized=False)
    return InvariantEstimate(r, per_j, c_up, c_lo, c_cert, n_max, j_max, j_used, certified,
                             tuple(chis), evidence, _oracle(spec), tolerance, spec.twist, j_independent)


def _oracle(spec: MetricSpec) -> Optional[ExtReal]:
    if spec.variant == FS_L2:
        return closed_form_c(LogProfile.fubini_study(spec.l))
    if is_uniformly_definite(spec.profile):
        return closed_form_c(spec.profile)
    return None


# ---------------------------------------------------------------------------
# closed form oracle


def _harmonic(k: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def _finite_points(p: LogProfile):
    return [tuple(pt) for pt in p.points if all(x != NEG_INF for x in pt)]


def _mean_on_segment(points) -> Fraction:
    """Mean over t in [0, 1] of max_p (p0 t + p1 (1 - t))."""
    lines = [(p[0] - p[1], p[1]) for p in points]  # slope, intercept
    cuts = {Fraction(0), Fraction(1)}
    for a in range(len(lines)):
        for b in range(a + 1, len(lines)):
            (s1, c1), (s2, c2) = lines[a], lines[b]
            if s1 != s2:
                t = (c2 - c1) / (s1 - s2)
                if 0 < t < 1:
                    cuts.add(t)
    cuts = sorted(cuts)
    total = Fraction(0)
    for t0, t1 in zip(cuts, cuts[1:]):
        mid = (t0 + t1) / 2
        s, c = max(lines, key=lambda sc: sc[0] * mid + sc[1])
        total += (t1 - t0) * (s * mid + c)
    return total


def _clip(poly, a, b, c):
    """Part of a convex polygon where a x + b y + c >= 0 (exact)."""
    out = []
    n = len(poly)
    for i in range(n):
        P, Q = poly[i], poly[(i + 1) % n]
        fp = a * P[0] + b * P[1] + c
        fq = a * Q[0] + b * Q[1] + c
        if fp >= 0:
            out.append(P)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            t = fp / (fp - fq)
            out.append((P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1])))
    return out


def _area_centroid(poly):
    A = Fraction(0)
    cx = cy = Fraction(0)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        A += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    A /= 2
    if A == 0:
        return Fraction(0), (Fraction(0), Fraction(0))
    return A, (cx / (6 * A), cy / (6 * A))


def _mean_on_triangle(points) -> Fraction:
    """Mean over the simplex {u0 + u1 + u2 = 1} of max_p <p, u>, in the (u0, u1) chart."""
    # f_p(x, y) = p2 + (p0 - p2) x + (p1 - p2) y
    forms = [(p[0] - p[2], p[1] - p[2], p[2]) for p in points]
    triangle = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    total = Fraction(0)
    for i, (a, b, c) in enumerate(forms):
        cell = triangle
        for k, (a2, b2, c2) in enumerate(forms):
            if k == i or not cell:
                continue
            # ties go to the lower index so cells do not overlap in area
            cell = _clip(cell, a - a2, b - b2, c - c2)
            if len(cell) < 3:
                cell = []
        if not cell:
            continue
        area, (x, y) = _area_centroid(cell)
        total += area * (a * x + b * y + c)
    return total / Fraction(1, 2)


def closed_form_c(profile: LogProfile, l: Optional[int] = None, samples: int = 200000, seed: int = 0) -> ExtReal:
    """-(l+1) times the mean of h over the standard simplex.

    Exact for the Fubini-Study ball (((l+1)/2)(H_{l+1} - 1)) and for polytopes
    with l <= 2; Monte Carlo with a 4-sigma radius for polytopes with l >= 3.
    """
    l = profile.dim if l is None else l
    if l != profile.dim:
        raise ValueError("l does not match the profile")
    if not is_uniformly_definite(profile):
        raise ValueError("closed form needs a uniformly definite profile")
    k = l + 1
    shift_part = -k * profile.shift
    if profile.kind == FUBINI_STUDY:
        return ExtReal.exact(Fraction(k, 2) * (_harmonic(k) - 1) + shift_part)
    pts = _finite_points(profile)
    if l == 0:
        mean = max(p[0] for p in pts)
    elif l == 1:
        mean = _mean_on_segment(pts)
    elif l == 2:
        mean = _mean_on_triangle(pts)
    else:
        rng = np.random.default_rng(seed)
        u = rng.dirichlet(np.ones(k), size=samples)
        P = np.array([[float(x) for x in p] for p in pts])
        vals = (u @ P.T).max(axis=1)
        m, sd = float(vals.mean()), float(vals.std(ddof=1))
        mid = Fraction(-k * m) + shift_part
        return ExtReal(mid, Fraction(4 * k * sd / math.sqrt(samples)) + Fraction(1, 10 ** 12))
    return ExtReal.exact(-k * mean + shift_part)


# ---------------------------------------------------------------------------
# L^2 versus sup, first minima, Parseval


def l2_linf_gap(l: int, n: int, precision_bits: int = DEFAULT_PRECISION) -> ExtReal:
    """max over |m| = n of (1/n)(ln ||x^m||_sup - ln ||x^m||_L2) for the Fubini-Study data."""
    if n == 0:
        return ExtReal.exact(0)
    fs = LogProfile.fubini_study(l)
    slice_ = list(iter_degree_slice(l + 1, n))
    # float screening, then exact evaluation of the near-maximal candidates
    lg = [math.lgamma(e + 1) for e in range(n + 1)]
    base = math.lgamma(l + 1) - math.lgamma(n + l + 1)

    def approx(m):
        h = 0.5 * sum(e * math.log(e / n) for e in m if e)
        return h - 0.5 * (sum(lg[e] for e in m) + base)

    scores = [approx(m) for m in slice_]
    top = max(scores)
    cands = [m for m, s in zip(slice_, scores) if s >= top - 1e-9 * max(1.0, abs(top))]
    exact = []
    for m in cands:
        h = support_value(fs, m, precision_bits + 8)
        l2 = log_with_error(fs_l2_norm_sq(l, m), precision_bits + 8).scale(Fraction(1, 2))
        exact.append((h - l2).scale(Fraction(1, n)))
    return ext_max(exact)


def fs_l2_lattice(l: int, n: int) -> MetrizedLattice:
    slice_ = list(iter_degree_slice(l + 1, n))
    d = len(slice_)
    return MetrizedLattice.free([[fs_l2_norm_sq(l, m) if i == k else 0 for k in range(d)]
                                 for i, m in enumerate(slice_)])


def lambda1_trend(l: int, n_max: int, precision_bits: int = DEFAULT_PRECISION, with_minkowski: bool = False):
    """[(n, (1/n) ln lambda_1)] of the diagonal Fubini-Study L^2 lattices, n = 1..n_max.

    With ``with_minkowski`` each entry also carries (lambda1_sq, minkowski ok, slack).
    """
    out = []
    for n in range(1, n_max + 1):
        L = fs_l2_lattice(l, n)
        lam_sq, _ = first_minimum(L)
        val = log_with_error(lam_sq, precision_bits + 2).scale(Fraction(1, 2 * n))
        if with_minkowski:
            ok, slack = minkowski_check(fs_l2_chi(l, n), simplex_count(l, n), lam_sq, precision_bits)
            out.append((n, val, lam_sq, ok, slack))
        else:
            out.append((n, val))
    return out


def random_integer_polynomial(rng: random.Random, l: int, n: int, max_coeff: int = 5) -> dict:
    """Nonzero homogeneous integer polynomial of degree n in l+1 variables."""
    slice_ = list(iter_degree_slice(l + 1, n))
    while True:
        k = rng.randint(1, len(slice_))
        poly = {m: rng.randint(-max_coeff, max_coeff) for m in rng.sample(slice_, k)}
        poly = {m: c for m, c in poly.items() if c}
        if poly:
            return poly


def parseval_check(poly: dict, l: int, n: int) -> dict:
    """Check sup_FS |P| >= (l+1)^(-n/2) through the torus.

    At |z_i|^2 = 1/(l+1) the FS norm of P is (l+1)^(-n/2) |P(e^{i theta})|.
    With theta_0 = 0 the other exponents range over 0..n, so the (n+1)^l grid
    gives exact discrete Parseval: mean of |P|^2 over the grid = sum a^2, which
    is an integer >= 1. Hence grid max >= sum a^2 >= 1.
    """
    if not poly:
        raise ValueError("polynomial must be nonzero")
    coeff_sq = sum(c * c for c in poly.values())
    if l == 0:
        grid = np.array([float(sum(poly.values()))])
    else:
        A = np.zeros((n + 1,) * l, dtype=complex)
        for m, c in poly.items():
            A[tuple(m[1:])] += c
        grid = np.fft.ifftn(A) * A.size
    power = np.abs(grid) ** 2
    mean, top = float(power.mean()), float(power.max())
    ok_mean = abs(mean - coeff_sq) <= 1e-9 * coeff_sq
    return {
        "coeff_norm_sq": coeff_sq,
        "grid_mean": mean,
        "grid_max": top,
        "ok": coeff_sq >= 1 and ok_mean and top >= coeff_sq * (1 - 1e-12),
        "fs_sup_lower": 0.5 * math.log(top) - 0.5 * n * math.log(l + 1),
        "bound": -0.5 * n * math.log(l + 1),
    }
