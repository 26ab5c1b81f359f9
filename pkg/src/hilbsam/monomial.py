"""Graded ideals over Q: Hilbert functions, Gröbner bases, weight-initial ideals,
and the monomial dévissage into coordinate primes.

Polynomials are dicts ``{exponent tuple: Fraction}``. A variable ``k`` can be
distinguished as the "weighted" variable; the monomial order is then degree
first, smaller exponent of ``x_k`` next, and degree-reverse-lexicographic on the
other variables, so leading forms of a Gröbner basis are the lowest
x_k-order parts.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .exact import format_rational, iter_degree_slice, simplex_count

__all__ = [
    "FiltrationStep",
    "GroebnerBudget",
    "HomogeneousIdeal",
    "MonomialIdeal",
    "ResourceError",
    "dimension_oracle",
    "filtration_hilbert",
    "format_polynomial",
    "groebner_basis",
    "hilbert_function",
    "hilbert_polynomial",
    "hilbert_function_ideal",
    "iterate_deformation",
    "leading_ideal",
    "minimal_primes",
    "parse_ideal",
    "prime_filtration",
    "radical_monomial",
    "random_homogeneous_ideal",
    "random_monomial_ideal",
    "twisted_cubic",
    "weight_initial_ideal",
]


class ResourceError(RuntimeError):
    """A configured computation budget was exceeded."""


@dataclass(frozen=True)
class GroebnerBudget:
    max_basis: int = 400
    max_degree: int = 40
    max_pairs: int = 20000


DEFAULT_BUDGET = GroebnerBudget()


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _minimalize(gens):
    gens = sorted(set(gens), key=lambda g: (sum(g), g))
    kept = []
    for g in gens:
        if not any(_divides(h, g) for h in kept):
            kept.append(g)
    return tuple(sorted(kept))


# ---------------------------------------------------------------------------
# monomial ideals


@dataclass(frozen=True)
class MonomialIdeal:
    num_vars: int
    generators: tuple = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("need at least one variable")
        gens = [tuple(int(e) for e in g) for g in self.generators]
        if any(len(g) != self.num_vars or min(g) < 0 for g in gens):
            raise ValueError("generator exponents must be natural with one entry per variable")
        object.__setattr__(self, "generators", _minimalize(gens))

    def contains(self, m) -> bool:
        return any(_divides(g, m) for g in self.generators)

    def is_zero(self) -> bool:
        return not self.generators

    def to_text(self, names=None) -> str:
        names = names or [f"x{i}" for i in range(self.num_vars)]
        return "\n".join(_format_monomial(g, names) for g in self.generators)


def hilbert_function(J: MonomialIdeal, n: int) -> int:
    """Number of degree-n monomials outside J."""
    if n < 0:
        return 0
    k = J.num_vars
    if not J.generators:
        return simplex_count(k - 1, n)
    gens = np.array(J.generators, dtype=np.int64).reshape(-1, k)
    return int(kernels.count_standard(gens, k, n))


def radical_monomial(J: MonomialIdeal) -> MonomialIdeal:
    return MonomialIdeal(J.num_vars, tuple(tuple(min(e, 1) for e in g) for g in J.generators))


def minimal_primes(J: MonomialIdeal) -> list:
    """Minimal coordinate primes over J, each as a sorted tuple of variable indices."""
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in J.generators]
    if not supports:
        return [()]
    found = []
    for size in range(0, J.num_vars + 1):
        for cover in combinations(range(J.num_vars), size):
            c = frozenset(cover)
            if all(s & c for s in supports) and not any(f <= c for f in found):
                found.append(c)
    return sorted(tuple(sorted(c)) for c in found)


@dataclass(frozen=True)
class FiltrationStep:
    """Subquotient S/P(-shift) with P generated by the listed coordinates."""

    prime_support: tuple
    degree_shift: int
    num_vars: int

    def hilbert(self, n: int) -> int:
        f = self.num_vars - len(self.prime_support)
        d = n - self.degree_shift
        if d < 0:
            return 0
        if f == 0:
            return int(d == 0)
        return math.comb(d + f - 1, f - 1)


def _colon(gens, x):
    return tuple(tuple(e - 1 if i == x and e else e for i, e in enumerate(g)) for g in gens)


def prime_filtration(J: MonomialIdeal) -> list:
    """Filtration of S/J with subquotients S/P_i(-shift_i) for coordinate primes P_i.

    Splits along 0 -> S/(J:x)(-1) -> S/J -> S/(J+x) -> 0 on a variable x of a
    non-linear generator until every ideal is generated by variables.
    """
    k = J.num_vars
    out = []
    stack = [(J.generators, 0)]
    while stack:
        gens, shift = stack.pop()
        gens = _minimalize(gens)
        target = next((g for g in gens if sum(g) > 1), None)
        if target is None:
            if any(sum(g) == 0 for g in gens):
                continue  # unit ideal contributes nothing
            out.append(FiltrationStep(tuple(g.index(1) for g in gens), shift, k))
            continue
        x = next(i for i, e in enumerate(target) if e)
        unit_x = tuple(int(i == x) for i in range(k))
        # pushed in reverse so (J+x) is emitted before (J:x)
        stack.append((_colon(gens, x), shift + 1))
        stack.append((gens + (unit_x,), shift))
    return [FiltrationStep(tuple(sorted(s.prime_support)), s.degree_shift, k) for s in out]


def filtration_hilbert(steps, n: int) -> int:
    return sum(s.hilbert(n) for s in steps)


def _interpolate(xs, ys):
    """Coefficients (ascending) of the interpolating polynomial through the points."""
    size = len(xs)
    coeffs = [Fraction(0)] * size
    for i in range(size):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(size):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xs[j] * basis[t + 1]
            denom *= xs[i] - xs[j]
        for t in range(size):
            coeffs[t] += ys[i] * basis[t] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_eval(coeffs, n):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


def hilbert_polynomial(J: MonomialIdeal):
    """(ascending rational coefficients, least n0 with H(n) = P(n) for n >= n0).

    By the Taylor resolution H agrees with a polynomial of degree < num_vars
    from deg lcm(generators) - num_vars + 1 on; the fit is re-verified on a
    doubled window before n0 is walked down.
    """
    k = J.num_vars
    top = max((sum(max(col) for col in zip(*J.generators)) if J.generators else 0) - k + 1, 0)
    xs = list(range(top, top + k))
    coeffs = _interpolate(xs, [hilbert_function(J, n) for n in xs])
    for n in range(top + k, top + 3 * k):
        if _poly_eval(coeffs, n) != hilbert_function(J, n):
            raise ArithmeticError("Hilbert function did not stabilise on the verification window")
    n0 = top
    while n0 > 0 and _poly_eval(coeffs, n0 - 1) == hilbert_function(J, n0 - 1):
        n0 -= 1
    return coeffs, n0


def format_polynomial(coeffs, var: str = "n") -> str:
    parts = []
    for d in range(len(coeffs) - 1, -1, -1):
        c = coeffs[d]
        if c == 0:
            continue
        mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
        txt = format_rational(c) if (mono == "" or abs(c) != 1) else ("-" if c < 0 else "")
        parts.append(f"{txt}*{mono}" if mono and txt not in ("", "-") else f"{txt}{mono}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


# ---------------------------------------------------------------------------
# polynomials and homogeneous ideals


def _format_monomial(m, names):
    factors = [names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e]
    return "*".join(factors) if factors else "1"


def _format_poly(poly, names, order_key):
    if not poly:
        return "0"
    out = []
    for m in sorted(poly, key=order_key, reverse=True):
        c = poly[m]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = _format_monomial(m, names)
        if mono == "1":
            body = format_rational(a)
        elif a == 1:
            body = mono
        else:
            body = f"{format_rational(a)}*{mono}"
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def default_names(k: int) -> tuple:
    return tuple(f"x{i}" for i in range(k))


@dataclass(frozen=True)
class HomogeneousIdeal:
    num_vars: int
    generators: tuple  # tuple of polynomials, each a tuple of (exponents, Fraction) sorted by exponents
    var_names: tuple = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("need at least one variable")
        names = tuple(self.var_names) or default_names(self.num_vars)
        if len(names) != self.num_vars or len(set(names)) != self.num_vars:
            raise ValueError("variable names must be distinct, one per variable")
        object.__setattr__(self, "var_names", names)
        gens = []
        for g in self.generators:
            poly = _clean(dict(g) if not isinstance(g, dict) else g)
            if not poly:
                continue
            if any(len(m) != self.num_vars for m in poly):
                raise ValueError("exponent length differs from num_vars")
            if len({sum(m) for m in poly}) != 1:
                raise ValueError(f"generator {_format_poly(poly, names, _degrevlex_key)} is not homogeneous")
            gens.append(tuple(sorted(poly.items())))
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def from_polys(cls, num_vars, polys, var_names=()):
        return cls(num_vars, tuple(tuple(sorted(_clean(p).items())) for p in polys), tuple(var_names))

    def polys(self) -> list:
        return [dict(g) for g in self.generators]

    def is_monomial(self) -> bool:
        return all(len(g) == 1 for g in self.generators)

    def to_monomial(self) -> MonomialIdeal:
        if not self.is_monomial():
            raise ValueError("ideal has non-monomial generators")
        return MonomialIdeal(self.num_vars, tuple(g[0][0] for g in self.generators))

    @classmethod
    def from_monomial(cls, J: MonomialIdeal, var_names=()):
        return cls(J.num_vars, tuple(((g, Fraction(1)),) for g in J.generators), tuple(var_names))

    def to_text(self) -> str:
        return "\n".join(_format_poly(dict(g), self.var_names, _degrevlex_key) for g in self.generators)


def _clean(poly):
    return {tuple(int(e) for e in m): Fraction(c) for m, c in poly.items() if c != 0}


def _degrevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def order_key(k: int, weighted: Optional[int]):
    """Sort key of the monomial order; larger key = larger monomial."""
    if weighted is None:
        return _degrevlex_key
    others = [i for i in range(k - 1, -1, -1) if i != weighted]

    def key(m):
        return (sum(m), -m[weighted], tuple(-m[i] for i in others))

    return key


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_ideal(text: str, num_vars: Optional[int] = None, var_names: Sequence[str] = ()) -> HomogeneousIdeal:
    """Parse one generator per line; terms ``c*x0^a0*...*xk^ak``, '#' comments, 'zero' or '0' lines ignored."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and ln.lower() not in ("zero", "0")]
    names = list(var_names)
    parsed = []
    for ln in lines:
        poly = {}
        pos = 0
        compact = ln.replace(" ", "")
        if not compact:
            continue
        for match in _TERM.finditer(compact):
            if match.start() != pos:
                raise ValueError(f"cannot parse {ln!r}")
            pos = match.end()
            sign = -1 if match.group(1) == "-" else 1
            coeff = Fraction(sign)
            mono = {}
            for factor in match.group(2).split("*"):
                if not factor:
                    raise ValueError(f"empty factor in {ln!r}")
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coeff *= Fraction(factor)
                    continue
                m = re.fullmatch(r"([A-Za-z_]\w*)(?:\^(\d+))?", factor)
                if not m:
                    raise ValueError(f"bad factor {factor!r} in {ln!r}")
                name, exp = m.group(1), int(m.group(2) or 1)
                mono[name] = mono.get(name, 0) + exp
            key = tuple(sorted(mono.items()))
            poly[key] = poly.get(key, 0) + coeff
        if pos != len(compact):
            raise ValueError(f"cannot parse {ln!r}")
        parsed.append(poly)
        for key in poly:
            for name, _ in key:
                if name not in names:
                    if var_names:
                        raise ValueError(f"unknown variable {name!r}")
                    names.append(name)
    if not var_names:
        def rank(name):
            m = re.fullmatch(r"x(\d+)", name)
            return (0, int(m.group(1)), "") if m else (1, 0, name)

        names.sort(key=rank)
        if num_vars is not None and all(re.fullmatch(r"x\d+", n) for n in names):
            idx = {int(n[1:]) for n in names}
            if idx and max(idx) >= num_vars:
                raise ValueError("variable index exceeds num_vars")
            names = [f"x{i}" for i in range(num_vars)]
        elif num_vars is not None:
            if len(names) > num_vars:
                raise ValueError("more variables than num_vars")
            extra = [f"x{i}" for i in range(num_vars) if f"x{i}" not in names]
            names = names + extra[: num_vars - len(names)]
    k = len(names)
    if k == 0:
        k = num_vars or 1
        names = [f"x{i}" for i in range(k)]
    where = {n: i for i, n in enumerate(names)}
    polys = []
    for poly in parsed:
        out = {}
        for key, c in poly.items():
            e = [0] * k
            for name, exp in key:
                e[where[name]] += exp
            out[tuple(e)] = out.get(tuple(e), 0) + c
        polys.append(out)
    return HomogeneousIdeal.from_polys(k, polys, names)


# ---------------------------------------------------------------------------
# Buchberger


class _Ring:
    def __init__(self, k, weighted):
        self.k = k
        self.key = order_key(k, weighted)

    def lead(self, f):
        return max(f, key=self.key)

    def monic(self, f):
        lt = self.lead(f)
        c = f[lt]
        return {m: v / c for m, v in f.items()}

    def sub_multiple(self, f, c, shift, g):
        """f - c * x^shift * g, in place."""
        for m, v in g.items():
            mm = tuple(a + b for a, b in zip(m, shift))
            nv = f.get(mm, 0) - c * v
            if nv:
                f[mm] = nv
            else:
                f.pop(mm, None)
        return f

    def reduce(self, f, basis, leads):
        f = dict(f)
        rem = {}
        while f:
            lt = self.lead(f)
            for g, lg in zip(basis, leads):
                if _divides(lg, lt):
                    shift = tuple(a - b for a, b in zip(lt, lg))
                    self.sub_multiple(f, f[lt] / g[lg], shift, g)
                    break
            else:
                rem[lt] = f.pop(lt)
        return rem


def groebner_basis(I: HomogeneousIdeal, weighted_var: Optional[int] = None,
                   budget: GroebnerBudget = DEFAULT_BUDGET) -> HomogeneousIdeal:
    """Reduced Gröbner basis for the order of ``order_key(k, weighted_var)``.

    Pairs are taken by smallest lcm (normal strategy) with the product
    criterion; the result is monic, auto-reduced and sorted by leading term.
    """
    k = I.num_vars
    if weighted_var is not None and not 0 <= weighted_var < k:
        raise ValueError(f"variable index {weighted_var} out of range")
    R = _Ring(k, weighted_var)
    basis, leads = [], []
    for f in I.polys():
        r = R.reduce(f, basis, leads)
        if r:
            r = R.monic(r)
            basis.append(r)
            leads.append(R.lead(r))
    if len(basis) > budget.max_basis:
        raise ResourceError(f"Gröbner basis size budget {budget.max_basis} exceeded")
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    processed = 0
    while pairs:
        pairs.sort(key=lambda p: (R.key(tuple(map(max, leads[p[0]], leads[p[1]]))), p))
        i, j = pairs.pop(0)
        processed += 1
        if processed > budget.max_pairs:
            raise ResourceError(f"Gröbner pair budget {budget.max_pairs} exceeded")
        li, lj = leads[i], leads[j]
        lcm = tuple(map(max, li, lj))
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading terms
        if sum(lcm) > budget.max_degree:
            raise ResourceError(f"Gröbner degree budget {budget.max_degree} exceeded")
        s = {}
        R.sub_multiple(s, -1 / basis[i][li], tuple(a - b for a, b in zip(lcm, li)), basis[i])
        R.sub_multiple(s, 1 / basis[j][lj], tuple(a - b for a, b in zip(lcm, lj)), basis[j])
        r = R.reduce(s, basis, leads)
        if r:
            r = R.monic(r)
            basis.append(r)
            leads.append(R.lead(r))
            if len(basis) > budget.max_basis:
                raise ResourceError(f"Gröbner basis size budget {budget.max_basis} exceeded")
            n = len(basis) - 1
            pairs.extend((t, n) for t in range(n))
    # minimalize then fully inter-reduce
    keep = []
    for t, lt in enumerate(leads):
        if not any(_divides(leads[u], lt) and (leads[u] != lt or u < t) for u in range(len(leads)) if u != t):
            keep.append(t)
    basis = [basis[t] for t in keep]
    leads = [leads[t] for t in keep]
    reduced = []
    for t in range(len(basis)):
        others = basis[:t] + basis[t + 1:]
        other_leads = leads[:t] + leads[t + 1:]
        tail = {m: c for m, c in basis[t].items() if m != leads[t]}
        r = R.reduce(tail, others, other_leads)
        r[leads[t]] = Fraction(1)
        reduced.append(r)
    reduced.sort(key=lambda f: R.key(R.lead(f)))
    return HomogeneousIdeal.from_polys(k, reduced, I.var_names)


def leading_ideal(G: HomogeneousIdeal, weighted_var: Optional[int]) -> MonomialIdeal:
    key = order_key(G.num_vars, weighted_var)
    return MonomialIdeal(G.num_vars, tuple(max(dict(g), key=key) for g in G.generators))


def _fresh_name(names, var):
    if "y" not in names:
        return "y"
    cand = f"y{var}"
    t = 0
    while cand in names:
        t += 1
        cand = f"y{var}_{t}"
    return cand


def weight_initial_ideal(I: HomogeneousIdeal, var: int, budget: GroebnerBudget = DEFAULT_BUDGET,
                         rename: bool = True) -> HomogeneousIdeal:
    """Lowest x_var-order forms of a Gröbner basis; x_var is renamed to a fresh y."""
    G = groebner_basis(I, var, budget)
    forms = []
    for g in G.polys():
        order = min(m[var] for m in g)
        forms.append({m: c for m, c in g.items() if m[var] == order})
    names = list(I.var_names)
    if rename and not I.var_names[var].startswith("y"):
        names[var] = _fresh_name(names, var)
    return HomogeneousIdeal.from_polys(I.num_vars, forms, names)


def iterate_deformation(I: HomogeneousIdeal, budget: GroebnerBudget = DEFAULT_BUDGET, max_rounds: int = 4):
    """Apply weight_initial_ideal variable by variable (last variable first) until monomial.

    Returns (MonomialIdeal, trace of intermediate ideals). One full pass makes
    the ideal homogeneous for every single-variable grading, hence monomial.
    """
    trace = []
    current = I
    for _ in range(max_rounds):
        for var in reversed(range(I.num_vars)):
            if current.is_monomial():
                return current.to_monomial(), trace
            current = weight_initial_ideal(current, var, budget)
            trace.append(current)
    if current.is_monomial():
        return current.to_monomial(), trace
    raise ResourceError("deformation did not reach a monomial ideal")


def hilbert_function_ideal(I: HomogeneousIdeal, n: int, budget: GroebnerBudget = DEFAULT_BUDGET) -> int:
    """dim (S/I)_n through the leading-term ideal of a degrevlex Gröbner basis."""
    return hilbert_function(leading_ideal(groebner_basis(I, None, budget), None), n)


def dimension_oracle(I: HomogeneousIdeal, n: int, max_monomials: int = 20000) -> int:
    """dim (S/I)_n = #monomials - rank of the degree-n span of I, by exact integer rank."""
    import flint

    k = I.num_vars
    total = simplex_count(k - 1, n)
    if n < 0:
        return 0
    if total > max_monomials:
        raise ResourceError(f"degree-{n} slice has {total} monomials, above the oracle bound")
    cols = {m: i for i, m in enumerate(iter_degree_slice(k, n))}
    rows = []
    for g in I.polys():
        d = sum(next(iter(g)))
        if d > n:
            continue
        den = math.lcm(*(c.denominator for c in g.values()))
        ig = {m: int(c * den) for m, c in g.items()}
        for shift in iter_degree_slice(k, n - d):
            row = [0] * total
            for m, c in ig.items():
                row[cols[tuple(a + b for a, b in zip(m, shift))]] = c
            rows.append(row)
    if not rows:
        return total
    rank = flint.fmpz_mat(rows).rank()
    return total - rank


# ---------------------------------------------------------------------------
# examples and random instances


def twisted_cubic() -> HomogeneousIdeal:
    """2x2 minors of [[x0, x1, x2], [x1, x2, x3]]."""
    return parse_ideal("x0*x2 - x1^2\nx0*x3 - x1*x2\nx1*x3 - x2^2", num_vars=4)


def random_monomial_ideal(rng: random.Random, num_vars: Optional[int] = None, max_gens: int = 5,
                          max_degree: int = 4) -> MonomialIdeal:
    k = num_vars or rng.randint(2, 5)
    gens = []
    for _ in range(rng.randint(0, max_gens)):
        d = rng.randint(1, max_degree)
        e = [0] * k
        for _ in range(d):
            e[rng.randrange(k)] += 1
        gens.append(tuple(e))
    return MonomialIdeal(k, tuple(gens))


def random_homogeneous_ideal(rng: random.Random, num_vars: Optional[int] = None, max_gens: int = 3,
                             max_degree: int = 3, max_terms: int = 3) -> HomogeneousIdeal:
    k = num_vars or rng.randint(2, 4)
    polys = []
    for _ in range(rng.randint(1, max_gens)):
        d = rng.randint(1, max_degree)
        slice_ = list(iter_degree_slice(k, d))
        terms = rng.sample(slice_, min(len(slice_), rng.randint(1, max_terms)))
        poly = {}
        for m in terms:
            c = 0
            while c == 0:
                c = rng.randint(-3, 3)
            poly[m] = Fraction(c)
        polys.append(poly)
    return HomogeneousIdeal.from_polys(k, polys)
