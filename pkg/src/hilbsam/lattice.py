"""Arithmetic degree of metrized finitely presented Z-modules.

A module is presented as Z^g / (column span of an integer g x k relation
matrix); the Hilbertian seminorm is a rational Gram matrix on Z^g that kills
the relations. The arithmetic degree is stored exactly as a pair (q, t) with
chi = -1/2 log q + log t.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

from .exact import DEFAULT_PRECISION, ExtReal, log_pi, log_with_error
from .linalg import (
    is_symmetric,
    mat_mul,
    psd_decomposition,
    rational_det,
    rational_inverse,
    smith_normal_form,
    transpose,
)

__all__ = [
    "ChiValue",
    "IndefiniteGramError",
    "MetrizedLattice",
    "PresentedModule",
    "arithmetic_degree",
    "filtration_subquotients",
    "first_minimum",
    "induced_quotient_pair",
    "integer_kernel",
    "log_unit_ball_volume",
    "minkowski_check",
    "random_metrized_lattice",
    "random_positive_definite",
    "restrict",
    "short_vectors",
    "smith_normal_form",
]

DEFAULT_RANK_LIMIT = 24


class IndefiniteGramError(ValueError):
    pass


@dataclass(frozen=True)
class PresentedModule:
    generators: int
    relations: tuple = ()  # tuple of g-tuples, one per relation column

    def __post_init__(self):
        rel = tuple(tuple(int(x) for x in col) for col in self.relations)
        if any(len(col) != self.generators for col in rel):
            raise ValueError("every relation needs one entry per generator")
        object.__setattr__(self, "relations", rel)

    def relation_matrix(self):
        """The g x k relation matrix."""
        if not self.relations:
            return [[] for _ in range(self.generators)]
        return transpose([list(c) for c in self.relations])

    @cached_property
    def structure(self):
        """(free rank, invariant factors > 1, U, pivots)."""
        return _structure(self.generators, self.relations)

    @property
    def free_rank(self) -> int:
        return self.structure[0]

    @property
    def torsion_order(self) -> int:
        return math.prod(self.structure[1])


def _structure(g, relations):
    if g == 0:
        return 0, (), [], 0
    if not relations:
        return g, (), [[int(i == j) for j in range(g)] for i in range(g)], 0
    R = transpose([list(c) for c in relations])
    U, D, _ = smith_normal_form(R)
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    rank = sum(1 for d in diag if d)
    factors = tuple(d for d in diag[:rank] if d > 1)
    return g - rank, factors, U, rank


@dataclass(frozen=True)
class MetrizedLattice:
    module: PresentedModule
    gram: tuple  # g x g rational, symmetric PSD, killing the relations

    def __post_init__(self):
        G = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", G)
        g = self.module.generators
        if len(G) != g or any(len(row) != g for row in G):
            raise ValueError(f"gram must be {g} x {g}")
        if not is_symmetric(G):
            raise ValueError("gram is not symmetric")
        ok, _ = psd_decomposition(G)
        if not ok:
            raise IndefiniteGramError("gram is not positive semidefinite")
        for col in self.module.relations:
            if any(sum(G[i][j] * col[j] for j in range(g)) != 0 for i in range(g)):
                raise ValueError("gram does not descend to the quotient module")

    @classmethod
    def free(cls, gram) -> "MetrizedLattice":
        return cls(PresentedModule(len(gram)), gram)

    @property
    def rank(self) -> int:
        return self.module.free_rank

    def free_basis(self):
        """Integer vectors (in generator coordinates) mapping to a Z-basis of M/M_tor."""
        f, _, U, rank = self.module.structure
        if f == 0:
            return []
        Uinv = rational_inverse(U)
        return [[int(Uinv[i][j]) for i in range(len(Uinv))] for j in range(rank, rank + f)]

    def free_gram(self):
        B = self.free_basis()
        G = self.gram
        return [[_form(G, u, v) for v in B] for u in B]


def _form(G, u, v):
    return sum(G[i][j] * u[i] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if v[j])


@dataclass(frozen=True)
class ChiValue:
    """chi = -1/2 log q + log t, or +inf.

    Equality compares the canonical rational q / t^2, so different (q, t)
    pairs describing the same real number are equal.
    """

    q: Fraction = Fraction(1)
    t: int = 1
    infinite: bool = False

    def __post_init__(self):
        if not self.infinite:
            object.__setattr__(self, "q", Fraction(self.q))
            if self.q <= 0:
                raise ValueError("determinant part must be positive")
            if self.t < 1:
                raise ValueError("torsion order must be >= 1")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def pos_inf(cls):
        return cls(infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def canonical(self):
        return None if self.infinite else self.q / (self.t * self.t)

    def __add__(self, other: "ChiValue") -> "ChiValue":
        if self.infinite or other.infinite:
            return ChiValue.pos_inf()
        return ChiValue(self.q * other.q, self.t * other.t)

    def __eq__(self, other):
        if not isinstance(other, ChiValue):
            return NotImplemented
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(("chi", self.canonical()))

    def to_extreal(self, precision_bits: int = DEFAULT_PRECISION) -> ExtReal:
        if self.infinite:
            return ExtReal.pos_inf()
        return log_with_error(self.q, precision_bits + 2).scale(Fraction(-1, 2)) + log_with_error(self.t, precision_bits + 1)

    def __float__(self):
        return float(self.to_extreal(60))

    def __str__(self):
        if self.infinite:
            return "+inf"
        return f"chi(q={self.q}, t={self.t}) = {float(self):.12g}"


def arithmetic_degree(L: MetrizedLattice) -> ChiValue:
    """Exact arithmetic degree -log covol + log #torsion (0 for M = 0, +inf for non-norms)."""
    f, factors, _, _ = L.module.structure
    t = math.prod(factors)
    if f == 0:
        return ChiValue(1, t)
    q = rational_det(L.free_gram())
    if q == 0:
        return ChiValue.pos_inf()
    return ChiValue(q, t)


def integer_kernel(A, ncols=None):
    """Z-basis of {x in Z^n : A x = 0}."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A or n == 0:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    _, D, V = smith_normal_form(A)
    rank = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def _check_vectors(L: MetrizedLattice, vectors):
    g = L.module.generators
    out = []
    for v in vectors:
        v = list(v)
        if len(v) != g:
            raise ValueError(f"vector {v} does not live in Z^{g}")
        if any(Fraction(x).denominator != 1 for x in v):
            raise ValueError(f"vector {v} is not integral, so it spans no submodule")
        out.append([int(x) for x in v])
    return out


def restrict(L: MetrizedLattice, vectors) -> MetrizedLattice:
    """The submodule generated by ``vectors`` with the induced seminorm."""
    S = _check_vectors(L, vectors)
    s = len(S)
    cols = S + [list(c) for c in L.module.relations]
    if cols:
        A = transpose(cols)
        ker = integer_kernel(A, len(cols))
    else:
        ker = []
    relations = [k[:s] for k in ker if any(k[:s])]
    G = L.gram
    gram = [[_form(G, u, v) for v in S] for u in S]
    return MetrizedLattice(PresentedModule(s, tuple(relations)), gram)


def induced_quotient_pair(L: MetrizedLattice, vectors):
    """Split L along the submodule S spanned by ``vectors``.

    Returns (N, P): N = S with the induced seminorm, P = L/S with the quotient
    seminorm (the norm of the component orthogonal to S_R). A non-saturated
    S leaves its torsion in P.
    """
    S = _check_vectors(L, vectors)
    if arithmetic_degree(L).infinite:
        raise ValueError("the seminorm must be a norm on the free part")
    N = restrict(L, S)
    g = L.module.generators
    G = [list(row) for row in L.gram]
    # independent subset of S modulo ker G
    W = []
    for v in S:
        cand = W + [v]
        if rational_det([[_form(G, a, b) for b in cand] for a in cand]) != 0:
            W = cand
    if W:
        GW = [[sum(G[i][k] * w[k] for k in range(g)) for w in W] for i in range(g)]  # g x w
        inv = rational_inverse([[_form(G, a, b) for b in W] for a in W])
        corr = mat_mul(mat_mul(GW, inv), transpose(GW))
        GP = [[G[i][j] - corr[i][j] for j in range(g)] for i in range(g)]
    else:
        GP = G
    relations = tuple(L.module.relations) + tuple(tuple(v) for v in S)
    P = MetrizedLattice(PresentedModule(g, relations), GP)
    return N, P


def filtration_subquotients(L: MetrizedLattice, vectors):
    """Subquotients F_i / F_{i-1} for F_i = <v_1..v_i>, closed off by F = M."""
    S = _check_vectors(L, vectors)
    out = []
    prev = None
    for i in range(1, len(S) + 1):
        Fi = restrict(L, S[:i])
        inner = [[int(a == b) for a in range(i)] for b in range(i - 1)]
        if prev is None:
            out.append(Fi)
        else:
            out.append(induced_quotient_pair(Fi, inner)[1])
        prev = Fi
    out.append(induced_quotient_pair(L, S)[1] if S else L)
    return out


# ---------------------------------------------------------------------------
# first minimum


def _fp_decomposition(G):
    n = len(G)
    Q = [[Fraction(x) for x in row] for row in G]
    for i in range(n):
        if Q[i][i] <= 0:
            raise IndefiniteGramError("gram is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return Q


def _sqrt_upper(z: Fraction) -> Fraction:
    if z <= 0:
        return Fraction(0)
    K = 1 << 24
    return Fraction(math.isqrt(z.numerator * K * K // z.denominator) + 1, K)


def _enumerate(Q, bound_ref, visit, shrink):
    """Fincke-Pohst enumeration of x != 0 (first nonzero from the top positive)."""
    n = len(Q)
    x = [0] * n

    def rec(i, partial, top_zero):
        c = -sum((Q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        rem = bound_ref[0] - partial
        if rem < 0:
            return
        s = _sqrt_upper(rem / Q[i][i])
        lo = math.floor(c - s)
        hi = math.ceil(c + s)
        if top_zero:
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            rem = bound_ref[0] - partial
            term = Q[i][i] * (xi - c) ** 2
            if term > rem:
                continue
            x[i] = xi
            if i == 0:
                if not (top_zero and xi == 0):
                    visit(list(x), partial + term)
            else:
                rec(i - 1, partial + term, top_zero and xi == 0)
        x[i] = 0

    if n:
        rec(n - 1, Fraction(0), True)


def short_vectors(gram, bound) -> list:
    """All (v, v^T G v) with 0 < v^T G v <= bound, one of each +-v pair."""
    Q = _fp_decomposition(gram)
    found = []
    _enumerate(Q, [Fraction(bound)], lambda v, val: found.append((tuple(v), val)), False)
    return found


def _canonical_sign(v):
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def first_minimum(L: MetrizedLattice, rank_limit: int = DEFAULT_RANK_LIMIT, use_diagonal: bool = True):
    """Exact squared first minimum and a witness (coordinates on the free basis).

    Diagonal grams are handled directly: sum d_i v_i^2 >= min d_i with equality
    at a basis vector.
    """
    if L.module.torsion_order != 1:
        raise ValueError("first_minimum needs a torsion-free module")
    G = L.free_gram() if L.module.relations else [list(r) for r in L.gram]
    n = len(G)
    if n == 0:
        raise ValueError("zero lattice has no first minimum")
    if use_diagonal and all(G[i][j] == 0 for i in range(n) for j in range(n) if i != j):
        if any(G[i][i] <= 0 for i in range(n)):
            raise IndefiniteGramError("gram is not positive definite")
        best = min(range(n), key=lambda i: (G[i][i], i))
        return G[best][best], tuple(int(i == best) for i in range(n))
    if n > rank_limit:
        raise ValueError(f"rank {n} exceeds the enumeration limit {rank_limit}")
    Q = _fp_decomposition(G)
    start = min(range(n), key=lambda i: (G[i][i], -i))
    state = {"val": G[start][start], "vec": tuple(int(i == start) for i in range(n))}
    bound = [state["val"]]

    def visit(v, val):
        v = _canonical_sign(v)
        if val < state["val"] or (val == state["val"] and v > state["vec"]):
            state["val"], state["vec"] = val, v
            bound[0] = val

    _enumerate(Q, bound, visit, True)
    return state["val"], state["vec"]


# ---------------------------------------------------------------------------
# Minkowski


def log_unit_ball_volume(d: int, precision_bits: int = DEFAULT_PRECISION) -> ExtReal:
    """log(pi^(d/2) / Gamma(d/2 + 1)) with exact half-integer Gamma values."""
    if d < 0:
        raise ValueError("dimension must be natural")
    lp = log_pi(precision_bits + 4)
    if d % 2 == 0:
        k = d // 2
        return lp.scale(k) - log_with_error(math.factorial(k), precision_bits + 2)
    k = (d - 1) // 2
    # Gamma(k + 3/2) = (2k+2)! / (4^(k+1) (k+1)!) * sqrt(pi)
    rational = Fraction(math.factorial(2 * k + 2), 4 ** (k + 1) * math.factorial(k + 1))
    return lp.scale(k) - log_with_error(rational, precision_bits + 2)


def minkowski_check(chi: ChiValue, d: int, lambda1_sq, precision_bits: int = DEFAULT_PRECISION):
    """Check sqrt(lambda1_sq) <= 2 exp(-chi/d) v_d^(-1/d); returns (ok, log slack)."""
    if chi.infinite:
        raise ValueError("Minkowski's bound needs a finite arithmetic degree")
    if d < 1:
        raise ValueError("rank must be >= 1")
    lambda1_sq = Fraction(lambda1_sq)
    if lambda1_sq <= 0:
        raise ValueError("lambda1_sq must be positive")
    p = precision_bits + 8
    rhs = log_with_error(2, p) - chi.to_extreal(p).scale(Fraction(1, d)) - log_unit_ball_volume(d, p).scale(Fraction(1, d))
    lhs = log_with_error(lambda1_sq, p).scale(Fraction(1, 2))
    slack = rhs - lhs
    return slack.upper >= 0, slack


# ---------------------------------------------------------------------------
# random instances


def random_positive_definite(rng: random.Random, n: int, max_den: int = 5):
    """L D L^T with unit lower-triangular rational L and positive diagonal D."""
    Lm = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        Lm[i][i] = Fraction(1)
        for j in range(i):
            Lm[i][j] = Fraction(rng.randint(-3, 3), rng.randint(1, max_den))
    D = [Fraction(rng.randint(1, 9), rng.randint(1, max_den)) for _ in range(n)]
    return [[sum(Lm[i][k] * D[k] * Lm[j][k] for k in range(n)) for j in range(n)] for i in range(n)]


def random_metrized_lattice(rng: random.Random, max_gens: int = 6, torsion: bool = True) -> MetrizedLattice:
    g = rng.randint(1, max_gens)
    relations = []
    if torsion:
        for _ in range(rng.randint(0, 2)):
            relations.append([rng.randint(-4, 4) for _ in range(g)])
        relations = [r for r in relations if any(r)]
    f, _, U, rank = _structure(g, tuple(tuple(r) for r in relations))
    if f == 0:
        return MetrizedLattice(PresentedModule(g, tuple(tuple(r) for r in relations)), [[0] * g for _ in range(g)])
    Gf = random_positive_definite(rng, f)
    Ufree = U[rank:]
    G = mat_mul(mat_mul(transpose(Ufree), Gf), Ufree)
    return MetrizedLattice(PresentedModule(g, tuple(tuple(r) for r in relations)), G)
