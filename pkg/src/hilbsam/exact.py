"""Exact combinatorics, multi-indices and error-bounded extended reals.

Rationals are plain :class:`fractions.Fraction`; ``BigRational`` is an alias
kept for readability in signatures.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from mpmath import libmp

BigRational = Fraction
Rational = Union[int, Fraction]

DEFAULT_PRECISION = int(os.environ.get("HILBSAM_PRECISION", "96"))

__all__ = [
    "BigRational",
    "DEFAULT_PRECISION",
    "ExtReal",
    "MultiIndex",
    "enumerate_degree_slice",
    "iter_degree_slice",
    "log_with_error",
    "parse_rational",
    "format_rational",
    "simplex_count",
]


class MultiIndex(tuple):
    """Exponent vector in N^k.

    A hashable tuple of non-negative ints; ``degree`` is the coordinate sum.
    """

    __slots__ = ()

    def __new__(cls, exponents):
        self = super().__new__(cls, (int(e) for e in exponents))
        if len(self) < 1:
            raise ValueError("multi-index needs at least one coordinate")
        if any(e < 0 for e in self):
            raise ValueError(f"negative exponent in {tuple(self)}")
        return self

    @property
    def exponents(self) -> tuple:
        return tuple(self)

    @property
    def degree(self) -> int:
        return sum(self)

    def __add__(self, other):
        if len(other) != len(self):
            raise ValueError("length mismatch")
        return MultiIndex(a + b for a, b in zip(self, other))

    def divides(self, other) -> bool:
        return all(a <= b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex{tuple(self)!r}"


def simplex_count(r: int, n: int) -> int:
    """Number of multi-indices in N^(r+1) of degree n, i.e. C(n+r, r)."""
    if r < 0 or n < 0:
        return 0
    return math.comb(n + r, r)


def iter_degree_slice(k: int, n: int) -> Iterator[tuple]:
    """Yield plain tuples of length k and degree n in descending lex order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in iter_degree_slice(k - 1, n - first):
            yield (first,) + rest


def enumerate_degree_slice(k: int, n: int) -> list:
    """All multi-indices of length ``k`` and degree ``n``, lexicographically.

    >>> enumerate_degree_slice(2, 2)
    [MultiIndex(2, 0), MultiIndex(1, 1), MultiIndex(0, 2)]
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        return []
    return [MultiIndex(t) for t in iter_degree_slice(k, n)]


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an int, or a decimal string into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _mpf_to_fraction(v) -> Fraction:
    sign, man, exp, _ = v
    if not man:
        return Fraction(0)
    val = Fraction(man) * (Fraction(2) ** exp)
    return -val if sign else val


@lru_cache(maxsize=8192)
def _log_cached(num: int, den: int, precision_bits: int) -> tuple:
    if num == den:
        return Fraction(0), Fraction(0)
    # |ln q| is at most ~0.7 * max(bitlength) + 1
    mag_bits = max(num.bit_length(), den.bit_length()).bit_length() + 2
    wp = precision_bits + mag_bits + 12
    x = libmp.mpf_div(libmp.from_int(num), libmp.from_int(den), wp, libmp.round_nearest)
    y = libmp.mpf_log(x, wp, libmp.round_nearest)
    # rounding of q costs <= 2^-(wp-1) in the log, the log itself <= |y| 2^-(wp-1)
    rad = Fraction(1, 2 ** (precision_bits + 1))
    return _mpf_to_fraction(y), rad


def log_with_error(q, precision_bits: int = DEFAULT_PRECISION) -> "ExtReal":
    """ln(q) for a positive rational, with absolute error <= 2**-precision_bits."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"log of non-positive rational {q}")
    mid, rad = _log_cached(q.numerator, q.denominator, int(precision_bits))
    return ExtReal(mid, rad)


@lru_cache(maxsize=64)
def _pi_bounds(precision_bits: int) -> tuple:
    wp = precision_bits + 12
    return _mpf_to_fraction(libmp.mpf_pi(wp, libmp.round_nearest)), Fraction(1, 2 ** (precision_bits + 1))


def log_pi(precision_bits: int = DEFAULT_PRECISION) -> "ExtReal":
    mid, rad = _pi_bounds(int(precision_bits))
    return log_with_error(mid, precision_bits + 2) + ExtReal(0, rad / mid + rad)


FINITE, POS_INF, NEG_INF = "finite", "+inf", "-inf"


@dataclass(frozen=True)
class ExtReal:
    """Element of R ∪ {±inf}; finite values are ``mid ± rad`` with exact rational ends.

    Arithmetic is exact on the midpoint and adds radii, so bounds stay
    conservative without any floating point.
    """

    mid: Fraction = Fraction(0)
    rad: Fraction = Fraction(0)
    tag: str = FINITE

    def __post_init__(self):
        if self.tag not in (FINITE, POS_INF, NEG_INF):
            raise ValueError(f"bad tag {self.tag}")
        if not isinstance(self.mid, Fraction):
            object.__setattr__(self, "mid", Fraction(self.mid))
        if not isinstance(self.rad, Fraction):
            object.__setattr__(self, "rad", Fraction(self.rad))
        if self.rad < 0:
            raise ValueError("negative error bound")

    # constructors
    @classmethod
    def exact(cls, q) -> "ExtReal":
        return cls(Fraction(q), Fraction(0))

    @classmethod
    def pos_inf(cls) -> "ExtReal":
        return cls(tag=POS_INF)

    @classmethod
    def neg_inf(cls) -> "ExtReal":
        return cls(tag=NEG_INF)

    @classmethod
    def coerce(cls, x) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        if isinstance(x, float):
            if math.isinf(x):
                return cls.pos_inf() if x > 0 else cls.neg_inf()
            if math.isnan(x):
                raise ValueError("NaN is not an extended real")
            return cls(Fraction(x), Fraction(abs(x)) * Fraction(1, 2**52))
        raise TypeError(f"cannot coerce {type(x).__name__} to ExtReal")

    # predicates
    @property
    def is_finite(self) -> bool:
        return self.tag == FINITE

    @property
    def is_exact(self) -> bool:
        return self.tag == FINITE and self.rad == 0

    @property
    def lower(self) -> Fraction:
        if not self.is_finite:
            raise ValueError("infinite value has no rational bound")
        return self.mid - self.rad

    @property
    def upper(self) -> Fraction:
        if not self.is_finite:
            raise ValueError("infinite value has no rational bound")
        return self.mid + self.rad

    # arithmetic
    def __neg__(self):
        if self.tag == POS_INF:
            return ExtReal.neg_inf()
        if self.tag == NEG_INF:
            return ExtReal.pos_inf()
        return ExtReal(-self.mid, self.rad)

    def __add__(self, other):
        other = ExtReal.coerce(other)
        if self.is_finite and other.is_finite:
            return ExtReal(self.mid + other.mid, self.rad + other.rad)
        tags = {self.tag, other.tag}
        if tags == {POS_INF, NEG_INF}:
            raise ArithmeticError("+inf + -inf is undefined")
        return ExtReal(tag=(tags - {FINITE}).pop())

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ExtReal.coerce(other))

    def __rsub__(self, other):
        return ExtReal.coerce(other) + (-self)

    def scale(self, q) -> "ExtReal":
        """Multiply by an exact rational; 0 * inf is 0."""
        q = Fraction(q)
        if q == 0:
            return ExtReal()
        if not self.is_finite:
            return self if q > 0 else -self
        return ExtReal(self.mid * q, self.rad * abs(q))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = ExtReal.coerce(other)
        if other.is_exact:
            return self.scale(other.mid)
        if self.is_exact:
            return other.scale(self.mid)
        if not (self.is_finite and other.is_finite):
            raise ArithmeticError("product of inexact infinite values")
        mid = self.mid * other.mid
        rad = abs(self.mid) * other.rad + abs(other.mid) * self.rad + self.rad * other.rad
        return ExtReal(mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, q):
        q = Fraction(q)
        if q == 0:
            raise ZeroDivisionError
        return self.scale(1 / q)

    # comparisons are on midpoints; certified variants below
    def _key(self):
        if self.tag == POS_INF:
            return (1, 0)
        if self.tag == NEG_INF:
            return (-1, 0)
        return (0, self.mid)

    def __lt__(self, other):
        return self._key() < ExtReal.coerce(other)._key()

    def __le__(self, other):
        return self._key() <= ExtReal.coerce(other)._key()

    def __gt__(self, other):
        return self._key() > ExtReal.coerce(other)._key()

    def __ge__(self, other):
        return self._key() >= ExtReal.coerce(other)._key()

    def certainly_le(self, other) -> bool:
        other = ExtReal.coerce(other)
        if self.tag == NEG_INF or other.tag == POS_INF:
            return True
        if not (self.is_finite and other.is_finite):
            return False
        return self.upper <= other.lower

    def possibly_le(self, other) -> bool:
        other = ExtReal.coerce(other)
        if self.tag == NEG_INF or other.tag == POS_INF:
            return True
        if not (self.is_finite and other.is_finite):
            return False
        return self.lower <= other.upper

    def __float__(self):
        if self.tag == POS_INF:
            return math.inf
        if self.tag == NEG_INF:
            return -math.inf
        return float(self.mid)

    def to_json(self):
        if not self.is_finite:
            return self.tag
        return float(self.mid)

    def __str__(self):
        if not self.is_finite:
            return self.tag
        if self.rad == 0:
            return format_rational(self.mid) if self.mid.denominator < 10**6 else f"{float(self.mid):.12g}"
        return f"{float(self.mid):.12g} ± {float(self.rad):.2g}"


def ext_max(values):
    """Maximum on midpoints, keeping the winner's error bound."""
    best = None
    for v in values:
        v = ExtReal.coerce(v)
        if best is None or v > best:
            best = v
    if best is None:
        raise ValueError("max of empty sequence")
    return best


def ext_min(values):
    best = None
    for v in values:
        v = ExtReal.coerce(v)
        if best is None or v < best:
            best = v
    if best is None:
        raise ValueError("min of empty sequence")
    return best


def ext_sum(values) -> ExtReal:
    mid = Fraction(0)
    rad = Fraction(0)
    inf = None
    for v in values:
        if isinstance(v, (int, Fraction)):
            mid += v
            continue
        if not v.is_finite:
            if inf is not None and inf != v.tag:
                raise ArithmeticError("+inf + -inf is undefined")
            inf = v.tag
            continue
        mid += v.mid
        rad += v.rad
    if inf is not None:
        return ExtReal(tag=inf)
    return ExtReal(mid, rad)
