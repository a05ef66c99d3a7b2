"""Exact arithmetic in Q_p at capped relative precision.

A nonzero :class:`PadicNumber` is ``p**valuation * unit`` where ``unit`` is
known modulo ``p**rel_precision``.  Two kinds of zero exist:

* the exact zero (``valuation == math.inf``), and
* a value whose known digits all vanish, written ``O(p^a)``.  It records
  its absolute precision ``a`` but has no defined norm: asking for one
  raises :class:`PrecisionError` instead of silently returning 0.

Norms live in the value group and are represented by :class:`Radius`, which
stores the rational exponent ``q`` of ``p**(-q)`` so that products, quotients
and k-th roots are exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import (
    NotASquareError,
    PadicError,
    PadicZeroDivisionError,
    PrecisionError,
    PrimeError,
)

DEFAULT_PRECISION = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise PrimeError(f"{p!r} is not a prime")
    return p


def vp(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (``math.inf`` for 0)."""
    if n == 0:
        return math.inf
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(r: Fraction, p: int) -> int | float:
    r = Fraction(r)
    if r == 0:
        return math.inf
    return vp(r.numerator, p) - vp(r.denominator, p)


# --------------------------------------------------------------------------
# value group


@total_ordering
@dataclass(frozen=True)
class Radius:
    """An element ``p**(-exponent)`` of the value group, or zero.

    ``exponent is None`` encodes the radius 0, which is below every other
    radius.  The prime is not stored: radii are compared by exponent only.
    """

    exponent: Fraction | None

    def __post_init__(self):
        if self.exponent is not None:
            object.__setattr__(self, "exponent", Fraction(self.exponent))

    @classmethod
    def power(cls, e) -> "Radius":
        """The radius ``p**e``."""
        return cls(-Fraction(e))

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def log(self) -> Fraction:
        """``log_p`` of the radius (the negated exponent)."""
        if self.exponent is None:
            raise ValueError("log of the zero radius")
        return -self.exponent

    def __mul__(self, other: "Radius") -> "Radius":
        if self.is_zero or other.is_zero:
            return ZERO_RADIUS
        return Radius(self.exponent + other.exponent)

    def __truediv__(self, other: "Radius") -> "Radius":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero radius")
        if self.is_zero:
            return ZERO_RADIUS
        return Radius(self.exponent - other.exponent)

    def __pow__(self, k) -> "Radius":
        k = Fraction(k)
        if self.is_zero:
            if k <= 0:
                raise ZeroDivisionError("non-positive power of the zero radius")
            return ZERO_RADIUS
        return Radius(self.exponent * k)

    def root(self, k: int) -> "Radius":
        return self ** Fraction(1, k)

    def _key(self):
        # larger radius <-> smaller exponent
        return (0, 0) if self.is_zero else (1, -self.exponent)

    def __lt__(self, other: "Radius") -> bool:
        return self._key() < other._key()

    def le_multiple(self, other: "Radius", k: int, p: int) -> bool:
        """Decide ``self <= k * other`` for a positive integer ``k`` (real numbers)."""
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        # p**(-a) <= k p**(-b)  <=>  p**(b - a) <= k ; with b - a = n/d: p**n <= k**d
        e = other.exponent - self.exponent
        n, d = e.numerator, e.denominator
        if n <= 0:
            return True
        return p**n <= k**d

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return f"p^{-self.exponent}"

    def format(self, p: int) -> str:
        if self.is_zero:
            return "0"
        return f"{p}^{-self.exponent}"

    def to_record(self) -> dict:
        if self.is_zero:
            return {"zero": True}
        return {"log_p": str(-self.exponent)}


ZERO_RADIUS = Radius(None)
ONE = Radius(0)

_RADIUS_RE = re.compile(r"^\s*(?:p|\d+)\s*\^\s*\(?\s*([+-]?\d+(?:/\d+)?)\s*\)?\s*$")


def parse_radius(text: str) -> Radius:
    """Parse ``p^e`` (or ``3^e``) with rational ``e``; ``0`` is the zero radius."""
    text = text.strip()
    if text == "0":
        return ZERO_RADIUS
    if text == "1":
        return ONE
    m = _RADIUS_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse radius {text!r}; expected p^e")
    return Radius.power(Fraction(m.group(1)))


def rmin(*rs: Radius) -> Radius:
    return min(rs)


def rmax(*rs: Radius) -> Radius:
    return max(rs)


# --------------------------------------------------------------------------
# p-adic numbers


class PadicNumber:
    __slots__ = ("prime", "valuation", "unit", "rel_precision")

    def __init__(self, prime: int, valuation, unit: int, rel_precision: int):
        self.prime = prime
        self.valuation = valuation
        self.unit = unit
        self.rel_precision = rel_precision

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "PadicNumber":
        return cls(p, math.inf, 0, 0)

    @classmethod
    def bigoh(cls, p: int, absprec: int) -> "PadicNumber":
        """The unknown value ``O(p^absprec)``."""
        return cls(p, absprec, 0, 0)

    @classmethod
    def _normalize(cls, p: int, shift: int, s: int, absprec) -> "PadicNumber":
        """Value ``s * p**shift`` known modulo ``p**absprec``."""
        if absprec == math.inf:
            raise ValueError("finite precision required")
        if absprec <= shift:
            return cls.bigoh(p, absprec)
        s %= p ** (absprec - shift)
        if s == 0:
            return cls.bigoh(p, absprec)
        v = 0
        while s % p == 0:
            s //= p
            v += 1
        val = shift + v
        return cls(p, val, s, absprec - val)

    @classmethod
    def from_rational(cls, r, p: int, prec: int = DEFAULT_PRECISION) -> "PadicNumber":
        r = Fraction(r)
        if r == 0:
            return cls.zero(p)
        v = vp_rational(r, p)
        num = r.numerator // p ** max(v, 0)
        den = r.denominator // p ** max(-v, 0)
        mod = p**prec
        unit = num * pow(den, -1, mod) % mod
        return cls(p, v, unit, prec)

    # -- predicates and accessors -----------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def is_inexact_zero(self) -> bool:
        return self.rel_precision == 0 and self.valuation != math.inf

    def is_zero(self) -> bool:
        """True when every known digit vanishes (exactly or at precision)."""
        return self.rel_precision == 0

    @property
    def absprec(self):
        return self.valuation + self.rel_precision

    def norm(self) -> Radius:
        if self.is_exact_zero:
            return ZERO_RADIUS
        if self.is_inexact_zero:
            raise PrecisionError(
                f"precision exhausted: value is O({self.prime}^{self.valuation}), its norm is unknown"
            )
        return Radius(self.valuation)

    def norm_bound(self) -> Radius:
        """Upper bound on the norm; exact unless the value is ``O(p^a)``."""
        if self.is_exact_zero:
            return ZERO_RADIUS
        return Radius(self.valuation)

    def residue(self) -> int:
        """Image in F_p of an element of Z_p."""
        if self.is_exact_zero:
            return 0
        if self.valuation < 0:
            raise PadicError("element is not integral")
        if self.valuation > 0:
            return 0
        if self.is_inexact_zero:
            raise PrecisionError("residue unknown: value is O(1)")
        return self.unit % self.prime

    def reduce_mod(self, k: int) -> int:
        """The integer in [0, p^k) congruent to an element of Z_p."""
        if self.is_exact_zero:
            return 0
        if self.valuation < 0:
            raise PadicError("element is not integral")
        if self.absprec < k:
            raise PrecisionError(f"only {self.absprec} digits known, {k} requested")
        if self.valuation >= k:
            return 0
        return (self.unit * self.prime**self.valuation) % self.prime**k

    def digits(self) -> list[int]:
        out = []
        u = self.unit
        for _ in range(self.rel_precision):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def to_fraction(self) -> Fraction:
        """A rational representative (the digits read as an exact number)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def add_bigoh(self, absprec) -> "PadicNumber":
        """Forget every digit at or beyond ``p**absprec``."""
        if absprec >= self.absprec:
            return self
        if self.is_zero() or absprec <= self.valuation:
            return PadicNumber.bigoh(self.prime, absprec)
        n = absprec - self.valuation
        return PadicNumber(self.prime, self.valuation, self.unit % self.prime**n, n)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise PrimeError(f"mixing primes {self.prime} and {other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            if r == 0:
                return PadicNumber.zero(self.prime)
            if self.is_exact_zero:
                return PadicNumber.from_rational(r, self.prime, DEFAULT_PRECISION)
            need = self.rel_precision
            if self.absprec != math.inf:
                need = max(need, self.absprec - vp_rational(r, self.prime))
            return PadicNumber.from_rational(r, self.prime, max(int(need), 1))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        m = min(self.valuation, other.valuation)
        absprec = min(self.absprec, other.absprec)
        s = self.unit * self.prime ** (self.valuation - m) + other.unit * other.prime ** (other.valuation - m)
        return PadicNumber._normalize(self.prime, m, s, absprec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.prime**self.rel_precision
        return PadicNumber(self.prime, self.valuation, (-self.unit) % mod, self.rel_precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self.is_exact_zero or other.is_exact_zero:
            return PadicNumber.zero(p)
        v = self.valuation + other.valuation
        if self.is_inexact_zero or other.is_inexact_zero:
            # O(p^a) * x is O(p^(a + v(x))) when x has a known valuation
            return PadicNumber.bigoh(p, v)
        n = min(self.rel_precision, other.rel_precision)
        return PadicNumber(p, v, self.unit * other.unit % p**n, n)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_exact_zero:
            raise PadicZeroDivisionError("division by exact zero")
        if self.is_inexact_zero:
            raise PadicZeroDivisionError(
                f"division by O({self.prime}^{self.valuation}): divisor indistinguishable from zero"
            )
        n = self.rel_precision
        mod = self.prime**n
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod), n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        inv = other.inverse()
        if self.is_exact_zero:
            return self
        return self * inv

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (self ** (-k)).inverse()
        if k == 0:
            return PadicNumber.from_rational(1, self.prime, self.rel_precision or DEFAULT_PRECISION)
        p = self.prime
        if self.is_exact_zero:
            return self
        if self.is_inexact_zero:
            return PadicNumber.bigoh(p, self.valuation * k)
        n = self.rel_precision
        return PadicNumber(p, self.valuation * k, pow(self.unit, k, p**n), n)

    def __eq__(self, other):
        try:
            diff = self - other
        except PrimeError:
            return False
        if diff is NotImplemented:
            return NotImplemented
        return diff.is_zero()

    __hash__ = None

    # -- text ---------------------------------------------------------------

    def to_literal(self) -> str:
        """``d0.d1.d2...*p^v`` with little-endian base-p digits."""
        if self.is_exact_zero:
            return "0"
        if self.is_inexact_zero:
            return f"O(p^{self.valuation})"
        digits = ".".join(str(d) for d in self.digits())
        return f"{digits}*p^{self.valuation}"

    def to_record(self) -> dict:
        if self.is_exact_zero:
            return {"zero": "exact"}
        if self.is_inexact_zero:
            return {"zero": "inexact", "absprec": self.valuation}
        return {
            "valuation": self.valuation,
            "unit": str(self.unit),
            "rel_precision": self.rel_precision,
            "absprec": self.absprec,
        }

    def __repr__(self):
        if self.is_exact_zero:
            return f"PadicNumber({self.prime}, 0)"
        if self.is_inexact_zero:
            return f"PadicNumber({self.prime}, O(p^{self.valuation}))"
        ds = self.digits()
        shown = ".".join(str(d) for d in ds[:8])
        more = "..." if len(ds) > 8 else ""
        return f"PadicNumber({self.prime}, {shown}{more}*p^{self.valuation} + O(p^{self.absprec}))"

    __str__ = to_literal


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


# --------------------------------------------------------------------------
# operations


def parse_rational(numerator: int, denominator: int, p: int, rel_precision: int = DEFAULT_PRECISION) -> PadicNumber:
    check_prime(p)
    if denominator == 0:
        raise ZeroDivisionError("zero denominator")
    return PadicNumber.from_rational(Fraction(numerator, denominator), p, rel_precision)


_DIGITS_RE = re.compile(r"^([0-9]+(?:\.[0-9]+)*)(?:\s*\*\s*(?:p|\d+)\s*\^\s*\(?([+-]?\d+)\)?)?$")
_TERM_RE = re.compile(r"\s*([+-])?\s*(\d+|p)(?:\s*/\s*(\d+|p))?")


def _rational_sum(text: str, p: int) -> Fraction:
    pos = 0
    total = Fraction(0)
    seen = False
    text = text.strip()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos or (seen and m.group(1) is None):
            raise ValueError(f"cannot parse p-adic literal {text!r}")
        num = p if m.group(2) == "p" else int(m.group(2))
        den = 1 if m.group(3) is None else (p if m.group(3) == "p" else int(m.group(3)))
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        term = Fraction(num, den)
        total += -term if m.group(1) == "-" else term
        seen = True
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not seen:
        raise ValueError(f"cannot parse p-adic literal {text!r}")
    return total


def literal_to_fraction(text: str, p: int) -> Fraction:
    """Exact rational value of a literal: ``a/b`` sums or ``d0.d1...*p^v`` digit strings."""
    text = text.strip()
    m = _DIGITS_RE.match(text)
    if m and ("." in text or "*" in text):
        digits = [int(d) for d in m.group(1).split(".")]
        if any(d >= p for d in digits):
            raise ValueError(f"digit out of range for p={p} in {text!r}")
        v = int(m.group(2) or 0)
        value = sum(d * p**i for i, d in enumerate(digits))
        return Fraction(value) * Fraction(p) ** v
    return _rational_sum(text, p)


def parse_padic(text: str, p: int, rel_precision: int = DEFAULT_PRECISION) -> PadicNumber:
    """Parse a textual literal.

    ``-7/36``, ``-7/36+1``, ``1/p`` are rationals (the token ``p`` is the
    prime); ``1.2.0*p^-1`` is the finite digit expansion ``(1 + 2p) p^-1``.
    Both are exact values, encoded at ``rel_precision`` digits.
    """
    check_prime(p)
    return PadicNumber.from_rational(literal_to_fraction(text, p), p, rel_precision)


def norm(x: PadicNumber) -> Radius:
    return x.norm()


def _sqrt_mod_p(a: int, p: int) -> int:
    for r in range(1, (p - 1) // 2 + 1):
        if r * r % p == a % p:
            return r
    raise NotASquareError(f"{a} is not a square mod {p}")


def sqrt(x: PadicNumber) -> PadicNumber:
    """Square root in Q_p, p odd, with unit residue in ``1..(p-1)/2``."""
    p = x.prime
    if p == 2:
        raise PadicError("square roots for p = 2 are not supported")
    if x.is_exact_zero:
        raise PadicError("sqrt of zero is excluded")
    if x.is_inexact_zero:
        raise PrecisionError(f"sqrt of O(p^{x.valuation}): value indistinguishable from zero")
    if x.valuation % 2:
        raise NotASquareError(f"odd valuation {x.valuation}: no square root in Q_{p}")
    if pow(x.unit % p, (p - 1) // 2, p) != 1:
        raise NotASquareError(f"unit residue {x.unit % p} is a non-residue mod {p}: no square root in Q_{p}")
    n = x.rel_precision
    y = _sqrt_mod_p(x.unit % p, p)
    k = 1
    while k < n:
        k = min(2 * k, n)
        mod = p**k
        y = (y - (y * y - x.unit) * pow(2 * y, -1, mod)) % mod
    return PadicNumber(p, x.valuation // 2, y, n)


def chordal_distance(x, y) -> Radius:
    """Chordal metric on the projective line over Q_p."""
    if x is INFINITY and y is INFINITY:
        return ZERO_RADIUS
    if x is INFINITY or y is INFINITY:
        z = y if x is INFINITY else x
        return ONE / max(z.norm(), ONE)
    if x.prime != y.prime:
        raise PrimeError("mixing primes")
    return (x - y).norm() / (max(x.norm(), ONE) * max(y.norm(), ONE))
