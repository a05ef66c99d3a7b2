"""Polynomials over Q_p: evaluation, recentering, root counting and root extraction."""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .disk import Disk
from .errors import PrecisionError, RootCountError, RootOutsideQpError
from .padic import (
    DEFAULT_PRECISION,
    ZERO_RADIUS,
    PadicNumber,
    Radius,
    check_prime,
)

GUARD_DIGITS = 16


class Polynomial:
    """``c_0 + c_1 z + ... + c_d z^d`` with p-adic coefficients (index k holds c_k)."""

    __slots__ = ("prime", "coeffs")

    def __init__(self, coeffs, prime: int):
        self.prime = prime
        cs = []
        for c in coeffs:
            if not isinstance(c, PadicNumber):
                c = PadicNumber.from_rational(Fraction(c), prime, DEFAULT_PRECISION)
            elif c.prime != prime:
                raise ValueError("coefficients must share the prime")
            cs.append(c)
        while cs and cs[-1].is_exact_zero:
            cs.pop()
        if cs and cs[-1].is_inexact_zero:
            raise PrecisionError("leading coefficient is indistinguishable from zero")
        self.coeffs = tuple(cs)

    @classmethod
    def from_rationals(cls, coeffs, prime: int, rel_precision: int = DEFAULT_PRECISION) -> "Polynomial":
        check_prime(prime)
        return cls([PadicNumber.from_rational(Fraction(c), prime, rel_precision) for c in coeffs], prime)

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> PadicNumber:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return PadicNumber.zero(self.prime)

    def __call__(self, z: PadicNumber) -> PadicNumber:
        return evaluate(self, z)

    def derivative(self) -> "Polynomial":
        return derivative(self)

    def perturb(self, i: int, eps) -> "Polynomial":
        return perturb(self, i, eps)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self._shift_constant(self._scalar(other))
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coeff(k) + other.coeff(k) for k in range(n)], self.prime)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.prime)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return self._shift_constant(-self._scalar(other))
        return self + (-self._lift(other))

    def _shift_constant(self, c: PadicNumber) -> "Polynomial":
        # a scalar only touches c_0, so an imprecise scalar never becomes a leading coefficient
        cs = list(self.coeffs) or [PadicNumber.zero(self.prime)]
        cs[0] = cs[0] + c
        return Polynomial(cs, self.prime)

    def _scalar(self, other) -> PadicNumber:
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(Fraction(other), self.prime, self._precision())
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("mixing primes")
            return other
        raise TypeError(f"cannot combine a polynomial with {type(other).__name__}")

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return Polynomial([], self.prime)
        out = [PadicNumber.zero(self.prime)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out, self.prime)

    __rmul__ = __mul__

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(z))``."""
        out = Polynomial([], self.prime)
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.prime != self.prime:
                raise ValueError("mixing primes")
            return other
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_rational(Fraction(other), self.prime, self._precision())
        if isinstance(other, PadicNumber):
            return Polynomial([other], self.prime)
        raise TypeError(f"cannot combine a polynomial with {type(other).__name__}")

    def _precision(self) -> int:
        return max((c.rel_precision for c in self.coeffs), default=DEFAULT_PRECISION) or DEFAULT_PRECISION

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return self.prime == other.prime and all(self.coeff(k) == other.coeff(k) for k in range(n))

    __hash__ = None

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_exact_zero:
                continue
            mono = "" if k == 0 else ("*z" if k == 1 else f"*z^{k}")
            parts.append(f"({c.to_literal()}){mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial(p={self.prime}, {self.to_text()})"

    def to_record(self) -> dict:
        return {"prime": self.prime, "coefficients": [c.to_record() for c in self.coeffs]}


def evaluate(f: Polynomial, z: PadicNumber) -> PadicNumber:
    """Horner's rule; precision propagates through the arithmetic."""
    if z.prime != f.prime:
        raise ValueError("mixing primes")
    acc = PadicNumber.zero(f.prime)
    for c in reversed(f.coeffs):
        acc = acc * z + c
    return acc


def derivative(f: Polynomial) -> Polynomial:
    return Polynomial([c * k for k, c in enumerate(f.coeffs)][1:], f.prime)


def perturb(f: Polynomial, i: int, eps) -> Polynomial:
    """``f(z) + eps * z**i``."""
    if i < 0:
        raise ValueError("negative index")
    cs = [f.coeff(k) for k in range(max(len(f.coeffs), i + 1))]
    cs[i] = cs[i] + eps
    return Polynomial(cs, f.prime)


def taylor_shift(f: Polynomial, z0: PadicNumber) -> Polynomial:
    """Coefficients of ``f`` in powers of ``z - z0``, by repeated synthetic division."""
    if z0.is_exact_zero:
        return f
    return Polynomial(shift_coefficients(f.coeffs, z0), f.prime)


def shift_coefficients(coeffs, z0: PadicNumber) -> list[PadicNumber]:
    """Synthetic-division Taylor shift on a bare coefficient list (low degree first)."""
    a = list(coeffs)
    d = len(a) - 1
    for k in range(d):
        for j in range(d - 1, k - 1, -1):
            a[j] = a[j] + z0 * a[j + 1]
    return a


# --------------------------------------------------------------------------
# Newton polygon


def _term_size(c: PadicNumber, k: int, r: Radius):
    """``(|c| r^k, exact?)``; for ``O(p^a)`` an upper bound is returned."""
    if c.is_exact_zero:
        return ZERO_RADIUS, True
    size = c.norm_bound() * r**k
    return size, not c.is_inexact_zero


def newton_polygon_data(f: Polynomial, disk: Disk) -> list[tuple[int, Radius]]:
    """``(k, |c_k| r^k)`` for the coefficients of ``f`` recentered at the disk center.

    Coefficients that vanish at precision report their upper bound.
    """
    g = taylor_shift(f, disk.center)
    return [(k, _term_size(c, k, disk.radius)[0]) for k, c in enumerate(g.coeffs)]


def dominant_index(coeffs, r: Radius) -> int:
    """Largest ``l`` with ``|c_l| r^l >= |c_k| r^k`` for every ``k``."""
    sizes = [_term_size(c, k, r) for k, c in enumerate(coeffs)]
    exact = [s for s, ok in sizes if ok]
    top = max(exact, default=ZERO_RADIUS)
    if top.is_zero:
        raise PrecisionError("every coefficient vanishes at precision; root count undecidable")
    for k, (s, ok) in enumerate(sizes):
        if not ok and s >= top:
            raise PrecisionError(
                f"coefficient {k} is O(p^{coeffs[k].valuation}); more precision is needed to compare its term with {top}"
            )
    return max(k for k, (s, ok) in enumerate(sizes) if ok and s == top)


def newton_root_count(f: Polynomial, disk: Disk) -> int:
    """Number of zeros of ``f`` in the closed disk (over C_p, with multiplicity)."""
    if f.is_zero():
        raise RootCountError("the zero polynomial has no finite root count")
    g = taylor_shift(f, disk.center)
    if disk.radius.is_zero:
        # a point: the multiplicity of center as a root
        for k, c in enumerate(g.coeffs):
            if not c.is_zero():
                return k
            if c.is_inexact_zero:
                raise PrecisionError("cannot decide whether the center is a root")
        return 0
    return dominant_index(g.coeffs, disk.radius)


def gauss_norm(f: Polynomial, disk: Disk) -> Radius:
    """``sup |f|`` over the C_p points of the disk."""
    g = taylor_shift(f, disk.center)
    sizes = [_term_size(c, k, disk.radius) for k, c in enumerate(g.coeffs)]
    top = max((s for s, ok in sizes if ok), default=ZERO_RADIUS)
    bound = max((s for s, ok in sizes), default=ZERO_RADIUS)
    if bound > top:
        raise PrecisionError("sup norm undecidable: a vanishing coefficient may dominate")
    return top


def root_norms(f: Polynomial) -> list[tuple[Radius, int]]:
    """Norms of the roots of ``f`` with multiplicities, from the lower hull of ``(k, v(c_k))``."""
    if f.degree < 1:
        return []
    out = []
    coeffs = f.coeffs
    low = 0
    while coeffs[low].is_exact_zero:
        low += 1
    if low:
        out.append((ZERO_RADIUS, low))
    pts = []
    for k in range(low, len(coeffs)):
        c = coeffs[k]
        if not c.is_exact_zero:
            pts.append((k, Fraction(c.valuation), c.is_inexact_zero))
    known = [(k, v) for k, v, bad in pts if not bad]
    hull: list[tuple[int, Fraction]] = []
    for pt in known:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    if hull[0][0] != low or hull[-1][0] != f.degree:
        raise PrecisionError("extreme coefficient vanishes at precision")
    for k, v, bad in pts:
        if not bad:
            continue
        # a vanishing coefficient only matters if its lower bound reaches the hull
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 < k < x2 and v * (x2 - x1) <= y1 * (x2 - x1) + (y2 - y1) * (k - x1):
                raise PrecisionError(f"coefficient {k} vanishes at precision; root norms undecidable")
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = (y2 - y1) / (x2 - x1)
        out.append((Radius(-slope), x2 - x1))
    return out


def root_bound(f: Polynomial) -> Radius:
    """Largest root norm."""
    norms = [r for r, _ in root_norms(f)]
    return max(norms, default=ZERO_RADIUS)


# --------------------------------------------------------------------------
# roots


def _pad(z: PadicNumber, absprec) -> PadicNumber:
    """The digits of ``z`` read as an exact point, stored to ``absprec``."""
    if z.is_zero():
        return PadicNumber.zero(z.prime)
    n = max(z.rel_precision, absprec - z.valuation, 1)
    return PadicNumber(z.prime, z.valuation, z.unit, n)


def unique_root_in_disk(f: Polynomial, disk: Disk, count: int | None = None) -> PadicNumber:
    """The single zero of ``f`` in ``disk``, by Newton iteration from the center.

    The result carries only digits justified by the coefficient precision:
    with ``f(z) = O(p^a)`` the root is ``z + O(p^(a - v(f'(z))))``.
    """
    if count is None:
        count = newton_root_count(f, disk)
    if count != 1:
        raise RootCountError(f"disk contains {count} roots, exactly one is required", count)
    df = derivative(f)
    # iterates are chosen points, so they are treated as exact; only the
    # coefficient precision limits the answer
    cap = max(c.absprec for c in f.coeffs if not c.is_exact_zero) + 8
    z = _pad(disk.center, cap)
    for _ in range(4 * cap + 16):
        fz = evaluate(f, z)
        dfz = evaluate(df, z)
        if dfz.is_zero():
            raise PrecisionError("derivative vanishes at precision during Newton iteration")
        if fz.is_zero():
            if fz.is_exact_zero:
                return z
            return z.add_bigoh(fz.absprec - dfz.valuation)
        z = _pad(z - fz / dfz, cap)
        if not disk.contains(z):
            raise RootOutsideQpError("Newton iteration left the disk: no root in Q_p here")
    raise PrecisionError("Newton iteration did not reach the working precision")


def isolate_roots(f: Polynomial, disk: Disk, max_depth: int = 80) -> list[PadicNumber]:
    """All Q_p roots of ``f`` in ``disk`` that are simple enough to be separated.

    The disk is split into residue classes until each piece holds one root
    (then Newton iteration takes over) or none.  Clusters that remain after
    ``max_depth`` refinements raise :class:`PrecisionError`.
    """
    q = disk.radius.exponent
    if q is None:
        raise ValueError("radius 0")
    start = Disk(disk.center, Radius(math.ceil(q)))
    roots: list[PadicNumber] = []
    stack = [(start, 0)]
    while stack:
        d, depth = stack.pop()
        n = newton_root_count(f, d)
        if n == 0:
            continue
        if n == 1:
            try:
                roots.append(unique_root_in_disk(f, d, count=1))
            except RootOutsideQpError:
                pass
            continue
        if depth >= max_depth:
            raise PrecisionError(f"{n} roots remain unseparated in a disk of radius {d.radius}")
        stack.extend((c, depth + 1) for c in reversed(d.children()))
    return roots


def all_roots_in_qp(f: Polynomial, disk: Disk) -> list[PadicNumber]:
    """Like :func:`isolate_roots` but every root in the disk must lie in Q_p."""
    total = newton_root_count(f, disk)
    roots = isolate_roots(f, disk)
    if len(roots) != total:
        raise RootOutsideQpError(
            f"{total} roots in {disk} but only {len(roots)} found in Q_p; the rest need an extension"
        )
    return roots


# --------------------------------------------------------------------------
# text format

_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d+)*)|([pzx])|(\*\*|[-+*/^()]))")


def _tokens(text: str):
    pos = 0
    text = text.strip()
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character in polynomial at {text[pos:]!r}")
        out.append(m.group(1) or m.group(2) or ("^" if m.group(3) == "**" else m.group(3)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    """Recursive descent over dicts ``{degree: Fraction}``."""

    def __init__(self, text: str, p: int):
        self.toks = _tokens(text)
        self.i = 0
        self.p = p

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise ValueError(f"expected {expect or 'a token'}, got {t!r}")
        self.i += 1
        return t

    @staticmethod
    def add(a, b, sign=1):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + sign * v
        return {k: v for k, v in out.items() if v}

    @staticmethod
    def mul(a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                out[i + j] = out.get(i + j, 0) + x * y
        return {k: v for k, v in out.items() if v}

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        acc = self.add({}, self.term(), sign)
        while self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
            acc = self.add(acc, self.term(), sign)
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op == "*":
                acc = self.mul(acc, rhs)
            else:
                if set(rhs) - {0} or not rhs:
                    raise ValueError("division by a non-constant or zero")
                acc = {k: v / rhs[0] for k, v in acc.items()}
        return acc

    def factor(self):
        if self.peek() == "-":
            self.take()
            return {k: -v for k, v in self.factor().items()}
        base = self.atom()
        if self.peek() == "^":
            self.take()
            neg = False
            if self.peek() in ("+", "-"):
                neg = self.take() == "-"
            e = self.take()
            if not e.isdigit():
                raise ValueError(f"bad exponent {e!r}")
            e = int(e)
            if neg:
                if set(base) - {0} or not base:
                    raise ValueError("negative powers are only allowed for constants")
                return {0: base[0] ** -e}
            out = {0: Fraction(1)}
            for _ in range(e):
                out = self.mul(out, base)
            return out
        return base

    def atom(self):
        t = self.take()
        if t == "(":
            v = self.expr()
            self.take(")")
            return v
        if t in ("z", "x"):
            return {1: Fraction(1)}
        if t == "p":
            return {0: Fraction(self.p)}
        if t[0].isdigit():
            if "." in t:
                ds = [int(d) for d in t.split(".")]
                if any(d >= self.p for d in ds):
                    raise ValueError(f"digit out of range for p={self.p} in {t!r}")
                return {0: Fraction(sum(d * self.p**i for i, d in enumerate(ds)))} if any(ds) else {}
            return {0: Fraction(int(t))} if int(t) else {}
        raise ValueError(f"unexpected token {t!r}")


def parse_rational_polynomial(text: str, p: int) -> list[Fraction]:
    """Exact rational coefficients (low degree first) of a polynomial expression."""
    parser = _Parser(text, p)
    poly = parser.expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing input in polynomial: {parser.peek()!r}")
    if any(k < 0 for k in poly):
        raise ValueError("negative degree")
    d = max(poly, default=0)
    return [Fraction(poly.get(k, 0)) for k in range(d + 1)]


def parse_polynomial(text: str, p: int, rel_precision: int = DEFAULT_PRECISION) -> Polynomial:
    """Parse ``c0 + c1*z + ... + cd*z^d``; coefficients get ``GUARD_DIGITS`` extra digits."""
    check_prime(p)
    return Polynomial.from_rationals(parse_rational_polynomial(text, p), p, rel_precision + GUARD_DIGITS)


def z_power_plus_c(d: int, c: PadicNumber) -> Polynomial:
    """``z**d + c``."""
    p = c.prime
    one = PadicNumber.from_rational(1, p, max(c.rel_precision, DEFAULT_PRECISION))
    return Polynomial([c] + [PadicNumber.zero(p)] * (d - 1) + [one], p)

