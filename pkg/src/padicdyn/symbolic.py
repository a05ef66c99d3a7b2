"""Symbolic coding of the Julia set of ``F(z) = z(z - 1)/p``.

``F`` maps each of the residue classes ``0`` and ``1`` of ``Z_p`` onto
``Z_p`` with ``|F'| = p``; every other point of Q_p escapes.  A point of the
Julia set is therefore coded by the residues of its iterates, a sequence in
the full one-sided 2-shift.  The quadratic map ``z^2 + gamma`` with
``gamma = -1/(2p) - 1/(4p^2)`` is affinely conjugate to ``F`` through
``x = p z + 1/2``, and nearby ``z^2 + c`` reach it through the shadowing
conjugacy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .conjugacy import ConjugacyProblem, conjugate_point, neighborhood_check
from .disk import Disk, UnionOfDisks
from .dynamics import sphere_context
from .errors import EscapeError, PadicError, PerturbationTooLargeError, PrecisionError
from .padic import DEFAULT_PRECISION, PadicNumber, Radius, sqrt
from .poly import Polynomial, evaluate, z_power_plus_c


@dataclass(frozen=True)
class ItineraryWord:
    symbols: tuple[int, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        if any(s not in (0, 1) for s in syms):
            raise ValueError("symbols must be 0 or 1")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def parse(cls, text: str) -> "ItineraryWord":
        text = text.strip()
        if text in ("", "()", "-"):
            return cls(())
        if set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self):
        return "".join(map(str, self.symbols))


def shift(w: ItineraryWord) -> ItineraryWord:
    if not w.symbols:
        raise ValueError("cannot shift the empty word")
    return ItineraryWord(w.symbols[1:])


def shift_metric(s: ItineraryWord, t: ItineraryWord) -> Fraction:
    """``sum |s_k - t_k| / 2^k`` over the common finite length.

    For prefixes of length ``n`` this is within ``2^-(n-1)`` of the
    distance between any two sequences extending them.
    """
    if len(s) != len(t):
        raise ValueError(f"length mismatch: {len(s)} vs {len(t)}")
    return sum((Fraction(abs(a - b), 2**k) for k, (a, b) in enumerate(zip(s.symbols, t.symbols))), Fraction(0))


def _check_odd(p: int):
    if p == 2:
        raise PadicError("p = 2 is not supported here: the coding needs an odd prime")


def branch_map(p: int, rel_precision: int = DEFAULT_PRECISION) -> Polynomial:
    """``F(z) = (z^2 - z)/p``."""
    _check_odd(p)
    inv = Fraction(1, p)
    return Polynomial.from_rationals([0, -inv, inv], p, rel_precision)


def itinerary(z: PadicNumber, n: int) -> ItineraryWord:
    """Residues of ``z, F(z), ..., F^(n-1)(z)``."""
    p = z.prime
    _check_odd(p)
    F = branch_map(p, max(z.rel_precision, DEFAULT_PRECISION))
    out = []
    for k in range(n):
        if not z.is_exact_zero:
            if z.valuation < 0:
                raise EscapeError(f"iterate {k} is not in Z_p: escaped at step {k}", step=k)
            if z.valuation == 0 and z.is_inexact_zero:
                raise PrecisionError(f"precision exhausted at step {k}: residue of iterate unknown")
        s = z.residue()
        if s not in (0, 1):
            raise EscapeError(f"iterate {k} has residue {s}: escaped at step {k}", step=k)
        out.append(s)
        z = evaluate(F, z)
    return ItineraryWord(tuple(out))


def _inverse_branch(y: PadicNumber, s: int) -> PadicNumber:
    """The root of ``z^2 - z - p y`` with residue ``s``."""
    p = y.prime
    root = sqrt(1 + 4 * p * y)  # residue 1
    return (1 + root) / 2 if s == 1 else (1 - root) / 2


def decode(w: ItineraryWord, p: int, rel_precision: int = DEFAULT_PRECISION):
    """All points whose itinerary starts with ``w``.

    A single disk of radius ``p^-len(w)``; for the empty word, the union of
    the two branch disks.
    """
    _check_odd(p)
    branch = [
        Disk(PadicNumber.from_rational(s, p, rel_precision), Radius(1)) for s in (0, 1)
    ]
    if not w.symbols:
        return UnionOfDisks(tuple(branch))
    y = PadicNumber.from_rational(w.symbols[-1], p, rel_precision)
    for s in reversed(w.symbols[:-1]):
        y = _inverse_branch(y, s)
    return Disk(y, Radius(len(w)))


def gamma(p: int) -> Fraction:
    """``-1/(2p) - 1/(4p^2)``, the parameter affinely conjugate to ``F``."""
    return Fraction(-1, 2 * p) - Fraction(1, 4 * p * p)


def h2(z: PadicNumber) -> PadicNumber:
    """``p z + 1/2``: from ``z^2 + gamma`` to ``F``."""
    return z * z.prime + Fraction(1, 2)


def h2_inverse(x: PadicNumber) -> PadicNumber:
    return (x - Fraction(1, 2)) / x.prime


def quadratic(c: PadicNumber) -> Polynomial:
    return z_power_plus_c(2, c)


class Corollary42:
    """``z -> itinerary(h2(h1(z)))`` for ``f_c = z^2 + c`` near ``z^2 + gamma``."""

    def __init__(self, c: PadicNumber, rel_precision: int | None = None):
        p = c.prime
        _check_odd(p)
        self.p = p
        self.c = c
        prec = rel_precision or max(c.rel_precision, DEFAULT_PRECISION)
        self.gamma = PadicNumber.from_rational(gamma(p), p, prec)
        dist = (c - self.gamma).norm_bound()
        bound = Radius.power(1)
        if not dist < bound:
            raise PerturbationTooLargeError(
                f"|c - gamma| = {dist} is not below p", index=0, lhs=dist, relation="<", rhs=bound
            )
        self.f_c = quadratic(c)
        self.f_gamma = quadratic(self.gamma)
        self.identity = (c - self.gamma).is_zero()
        self.forward: ConjugacyProblem | None = None
        if not self.identity:
            self.forward = neighborhood_check(self.f_c, self.f_gamma, sphere_context(self.f_c))
        self._backward: ConjugacyProblem | None = None

    @property
    def backward(self) -> ConjugacyProblem | None:
        """The conjugacy from ``z^2 + gamma`` back to ``f_c``."""
        if self.identity:
            return None
        if self._backward is None:
            self._backward = neighborhood_check(self.f_gamma, self.f_c, sphere_context(self.f_gamma))
        return self._backward

    def h1(self, z: PadicNumber, target: Radius) -> PadicNumber:
        if self.identity:
            return z
        return conjugate_point(self.forward, z, target)

    def h1_inverse(self, y: PadicNumber, target: Radius) -> PadicNumber:
        if self.identity:
            return y
        return conjugate_point(self.backward, y, target)

    def word(self, z: PadicNumber, n: int, target: Radius | None = None) -> ItineraryWord:
        # n symbols only depend on h2(h1(z)) modulo p^n, i.e. on h1(z) to p^-(n-1)
        need = Radius(n - 1)
        target = need if target is None else min(target, need)
        return itinerary(h2(self.h1(z, target)), n)

    def julia_point(self, w: ItineraryWord, target: Radius = Radius(40)) -> PadicNumber:
        """A point of the Julia set of ``f_c`` whose word starts with ``w``.

        The center of the decoded disk is a preimage of the fixed point 0 of
        ``F``, hence a genuine Julia point; it is carried back through
        ``h2`` and ``h1``.
        """
        x = decode(w, self.p, max(self.c.rel_precision, DEFAULT_PRECISION)).center
        return self.h1_inverse(h2_inverse(x), target)

    def equivariance_holds(self, z: PadicNumber, n: int) -> bool:
        """``word(f_c(z), n-1) == shift(word(z, n))``."""
        return self.word(evaluate(self.f_c, z), n - 1) == shift(self.word(z, n))


def corollary_4_2_pipeline(c: PadicNumber, z: PadicNumber, n: int, target: Radius | None = None) -> ItineraryWord:
    return Corollary42(c).word(z, n, target)


__all__ = [
    "Corollary42",
    "ItineraryWord",
    "branch_map",
    "corollary_4_2_pipeline",
    "decode",
    "gamma",
    "h2",
    "h2_inverse",
    "quadratic",
    "itinerary",
    "shift",
    "shift_metric",
]
