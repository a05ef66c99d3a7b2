"""Closed disks and the two region shapes used as backward-invariant sets."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionError
from .padic import DEFAULT_PRECISION, PadicNumber, Radius, parse_padic, parse_radius


def norm_le(x: PadicNumber, r: Radius) -> bool:
    """Decide ``|x| <= r``, raising only when the known digits cannot tell."""
    if x.is_exact_zero:
        return True
    if x.is_inexact_zero:
        if x.norm_bound() <= r:
            return True
        raise PrecisionError(f"cannot decide |O(p^{x.valuation})| <= {r}")
    return x.norm() <= r


@dataclass(frozen=True, eq=False)
class Disk:
    """The closed disk ``{z : |z - center| <= radius}``."""

    center: PadicNumber
    radius: Radius

    @property
    def prime(self) -> int:
        return self.center.prime

    def contains(self, z: PadicNumber) -> bool:
        return norm_le(z - self.center, self.radius)

    __contains__ = contains

    def contains_disk(self, other: "Disk") -> bool:
        return other.radius <= self.radius and self.contains(other.center)

    def is_disjoint(self, other: "Disk") -> bool:
        # two closed disks meet iff one contains the other's center at the larger radius
        big, small = (self, other) if self.radius >= other.radius else (other, self)
        return not big.contains(small.center)

    def children(self, rel_precision: int | None = None) -> list["Disk"]:
        """The ``p`` disks of radius ``radius/p`` with Q_p centers covering this one's Q_p points."""
        p = self.prime
        q = self.radius.exponent
        if q.denominator != 1:
            raise ValueError("only disks of integral log-radius can be subdivided over Q_p")
        m = int(q)
        n = rel_precision or max(self.center.rel_precision, DEFAULT_PRECISION)
        step = PadicNumber.from_rational(Fraction(p) ** m, p, n)
        return [Disk(self.center + step * i if i else self.center, Radius(q + 1)) for i in range(p)]

    def sample(self, rng: random.Random, digits: int = 20) -> PadicNumber:
        """A random Q_p point of the disk (uniform on a finite residue grid)."""
        p = self.prime
        m = math.ceil(self.radius.exponent)
        offset = Fraction(rng.randrange(p**digits)) * Fraction(p) ** m
        return self.center + offset

    def __eq__(self, other):
        # equal as sets: any point of a closed disk is a center of it
        if not isinstance(other, Disk):
            return NotImplemented
        return self.prime == other.prime and self.radius == other.radius and self.contains(other.center)

    __hash__ = None

    def __repr__(self):
        return f"Disk({self.center!r}, {self.radius})"

    def to_record(self) -> dict:
        return {"center": self.center.to_record(), "radius": self.radius.to_record()}


@dataclass(frozen=True, eq=False)
class UnionOfDisks:
    """A finite union of pairwise disjoint closed disks of a common radius."""

    disks: tuple[Disk, ...]

    def __post_init__(self):
        disks = tuple(self.disks)
        object.__setattr__(self, "disks", disks)
        if not disks:
            raise ValueError("empty region")
        r = disks[0].radius
        if any(d.radius != r for d in disks):
            raise ValueError("all disks of a region must share one radius")
        for i, a in enumerate(disks):
            for b in disks[i + 1 :]:
                if not a.is_disjoint(b):
                    raise ValueError(f"region disks {a} and {b} overlap")

    @property
    def prime(self) -> int:
        return self.disks[0].prime

    @property
    def radius(self) -> Radius:
        return self.disks[0].radius

    def contains(self, z: PadicNumber) -> bool:
        return any(d.contains(z) for d in self.disks)

    __contains__ = contains

    def member_containing(self, disk: Disk) -> int | None:
        for i, d in enumerate(self.disks):
            if d.contains_disk(disk):
                return i
        return None

    def sample(self, rng: random.Random, digits: int = 20) -> PadicNumber:
        return rng.choice(self.disks).sample(rng, digits)

    def __str__(self):
        return "disks: [" + ", ".join(f"({d.center}, {d.radius})" for d in self.disks) + "]"

    def to_record(self) -> dict:
        return {"kind": "disks", "disks": [d.to_record() for d in self.disks]}


@dataclass(frozen=True, eq=False)
class Sphere:
    """The set ``{z : |z| = radius}``."""

    prime: int
    radius: Radius

    def __post_init__(self):
        if self.radius.is_zero:
            raise ValueError("sphere of radius 0")

    def contains(self, z: PadicNumber) -> bool:
        if z.is_exact_zero:
            return False
        if z.is_inexact_zero:
            if z.norm_bound() < self.radius:
                return False
            raise PrecisionError(f"cannot decide |O(p^{z.valuation})| = {self.radius}")
        return z.norm() == self.radius

    __contains__ = contains

    def sample(self, rng: random.Random, digits: int = 20) -> PadicNumber:
        p = self.prime
        q = self.radius.exponent
        if q.denominator != 1:
            raise ValueError("sphere has no Q_p points: radius outside p^Z")
        unit = rng.randrange(1, p) + p * rng.randrange(p ** (digits - 1))
        return PadicNumber.from_rational(Fraction(unit) * Fraction(p) ** int(q), p, digits)

    def __str__(self):
        return f"sphere: {self.radius}"

    def to_record(self) -> dict:
        return {"kind": "sphere", "radius": self.radius.to_record()}


Region = UnionOfDisks | Sphere

_PAIR_RE = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^()]+?|[^,()]*\([^()]*\)[^,()]*)\s*\)")


def parse_region(text: str, p: int, rel_precision: int) -> UnionOfDisks | Sphere:
    """Parse ``disks: [(center, p^q), ...]`` or ``sphere: p^q``."""
    text = text.strip()
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    if kind == "sphere":
        return Sphere(p, parse_radius(body))
    if kind == "disks":
        pairs = _PAIR_RE.findall(body)
        if not pairs:
            raise ValueError(f"no disks found in {text!r}")
        return UnionOfDisks(
            tuple(Disk(parse_padic(c, p, rel_precision), parse_radius(r)) for c, r in pairs)
        )
    raise ValueError(f"cannot parse region {text!r}")
