"""Expansion constants, preimage disks and the certificates behind them.

An :class:`ExpansionContext` bundles a polynomial map ``f`` with a region
``B`` and the constants ``lambda, delta, mu, M`` such that

* ``|f'(z)| >= lambda > 1`` on ``B``,
* ``f^{-1}(B)`` is contained in ``B``,
* every closed disk of radius ``delta`` around a point of ``B`` lies in ``B``,
* ``B`` lies in the closed disk of radius ``M`` around 0.

Every inequality is decided exactly on rational exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .disk import Disk, Sphere, UnionOfDisks, norm_le
from .errors import (
    BackwardInvarianceError,
    CertificationError,
    CriticalPointError,
    NotExpandingError,
    PreconditionError,
    PrecisionError,
    RootOutsideQpError,
)
from .padic import ONE, ZERO_RADIUS, PadicNumber, Radius, vp
from .poly import (
    Polynomial,
    all_roots_in_qp,
    derivative,
    dominant_index,
    evaluate,
    gauss_norm,
    isolate_roots,
    newton_root_count,
    root_bound,
    root_norms,
    shift_coefficients,
    taylor_shift,
)


def mu_constant(d: int, delta: Radius, p: int) -> Radius:
    """``min_{2 <= l <= d} |l|^(1/(l-1)) * delta``."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    if delta.is_zero:
        raise ValueError("delta must be positive")
    worst = max(Fraction(vp(l, p), l - 1) for l in range(2, d + 1))
    return Radius(worst) * delta


@dataclass(frozen=True, eq=False)
class ExpansionContext:
    map: Polynomial
    region: UnionOfDisks | Sphere
    lam: Radius
    delta: Radius
    mu: Radius
    bigM: Radius
    certificate: dict | None = field(default=None)

    @property
    def prime(self) -> int:
        return self.map.prime

    @property
    def degree(self) -> int:
        return self.map.degree

    def to_record(self) -> dict:
        rec = {
            "map": self.map.to_text(),
            "region": self.region.to_record(),
            "lambda": self.lam.to_record(),
            "delta": self.delta.to_record(),
            "mu": self.mu.to_record(),
            "M": self.bigM.to_record(),
        }
        if self.certificate is not None:
            rec["backward_invariance"] = self.certificate
        return rec


# --------------------------------------------------------------------------
# expansion


def certify_expansion(f: Polynomial, region) -> Radius:
    """``lambda = inf_B |f'|``, required to exceed 1."""
    df = derivative(f)
    if isinstance(region, UnionOfDisks):
        lam = None
        for i, disk in enumerate(region.disks):
            n = newton_root_count(df, disk)
            if n:
                raise CriticalPointError(f"disk {i} contains {n} critical point(s)")
            size = evaluate(df, disk.center).norm()
            lam = size if lam is None else min(lam, size)
    elif isinstance(region, Sphere):
        if f.degree % f.prime == 0:
            raise PreconditionError(f"p = {f.prime} divides the degree {f.degree}")
        R = region.radius
        if any(r == R for r, _ in root_norms(df)):
            raise CriticalPointError(f"a critical point lies on the sphere of radius {R}")
        # with no critical point on the sphere |f'| is constant there
        lam = gauss_norm(df, Disk(PadicNumber.zero(f.prime), R))
    else:
        raise TypeError("unknown region type")
    if not lam > ONE:
        raise NotExpandingError(f"|f'| = {lam} on B is not > 1", lhs=lam, relation=">", rhs=ONE)
    return lam


# --------------------------------------------------------------------------
# preimages


def _preimage_pairs(f: Polynomial, w: PadicNumber, r: Radius) -> list[tuple[PadicNumber, Radius]]:
    h = f - w
    bound = root_bound(h)
    q = math.floor(bound.exponent) if not bound.is_zero else 0
    roots = all_roots_in_qp(h, Disk(PadicNumber.zero(f.prime), Radius(min(q, 0))))
    df = derivative(f)
    return [(z, r / evaluate(df, z).norm()) for z in roots]


def preimage_disks(ctx: ExpansionContext, target: Disk) -> list[tuple[PadicNumber, Radius]]:
    """The ``d`` disks ``D(z_k, r/|f'(z_k)|)`` whose disjoint union is ``f^{-1}(target)``."""
    w, r = target.center, target.radius
    if r.is_zero:
        raise PreconditionError("target radius must be positive")
    if not r <= ctx.mu:
        raise PreconditionError(f"target radius {r} exceeds mu = {ctx.mu}", lhs=r, relation="<=", rhs=ctx.mu)
    if not ctx.region.contains(w):
        raise PreconditionError("target center is not in B")
    pairs = _preimage_pairs(ctx.map, w, r)
    if len(pairs) != ctx.degree:
        raise RootOutsideQpError(f"only {len(pairs)} of {ctx.degree} preimages lie in Q_p")
    for z, R in pairs:
        if not R < r:
            raise NotExpandingError(f"preimage radius {R} is not below {r}", lhs=R, relation="<", rhs=r)
    disks = [Disk(z, R) for z, R in pairs]
    for i, a in enumerate(disks):
        for b in disks[i + 1 :]:
            if not a.is_disjoint(b):
                raise CertificationError(f"preimage disks around {a.center} and {b.center} overlap")
    return pairs


# --------------------------------------------------------------------------
# backward invariance


def _disk_invariance(f: Polynomial, region: UnionOfDisks, mu: Radius) -> dict:
    """Decide ``f^{-1}(B) <= B`` for a union of disks.

    For a member ``D(b, r)`` and every ``w`` with ``|w - b| <= r`` the number
    of zeros of ``f - w`` in each member disk is read off the Newton polygon.
    When the counts at ``w = b`` add up to ``d`` and the constant term can
    move by ``r`` without changing any positive count, every preimage of the
    member lies in ``B``.
    """
    d = f.degree
    r = region.radius
    evidence = []
    for i, member in enumerate(region.disks):
        b = member.center
        h = f - b
        counts = []
        for j, other in enumerate(region.disks):
            g = taylor_shift(h, other.center)
            l = dominant_index(g.coeffs, other.radius)
            top = g.coeffs[l].norm() * other.radius**l
            counts.append((j, l, top))
        total = sum(l for _, l, _ in counts)
        if total < d:
            raise _escape(f, region, b, r, i, total)
        for j, l, top in counts:
            if l and not r <= top:
                raise BackwardInvarianceError(
                    f"preimage of member {i} spills out of member {j}",
                    escaping_disk=region.disks[j],
                    lhs=r,
                    relation="<=",
                    rhs=top,
                )
        entry = {
            "member": i,
            "counts": [{"disk": j, "roots": l, "term": top.to_record()} for j, l, top in counts],
        }
        if r <= mu:
            try:
                pairs = _preimage_pairs(f, b, r)
            except (RootOutsideQpError, PrecisionError):
                pairs = []
            entry["preimage_disks"] = [
                {
                    "center": z.to_record(),
                    "radius": R.to_record(),
                    "inside": region.member_containing(Disk(z, R)),
                }
                for z, R in pairs
            ]
        evidence.append(entry)
    return {"kind": "disks", "members": evidence}


def _escape(f, region, b, r, i, total) -> BackwardInvarianceError:
    msg = f"only {total} of {f.degree} preimages of member {i} lie in B"
    try:
        h = f - b
        bound = root_bound(h)
        q = math.floor(bound.exponent)
        roots = isolate_roots(h, Disk(PadicNumber.zero(f.prime), Radius(min(q, 0))))
    except (RootOutsideQpError, PrecisionError):
        roots = []
    df = derivative(f)
    for z in roots:
        if not region.contains(z):
            esc = Disk(z, r / evaluate(df, z).norm())
            return BackwardInvarianceError(f"{msg}; preimage disk {esc} escapes", escaping_disk=esc)
    return BackwardInvarianceError(msg + " (the escaping preimage is not in Q_p)")


def _sphere_invariance(f: Polynomial, region: Sphere) -> dict:
    """Roots of ``f - w`` for ``|w| = R`` depend only on ``|a_0 - w| = max(|a_0|, R)``."""
    R = region.radius
    a0 = f.coeff(0)
    if a0.is_inexact_zero and not a0.norm_bound() < R:
        raise PrecisionError("constant term too imprecise to compare with the sphere radius")
    a0n = a0.norm_bound()
    if a0n == R:
        # w = a_0 lies on the sphere and has the preimage 0
        raise BackwardInvarianceError(
            "f(0) lies on the sphere, so 0 is a preimage outside it",
            escaping_disk=Disk(PadicNumber.zero(f.prime), ZERO_RADIUS),
        )
    A = max(a0n, R)
    pts = [(0, A.exponent)] + [
        (k, Fraction(c.valuation)) for k, c in enumerate(f.coeffs) if k and not c.is_exact_zero
    ]
    if any(f.coeff(k).is_inexact_zero for k in range(1, f.degree + 1)):
        raise PrecisionError("a coefficient vanishes at precision")
    slopes = _hull_norms(pts)
    bad = [(n, m) for n, m in slopes if n != R]
    if bad:
        raise BackwardInvarianceError(
            f"{bad[0][1]} preimage(s) of the sphere have norm {bad[0][0]} instead of {R}",
            lhs=bad[0][0],
            relation="==",
            rhs=R,
        )
    return {
        "kind": "sphere",
        "radius": R.to_record(),
        "constant_term": A.to_record(),
        "polygon": [{"index": k, "valuation": str(v)} for k, v in pts],
    }


def _hull_norms(pts) -> list[tuple[Radius, int]]:
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [(Radius(-(y2 - y1) / (x2 - x1)), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])]


def backward_invariance(f: Polynomial, region, mu: Radius) -> dict:
    if isinstance(region, UnionOfDisks):
        return _disk_invariance(f, region, mu)
    if isinstance(region, Sphere):
        return _sphere_invariance(f, region)
    raise TypeError("unknown region type")


def certify_backward_invariance(ctx: ExpansionContext) -> dict:
    """Certificate (a plain record) that ``f^{-1}(B)`` lies in ``B``."""
    return backward_invariance(ctx.map, ctx.region, ctx.mu)


# --------------------------------------------------------------------------
# contexts


def region_constants(region, p: int) -> tuple[Radius, Radius]:
    """``(delta, M)`` for a region."""
    if isinstance(region, UnionOfDisks):
        delta = min(region.radius, ONE)
        M = max([ONE, region.radius] + [d.center.norm() for d in region.disks])
        return delta, M
    R = region.radius
    # closed disks of radius < R around points of the sphere stay on it
    delta = ONE if R > ONE else R * Radius(1)
    return delta, max(R, ONE)


def build_context(f: Polynomial, region, certify: bool = True) -> ExpansionContext:
    if f.degree < 2:
        raise PreconditionError("the map must have degree at least 2")
    lam = certify_expansion(f, region)
    delta, M = region_constants(region, f.prime)
    mu = mu_constant(f.degree, delta, f.prime)
    ctx = ExpansionContext(f, region, lam, delta, mu, M)
    if certify:
        ctx = replace(ctx, certificate=certify_backward_invariance(ctx))
    return ctx


def sphere_context(f: Polynomial) -> ExpansionContext:
    """Context on ``{|z| = |c|^(1/d)}`` for ``f = z^d + c``-type maps with ``|c| > 1``."""
    c = f.coeff(0)
    d = f.degree
    if d % f.prime == 0:
        raise PreconditionError(f"p = {f.prime} divides the degree {d}")
    if c.is_zero() or not c.norm() > ONE:
        raise PreconditionError("|c| must exceed 1", lhs=c.norm_bound(), relation=">", rhs=ONE)
    return build_context(f, Sphere(f.prime, c.norm().root(d)))


# --------------------------------------------------------------------------
# perturbations


def tau_threshold(i: int, ctx: ExpansionContext) -> Radius:
    """``min(lambda / M^(i-1), mu / M^i)``."""
    if not 0 <= i <= ctx.degree:
        raise ValueError(f"index {i} outside 0..{ctx.degree}")
    return min(ctx.lam / ctx.bigM ** (i - 1), ctx.mu / ctx.bigM**i)


def check_S_membership(g: Polynomial, ctx: ExpansionContext) -> dict:
    """Raise unless ``|g'| >= lambda`` on ``B`` and ``g^{-1}(B) <= B``."""
    if g.degree != ctx.degree:
        raise PreconditionError(f"degree {g.degree} differs from {ctx.degree}")
    lam_g = certify_expansion(g, ctx.region)
    if not lam_g >= ctx.lam:
        raise NotExpandingError(f"|g'| = {lam_g} falls below lambda", lhs=lam_g, relation=">=", rhs=ctx.lam)
    return backward_invariance(g, ctx.region, ctx.mu)


def verify_S_membership(g: Polynomial, ctx: ExpansionContext) -> bool:
    try:
        check_S_membership(g, ctx)
    except CertificationError:
        return False
    return True


def drift_bound(f: Polynomial, g: Polynomial, region) -> Radius:
    """``sup_B |g - f|`` over C_p points.

    Exact when the coefficient differences are known; a difference that
    vanishes at precision contributes its upper bound, so the result stays
    a valid bound.
    """
    n = max(len(f.coeffs), len(g.coeffs))
    e = [g.coeff(k) - f.coeff(k) for k in range(n)]
    if isinstance(region, UnionOfDisks):
        disks = region.disks
    else:
        disks = (Disk(PadicNumber.zero(f.prime), region.radius),)
    out = ZERO_RADIUS
    for disk in disks:
        shifted = shift_coefficients(e, disk.center) if not disk.center.is_exact_zero else e
        for k, c in enumerate(shifted):
            out = max(out, c.norm_bound() * disk.radius**k)
    return out


__all__ = [
    "ExpansionContext",
    "backward_invariance",
    "build_context",
    "certify_backward_invariance",
    "certify_expansion",
    "check_S_membership",
    "drift_bound",
    "mu_constant",
    "norm_le",
    "preimage_disks",
    "region_constants",
    "sphere_context",
    "tau_threshold",
    "verify_S_membership",
]
