"""Pointwise evaluation of the conjugacy between nearby expanding maps.

Given ``f`` with a certified context on ``B`` and a nearby ``g`` in the
stable set (``|g'| >= lambda`` on ``B``, ``g^{-1}(B) <= B``,
``sup_B |g - f| <= mu``), the conjugacy ``h`` with ``h o f = g o h`` is
evaluated at ``z`` by backward shadowing: follow the ``f``-orbit of ``z``
for ``n`` steps, then pull the last point back through the branches of
``g`` that stay near the orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .disk import Disk, Sphere, UnionOfDisks
from .dynamics import (
    ExpansionContext,
    check_S_membership,
    drift_bound,
    sphere_context,
    tau_threshold,
)
from .errors import (
    CertificationError,
    EscapeError,
    NotRepellingError,
    PadicError,
    PerturbationTooLargeError,
    PreconditionError,
    PrecisionError,
    RootOutsideQpError,
)
from .padic import ONE, ZERO_RADIUS, PadicNumber, Radius
from .poly import (
    Polynomial,
    derivative,
    evaluate,
    gauss_norm,
    isolate_roots,
    newton_root_count,
    root_norms,
    unique_root_in_disk,
    z_power_plus_c,
)


@dataclass(frozen=True, eq=False)
class ConjugacyProblem:
    f: Polynomial
    g: Polynomial
    ctx: ExpansionContext
    drift: Radius
    lam: Radius
    # "coefficients": every |b_k - a_k| < tau(k); "direct": stability of g and
    # the drift were certified without the coefficient thresholds
    route: str = "coefficients"
    uniform_bound: bool = True
    offending_index: int | None = None

    @property
    def mu(self) -> Radius:
        return self.ctx.mu

    def to_record(self) -> dict:
        return {
            "context": self.ctx.to_record(),
            "g": self.g.to_text(),
            "drift": self.drift.to_record(),
            "route": self.route,
            "uniform_coefficient_bound": self.uniform_bound,
        }


@dataclass(frozen=True, eq=False)
class ShadowingTrace:
    point: PadicNumber
    depth: int
    forward_orbit: tuple
    # value of the final pullback chain at each orbit point, deepest last
    backward_values: tuple
    # |h_{k+1}(z) - h_k(z)| for k = 0 .. depth-1
    corrections: tuple = field(default=())
    certified_error: Radius = ZERO_RADIUS

    def to_record(self) -> dict:
        return {
            "point": self.point.to_record(),
            "depth": self.depth,
            "value": self.backward_values[0].to_record(),
            "corrections": [c.to_record() for c in self.corrections],
            "certified_error": self.certified_error.to_record(),
        }


def neighborhood_check(f: Polynomial, g: Polynomial, ctx: ExpansionContext) -> ConjugacyProblem:
    """Admit ``g`` as a perturbation of ``f`` and return the problem object.

    The coefficient thresholds are checked index by index.  When some index
    fails them, ``g`` is still admitted if its stability and drift can be
    certified directly; otherwise the coefficient violation is raised.
    """
    if f.prime != g.prime:
        raise PreconditionError("maps over different primes")
    if f.degree != g.degree:
        raise PreconditionError(f"degree mismatch: {f.degree} vs {g.degree}")
    d = f.degree
    offending = None
    uniform = True
    floor = min(tau_threshold(k, ctx) for k in range(d + 1))
    for k in range(d + 1):
        eps = g.coeff(k) - f.coeff(k)
        size = eps.norm_bound()
        if eps.is_inexact_zero and not size < floor:
            raise PrecisionError(f"coefficient {k} of g - f is too imprecise to compare with tau")
        if not size < floor:
            uniform = False
        if offending is None and not size < tau_threshold(k, ctx):
            offending = (k, size, tau_threshold(k, ctx))
    try:
        drift = drift_bound(f, g, ctx.region)
        if not drift <= ctx.mu:
            raise PerturbationTooLargeError(
                f"sup_B |g - f| = {drift} exceeds mu = {ctx.mu}", lhs=drift, relation="<=", rhs=ctx.mu
            )
        check_S_membership(g, ctx)
    except CertificationError as exc:
        if offending is None:
            raise
        k, size, tau = offending
        raise PerturbationTooLargeError(
            f"|eps_{k}| = {size} is not below tau({k}) = {tau}", index=k, lhs=size, relation="<", rhs=tau
        ) from exc
    route = "coefficients" if offending is None else "direct"
    return ConjugacyProblem(f, g, ctx, drift, ctx.lam, route, uniform, None if offending is None else offending[0])


def shadowing_depth(mu: Radius, lam: Radius, target: Radius) -> int:
    """Least ``n >= 0`` with ``mu / lam^n < target``."""
    if target.is_zero:
        raise ValueError("target must be positive")
    if not lam > ONE:
        raise ValueError("lambda must exceed 1")
    if mu < target:
        return 0
    # exponents: mu/lam^n = p^-(q_mu - n q_lam), q_lam < 0
    gap = target.exponent - mu.exponent
    return math.floor(gap / -lam.exponent) + 1


def _pull_back(g: Polynomial, dg: Polynomial, y: PadicNumber, near: PadicNumber, mu: Radius) -> PadicNumber:
    """The root of ``g - y`` in the disk of radius ``mu/|g'(near)|`` around ``near``."""
    radius = mu / evaluate(dg, near).norm()
    disk = Disk(near, radius)
    h = g - y
    n = newton_root_count(h, disk)
    if n != 1:
        raise CertificationError(f"{n} preimages in the pullback disk around {near}; expected exactly one")
    return unique_root_in_disk(h, disk, count=1)


def conjugate_point(
    problem: ConjugacyProblem,
    z: PadicNumber,
    target: Radius,
    extra_depth: int = 0,
    trace: bool = False,
):
    """``h(z)`` with ``|h(z) - h_inf(z)| < target``; optionally with its trace."""
    f, g, ctx = problem.f, problem.g, problem.ctx
    mu, lam = ctx.mu, problem.lam
    n = shadowing_depth(mu, lam, target) + extra_depth
    orbit = [z]
    if not ctx.region.contains(z):
        raise EscapeError("point is not in B", step=0)
    for j in range(1, n + 1):
        z = evaluate(f, orbit[-1])
        if not ctx.region.contains(z):
            raise EscapeError(f"orbit leaves B at step {j}", step=j)
        orbit.append(z)
    dg = derivative(g)
    ys = [orbit[n]]
    for j in range(n - 1, -1, -1):
        ys.append(_pull_back(g, dg, ys[-1], orbit[j], mu))
    ys.reverse()
    value = ys[0]
    err = mu / lam**n
    if not value.is_exact_zero and not Radius(value.absprec) <= target:
        raise PrecisionError(f"h(z) is known to O(p^{value.absprec}) only; target {target} needs more digits")
    if not trace:
        return value
    # h_k(z): pull the k-th orbit point back k steps
    hk = [orbit[0]]
    for k in range(1, n + 1):
        y = orbit[k]
        for j in range(k - 1, -1, -1):
            y = _pull_back(g, dg, y, orbit[j], mu)
        hk.append(y)
    corrections = tuple((hk[k + 1] - hk[k]).norm_bound() for k in range(n))
    tr = ShadowingTrace(orbit[0], n, tuple(orbit), tuple(ys), corrections, err)
    return value, tr


def _growth(g: Polynomial, region) -> Radius:
    """``max(1, sup_B |g'|)``: how much ``g`` can stretch an error inside ``B``."""
    dg = derivative(g)
    if isinstance(region, UnionOfDisks):
        grow = max(gauss_norm(dg, d) for d in region.disks)
    else:
        grow = gauss_norm(dg, Disk(PadicNumber.zero(g.prime), region.radius))
    return max(grow, ONE)


def semiconjugacy_residual(problem: ConjugacyProblem, z: PadicNumber, target: Radius) -> Radius:
    """Upper bound on ``|g(h(z)) - h(f(z))|``.

    ``h(z)`` is computed finely enough that applying ``g`` keeps it within ``target``.
    """
    g = problem.g
    hz = conjugate_point(problem, z, target / _growth(g, problem.ctx.region))
    hfz = conjugate_point(problem, evaluate(problem.f, z), target)
    return (evaluate(g, hz) - hfz).norm_bound()


def verify_semiconjugacy(problem: ConjugacyProblem, z: PadicNumber, target: Radius) -> bool:
    return semiconjugacy_residual(problem, z, target) <= target


def find_repelling_fixed_point(f: Polynomial, region) -> PadicNumber:
    """A Q_p fixed point of ``f`` in the region with ``|f'| > 1``."""
    p = f.prime
    h = f - Polynomial([PadicNumber.zero(p), PadicNumber.from_rational(1, p, f._precision())], p)
    if h.is_zero() or h.degree < 1:
        raise PadicError("fixed-point equation is degenerate")
    if isinstance(region, UnionOfDisks):
        expected = sum(newton_root_count(h, d) for d in region.disks)
        roots = [r for d in region.disks for r in isolate_roots(h, d)]
    elif isinstance(region, Sphere):
        expected = sum(m for r, m in root_norms(h) if r == region.radius)
        roots = isolate_roots(h, Disk(PadicNumber.zero(p), region.radius))
        roots = [r for r in roots if region.contains(r)]
    else:
        raise TypeError("unknown region type")
    df = derivative(f)
    for r in roots:
        if evaluate(df, r).norm_bound() > ONE:
            return r
    if roots:
        size = evaluate(df, roots[0]).norm_bound()
        raise NotRepellingError(
            f"fixed point {roots[0]} has |f'| = {size}, not > 1", lhs=size, relation=">", rhs=ONE
        )
    if expected:
        raise RootOutsideQpError(f"{expected} fixed point(s) in the region, none in Q_p")
    raise PadicError("no fixed point in the region")


class ConjugacyEvaluator:
    """``z -> h(z)`` for a fixed problem and target."""

    def __init__(self, problem: ConjugacyProblem, target: Radius):
        self.problem = problem
        self.target = target

    def __call__(self, z: PadicNumber) -> PadicNumber:
        return conjugate_point(self.problem, z, self.target)

    def trace(self, z: PadicNumber) -> ShadowingTrace:
        return conjugate_point(self.problem, z, self.target, trace=True)[1]


def theorem_2_3_conjugacy(d: int, c: PadicNumber, c2: PadicNumber, target: Radius | None = None) -> ConjugacyEvaluator:
    """Conjugacy from ``z^d + c`` to ``z^d + c2`` on the sphere ``|z| = |c|^(1/d)``."""
    p = c.prime
    if d < 2:
        raise PreconditionError("degree must be at least 2")
    if d % p == 0:
        raise PreconditionError(f"p = {p} divides d = {d}")
    for name, value in (("c", c), ("c2", c2)):
        if value.is_zero() or not value.norm() > ONE:
            raise PreconditionError(
                f"|{name}| must exceed 1 for the critical orbit to escape",
                lhs=value.norm_bound(),
                relation=">",
                rhs=ONE,
            )
    f = z_power_plus_c(d, c)
    g = z_power_plus_c(d, c2)
    ctx = sphere_context(f)
    eps = (c2 - c).norm_bound()
    if not eps <= ctx.mu:
        R = ctx.region.radius
        note = " (within the non-strict bound |c - c2| <= |c|^(1/d), but not certified)" if eps <= R else ""
        raise PerturbationTooLargeError(
            f"|c2 - c| = {eps} exceeds mu = {ctx.mu}{note}", index=0, lhs=eps, relation="<=", rhs=ctx.mu
        )
    problem = neighborhood_check(f, g, ctx)
    if target is None:
        target = Radius(10)
    return ConjugacyEvaluator(problem, target)


def fixed_point_residual(problem: ConjugacyProblem, w: PadicNumber, target: Radius) -> Radius:
    """``|g(h(w)) - h(w)|`` for a fixed point ``w`` of ``f``."""
    hw = conjugate_point(problem, w, target / _growth(problem.g, problem.ctx.region))
    return (evaluate(problem.g, hw) - hw).norm_bound()


__all__ = [
    "ConjugacyEvaluator",
    "ConjugacyProblem",
    "ShadowingTrace",
    "conjugate_point",
    "find_repelling_fixed_point",
    "fixed_point_residual",
    "neighborhood_check",
    "semiconjugacy_residual",
    "shadowing_depth",
    "theorem_2_3_conjugacy",
    "verify_semiconjugacy",
]
