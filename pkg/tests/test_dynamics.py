import math
import random
from fractions import Fraction

import pytest

from oracles import vp
from padicdyn.disk import Disk, Sphere, UnionOfDisks, parse_region
from padicdyn.dynamics import (
    build_context,
    certify_backward_invariance,
    certify_expansion,
    check_S_membership,
    drift_bound,
    mu_constant,
    preimage_disks,
    sphere_context,
    tau_threshold,
    verify_S_membership,
)
from padicdyn.errors import (
    BackwardInvarianceError,
    CriticalPointError,
    NotExpandingError,
    PreconditionError,
)
from padicdyn.padic import ONE, PadicNumber, Radius
from padicdyn.poly import Polynomial, derivative, evaluate, perturb, taylor_shift
from padicdyn.symbolic import branch_map, gamma, quadratic


def q(r, p, n=64):
    return PadicNumber.from_rational(r, p, n)


def two_disks(p):
    return UnionOfDisks((Disk(q(0, p), Radius(1)), Disk(q(1, p), Radius(1))))


def f_gamma(p=3):
    return quadratic(q(gamma(p), p))


def fixed_point(f):
    from padicdyn.conjugacy import find_repelling_fixed_point

    return find_repelling_fixed_point(f, sphere_context(f).region)


# -- mu ----------------------------------------------------------------------------


def test_mu_examples():
    delta = Radius(Fraction(1, 3))
    for p in (3, 5, 7):
        assert mu_constant(2, delta, p) == delta
    assert mu_constant(2, delta, 2) == delta * Radius(1)
    assert mu_constant(4, ONE, 2) == Radius(1)
    assert mu_constant(4, ONE, 3) == Radius(Fraction(1, 2))
    with pytest.raises(ValueError):
        mu_constant(1, ONE, 3)


# -- certification ----------------------------------------------------------------------


def test_certify_F_two_disks():
    ctx = build_context(branch_map(3), two_disks(3))
    assert ctx.lam == Radius.power(1)
    assert ctx.delta == Radius(1)
    assert ctx.mu == Radius(1)
    assert ctx.bigM == ONE
    cert = ctx.certificate
    assert [sum(c["roots"] for c in m["counts"]) for m in cert["members"]] == [2, 2]
    for m in cert["members"]:
        radii = {e["radius"]["log_p"] for e in m["preimage_disks"]}
        assert radii == {"-2"}
        assert all(e["inside"] is not None for e in m["preimage_disks"])


def test_certify_f_gamma_sphere():
    f = f_gamma(3)
    assert certify_expansion(f, Sphere(3, Radius.power(1))) == Radius.power(1)
    ctx = sphere_context(f)
    assert (ctx.lam, ctx.delta, ctx.mu, ctx.bigM) == (Radius.power(1), ONE, ONE, Radius.power(1))
    assert certify_backward_invariance(ctx)["kind"] == "sphere"


def test_certify_c_minus_7_36():
    ctx = sphere_context(quadratic(q(Fraction(-7, 36), 3)))
    assert ctx.lam == Radius.power(1)
    assert ctx.region.radius == Radius.power(1)


def test_not_expanding():
    f = Polynomial.from_rationals([0, 0, 1], 5)
    # D(1, 1) holds the critical point 0; the smaller disk has none but |f'| = |2| = 1
    with pytest.raises(CriticalPointError):
        certify_expansion(f, UnionOfDisks((Disk(q(1, 5), ONE),)))
    with pytest.raises(NotExpandingError) as e:
        certify_expansion(f, UnionOfDisks((Disk(q(1, 5), Radius(1)),)))
    assert e.value.lhs == ONE and e.value.relation == ">"


def test_critical_point_in_disk():
    with pytest.raises(CriticalPointError):
        certify_expansion(branch_map(3), UnionOfDisks((Disk(q(0, 3), ONE),)))


def test_sphere_requires_p_not_dividing_degree():
    with pytest.raises(PreconditionError):
        certify_expansion(quadratic(q(Fraction(1, 4), 2)), Sphere(2, Radius.power(1)))
    # |c| <= 1 gives no escape
    with pytest.raises(PreconditionError):
        sphere_context(quadratic(q(2, 3)))


def test_single_disk_not_invariant():
    B = UnionOfDisks((Disk(q(0, 3), Radius(1)),))
    with pytest.raises(BackwardInvarianceError) as e:
        build_context(branch_map(3), B)
    esc = e.value.escaping_disk
    assert esc.center == q(1, 3)
    assert esc.radius == Radius(2)


def test_region_text():
    B = parse_region("disks: [(0, p^-1), (1, p^-1)]", 3, 64)
    assert B.radius == Radius(1) and len(B.disks) == 2
    S = parse_region("sphere: p^1", 3, 64)
    assert S.radius == Radius.power(1)


# -- preimages ------------------------------------------------------------------------------


def test_preimages_F():
    ctx = build_context(branch_map(3), two_disks(3))
    pairs = preimage_disks(ctx, Disk(q(0, 3), Radius(1)))
    centers = sorted(z.to_fraction() for z, _ in pairs)
    assert centers == [0, 1]
    assert all(R == Radius(2) for _, R in pairs)


def test_preimages_sphere_are_plus_minus():
    f = quadratic(q(Fraction(-7, 36), 3))
    ctx = sphere_context(f)
    w = fixed_point(f)
    pairs = preimage_disks(ctx, Disk(w, ctx.mu))
    zs = [z for z, _ in pairs]
    assert len(zs) == 2
    assert (zs[0] + zs[1]).is_zero()
    assert any((z - w).is_zero() for z in zs)
    for _, R in pairs:
        assert R == ctx.mu / w.norm()  # r / |2 z| = r / |c|^(1/2)


def test_preimage_radius_above_mu():
    ctx = build_context(branch_map(3), two_disks(3))
    with pytest.raises(PreconditionError) as e:
        preimage_disks(ctx, Disk(q(0, 3), ONE))
    assert e.value.relation == "<="


def test_preimage_center_outside_B():
    ctx = build_context(branch_map(3), two_disks(3))
    with pytest.raises(PreconditionError):
        preimage_disks(ctx, Disk(q(2, 3), Radius(1)))


def _preimage_instances():
    F = build_context(branch_map(3), two_disks(3))
    yield F, [Disk(q(0, 3), Radius(1)), Disk(q(1, 3), Radius(2)), Disk(q(4, 3), Radius(3))]
    f = quadratic(q(Fraction(-7, 36) + 3, 3))  # c = -7/36 + eps, |eps| = 1/3
    ctx = sphere_context(f)
    w = fixed_point(f)
    yield ctx, [Disk(w, ctx.mu), Disk(-w, Radius(2))]


@pytest.mark.parametrize("which", [0, 1])
def test_preimage_properties(which):
    ctx, targets = list(_preimage_instances())[which]
    f = ctx.map
    df = derivative(f)
    rng = random.Random(11 + which)
    for target in targets:
        pairs = preimage_disks(ctx, target)
        disks = [Disk(z, R) for z, R in pairs]
        assert len(disks) == ctx.degree
        for i, a in enumerate(disks):
            assert a.radius < target.radius
            for b in disks[i + 1 :]:
                assert a.is_disjoint(b)
        for z, R in pairs:
            D = Disk(z, R)
            slope = evaluate(df, z).norm()
            # dominance of the Taylor coefficients at the preimage center
            shifted = taylor_shift(f, z)
            for l in range(2, ctx.degree + 1):
                lnorm = Radius(vp(l, ctx.prime))
                assert lnorm * shifted.coeff(l).norm() * ctx.delta ** (l - 1) < slope
            for _ in range(20):
                x, y = D.sample(rng), D.sample(rng)
                if (x - y).is_zero():
                    continue
                assert (evaluate(f, x) - evaluate(f, y)).norm() == slope * (x - y).norm()
                assert target.contains(evaluate(f, x))
        # completeness: points mapping into the target sit in exactly one disk
        for z, _ in pairs:
            hits = 0
            while hits < 20:
                x = Disk(z, target.radius).sample(rng)
                if target.contains(evaluate(f, x)):
                    hits += 1
                    assert sum(d.contains(x) for d in disks) == 1


# -- tau ---------------------------------------------------------------------------------


def test_tau_examples():
    ctx = sphere_context(f_gamma(3))
    assert tau_threshold(0, ctx) == ctx.mu
    assert tau_threshold(2, ctx) == ctx.mu * Radius(2)
    assert [tau_threshold(i, ctx) for i in range(3)] == [ONE, Radius(1), Radius(2)]
    F = build_context(branch_map(3), two_disks(3))
    taus = [tau_threshold(i, F) for i in range(3)]
    assert taus == sorted(taus, reverse=True)
    with pytest.raises(ValueError):
        tau_threshold(3, F)


# -- S membership and perturbations -----------------------------------------------------------


def test_S_membership_examples():
    for ctx in (build_context(branch_map(3), two_disks(3)), sphere_context(f_gamma(3))):
        assert verify_S_membership(ctx.map, ctx)
        for i in range(ctx.degree + 1):
            # the smallest power of p strictly inside tau(i)
            k = math.floor(tau_threshold(i, ctx).exponent) + 1
            eps = q(Fraction(ctx.prime) ** k, ctx.prime)
            assert eps.norm() < tau_threshold(i, ctx)
            assert verify_S_membership(perturb(ctx.map, i, eps), ctx)


def test_S_membership_false_when_preimage_escapes():
    ctx = build_context(branch_map(3), two_disks(3))
    # F - 2/3 sends the roots of z^2 - z - 2 = (z - 2)(z + 1), both of residue 2, to 0
    g = perturb(ctx.map, 0, q(Fraction(-2, 3), 3))
    assert not verify_S_membership(g, ctx)
    with pytest.raises(BackwardInvarianceError):
        check_S_membership(g, ctx)


def test_S_membership_degree_mismatch():
    ctx = build_context(branch_map(3), two_disks(3))
    with pytest.raises(PreconditionError):
        check_S_membership(perturb(ctx.map, 3, q(1, 3)), ctx)


def _random_eps(rng, p, tau):
    """A random rational with ``|eps| < tau``."""
    k = math.floor(tau.exponent) + 1 + rng.randrange(0, 4)
    u = Fraction(rng.choice([x for x in range(1, 5 * p) if x % p]), rng.choice([1, 2, 4]))
    return u * Fraction(p) ** k


@pytest.mark.parametrize("which", ["F", "sphere"])
def test_small_perturbation_properties(which):
    ctx = build_context(branch_map(3), two_disks(3)) if which == "F" else sphere_context(f_gamma(3))
    f = ctx.map
    p = ctx.prime
    rng = random.Random(5)
    df = derivative(f)
    for i in range(ctx.degree + 1):
        tau = tau_threshold(i, ctx)
        for _ in range(5):
            eps = q(_random_eps(rng, p, tau), p)
            assert eps.norm() < tau
            g = perturb(f, i, eps)
            dg = derivative(g)
            check_S_membership(g, ctx)
            assert drift_bound(f, g, ctx.region) <= ctx.mu
            for _ in range(20):
                z = ctx.region.sample(rng)
                assert evaluate(dg, z).norm() == evaluate(df, z).norm()
                assert (evaluate(g, z) - evaluate(f, z)).norm_bound() <= ctx.mu


def test_drift_bound_values():
    ctx = sphere_context(f_gamma(3))
    f = ctx.map
    # identical coefficients only cancel down to the working precision
    assert drift_bound(f, f, ctx.region) <= Radius(60)
    g = perturb(f, 1, q(Fraction(1, 3), 3))
    # |z / 3| on |z| = 3 is 9
    assert drift_bound(f, g, ctx.region) == Radius.power(2)
