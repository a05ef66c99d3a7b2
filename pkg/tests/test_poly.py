import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    brute_min_valuation_term,
    known_roots_coefficients,
    known_roots_count,
    rational_sqrt_exists,
    reduction_degree_count,
    residue_lifting_count,
    vp_frac,
)
from padicdyn.disk import Disk
from padicdyn.errors import PadicError, PrecisionError, RootOutsideQpError
from padicdyn.padic import ONE, PadicNumber, Radius
from padicdyn.poly import (
    Polynomial,
    all_roots_in_qp,
    derivative,
    dominant_index,
    evaluate,
    gauss_norm,
    isolate_roots,
    newton_polygon_data,
    newton_root_count,
    parse_polynomial,
    parse_rational_polynomial,
    perturb,
    root_norms,
    taylor_shift,
    unique_root_in_disk,
    z_power_plus_c,
)


def q(r, p, n=64):
    return PadicNumber.from_rational(r, p, n)


def poly(cs, p, n=64):
    return Polynomial.from_rationals([Fraction(c) for c in cs], p, n)


def disk(c, m, p, n=64):
    return Disk(q(c, p, n), Radius(m))


# -- evaluation and small operations --------------------------------------------


def test_evaluate_examples():
    c = q(Fraction(-7, 36), 3)
    f = z_power_plus_c(2, c)
    assert evaluate(f, q(0, 3)) == c
    F = poly([0, Fraction(-1, 3), Fraction(1, 3)], 3)
    assert evaluate(F, q(4, 3)) == q(4, 3)


def test_evaluate_fixed_point_residual():
    p = 3
    c = Fraction(-7, 36)
    g = poly([c, -1, 1], p)  # z^2 - z + c
    roots = all_roots_in_qp(g, Disk(q(0, p), Radius.power(1)))
    assert len(roots) == 2
    for w in roots:
        assert evaluate(g, w).is_zero()


def test_derivative_and_perturb():
    p = 5
    c = Fraction(3, 7)
    f = poly([c, 0, 1], p)
    assert derivative(f) == poly([0, 2], p)
    assert perturb(f, 1, q(0, p)) == f
    assert perturb(f, 0, q(2, p)) == poly([c + 2, 0, 1], p)
    assert perturb(f, 3, q(1, p)).degree == 3


def test_perturb_index_range():
    with pytest.raises(ValueError):
        perturb(poly([1, 1], 3), -1, q(1, 3))


def test_leading_inexact_zero_rejected():
    x = q(Fraction(1, 7), 3, 10)
    with pytest.raises(PrecisionError):
        Polynomial([q(1, 3), x - x], 3)


def test_parse_polynomial_text():
    assert parse_rational_polynomial("z^2 - z + -7/36", 3) == [Fraction(-7, 36), -1, 1]
    assert parse_rational_polynomial("(z^2 - z)/p", 5) == [0, Fraction(-1, 5), Fraction(1, 5)]
    assert parse_rational_polynomial("2*(z+1)^2", 3) == [2, 4, 2]
    f = parse_polynomial("z^2 + 1.2", 3)
    assert f.coeff(0) == q(7, 3)  # digits run from p^0 upward
    with pytest.raises(ValueError):
        parse_rational_polynomial("z^", 3)


def test_parse_round_trip():
    f = poly([Fraction(-7, 36), 0, 1], 3)
    assert parse_polynomial(f.to_text(), 3) == f


# -- taylor shift ------------------------------------------------------------------


def test_taylor_shift_examples():
    p = 3
    f = poly([0, 0, 1], p)
    assert taylor_shift(f, q(1, p)) == poly([1, 2, 1], p)
    g = poly([Fraction(1, 3), 5, 0, 7], p)
    assert taylor_shift(g, q(0, p)) == g


def test_taylor_shift_no_factorial_loss():
    # coefficient k is f^(k)(z0)/k!; for z^3 at 0 with p = 3 the z^3 term stays a unit
    f = poly([0, 0, 0, 1], 3)
    g = taylor_shift(f, q(2, 3))
    assert g.coeff(3) == q(1, 3)
    assert g.coeff(2) == q(6, 3)


coeff_st = st.builds(Fraction, st.integers(-49, 49), st.integers(1, 49))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(coeff_st, min_size=1, max_size=5), coeff_st, coeff_st)
def test_taylor_shift_compose_and_round_trip(p, cs, z0, z):
    if cs[-1] == 0:
        cs[-1] = Fraction(1)
    f = poly(cs, p)
    g = taylor_shift(f, q(z0, p))
    assert evaluate(g, q(z - z0, p)) == q(sum(c * z**k for k, c in enumerate(cs)), p) or evaluate(f, q(z, p)).is_zero()
    back = taylor_shift(g, q(-z0, p))
    for k in range(len(cs)):
        assert back.coeff(k) == f.coeff(k) or (back.coeff(k) - f.coeff(k)).is_zero()


# -- newton counts -------------------------------------------------------------------


def test_newton_count_examples():
    for p in (3, 5, 7):
        assert newton_root_count(poly([0, 1], p), disk(0, 0, p)) == 1
        for w in (0, 1, Fraction(1, 2), p):
            f = poly([-p * Fraction(w), -1, 1], p)
            assert newton_root_count(f, disk(0, 0, p)) == 2
            assert newton_root_count(f, disk(0, 1, p)) == 1


@pytest.mark.parametrize("d,p", [(2, 3), (3, 5), (4, 3), (2, 7)])
def test_newton_count_fixed_point_polynomial(d, p):
    c = Fraction(1, p**d) + 2  # |c| = p^d, so |c|^(1/d) = p
    f = poly([c, -1] + [0] * (d - 2) + [1], p)
    assert newton_root_count(f, Disk(q(0, p), Radius.power(1))) == d
    assert newton_root_count(f, Disk(q(0, p), ONE)) == 0
    assert root_norms(f) == [(Radius.power(1), d)]


def test_newton_polygon_data_and_undecidable():
    p = 3
    f = poly([Fraction(-7, 36), -1, 1], p)
    data = newton_polygon_data(f, Disk(q(0, p), Radius.power(1)))
    assert data == [(0, Radius.power(2)), (1, Radius.power(1)), (2, Radius.power(2))]
    # an inexact zero coefficient leaves the comparison open
    x = q(Fraction(1, 7), p, 6)
    with pytest.raises(PrecisionError):
        dominant_index([x - x, q(3**10, p)], Radius(0))


def test_newton_data_matches_brute_expansion():
    rng = random.Random(3)
    for _ in range(50):
        p = rng.choice([3, 5, 7])
        cs = [Fraction(rng.randrange(-20, 21), rng.randrange(1, 20)) for _ in range(4)] + [Fraction(1)]
        z0 = Fraction(rng.randrange(-9, 10), rng.randrange(1, 9))
        m = rng.randrange(-2, 4)
        best, shifted = brute_min_valuation_term(cs, z0, Fraction(m), p)
        data = newton_polygon_data(poly(cs, p), disk(z0, m, p))
        got = min(r.exponent for _, r in data if not r.is_zero)
        assert got == best


@pytest.mark.parametrize("seed", range(20))
def test_zero_count_means_constant_norm(seed):
    rng = random.Random(seed)
    p = rng.choice([3, 5, 7])
    while True:
        cs = [Fraction(rng.randrange(-30, 31), rng.randrange(1, 30)) for _ in range(rng.randrange(2, 5))]
        cs.append(Fraction(rng.choice([1, -1, 2])))
        D = disk(Fraction(rng.randrange(-9, 10)), rng.randrange(0, 3), p)
        f = poly(cs, p)
        if newton_root_count(f, D) == 0:
            break
    n0 = evaluate(f, D.center).norm()
    for _ in range(20):
        z = D.sample(rng)
        assert evaluate(f, z).norm() == n0
    assert gauss_norm(f, D) == n0


# -- oracle equivalence ---------------------------------------------------------------

rational_st = st.builds(Fraction, st.integers(-49, 49), st.integers(1, 49))


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from([3, 5, 7]),
    st.lists(rational_st, min_size=1, max_size=4),
    rational_st.filter(bool),
    rational_st,
    st.integers(0, 3),
)
def test_newton_count_matches_oracles(p, lower, lead, z0, m):
    cs = lower + [lead]
    n = newton_root_count(poly(cs, p), disk(z0, m, p))
    assert n == reduction_degree_count(cs, z0, m, p)
    qp = residue_lifting_count(cs, z0, m, p)
    assert qp <= n
    # when every root of f is in Q_p the Q_p count is the full count
    if residue_lifting_count(cs, Fraction(0), -60, p) == len(cs) - 1:
        assert qp == n


@st.composite
def split_family(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    roots = draw(
        st.lists(
            st.builds(
                lambda a, den, e: Fraction(a, den) * Fraction(p) ** e,
                st.integers(-30, 30),
                st.sampled_from([1, 2, p, p * p]),
                st.integers(0, 3),
            ),
            min_size=1,
            max_size=4,
        )
    )
    return p, roots


@settings(max_examples=200, deadline=None)
@given(split_family(), rational_st, st.integers(-1, 3))
def test_newton_count_matches_residue_lifting_when_split(pr, z0, m):
    p, roots = pr
    cs = known_roots_coefficients(roots, [], p, Fraction(3, 2))
    want = known_roots_count(roots, [], z0, m, p)
    assert residue_lifting_count(cs, z0, m, p) == want
    assert newton_root_count(poly(cs, p), disk(z0, m, p)) == want


@st.composite
def pair_family(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    pairs = []
    for _ in range(draw(st.integers(1, 2))):
        k = draw(st.integers(-2, 4))
        b = Fraction(draw(st.sampled_from([u for u in range(1, 3 * p) if u % p])))
        if k % 2 == 0 and rational_sqrt_exists(b, p):
            k += 1
        a = Fraction(draw(st.integers(-20, 20)), draw(st.sampled_from([1, p])))
        pairs.append((a, b, k))
    return p, pairs


@settings(max_examples=200, deadline=None)
@given(pair_family(), st.lists(st.builds(Fraction, st.integers(-20, 20)), max_size=2), st.integers(-20, 20), st.integers(-2, 3))
def test_newton_count_sees_roots_outside_qp(pp, roots, z0, m):
    p, pairs = pp
    cs = known_roots_coefficients(roots, pairs, p)
    want = known_roots_count(roots, pairs, Fraction(z0), m, p)
    assert newton_root_count(poly(cs, p), disk(z0, m, p)) == want


# -- unique roots ------------------------------------------------------------------


def test_unique_root_examples():
    p = 3
    f0 = poly([0, -1, 1], p)
    assert unique_root_in_disk(f0, disk(0, 1, p)).is_zero()
    f1 = poly([-p, -1, 1], p)
    r = unique_root_in_disk(f1, disk(1, 1, p))
    assert r.residue() == 1
    assert evaluate(f1, r).is_zero()


def test_unique_root_count_mismatch():
    with pytest.raises(PadicError):
        unique_root_in_disk(poly([-3, -1, 1], 3), disk(0, 0, 3))


def test_unique_root_outside_qp():
    # z^2 - 2 at p = 3: two roots of norm 1 in an unramified extension
    f = poly([-2, 0, 1], 3)
    assert newton_root_count(f, disk(0, 0, 3)) == 2
    with pytest.raises(RootOutsideQpError):
        all_roots_in_qp(f, disk(0, 0, 3))


def test_fixed_point_polynomial_root_norm():
    p, d = 3, 2
    c = Fraction(-7, 36)
    f = poly([c, -1, 1], p)
    roots = isolate_roots(f, Disk(q(0, p), Radius.power(1)))
    assert len(roots) == d
    for w in roots:
        assert w.norm() == Radius.power(1)  # |c|^(1/d) = 3


@settings(max_examples=100, deadline=None)
@given(split_family(), st.integers(0, 3))
def test_unique_root_properties(pr, extra):
    p, roots = pr
    roots = sorted(set(roots))
    cs = known_roots_coefficients(roots, [], p)
    f = poly(cs, p)
    for r in roots:
        # the largest disk around r holding no other root
        others = [vp_frac(r - s, p) for s in roots if s != r]
        m = max(others) + 1 if others else 0
        D = disk(r + Fraction(p) ** (m + extra), m, p)
        if newton_root_count(f, D) != 1:
            continue
        z = unique_root_in_disk(f, D)
        assert D.contains(z)
        assert evaluate(f, z).is_zero()
        assert z == q(r, p) or (z - q(r, p)).is_zero()
        # still exactly one root after shrinking to the Newton basin
        dz = evaluate(derivative(f), z).norm()
        basin = Disk(z, min(D.radius, dz))
        assert newton_root_count(f, basin) == 1
