"""Sparse multivariate polynomial ring: construction, arithmetic, text format."""

import math

import numpy as np
import pytest

from polynet import (
    AffineForm,
    DimensionError,
    MultiPoly,
    ParseError,
    UniPoly,
    UsageError,
    affine_power,
    apply_univariate,
    apply_univariate_to_affine,
    coefficient,
    poly_add,
    poly_eval,
    poly_from_text,
    poly_mul,
    poly_pow,
    poly_to_text,
    truncate_degree,
)


def random_poly(rng, nvars, max_degree=3, max_terms=6):
    terms = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        e = tuple(int(v) for v in rng.integers(0, max_degree + 1, nvars))
        terms[e] = float(rng.uniform(-2.0, 2.0))
    return MultiPoly(nvars, terms)


def coeff_gap(p, q):
    keys = set(p.terms) | set(q.terms)
    return max((abs(coefficient(p, e) - coefficient(q, e)) for e in keys), default=0.0)


def test_constructors():
    z = MultiPoly.zero(3)
    assert z.nvars == 3 and z.is_zero() and dict(z.terms) == {}

    c = MultiPoly.constant(2, 4.5)
    assert dict(c.terms) == {(0, 0): 4.5}
    assert MultiPoly.constant(2, 0.0).is_zero()

    x2 = MultiPoly.variable(3, 1)
    assert dict(x2.terms) == {(0, 1, 0): 1.0}
    assert x2.degree() == 1


def test_constructor_validation():
    with pytest.raises(DimensionError, match="at least 1"):
        MultiPoly(0)
    with pytest.raises(DimensionError, match="length 1, expected 2"):
        MultiPoly(2, {(1,): 1.0})
    with pytest.raises(DimensionError, match="out of range"):
        MultiPoly.variable(2, 5)
    with pytest.raises(DimensionError, match="out of range"):
        MultiPoly.variable(2, -1)


def test_graded_lex_iteration_order():
    p = MultiPoly(2, {(2, 0): 1.0, (0, 0): 1.0, (1, 1): 1.0, (0, 2): 1.0, (1, 0): 1.0, (0, 1): 1.0})
    exps = [e for e, _ in p.items_grlex()]
    assert exps == sorted(exps, key=lambda e: (sum(e), e))
    assert exps[0] == (0, 0) and exps[-1] == (2, 0)


def test_ring_identities_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        nvars = int(rng.integers(1, 4))
        a = random_poly(rng, nvars)
        b = random_poly(rng, nvars)
        c = random_poly(rng, nvars)
        assert coeff_gap((a + b) + c, a + (b + c)) <= 1e-12
        assert coeff_gap(a * b, b * a) <= 1e-12
        assert coeff_gap(a * (b + c), a * b + a * c) <= 1e-12
        assert coeff_gap(a + (-a), MultiPoly.zero(nvars)) == 0.0
        assert coeff_gap(MultiPoly.constant(nvars, 1.0) * a, a) == 0.0
        assert coeff_gap(2.0 * a, a + a) <= 1e-12


def test_function_aliases_match_operators():
    rng = np.random.default_rng(3)
    a = random_poly(rng, 2)
    b = random_poly(rng, 2)
    assert coeff_gap(poly_add(a, b), a + b) == 0.0
    assert coeff_gap(poly_mul(a, b), a * b) == 0.0


def test_eval_is_a_ring_homomorphism():
    rng = np.random.default_rng(17)
    for _ in range(100):
        nvars = int(rng.integers(1, 4))
        a = random_poly(rng, nvars)
        b = random_poly(rng, nvars)
        x = rng.uniform(-1.5, 1.5, nvars)
        va, vb = poly_eval(a, x), poly_eval(b, x)
        assert abs(poly_eval(a + b, x) - (va + vb)) <= 1e-10 * (1.0 + abs(va + vb))
        assert abs(poly_eval(a * b, x) - va * vb) <= 1e-10 * (1.0 + abs(va * vb))


def test_eval_plain_monomials():
    p = MultiPoly(2, {(2, 1): 3.0, (0, 0): -1.0})
    assert poly_eval(p, (2.0, 5.0)) == 3.0 * 4.0 * 5.0 - 1.0
    with pytest.raises(DimensionError, match="length 1, expected 2"):
        poly_eval(p, [1.0])


def test_pow_matches_repeated_multiplication():
    rng = np.random.default_rng(23)
    for _ in range(20):
        p = random_poly(rng, 2, max_degree=2, max_terms=4)
        acc = MultiPoly.constant(2, 1.0)
        for k in range(5):
            assert coeff_gap(poly_pow(p, k), acc) <= 1e-10
            acc = acc * p
    with pytest.raises(UsageError, match="non-negative"):
        poly_pow(p, -1)


def test_affine_form_basics():
    a = AffineForm(1.0, (2.0, 3.0))
    assert a.nvars == 2
    assert a.value((1.0, 1.0)) == 6.0
    assert dict(a.as_poly().terms) == {(0, 0): 1.0, (1, 0): 2.0, (0, 1): 3.0}


def test_affine_power_matches_direct_power():
    rng = np.random.default_rng(5)
    for _ in range(30):
        nvars = int(rng.integers(1, 4))
        a = AffineForm(float(rng.uniform(-2, 2)), tuple(rng.uniform(-2, 2, nvars)))
        k = int(rng.integers(0, 5))
        assert coeff_gap(affine_power(a, k), poly_pow(a.as_poly(), k)) <= 1e-10
    with pytest.raises(UsageError, match="non-negative"):
        affine_power(a, -2)


def test_hand_expansions():
    one = MultiPoly.constant(2, 1.0)
    x1 = MultiPoly.variable(2, 0)
    x2 = MultiPoly.variable(2, 1)

    # (1 + x1)(1 - x1) = 1 - x1^2
    assert dict(((one + x1) * (one - x1)).terms) == {(0, 0): 1.0, (2, 0): -1.0}

    # (x1 - x2)^2 = x1^2 - 2 x1 x2 + x2^2
    sq = affine_power(AffineForm(0.0, (1.0, -1.0)), 2)
    assert dict(sq.terms) == {(2, 0): 1.0, (1, 1): -2.0, (0, 2): 1.0}

    # (x1 + x2 - 1)^2 expanded
    sq2 = affine_power(AffineForm(-1.0, (1.0, 1.0)), 2)
    assert dict(sq2.terms) == {
        (2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0,
        (1, 0): -2.0, (0, 1): -2.0, (0, 0): 1.0,
    }
    assert coeff_gap(sq2, (x1 + x2 - one) * (x1 + x2 - one)) <= 1e-12


def test_apply_univariate_matches_horner_by_hand():
    rng = np.random.default_rng(29)
    for _ in range(20):
        phi = UniPoly(tuple(rng.uniform(-1, 1, int(rng.integers(1, 5)))))
        p = random_poly(rng, 2, max_degree=2, max_terms=3)
        direct = MultiPoly.zero(2)
        for j, cj in enumerate(phi.coeffs):
            direct = direct + cj * poly_pow(p, j)
        assert coeff_gap(apply_univariate(phi, p), direct) <= 1e-10


def test_apply_univariate_to_affine_consistency():
    phi = UniPoly((0.5, 0.0, -0.25, 1.0))
    a = AffineForm(0.3, (1.0, -2.0))
    assert coeff_gap(apply_univariate_to_affine(phi, a), apply_univariate(phi, a.as_poly())) <= 1e-12


def test_truncate_degree():
    p = MultiPoly(2, {(0, 0): 1.0, (1, 0): 2.0, (2, 1): 3.0, (0, 4): 4.0})
    t = truncate_degree(p, 2)
    assert dict(t.terms) == {(0, 0): 1.0, (1, 0): 2.0}
    assert coeff_gap(truncate_degree(p, 10), p) == 0.0
    assert truncate_degree(p, 0).degree() == 0
    with pytest.raises(UsageError, match="non-negative"):
        truncate_degree(p, -1)


def test_coefficient_lookup():
    p = MultiPoly(2, {(1, 1): 2.5})
    assert coefficient(p, (1, 1)) == 2.5
    assert coefficient(p, (3, 0)) == 0.0
    with pytest.raises(DimensionError, match="length 1, expected 2"):
        coefficient(p, (1,))


def test_mixed_variable_counts_rejected():
    a = MultiPoly(2, {(1, 0): 1.0})
    b = MultiPoly(3, {(1, 0, 0): 1.0})
    with pytest.raises(DimensionError, match="variable counts differ"):
        a + b
    with pytest.raises(DimensionError, match="variable counts differ"):
        a * b


def test_exact_zero_terms_are_dropped():
    a = MultiPoly(2, {(1, 0): 1.0, (0, 1): -0.5})
    diff = a - a
    assert dict(diff.terms) == {}
    assert diff.is_zero()
    # explicit zero coefficients never enter the term map
    assert dict(MultiPoly(2, {(1, 0): 0.0}).terms) == {}


def test_text_round_trip_is_bit_identical():
    rng = np.random.default_rng(41)
    for _ in range(50):
        nvars = int(rng.integers(1, 5))
        p = random_poly(rng, nvars)
        q = poly_from_text(poly_to_text(p))
        assert q.nvars == p.nvars
        assert dict(q.terms) == dict(p.terms)
    # awkward magnitudes survive the round trip exactly
    p = MultiPoly(1, {(0,): 0.1, (3,): -1.0 / 3.0, (7,): 1e-300, (2,): math.pi})
    assert dict(poly_from_text(poly_to_text(p)).terms) == dict(p.terms)


def test_text_parse_errors():
    with pytest.raises(ParseError, match="line 1"):
        poly_from_text("nope nvars=2\n1 0 0\n")
    with pytest.raises(ParseError, match="line 2: expected 3 fields, got 2"):
        poly_from_text("poly nvars=2\n1 0\n")
    with pytest.raises(ParseError, match="line 3: duplicate monomial"):
        poly_from_text("poly nvars=2\n1 0 0\n2 0 0\n")
    with pytest.raises(ParseError, match="line 2: non-numeric"):
        poly_from_text("poly nvars=2\nx 0 0\n")
    with pytest.raises(ParseError, match="line 2: negative exponent"):
        poly_from_text("poly nvars=2\n1 0 -1\n")
