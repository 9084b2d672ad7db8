import random

import pytest
import sympy

from conftest import F_32003, Q, affine, projective
from src.algebra import (
    AFFINE_VARIABLES,
    IDENTITY,
    VARIABLES,
    X,
    Y,
    Z,
    LinearSystem,
    apply_linear_change,
    constant,
    dehomogenize,
    differentiate,
    field_element,
    format_polynomial,
    gcd,
    gcd_many,
    homogenize,
    monomials_of_degree,
    nullspace,
    parse_polynomial,
    random_linear_change,
    random_polynomial,
    variable,
)
from src.corpus import builtin_corpus
from src.errors import LeafboundError, ParseError
from src.models import ErrorCode, FieldSpec


def test_parse_homogeneous_quartic() -> None:
    F = projective("x^3*y - x*y^3")
    assert F.total_degree() == 4
    assert F.is_homogeneous
    assert F.coeff_monomial((1, 3, 0)) == -1


def test_parse_rational_literal() -> None:
    p = projective("1/2*x + y")
    assert p.coeff_monomial((1, 0, 0)) == sympy.Rational(1, 2)


def test_parse_reduces_coefficients_mod_p() -> None:
    p = parse_polynomial("32004*x + y", F_32003)
    assert p == parse_polynomial("x + y", F_32003)


def test_parse_rejects_denominator_divisible_by_p() -> None:
    with pytest.raises(ParseError) as info:
        parse_polynomial("1/3*x", FieldSpec.prime(3))
    assert info.value.code == ErrorCode.UNREPRESENTABLE_COEFFICIENT


def test_parse_rejects_implicit_multiplication() -> None:
    with pytest.raises(ParseError) as info:
        projective("2x")
    assert info.value.position == 1


def test_parse_rejects_unknown_variable() -> None:
    with pytest.raises(ParseError) as info:
        projective("x + w")
    assert info.value.code == ErrorCode.UNKNOWN_VARIABLE
    assert info.value.position == 4


def test_parse_rejects_z_in_affine_generators() -> None:
    with pytest.raises(ParseError) as info:
        affine("x + z")
    assert info.value.code == ErrorCode.UNKNOWN_VARIABLE


@pytest.mark.parametrize("text", ["x^", "(x + y", "x +", "x / y", ""])
def test_parse_errors(text: str) -> None:
    with pytest.raises(ParseError):
        projective(text)


def test_format_is_canonical() -> None:
    p = projective("1/2*z^2 + x^2 - 2*y*x")
    assert format_polynomial(p) == "x^2 - 2*x*y + 1/2*z^2"
    assert format_polynomial(projective("0")) == "0"
    assert format_polynomial(projective("-3")) == "-3"


def test_homogenize_and_dehomogenize() -> None:
    f = affine("x^2 + y")
    F = homogenize(f, Z, 2)
    assert F == projective("x^2 + y*z")
    assert dehomogenize(F, Z) == f


def test_homogenize_below_degree_fails() -> None:
    with pytest.raises(LeafboundError) as info:
        homogenize(affine("x^3 + y"), Z, 2)
    assert info.value.code == ErrorCode.DEGREE_TOO_LOW


def test_derivative_in_characteristic_p() -> None:
    p = parse_polynomial("x^3 + x*y", FieldSpec.prime(3))
    assert differentiate(p, X) == parse_polynomial("y", FieldSpec.prime(3))


def test_gcd_many_ignores_zeros() -> None:
    g = gcd_many([projective("x^2*y"), projective("0"), projective("x*y^2")])
    assert g == projective("x*y")


def test_linear_change() -> None:
    p = projective("x^2 + z")
    assert apply_linear_change(p, IDENTITY) == p
    swap = ((0, 1, 0), (1, 0, 0), (0, 0, 1))
    assert apply_linear_change(p, swap) == projective("y^2 + z")
    shear = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    assert apply_linear_change(projective("x"), shear) == projective("x + y")


def test_random_linear_change_is_invertible_mod_p() -> None:
    fs = FieldSpec.prime(3)
    for seed in range(20):
        matrix = random_linear_change(random.Random(seed), fs, 3)
        det = int(sympy.Matrix(matrix).det())
        assert det % 3 != 0


def test_random_polynomial_is_seeded() -> None:
    first = random_polynomial(random.Random(7), Q, 3)
    second = random_polynomial(random.Random(7), Q, 3)
    assert first == second
    assert first.is_homogeneous
    assert first.coeff_monomial((3, 0, 0)) != 0


def test_random_affine_polynomial() -> None:
    p = random_polynomial(random.Random(3), Q, 2, AFFINE_VARIABLES, homogeneous=False)
    assert p.gens == AFFINE_VARIABLES
    assert p.total_degree() == 2


def test_monomials_of_degree() -> None:
    monomials = list(monomials_of_degree(3, 2))
    assert len(monomials) == 6
    assert monomials[0] == (2, 0, 0)
    assert monomials[-1] == (0, 0, 2)


def test_nullspace_over_rationals() -> None:
    basis = nullspace(LinearSystem([[1, 1, 0], [0, 0, 1]], Q))
    assert len(basis) == 1
    assert basis[0] == [-1, 1, 0]


def test_nullspace_full_rank_is_empty() -> None:
    assert nullspace(LinearSystem([[1, 0], [0, 1]], Q)) == []


def test_nullspace_over_prime_field() -> None:
    basis = nullspace(LinearSystem([[1, 2]], FieldSpec.prime(5)))
    assert len(basis) == 1
    assert basis[0][0] == 3
    assert basis[0][1] == 1


def test_nullspace_of_empty_system() -> None:
    basis = nullspace(LinearSystem([], Q, labels=["a", "b"]))
    assert len(basis) == 2



# ==================== Properties ====================

FIELDS = [Q, F_32003]


def random_triples(field_spec: FieldSpec, count: int, degree: int = 2):
    rng = random.Random(field_spec.characteristic + count)
    for _ in range(count):
        yield tuple(
            random_polynomial(rng, field_spec, rng.randint(0, degree), VARIABLES, homogeneous=False)
            for _ in range(3)
        )


@pytest.mark.parametrize("field_spec", FIELDS, ids=lambda f: f.label)
def test_ring_axioms(field_spec: FieldSpec) -> None:
    zero, one = constant(0, field_spec), constant(1, field_spec)
    for a, b, c in random_triples(field_spec, 100):
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + zero == a
        assert a * one == a
        assert (a - a).is_zero


@pytest.mark.parametrize("field_spec", FIELDS, ids=lambda f: f.label)
def test_derivative_is_a_derivation(field_spec: FieldSpec) -> None:
    for a, b, _ in random_triples(field_spec, 30):
        for var in VARIABLES:
            assert differentiate(a * b, var) == differentiate(a, var) * b + a * differentiate(b, var)


@pytest.mark.parametrize("field_spec", FIELDS, ids=lambda f: f.label)
@pytest.mark.parametrize("degree", [1, 2, 3, 5])
def test_euler_relation(field_spec: FieldSpec, degree: int) -> None:
    rng = random.Random(degree)
    for _ in range(5):
        P = random_polynomial(rng, field_spec, degree)
        x, y, z = (variable(v, field_spec) for v in VARIABLES)
        euler = x * differentiate(P, X) + y * differentiate(P, Y) + z * differentiate(P, Z)
        assert euler == P.mul_ground(field_element(field_spec, degree))


@pytest.mark.parametrize("field_spec", FIELDS, ids=lambda f: f.label)
def test_gcd_divides_both_inputs(field_spec: FieldSpec) -> None:
    for a, b, c in random_triples(field_spec, 15, degree=1):
        if c.is_zero:
            continue
        p, q = a * c, b * c
        g = gcd(p, q)
        if g.is_zero:
            assert p.is_zero and q.is_zero
            continue
        assert p.rem(g).is_zero
        assert q.rem(g).is_zero
        assert g.rem(c).is_zero


def test_printed_corpus_curves_parse_back() -> None:
    for entry in builtin_corpus():
        F = entry.plane_curve().F
        assert parse_polynomial(format_polynomial(F), entry.field) == F
