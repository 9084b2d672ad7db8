import random
from typing import List, Tuple

import pytest
from sympy import Poly

from conftest import Q, affine, projective
from src.algebra import AFFINE_VARIABLES, VARIABLES, X, Y, random_polynomial, variable
from src.curves import tjurina_ideal
from src.errors import ComputationError, LeafboundError
from src.groebner import (
    GREVLEX,
    LEX,
    Ideal,
    colength,
    dump_basis,
    eliminate,
    groebner_basis,
    hilbert_function,
    ideal_quotient,
    intersect,
    irrelevant_ideal,
    krull_dimension,
    normal_form,
    oracle_colength,
    regularity,
    saturate,
    unit_ideal,
)
from src.models import ErrorCode, FieldSpec


def affine_ideal(*texts: str) -> Ideal:
    return Ideal.of([affine(t) for t in texts], Q, AFFINE_VARIABLES)


def projective_ideal(*texts: str) -> Ideal:
    return Ideal.of([projective(t) for t in texts], Q, VARIABLES)


def test_zero_generators_are_dropped() -> None:
    I = Ideal.of([affine("0"), affine("x")], Q, AFFINE_VARIABLES)
    assert len(I.generators) == 1


def test_mixed_fields_are_rejected() -> None:
    with pytest.raises(LeafboundError) as info:
        Ideal.of([affine("x"), affine("y", FieldSpec.prime(7))], Q, AFFINE_VARIABLES)
    assert info.value.code == ErrorCode.FIELD_MISMATCH


@pytest.mark.parametrize("generators, expected", [
    (("x", "y"), 1),
    (("x^2", "y"), 2),
    (("x^2", "x*y", "y^2"), 3),
    (("x^3", "y^2"), 6),
    (("x*y",), None),
    (("1",), 0),
])
def test_affine_colength(generators, expected) -> None:
    assert colength(affine_ideal(*generators)) == expected


def test_unit_ideal() -> None:
    I = unit_ideal(AFFINE_VARIABLES, Q)
    assert I.is_unit()
    assert krull_dimension(I) == -1


def test_krull_dimension() -> None:
    assert krull_dimension(affine_ideal("x")) == 1
    assert krull_dimension(affine_ideal("x", "y")) == 0
    assert krull_dimension(projective_ideal("x", "y")) == 1


def test_normal_form_and_membership() -> None:
    I = affine_ideal("x^2 - y")
    assert normal_form(affine("x^2"), I) == affine("y")
    assert normal_form(affine("x^3 - x*y"), I).is_zero
    assert affine_ideal("x", "y").contains(affine_ideal("x^2", "x*y"))
    assert not affine_ideal("x^2", "x*y").contains(affine_ideal("x"))


def test_dump_basis_is_reduced() -> None:
    I = affine_ideal("x^2 - y", "x^2 + y")
    assert sorted(dump_basis(I).splitlines()) == ["x^2", "y"]


def test_intersection_and_quotient() -> None:
    assert intersect(affine_ideal("x"), affine_ideal("y")).same_as(affine_ideal("x*y"))
    assert ideal_quotient(affine_ideal("x*y"), affine_ideal("x")).same_as(affine_ideal("y"))


def test_saturation_by_principal_ideal() -> None:
    I = affine_ideal("x^2", "x*y")
    assert saturate(I, affine_ideal("x")).is_unit()
    assert saturate(I, affine_ideal("y")).same_as(affine_ideal("x"))


def test_saturation_removes_embedded_point() -> None:
    I = projective_ideal("x^2", "x*y", "x*z")
    result = saturate(I, irrelevant_ideal(VARIABLES, Q))
    assert result.same_as(projective_ideal("x"))
    assert result.saturated
    assert not I.saturated


def test_saturation_by_unit_ideal_keeps_input() -> None:
    I = affine_ideal("x^2", "y")
    assert saturate(I, unit_ideal(AFFINE_VARIABLES, Q)).same_as(I)


def test_singular_scheme_of_four_lines() -> None:
    J = projective_ideal("3*x^2*y - y^3", "x^3 - 3*x*y^2")
    S = saturate(J, irrelevant_ideal(VARIABLES, Q))
    assert colength(S, projective=True) == 9
    assert regularity(S) == 5

    table = hilbert_function(S, 6)
    assert [table.values[t] for t in range(7)] == [1, 3, 6, 8, 9, 9, 9]
    assert table.stable_value == 9
    assert table.stabilized
    assert table.first_degree_reaching(9) == 4


def test_projective_colength_needs_homogeneous_ideal() -> None:
    with pytest.raises(LeafboundError) as info:
        colength(projective_ideal("x - z^2", "y"), projective=True)
    assert info.value.code == ErrorCode.NOT_HOMOGENEOUS


def test_regularity_of_point_and_of_empty_scheme() -> None:
    point = Ideal.of([projective("x"), projective("y")], Q, VARIABLES, saturated=True)
    assert regularity(point) == 1
    empty = Ideal.of([projective("1")], Q, VARIABLES, saturated=True)
    assert regularity(empty) == 0


def test_regularity_of_curve_fails() -> None:
    with pytest.raises(ComputationError) as info:
        regularity(Ideal.of([projective("x")], Q, VARIABLES, saturated=True))
    assert info.value.code == ErrorCode.NOT_ZERO_DIMENSIONAL


def test_eliminate() -> None:
    I = affine_ideal("x^2 - 2", "y - x")
    assert eliminate(I, X).as_expr() == X ** 2 - 2
    assert eliminate(I, Y).as_expr() == Y ** 2 - 2


def test_eliminate_needs_finite_scheme() -> None:
    with pytest.raises(ComputationError):
        eliminate(affine_ideal("x*y"), X)


@pytest.mark.parametrize("generators, bound, expected", [
    (("x", "y"), 3, 1),
    (("x^2", "y"), 4, 2),
    (("x^3", "y^2"), 10, 6),
])
def test_oracle_colength(generators, bound, expected) -> None:
    assert oracle_colength(affine_ideal(*generators), bound) == expected


def test_oracle_matches_jacobian_of_four_lines() -> None:
    T = tjurina_ideal(affine("x^3*y - x*y^3"))
    assert oracle_colength(T, 8) == 9
    assert colength(T) == 9


def test_oracle_reports_unstable_bound() -> None:
    with pytest.raises(ComputationError) as info:
        oracle_colength(affine_ideal("x^3", "y"), 3)
    assert info.value.code == ErrorCode.NOT_STABILIZED


@pytest.mark.parametrize("a, b, seed", [(2, 3, 1), (3, 2, 2), (3, 3, 3)])
def test_oracle_agrees_with_staircase_on_random_ideals(a: int, b: int, seed: int) -> None:
    rng = random.Random(seed)
    r1 = random_polynomial(rng, Q, a - 1, AFFINE_VARIABLES, homogeneous=False)
    r2 = random_polynomial(rng, Q, b - 1, AFFINE_VARIABLES, homogeneous=False)
    I = Ideal.of([affine(f"x^{a}") + r1, affine(f"y^{b}") + r2], Q, AFFINE_VARIABLES)
    assert colength(I) == a * b
    assert oracle_colength(I, 2 * (a + b)) == a * b


# ==================== Seeded random ideals ====================

F_32003 = FieldSpec.prime(32003)


def random_ideal(seed: int, field_spec: FieldSpec = Q, extra: bool = False) -> Tuple[Ideal, int, int]:
    """(x^a + lower, y^b + lower[, random]) with a, b <= 4, and the degrees a, b."""
    rng = random.Random(seed)
    a, b = rng.randint(1, 4), rng.randint(1, 4)
    x = variable(X, field_spec, AFFINE_VARIABLES)
    y = variable(Y, field_spec, AFFINE_VARIABLES)
    generators = [
        x ** a + random_polynomial(rng, field_spec, a - 1, AFFINE_VARIABLES, homogeneous=False, coefficient_bound=3),
        y ** b + random_polynomial(rng, field_spec, b - 1, AFFINE_VARIABLES, homogeneous=False, coefficient_bound=3),
    ]
    if extra:
        generators.append(random_polynomial(rng, field_spec, rng.randint(1, 3), AFFINE_VARIABLES, homogeneous=False))
    return Ideal.of(generators, field_spec, AFFINE_VARIABLES), a, b


def leading_monomial(g, order: str) -> Tuple[int, ...]:
    return g.monoms(order=order)[0]


def staircase_size(lms: List[Tuple[int, ...]]) -> int:
    """Standard monomials of a zero-dimensional monomial ideal in two variables."""
    bound_x = min(m[0] for m in lms if m[1] == 0)
    bound_y = min(m[1] for m in lms if m[0] == 0)
    return sum(
        1 for i in range(bound_x) for j in range(bound_y)
        if not any(i >= m[0] and j >= m[1] for m in lms)
    )


@pytest.mark.parametrize("seed", range(10))
def test_oracle_agrees_on_seeded_ideals(seed: int) -> None:
    I, a, b = random_ideal(seed)
    assert colength(I) == a * b
    assert oracle_colength(I, 2 * (a + b)) == a * b


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10, 60))
def test_oracle_agrees_on_seeded_ideals_mod_p(seed: int) -> None:
    I, a, b = random_ideal(seed, F_32003)
    assert colength(I) == a * b
    assert oracle_colength(I, 2 * (a + b)) == a * b


@pytest.mark.parametrize("seed", range(8))
def test_basis_is_sound(seed: int) -> None:
    I, _, _ = random_ideal(seed, extra=True)
    basis = groebner_basis(I)
    for g in I.generators:
        assert normal_form(g, I).is_zero
    for i, f in enumerate(basis):
        for g in basis[i + 1:]:
            lf, lg = leading_monomial(f, GREVLEX), leading_monomial(g, GREVLEX)
            lcm = tuple(max(p, q) for p, q in zip(lf, lg))
            shift_f = Poly.from_dict({tuple(c - e for c, e in zip(lcm, lf)): 1}, *I.gens, domain=I.field.domain)
            shift_g = Poly.from_dict({tuple(c - e for c, e in zip(lcm, lg)): 1}, *I.gens, domain=I.field.domain)
            s_pair = shift_f * f.monic() - shift_g * g.monic()
            assert normal_form(s_pair, I).is_zero


@pytest.mark.parametrize("seed", range(8))
def test_colength_agrees_under_grevlex_and_lex(seed: int) -> None:
    I, _, _ = random_ideal(seed, extra=True)
    grevlex_lms = [leading_monomial(g, GREVLEX) for g in groebner_basis(I, GREVLEX)]
    lex_lms = [leading_monomial(g, LEX) for g in groebner_basis(I, LEX)]
    assert staircase_size(grevlex_lms) == staircase_size(lex_lms) == colength(I)


@pytest.mark.parametrize("seed", range(5))
def test_saturation_is_idempotent(seed: int) -> None:
    I, _, _ = random_ideal(seed, extra=True)
    J = affine_ideal(f"x + {seed + 1}*y - 1")
    once = saturate(I, J)
    assert saturate(once, J).same_as(once)
    assert once.contains(I)


@pytest.mark.parametrize("seed", range(5))
def test_quotient_contains_the_ideal(seed: int) -> None:
    I, _, _ = random_ideal(seed)
    J = affine_ideal("x", f"y - {seed}")
    quotient = ideal_quotient(I, J)
    assert quotient.contains(I)
    for q in quotient.generators:
        for g in J.generators:
            assert normal_form(q * g, I).is_zero
