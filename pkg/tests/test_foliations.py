import random

import pytest

from conftest import F_32003, Q, curve, projective
from src.errors import HypothesisError
from src.foliations import (
    ProjectiveOneForm,
    foliation_regularity,
    form_from_vector_field,
    hamilton_foliation,
    is_leaf,
    make_foliation,
    make_form,
    minimal_degree,
    random_foliation,
    tangency_degree_check,
)
from src.models import ErrorCode, MinimalDegreeMode


def radial_pencil():
    return make_foliation(projective("y"), projective("-x"), projective("0"))


def test_form_needs_a_nonzero_coefficient() -> None:
    with pytest.raises(HypothesisError) as info:
        make_form(projective("0"), projective("0"), projective("0"), Q)
    assert info.value.code == ErrorCode.ALL_ZERO


def test_form_needs_equal_degrees() -> None:
    with pytest.raises(HypothesisError) as info:
        make_form(projective("y"), projective("-x^2"), projective("0"))
    assert info.value.code == ErrorCode.DEGREE_MISMATCH


def test_form_needs_homogeneous_coefficients() -> None:
    with pytest.raises(HypothesisError) as info:
        make_form(projective("y + z^2"), projective("-x"), projective("0"))
    assert info.value.code == ErrorCode.NOT_HOMOGENEOUS


def test_form_needs_euler_relation() -> None:
    with pytest.raises(HypothesisError) as info:
        make_form(projective("x"), projective("y"), projective("z"))
    assert info.value.code == ErrorCode.EULER_VIOLATED


def test_vector_field_contraction() -> None:
    form = form_from_vector_field(projective("x"), projective("y"), projective("0"))
    assert isinstance(form, ProjectiveOneForm)
    assert form.k == 2
    assert form.A == projective("-y*z")
    assert form.B == projective("x*z")
    assert form.C.is_zero


def test_radial_pencil_has_degree_zero() -> None:
    fol = radial_pencil()
    assert fol.m == 0
    assert fol.deg_s == 1
    assert fol.removed_factor is None


def test_common_factor_is_removed() -> None:
    fol = make_foliation(projective("y*z"), projective("-x*z"), projective("0"))
    assert fol.m == 0
    assert fol.removed_factor == projective("z")
    assert fol.form.A == projective("y")


def test_random_foliation_has_requested_degree() -> None:
    fol = random_foliation(random.Random(5), F_32003, 2)
    assert fol.m == 2
    assert fol.deg_s == 7


def test_regularity_of_hamilton_foliation_of_conic() -> None:
    ham = hamilton_foliation(curve("x*z - y^2"))
    assert ham.foliation.m == 1
    assert ham.foliation.deg_s == 3
    assert foliation_regularity(ham.foliation) == 2


def test_leaf_check() -> None:
    cone = curve("x*y")
    assert is_leaf(cone, radial_pencil()).is_leaf

    singular_along_x = make_form(projective("x*y"), projective("-x^2"), projective("0"))
    result = is_leaf(cone, singular_along_x)
    assert not result.is_leaf
    assert result.factors_through_only

    conic = is_leaf(curve("x*z - y^2"), radial_pencil())
    assert not conic.is_leaf
    assert not conic.factors_through_only
    assert any(r != "0" for r in conic.tangency_remainders)


def test_leaf_check_rejects_multiple_component() -> None:
    with pytest.raises(HypothesisError):
        is_leaf(curve("x^2*y"), radial_pencil())


def test_tangency_count_matches_degree() -> None:
    assert tangency_degree_check(radial_pencil(), seed=0) == 0
    ham = hamilton_foliation(curve("x*z - y^2"))
    for seed in range(3):
        assert tangency_degree_check(ham.foliation, seed=seed) == 1


@pytest.mark.parametrize("m", [1, 2, 3])
def test_tangency_count_of_random_foliation(m: int) -> None:
    fol = random_foliation(random.Random(40 + m), F_32003, m)
    assert tangency_degree_check(fol, seed=m) == m


def test_hamilton_foliation_of_smooth_cubic() -> None:
    ham = hamilton_foliation(curve("x^3 + y^3 + z^3"))
    assert ham.foliation.m == 2
    assert not ham.degree_dropped
    assert ham.coordinate_seed == 0
    assert is_leaf(ham.curve, ham.foliation).is_leaf


def test_hamilton_foliation_changes_coordinates_when_needed() -> None:
    # F_x = y*(2*x + y) shares the component y with F
    ham = hamilton_foliation(curve("x*y*(x + y)"), seed=3)
    assert ham.coordinate_seed != 3000
    assert ham.foliation.m <= 2
    assert is_leaf(ham.curve, ham.foliation).is_leaf


def test_hamilton_foliation_rejects_multiple_component() -> None:
    with pytest.raises(HypothesisError):
        hamilton_foliation(curve("x^2*y"))


def test_transformed_form_stays_a_leaf() -> None:
    C = curve("x*y")
    shear = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    moved = radial_pencil().form.transformed(shear)
    assert is_leaf(C.transformed(shear), moved).is_leaf


@pytest.mark.parametrize("text, expected", [
    ("x*y", 0),
    ("x*y*(x + y)*(x - y)", 0),
    ("x*z - y^2", 1),
    ("y^2*z - x^3", 1),
    ("y^2*z - x^2*(x + z)", 2),
])
def test_minimal_leaf_degree(text: str, expected: int) -> None:
    result = minimal_degree(curve(text), MinimalDegreeMode.LEAF)
    assert result.m == expected
    assert result.foliation is not None
    assert is_leaf(curve(text), result.foliation).is_leaf


def test_minimal_degree_modes_on_concurrent_lines() -> None:
    C = curve("x*y*(x + y)")
    assert minimal_degree(C, MinimalDegreeMode.FACTORS_THROUGH).m == 0
    assert minimal_degree(C, MinimalDegreeMode.LEAF).gaps == []


def test_minimal_degree_over_prime_field() -> None:
    assert minimal_degree(curve("x*z - y^2", F_32003), MinimalDegreeMode.LEAF).m == 1


def test_minimal_degree_rejects_multiple_component() -> None:
    with pytest.raises(HypothesisError):
        minimal_degree(curve("x^2*y"))


@pytest.mark.slow
def test_four_lines_and_a_general_line() -> None:
    C = curve("x*y*(x + y)*(x - y)*(x + z)")
    assert minimal_degree(C, MinimalDegreeMode.FACTORS_THROUGH).m == 1
    leaf = minimal_degree(C, MinimalDegreeMode.LEAF)
    assert leaf.m >= 3
    assert 1 in leaf.gaps


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("seed", range(4))
def test_random_foliation_degree_laws(m: int, seed: int) -> None:
    fol = random_foliation(random.Random(seed), F_32003, m)
    assert fol.m == m
    assert fol.deg_s == m * m + m + 1
    if m > 0:
        assert foliation_regularity(fol) == 2 * m


@pytest.mark.slow
@pytest.mark.parametrize("field_spec, m", [(Q, 1), (Q, 2), (F_32003, 3), (Q, 3)])
@pytest.mark.parametrize("seed", range(3))
def test_random_foliation_degree_laws_extended(field_spec, m: int, seed: int) -> None:
    fol = random_foliation(random.Random(100 + seed), field_spec, m)
    assert fol.deg_s == m * m + m + 1
    assert foliation_regularity(fol) == 2 * m
