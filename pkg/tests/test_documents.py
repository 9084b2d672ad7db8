from pathlib import Path

import pytest

from conftest import projective
from src.documents import load_document, parse_document
from src.errors import ParseError
from src.models import ErrorCode, FieldSpec

SAMPLE = """\
# four concurrent lines
field Q
curve x^3*y - x*y^3   # the cone
foliation y ; -x ; 0

meta irreducible false
meta description four lines through (0:0:1)
"""


def test_parse_sample_document() -> None:
    doc = parse_document(SAMPLE, source="cone4.lb")
    assert doc.field == FieldSpec.rationals()
    assert doc.curve.d == 4
    assert doc.curve.F == projective("x^3*y - x*y^3")
    assert doc.foliation_coefficients[1] == projective("-x")
    assert doc.claimed_irreducibility == "reducible"
    assert doc.description == "four lines through (0:0:1)"
    assert doc.source == "cone4.lb"
    assert doc.foliation().m == 0


def test_field_defaults_to_rationals() -> None:
    doc = parse_document("curve x*y")
    assert doc.field.characteristic == 0
    assert doc.foliation() is None


def test_prime_field_is_used_for_coefficients() -> None:
    doc = parse_document("field F 7\ncurve 8*x*y")
    assert doc.field == FieldSpec.prime(7)
    assert doc.curve.F.coeff_monomial((1, 1, 0)) == 1


def test_field_must_be_prime() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("field F 4\ncurve x*y")
    assert info.value.line == 1


def test_unknown_directive_reports_its_line() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("curve x*y\n\n# note\nsurface x*y*z")
    assert info.value.line == 4
    assert "surface" in info.value.detail


def test_duplicate_curve() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("curve x*y\ncurve x*z")
    assert info.value.line == 2


def test_bad_irreducibility_claim() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("curve x*y\nmeta irreducible maybe")
    assert info.value.line == 2


def test_empty_input_is_rejected() -> None:
    with pytest.raises(ParseError):
        parse_document("# nothing here\n")


def test_foliation_needs_three_coefficients() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("foliation y ; -x")
    assert "three" in info.value.detail


def test_non_homogeneous_curve() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("field Q\ncurve x^2 + y")
    assert info.value.code == ErrorCode.NOT_HOMOGENEOUS
    assert info.value.line == 2


def test_ideal_lives_in_the_affine_chart() -> None:
    doc = parse_document("ideal x^2 ; y")
    assert len(doc.ideal) == 2
    with pytest.raises(ParseError) as info:
        parse_document("ideal x^2 ; z")
    assert info.value.code == ErrorCode.UNKNOWN_VARIABLE
    assert info.value.line == 1


def test_polynomial_errors_carry_the_line() -> None:
    with pytest.raises(ParseError) as info:
        parse_document("field Q\n\ncurve x*y +")
    assert info.value.line == 3


def test_load_document(write_input) -> None:
    path = write_input("curve x*z - y^2\n", name="conic.lb")
    doc = load_document(path)
    assert doc.curve.d == 2
    assert doc.source == path


def test_load_missing_document(tmp_path) -> None:
    with pytest.raises(ParseError) as info:
        load_document(str(tmp_path / "missing.lb"))
    assert "cannot read" in info.value.detail


SHIPPED = sorted((Path(__file__).parent.parent / "curves").glob("*.lb"))


@pytest.mark.parametrize("path", SHIPPED, ids=lambda p: p.stem)
def test_shipped_inputs_parse(path) -> None:
    doc = load_document(str(path))
    assert doc.curve is not None or doc.ideal
