from fractions import Fraction

import pytest

from conftest import F_32003, curve, projective
from src.bounds import (
    NEEDS_CHAR_ZERO,
    curve_hash,
    full_report,
    verify_factoring_bounds,
    verify_lemma_3_1,
    verify_prop_2_3,
    verify_prop_3_3,
    verify_theorem_2_5,
    verify_theorem_3_2,
)
from src.foliations import make_foliation
from src.models import CurveInvariants, ErrorCode, FieldSpec, Irreducibility, TheoremId


def invariants(d: int, tau: int, sigma: int, u: int = 0,
               irreducibility: Irreducibility = Irreducibility.REDUCIBLE) -> CurveInvariants:
    return CurveInvariants(d=d, reduced=True, irreducibility=irreducibility, tau=tau, u=u, sigma=sigma)


FOUR_LINES = curve("x*y*(x + y)*(x - y)")
FOUR_LINES_INV = invariants(4, 9, 5)


def test_lemma_3_1_equality_for_concurrent_lines() -> None:
    verdict = verify_lemma_3_1(FOUR_LINES, FOUR_LINES_INV)
    assert verdict.holds
    assert verdict.equality
    assert verdict.rhs == 5


def test_lemma_3_1_exact_fraction() -> None:
    nodal = curve("y^2*z - x^2*(x + z)")
    verdict = verify_lemma_3_1(nodal, invariants(3, 1, 1, irreducibility=Irreducibility.IRREDUCIBLE))
    assert verdict.rhs == Fraction(3, 2)
    assert verdict.holds
    assert not verdict.equality


def test_lemma_3_1_skipped_in_positive_characteristic() -> None:
    C = curve("y^2*z - x^2*(x + z)", F_32003)
    verdict = verify_lemma_3_1(C, invariants(3, 1, 1))
    assert verdict.holds is None
    assert NEEDS_CHAR_ZERO in verdict.reasons


def test_theorem_2_5_with_furthermore_clause() -> None:
    verdict = verify_theorem_2_5(FOUR_LINES, FOUR_LINES_INV, 0)
    assert verdict.rhs == 4
    assert verdict.details["furthermore_applies"]
    assert verdict.details["furthermore_holds"]
    assert verdict.holds


def test_theorem_2_5_furthermore_clause_can_fail() -> None:
    wrong_sigma = invariants(4, 9, 6)
    verdict = verify_theorem_2_5(FOUR_LINES, wrong_sigma, 0)
    assert verdict.lhs <= verdict.rhs
    assert verdict.details["furthermore_holds"] is False
    assert verdict.holds is False


def test_theorem_2_5_skipped_when_characteristic_divides_degree() -> None:
    C = curve("x^2*y + y^2*z + z^2*x", FieldSpec.prime(3))
    verdict = verify_theorem_2_5(C, invariants(3, 0, 0), 2)
    assert verdict.skipped
    assert "divides" in verdict.skipped


def test_theorem_3_2_equality_case() -> None:
    verdict = verify_theorem_3_2(FOUR_LINES, FOUR_LINES_INV, 0)
    assert verdict.equality
    assert verdict.equality_case_consistent
    assert verdict.holds


def test_theorem_3_2_inconsistent_equality_fails() -> None:
    verdict = verify_theorem_3_2(FOUR_LINES, invariants(4, 9, 4), 0)
    assert verdict.equality
    assert verdict.equality_case_consistent is False
    assert verdict.holds is False


def test_theorem_3_2_violation() -> None:
    nodal = curve("y^2*z - x^2*(x + z)")
    verdict = verify_theorem_3_2(nodal, invariants(3, 1, 1), 1)
    assert verdict.lhs == 2
    assert verdict.holds is False


def test_prop_3_3_both_parts() -> None:
    nodal = curve("y^2*z - x^2*(x + z)")
    inv = invariants(3, 1, 1, irreducibility=Irreducibility.IRREDUCIBLE)
    first, second = verify_prop_3_3(nodal, inv, 2)
    assert first.holds and first.rhs == 4
    assert second.details["binomial"] == 3
    assert second.rhs == 1
    assert second.holds and second.equality


def test_prop_3_3_refinement_needs_certified_irreducibility() -> None:
    nodal = curve("y^2*z - x^2*(x + z)")
    _, second = verify_prop_3_3(nodal, invariants(3, 1, 1, irreducibility=Irreducibility.UNKNOWN), 2)
    assert second.skipped
    assert second.holds is None
    _, claimed = verify_prop_3_3(nodal, invariants(3, 1, 1, irreducibility=Irreducibility.UNKNOWN), 2,
                                 Irreducibility.IRREDUCIBLE)
    assert claimed.holds


def test_prop_3_3_refinement_needs_small_degree() -> None:
    first, second = verify_prop_3_3(FOUR_LINES, FOUR_LINES_INV, 0)
    assert first.holds and first.equality
    assert second.skipped


def test_factoring_bounds() -> None:
    two_sided, refined = verify_factoring_bounds(FOUR_LINES, FOUR_LINES_INV, 0)
    assert two_sided.holds
    assert two_sided.details["lower_holds"]
    assert refined.skipped

    C = curve("x*y*(x + y)*(x - y)", F_32003)
    skipped, _ = verify_factoring_bounds(C, FOUR_LINES_INV, 0)
    assert NEEDS_CHAR_ZERO in skipped.reasons


def test_prop_2_3_skips_degree_zero() -> None:
    pencil = make_foliation(projective("y"), projective("-x"), projective("0"))
    verdict = verify_prop_2_3(pencil)
    assert verdict.skipped
    assert verdict.theorem_id == TheoremId.P2_3


def test_curve_hash_is_stable() -> None:
    assert curve_hash(curve("x*y")) == curve_hash(curve("y*x"))
    assert len(curve_hash(curve("x*y"))) == 64


def test_report_for_non_reduced_curve_skips_everything() -> None:
    report = full_report(curve("x^2*y"))
    assert [e.code for e in report.errors] == [ErrorCode.NOT_REDUCED]
    assert len(report.verdicts) == len(TheoremId)
    assert all(v.skipped for v in report.verdicts)
    assert report.all_hold


def test_report_records_out_of_order_cluster(monkeypatch) -> None:
    monkeypatch.setattr("src.curves._isolated_length", lambda *args, **kwargs: 0)
    report = full_report(curve("y^2*z - x^2*(x + z)"))
    assert report.invariants is None
    assert ("invariants", ErrorCode.CLUSTER_ORDER_VIOLATED) in [(e.stage, e.code) for e in report.errors]


def test_report_for_three_concurrent_lines() -> None:
    report = full_report(curve("x*y*(x + y)"), seed=0)
    assert report.errors == []
    assert report.m_leaf == 0
    assert report.m_factors == 0
    assert report.hamilton_degree is not None
    assert report.all_hold

    ids = [v.theorem_id for v in report.verdicts]
    assert ids == sorted(ids, key=list(TheoremId).index)
    assert report.verdict(TheoremId.T3_2).equality
    assert report.verdict(TheoremId.I3_3).details["deg_s_meet_c"] == 1

    data = report.to_dict()
    assert data["invariants"]["tau"] == 4
    assert data["foliation"]["m_leaf"] == 0


def test_report_checks_input_foliation() -> None:
    pencil = make_foliation(projective("y"), projective("-x"), projective("0"))
    report = full_report(curve("x*y"), foliation=pencil)
    sources = [v.details.get("source") for v in report.verdicts if v.theorem_id == TheoremId.P2_3]
    assert "hamilton" in sources
    assert report.all_hold


def test_report_records_failed_stage() -> None:
    C = curve("x^2*y + y^2*z + z^2*x", FieldSpec.prime(3))
    report = full_report(C)
    codes = [e.code for e in report.errors]
    assert ErrorCode.CHAR_DIVIDES_DEGREE in codes
    assert report.invariants is None
    assert report.verdict(TheoremId.T2_5).skipped


@pytest.mark.slow
def test_report_for_four_concurrent_lines_and_a_general_line() -> None:
    report = full_report(curve("x*y*(x + y)*(x - y)*(x + z)"))
    assert report.m_factors == 1
    assert report.m_leaf >= 3
    assert report.verdict(TheoremId.R3_4).holds
    assert report.verdict(TheoremId.R3_4).equality
