"""Verdicts on the degree bounds for invariant curves.

Each ``verify_*`` function checks one bound on computed invariants and
returns a TheoremVerdict. Hypotheses are gated first: a verdict whose
hypotheses fail is returned with ``skipped`` set and ``holds`` left None.
All arithmetic is exact.

``full_report`` runs the whole pipeline for one curve and collects every
verdict, recording failed stages instead of aborting.

Usage:
    from src.bounds import full_report

    report = full_report(C, options, seed=0)
    if not report.all_hold:
        ...
"""

import hashlib
import logging
from fractions import Fraction
from math import comb
from typing import List, Optional, Tuple

from src.algebra import format_polynomial
from src.config import AnalysisConfig
from src.curves import PlaneCurve, analyze_curve, is_reduced
from src.errors import LeafboundError
from src.foliations import (
    Foliation,
    foliation_regularity,
    hamilton_foliation,
    minimal_degree,
)
from src.groebner import colength
from src.models import (
    BoundsReport,
    CurveInvariants,
    ErrorCode,
    FieldKind,
    Irreducibility,
    MinimalDegreeMode,
    StageError,
    TheoremId,
    TheoremVerdict,
)

logger = logging.getLogger(__name__)

NEEDS_CHAR_ZERO = "characteristic 0 required"
NEEDS_D_AT_LEAST_2 = "d >= 2 required"


def _char_divides_reason(C: PlaneCurve) -> Optional[str]:
    if C.field.divides(C.d):
        return f"characteristic {C.field.characteristic} divides d = {C.d}"
    return None


def skipped_verdict(theorem_id: TheoremId, reasons: List[str]) -> TheoremVerdict:
    """Verdict for a bound whose hypotheses are not met."""
    return TheoremVerdict(
        theorem_id=theorem_id,
        hypotheses_met=False,
        reasons=list(reasons),
        skipped="; ".join(reasons),
    )


def _inequality(theorem_id: TheoremId, lhs, rhs, **details) -> TheoremVerdict:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    return TheoremVerdict(
        theorem_id=theorem_id,
        hypotheses_met=True,
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs,
        equality=lhs == rhs,
        details=details,
    )


def _identity(theorem_id: TheoremId, lhs, rhs, **details) -> TheoremVerdict:
    verdict = _inequality(theorem_id, lhs, rhs, **details)
    verdict.holds = verdict.equality
    return verdict


# ==================== Individual bounds ====================

def verify_prop_2_3(fol: Foliation, source: str = "") -> TheoremVerdict:
    """reg S = 2m for a foliation of degree m > 0."""
    if fol.m <= 0:
        return skipped_verdict(TheoremId.P2_3, ["m > 0 required"])
    return _identity(TheoremId.P2_3, foliation_regularity(fol), 2 * fol.m, m=fol.m, deg_s=fol.deg_s, source=source)


def verify_theorem_2_5(C: PlaneCurve, inv: CurveInvariants, m: int) -> TheoremVerdict:
    """d <= m + 1 when rho <= 0, d <= m + 1 + rho otherwise; d = m + 1 + rho when d >= 2m + 2."""
    reason = _char_divides_reason(C)
    if reason:
        return skipped_verdict(TheoremId.T2_5, [reason])

    d, rho = inv.d, inv.rho
    rhs = m + 1 if rho <= 0 else m + 1 + rho
    verdict = _inequality(TheoremId.T2_5, d, rhs, m=m, rho=rho, branch="rho <= 0" if rho <= 0 else "rho > 0")
    applies = d >= 2 * m + 2
    verdict.details["furthermore_applies"] = applies
    if applies:
        furthermore = d == m + 1 + rho
        verdict.details["furthermore_holds"] = furthermore
        verdict.holds = verdict.holds and furthermore
    return verdict


def verify_lemma_3_1(C: PlaneCurve, inv: CurveInvariants) -> TheoremVerdict:
    """sigma <= d - 2 + (tau - u)/(d - 1)."""
    reasons = []
    if C.field.kind != FieldKind.RATIONALS:
        reasons.append(NEEDS_CHAR_ZERO)
    if inv.d < 2:
        reasons.append(NEEDS_D_AT_LEAST_2)
    if reasons:
        return skipped_verdict(TheoremId.L3_1, reasons)
    d = inv.d
    rhs = d - 2 + Fraction(inv.tau - inv.u, d - 1)
    return _inequality(TheoremId.L3_1, inv.sigma, rhs, tau=inv.tau, u=inv.u)


def verify_theorem_3_2(C: PlaneCurve, inv: CurveInvariants, m: int) -> TheoremVerdict:
    """(d-1)(d-m-1) + u <= tau, with the equality dichotomy."""
    reasons = []
    if C.field.kind != FieldKind.RATIONALS:
        reasons.append(NEEDS_CHAR_ZERO)
    if inv.d < 2:
        reasons.append(NEEDS_D_AT_LEAST_2)
    if reasons:
        return skipped_verdict(TheoremId.T3_2, reasons)

    d = inv.d
    verdict = _inequality(TheoremId.T3_2, (d - 1) * (d - m - 1) + inv.u, inv.tau, m=m, u=inv.u)
    if verdict.equality:
        consistent = (d == m + 1 and inv.tau == 0) or (d > m + 1 and inv.sigma == 2 * d - m - 3)
        verdict.equality_case_consistent = consistent
        verdict.holds = verdict.holds and consistent
    return verdict


def verify_prop_3_3(
    C: PlaneCurve,
    inv: CurveInvariants,
    m: int,
    irreducibility: Optional[Irreducibility] = None,
) -> Tuple[TheoremVerdict, TheoremVerdict]:
    """m <= d - 1 and tau <= (d-1)(d-m-1) + m^2, plus the binomial refinement."""
    reason = _char_divides_reason(C)
    if reason:
        return skipped_verdict(TheoremId.P3_3A, [reason]), skipped_verdict(TheoremId.P3_3B, [reason])

    d, tau = inv.d, inv.tau
    base = (d - 1) * (d - m - 1) + m * m
    first = _inequality(TheoremId.P3_3A, tau, base, m=m)
    m_bound = m <= d - 1
    first.details["m_bound_holds"] = m_bound
    first.holds = first.holds and m_bound

    irreducibility = irreducibility or inv.irreducibility
    reasons = []
    if d > 2 * m:
        reasons.append("d <= 2m required")
    if irreducibility != Irreducibility.IRREDUCIBLE:
        reasons.append(f"irreducibility not certified ({irreducibility.value})")
    if reasons:
        return first, skipped_verdict(TheoremId.P3_3B, reasons)
    binomial = comb(2 * m + 2 - d, 2)
    second = _inequality(TheoremId.P3_3B, tau, base - binomial, m=m, binomial=binomial)
    return first, second


def verify_factoring_bounds(C: PlaneCurve, inv: CurveInvariants, m_f: int) -> Tuple[TheoremVerdict, TheoremVerdict]:
    """Two-sided bound on tau for the factoring-mode degree, and its binomial refinement."""
    if C.field.kind != FieldKind.RATIONALS:
        return skipped_verdict(TheoremId.R3_4, [NEEDS_CHAR_ZERO]), skipped_verdict(TheoremId.R3_4B, [NEEDS_CHAR_ZERO])

    d, tau = inv.d, inv.tau
    lower = (d - 1) * (d - m_f - 1)
    upper = lower + m_f * m_f
    two_sided = _inequality(TheoremId.R3_4, tau, upper, m_f=m_f, lower=lower)
    degree_ok = d >= m_f + 1
    two_sided.details["lower_holds"] = lower <= tau
    two_sided.details["degree_holds"] = degree_ok
    two_sided.holds = two_sided.holds and lower <= tau and degree_ok

    if d > 2 * m_f:
        return two_sided, skipped_verdict(TheoremId.R3_4B, ["d <= 2m required"])
    binomial = comb(2 * m_f + 2 - d, 2)
    refined = _inequality(TheoremId.R3_4B, tau, upper - binomial, m_f=m_f, binomial=binomial)
    return two_sided, refined


def verify_intersection_identity(C: PlaneCurve, inv: CurveInvariants, fol: Foliation) -> TheoremVerdict:
    """tau = d(d - m - 2) + deg(S n C) for a minimal foliation with C as leaf."""
    reason = _char_divides_reason(C)
    if reason:
        return skipped_verdict(TheoremId.I3_3, [reason])
    d = inv.d
    meet = colength(fol.singular_ideal.with_generators([C.F]), projective=True)
    return _identity(TheoremId.I3_3, inv.tau, d * (d - fol.m - 2) + meet, m=fol.m, deg_s_meet_c=meet)


# ==================== Full pipeline ====================

def curve_hash(C: PlaneCurve) -> str:
    """sha256 of the canonical text of F."""
    return hashlib.sha256(format_polynomial(C.F).encode("utf-8")).hexdigest()


def full_report(
    C: PlaneCurve,
    options: Optional[AnalysisConfig] = None,
    seed: int = 0,
    foliation: Optional[Foliation] = None,
    claimed: Optional[str] = None,
) -> BoundsReport:
    """Invariants, Hamilton foliation, both minimal degrees and every verdict.

    Each stage that raises LeafboundError is recorded in ``errors`` and the
    verdicts depending on it are skipped. A non-reduced curve skips
    everything.
    """
    options = options or AnalysisConfig()
    report = BoundsReport(
        curve_hash=curve_hash(C),
        curve=format_polynomial(C.F),
        field=C.field.label,
        seed=seed,
        claimed_irreducibility=claimed,
    )

    if not is_reduced(C):
        message = f"{report.curve} has a multiple component"
        report.errors.append(StageError("invariants", ErrorCode.NOT_REDUCED, message))
        report.verdicts = [skipped_verdict(t, ["curve is not reduced"]) for t in TheoremId]
        logger.warning(f"{report.curve}: not reduced, every bound skipped")
        return report

    def stage(name: str, run):
        try:
            return run()
        except LeafboundError as e:
            logger.warning(f"{report.curve}: stage {name} failed: {e}")
            report.errors.append(StageError(name, e.code, e.message))
            return None

    inv = stage("invariants", lambda: analyze_curve(C, seed, options))
    report.invariants = inv

    hamilton = stage(
        "hamilton",
        lambda: hamilton_foliation(C, seed, options.coordinate_attempts, options.coefficient_bound),
    )
    if hamilton is not None:
        report.hamilton_degree = hamilton.foliation.m

    leaf = stage(
        "leaf",
        lambda: minimal_degree(
            C,
            MinimalDegreeMode.LEAF,
            seed,
            options.leaf_random_combinations,
            options.random_coefficient_bound,
        ),
    )
    if leaf is not None:
        report.m_leaf = leaf.m
        report.leaf_gaps = list(leaf.gaps)

    factors = stage("factors", lambda: minimal_degree(C, MinimalDegreeMode.FACTORS_THROUGH, seed))
    if factors is not None:
        report.m_factors = factors.m

    verdicts: List[TheoremVerdict] = []
    if hamilton is not None:
        verdicts.append(verify_prop_2_3(hamilton.foliation, source="hamilton"))
    if foliation is not None:
        verdicts.append(verify_prop_2_3(foliation, source="input"))
    if hamilton is None and foliation is None:
        verdicts.append(skipped_verdict(TheoremId.P2_3, ["no foliation available"]))

    missing = []
    if inv is None:
        missing.append("invariants unavailable")
    if report.m_leaf is None:
        missing.append("leaf degree unavailable")

    if missing:
        for theorem_id in (TheoremId.T2_5, TheoremId.T3_2, TheoremId.P3_3A, TheoremId.P3_3B, TheoremId.I3_3):
            verdicts.append(skipped_verdict(theorem_id, missing))
    if inv is None:
        verdicts.append(skipped_verdict(TheoremId.L3_1, ["invariants unavailable"]))
    else:
        verdicts.append(verify_lemma_3_1(C, inv))
    if not missing:
        verdicts.append(verify_theorem_2_5(C, inv, report.m_leaf))
        verdicts.append(verify_theorem_3_2(C, inv, report.m_leaf))
        verdicts.extend(verify_prop_3_3(C, inv, report.m_leaf))
        verdicts.append(stage("identity", lambda: verify_intersection_identity(C, inv, leaf.foliation))
                        or skipped_verdict(TheoremId.I3_3, ["intersection degree unavailable"]))

    if inv is None or report.m_factors is None:
        reasons = ["invariants unavailable"] if inv is None else ["factoring degree unavailable"]
        verdicts.extend([skipped_verdict(TheoremId.R3_4, reasons), skipped_verdict(TheoremId.R3_4B, reasons)])
    else:
        verdicts.extend(verify_factoring_bounds(C, inv, report.m_factors))

    order = list(TheoremId)
    report.verdicts = sorted(verdicts, key=lambda v: order.index(v.theorem_id))
    failed = [v.theorem_id.value for v in report.verdicts if v.holds is False]
    if failed:
        logger.error(f"{report.curve}: bounds failed: {', '.join(failed)}")
    else:
        logger.info(f"{report.curve}: {sum(1 for v in report.verdicts if v.holds)} bounds hold")
    return report
