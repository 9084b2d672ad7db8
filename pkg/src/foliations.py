"""Foliations of the projective plane as twisted 1-forms.

A foliation of degree m is a form A dx + B dy + C dz with A, B, C
homogeneous of degree m + 1, coprime, and x*A + y*B + z*C = 0. A curve
F = 0 is invariant when the wedge of the form with dF vanishes modulo F,
and it is a leaf when in addition none of its components lies in the
singular locus. Both conditions are linear in (A, B, C), which is what
``minimal_degree`` exploits.

Usage:
    from src.foliations import make_foliation, hamilton_foliation, minimal_degree

    fol = make_foliation(y, -x, zero)          # pencil of lines, m = 0
    ham = hamilton_foliation(C, seed=0)        # m = d - 1, C is a leaf
    best = minimal_degree(C, MinimalDegreeMode.LEAF)
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import Poly

from src.algebra import (
    IDENTITY,
    VARIABLES,
    Z,
    LinearSystem,
    apply_linear_change,
    change_gens,
    field_element,
    field_of,
    format_polynomial,
    gcd,
    gcd_many,
    make_polynomial,
    monomials_of_degree,
    nullspace,
    random_linear_change,
    random_polynomial,
    variable,
)
from src.curves import PlaneCurve, is_reduced
from src.errors import ComputationError, HypothesisError
from src.groebner import Ideal, colength, irrelevant_ideal, normal_form, regularity, saturate
from src.models import ErrorCode, FieldKind, FieldSpec, LeafCheckResult, MinimalDegreeMode

logger = logging.getLogger(__name__)

# Coefficient range of the points spanning a tangency line

LINE_COEFFICIENT_BOUND = 50


# ==================== 1-forms ====================

@dataclass(frozen=True)
class ProjectiveOneForm:
    """A dx + B dy + C dz with zero Euler contraction.

    Attributes:
        A, B, C: Homogeneous coefficients of a common degree k
        field: Coefficient field
    """
    A: Poly
    B: Poly
    C: Poly
    field: FieldSpec

    @property
    def coefficients(self) -> Tuple[Poly, Poly, Poly]:
        return (self.A, self.B, self.C)

    @property
    def k(self) -> int:
        """Common coefficient degree."""
        return max(p.total_degree() for p in self.coefficients if not p.is_zero)

    def transformed(self, matrix: Sequence[Sequence[int]]) -> "ProjectiveOneForm":
        """Pull back along v -> M v, matching ``PlaneCurve.transformed``."""
        moved = [apply_linear_change(p, matrix) for p in self.coefficients]
        pulled = []
        for j in range(3):
            total = Poly(0, *VARIABLES, domain=self.field.domain)
            for i in range(3):
                if matrix[i][j]:
                    total = total + moved[i].mul_ground(field_element(self.field, matrix[i][j]))
            pulled.append(total)
        return make_form(*pulled, field_spec=self.field)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "A": format_polynomial(self.A),
            "B": format_polynomial(self.B),
            "C": format_polynomial(self.C),
        }


def make_form(A: Poly, B: Poly, C: Poly, field_spec: Optional[FieldSpec] = None) -> ProjectiveOneForm:
    """Validate a coefficient triple.

    Raises:
        HypothesisError: ALL_ZERO, NOT_HOMOGENEOUS, DEGREE_MISMATCH or EULER_VIOLATED
    """
    coefficients = [change_gens(p, VARIABLES) for p in (A, B, C)]
    if field_spec is None:
        field_spec = field_of(coefficients[0])
    nonzero = [p for p in coefficients if not p.is_zero]
    if not nonzero:
        raise HypothesisError(ErrorCode.ALL_ZERO, "all three coefficients vanish")
    if any(not p.is_homogeneous for p in nonzero):
        raise HypothesisError(ErrorCode.NOT_HOMOGENEOUS, "coefficients must be homogeneous")
    degrees = {p.total_degree() for p in nonzero}
    if len(degrees) > 1:
        raise HypothesisError(ErrorCode.DEGREE_MISMATCH, f"coefficient degrees {sorted(degrees)} differ")

    x, y, z = (variable(v, field_spec, VARIABLES) for v in VARIABLES)
    euler = x * coefficients[0] + y * coefficients[1] + z * coefficients[2]
    if not euler.is_zero:
        raise HypothesisError(ErrorCode.EULER_VIOLATED, f"x*A + y*B + z*C = {format_polynomial(euler)}")
    return ProjectiveOneForm(*coefficients, field_spec)


def form_from_vector_field(P: Poly, Q: Poly, R: Poly) -> ProjectiveOneForm:
    """Contract the volume form with the radial field and (P, Q, R).

    A degree-m vector field gives a form with coefficients of degree m + 1:
    (yR - zQ, zP - xR, xQ - yP).
    """
    P, Q, R = (change_gens(p, VARIABLES) for p in (P, Q, R))
    field_spec = field_of(P)
    x, y, z = (variable(v, field_spec, VARIABLES) for v in VARIABLES)
    return make_form(y * R - z * Q, z * P - x * R, x * Q - y * P, field_spec)


# ==================== Foliations ====================

@dataclass
class Foliation:
    """A saturated 1-form with its singular scheme.

    Attributes:
        form: Coefficients with gcd 1
        m: Degree (coefficient degree - 1)
        singular_ideal: Saturated ideal of S
        deg_s: Degree of S, always m^2 + m + 1
        removed_factor: Common factor divided out of the input coefficients
    """
    form: ProjectiveOneForm
    m: int
    singular_ideal: Ideal
    deg_s: int
    removed_factor: Optional[Poly] = None

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "m": self.m,
            "deg_s": self.deg_s,
            "form": self.form.to_dict(),
            "removed_factor": format_polynomial(self.removed_factor) if self.removed_factor is not None else None,
        }


def make_foliation(
    A: Union[Poly, ProjectiveOneForm],
    B: Optional[Poly] = None,
    C: Optional[Poly] = None,
    field_spec: Optional[FieldSpec] = None,
) -> Foliation:
    """Saturate a 1-form and compute its singular scheme.

    Accepts either a ProjectiveOneForm or three coefficients.

    Raises:
        HypothesisError: from ``make_form``
        ComputationError: DEG_S_MISMATCH if deg S differs from m^2 + m + 1
    """
    form = A if isinstance(A, ProjectiveOneForm) else make_form(A, B, C, field_spec)
    common = gcd_many(list(form.coefficients))
    removed = None
    if not common.is_ground:
        removed = common
        form = ProjectiveOneForm(
            *(p.exquo(common) if not p.is_zero else p for p in form.coefficients),
            form.field,
        )
        logger.debug(f"divided out common factor {format_polynomial(common)}")

    m = form.k - 1
    singular = saturate(Ideal.of(list(form.coefficients), form.field, VARIABLES), irrelevant_ideal(VARIABLES, form.field))
    deg_s = colength(singular, projective=True)
    if deg_s != m * m + m + 1:
        raise ComputationError(
            ErrorCode.DEG_S_MISMATCH,
            f"degree {m} foliation has deg S = {deg_s}, expected {m * m + m + 1}",
        )
    return Foliation(form, m, singular, deg_s, removed)


def foliation_regularity(fol: Foliation) -> int:
    """Regularity of the singular scheme S."""
    if fol.m == 0:
        logger.warning("regularity of a degree 0 foliation is outside the m > 0 range")
    return regularity(fol.singular_ideal)


def random_foliation(rng: random.Random, field_spec: FieldSpec, m: int, coefficient_bound: int = 5) -> Foliation:
    """Random saturated foliation of degree m, from a random degree-m vector field."""
    while True:
        field_polys = [
            random_polynomial(rng, field_spec, m, VARIABLES, homogeneous=True, coefficient_bound=coefficient_bound)
            for _ in range(3)
        ]
        try:
            fol = make_foliation(form_from_vector_field(*field_polys))
        except HypothesisError:
            continue
        if fol.m == m:
            return fol
        logger.debug(f"random vector field gave degree {fol.m} instead of {m}, redrawing")


# ==================== Invariant curves ====================

def wedge_coefficients(form: ProjectiveOneForm, C: PlaneCurve) -> Tuple[Poly, Poly, Poly]:
    """Coefficients of form ^ dF: (A F_y - B F_x, B F_z - C F_y, C F_x - A F_z)."""
    Fx, Fy, Fz = C.partials()
    A, B, Cc = form.coefficients
    return (A * Fy - B * Fx, B * Fz - Cc * Fy, Cc * Fx - A * Fz)


def is_leaf(C: PlaneCurve, fol: Union[Foliation, ProjectiveOneForm]) -> LeafCheckResult:
    """Test whether C is invariant under the form, and a leaf.

    Raises:
        HypothesisError: NOT_REDUCED
    """
    if not is_reduced(C):
        raise HypothesisError(ErrorCode.NOT_REDUCED, f"{C} has a multiple component")
    form = fol.form if isinstance(fol, Foliation) else fol
    principal = Ideal.of([C.F], C.field, VARIABLES)
    remainders = [normal_form(w, principal) for w in wedge_coefficients(form, C)]
    invariant = all(r.is_zero for r in remainders)
    common = gcd_many(list(form.coefficients))
    coprime = gcd(common, C.F).is_ground
    return LeafCheckResult(
        is_leaf=invariant and coprime,
        factors_through_only=invariant and not coprime,
        tangency_remainders=[format_polynomial(r) for r in remainders],
    )


def tangency_degree_check(fol: Foliation, seed: int = 0, attempts: int = 20) -> int:
    """Count tangencies with a random line, as the degree of a scheme in P^2.

    A point p of the line n . v = 0 is a tangency when (A, B, C)(p) is
    proportional to n, so the tangency scheme is cut out by the line and
    the 2x2 minors of the two vectors. For a line missing S its degree is
    m, independently of the coefficient degrees the foliation was built
    from.

    Raises:
        ComputationError: DEGENERATE_LINE if every line drawn is invariant,
            degenerate, or meets S
    """
    fs = fol.form.field
    A, B, C = fol.form.coefficients
    for attempt in range(attempts):
        rng = random.Random(seed * 1000 + attempt)
        P = [rng.randint(-LINE_COEFFICIENT_BOUND, LINE_COEFFICIENT_BOUND) for _ in range(3)]
        Q = [rng.randint(-LINE_COEFFICIENT_BOUND, LINE_COEFFICIENT_BOUND) for _ in range(3)]
        normal = (P[1] * Q[2] - P[2] * Q[1], P[2] * Q[0] - P[0] * Q[2], P[0] * Q[1] - P[1] * Q[0])
        line = make_polynomial({(1, 0, 0): normal[0], (0, 1, 0): normal[1], (0, 0, 1): normal[2]}, fs)
        if line.is_zero:
            logger.debug(f"attempt {attempt}: points do not span a line")
            continue
        if colength(fol.singular_ideal.with_generators([line]), projective=True) != 0:
            logger.debug(f"attempt {attempt}: line meets the singular scheme")
            continue

        a, b, c = (field_element(fs, n) for n in normal)
        minors = [A.mul_ground(b) - B.mul_ground(a), B.mul_ground(c) - C.mul_ground(b), A.mul_ground(c) - C.mul_ground(a)]
        degree = colength(Ideal.of([line, *minors], fs, VARIABLES), projective=True)
        if degree is None:
            logger.debug(f"attempt {attempt}: line is invariant")
            continue

        if degree != fol.m:
            logger.error(f"tangency count {degree} on a general line differs from m = {fol.m}")
        return degree

    raise ComputationError(ErrorCode.DEGENERATE_LINE, f"no usable line in {attempts} attempts")


# ==================== Hamilton foliation ====================

@dataclass
class HamiltonFoliation:
    """The Hamilton foliation of a curve, in the coordinates where it was built.

    Attributes:
        foliation: The saturated foliation
        curve: The curve in the coordinates used
        matrix: Coordinate change applied to the input curve
        coordinate_seed: Derived seed of the successful attempt
        degree_dropped: gcd(F_x, F_y) was nontrivial, so m < d - 1
    """
    foliation: Foliation
    curve: PlaneCurve
    matrix: Tuple[Tuple[int, ...], ...]
    coordinate_seed: int
    degree_dropped: bool = False


def hamilton_foliation(
    C: PlaneCurve,
    seed: int = 0,
    attempts: int = 20,
    coefficient_bound: int = 3,
) -> HamiltonFoliation:
    """Foliation of degree d - 1 having C as a leaf.

    Coordinates are changed until gcd(F, F_x) = 1 and z does not divide F;
    the vector field (F_y, -F_x, 0) then gives the form
    (z F_x, z F_y, -x F_x - y F_y).

    Raises:
        HypothesisError: NOT_REDUCED
        ComputationError: COORDINATE_SEARCH_FAILED
    """
    if not is_reduced(C):
        raise HypothesisError(ErrorCode.NOT_REDUCED, f"{C} has a multiple component")

    for attempt in range(attempts):
        derived = seed * 1000 + attempt
        if attempt == 0:
            matrix = IDENTITY
        else:
            matrix = random_linear_change(random.Random(derived), C.field, coefficient_bound)
        D = C.transformed(matrix)
        Fx, Fy, _ = D.partials()
        if not gcd(D.F, Fx).is_ground:
            logger.debug(f"attempt {attempt}: F_x vanishes along a component")
            continue
        if D.F.eval(Z, 0).is_zero:
            logger.debug(f"attempt {attempt}: z divides F")
            continue

        zero = Poly(0, *VARIABLES, domain=C.field.domain)
        fol = make_foliation(form_from_vector_field(Fy, -Fx, zero))
        if not is_leaf(D, fol).is_leaf:
            raise ComputationError(ErrorCode.COORDINATE_SEARCH_FAILED, f"{D} is not a leaf of its Hamilton foliation")

        dropped = fol.m < C.d - 1
        if dropped:
            logger.warning(f"Hamilton foliation of {D} has degree {fol.m} < d - 1 = {C.d - 1}")
        logger.info(f"Hamilton foliation of degree {fol.m} at attempt {attempt} (seed {derived})")
        return HamiltonFoliation(fol, D, matrix, derived, dropped)

    raise ComputationError(
        ErrorCode.COORDINATE_SEARCH_FAILED,
        f"no coordinates with gcd(F, F_x) = 1 and z not dividing F in {attempts} attempts",
    )


# ==================== Minimal degree ====================

@dataclass
class MinimalDegreeResult:
    """Least degree found by ``minimal_degree``.

    Attributes:
        mode: Search mode
        m: The least degree
        form: Witness 1-form
        foliation: Saturated witness (leaf mode only)
        gaps: Degrees with invariant forms but no leaf witness
    """
    mode: MinimalDegreeMode
    m: int
    form: ProjectiveOneForm
    foliation: Optional[Foliation] = None
    gaps: List[int] = field(default_factory=list)


# Each unknown coefficient of A, B or C feeds two wedge coefficients:
# (wedge index, partial index, sign)
_WEDGE_TERMS = {
    0: ((0, 1, 1), (2, 2, -1)),
    1: ((0, 0, -1), (1, 2, 1)),
    2: ((1, 1, -1), (2, 0, 1)),
}


def _invariance_system(C: PlaneCurve, k: int, reduce) -> Tuple[LinearSystem, List[Tuple[int, Tuple[int, ...]]]]:
    """Linear conditions on forms with coefficient degree k + 1 leaving C invariant."""
    fs = C.field
    monomials = list(monomials_of_degree(3, k + 1))
    unknowns = [(component, monom) for component in range(3) for monom in monomials]

    rows: Dict[tuple, Dict[int, object]] = {}

    def add(key: tuple, column: int, value) -> None:
        row = rows.setdefault(key, {})
        row[column] = row.get(column, fs.domain.zero) + value

    for column, (component, monom) in enumerate(unknowns):
        shifted = tuple(e + (1 if i == component else 0) for i, e in enumerate(monom))
        add(("euler", shifted), column, fs.domain.one)
        for wedge_index, partial_index, sign in _WEDGE_TERMS[component]:
            remainder = reduce(monom, partial_index)
            for rem_monom, coeff in remainder.terms():
                add(("wedge", wedge_index, rem_monom), column, coeff if sign > 0 else -coeff)

    width = len(unknowns)
    ordered = []
    for key in sorted(rows, key=repr):
        dense = [fs.domain.zero] * width
        for column, value in rows[key].items():
            dense[column] = value
        ordered.append(dense)
    return LinearSystem(ordered, fs, width=width), unknowns


def _form_from_vector(vector: Sequence, unknowns, fs: FieldSpec) -> Tuple[Poly, Poly, Poly]:
    terms = [{}, {}, {}]
    for value, (component, monom) in zip(vector, unknowns):
        if value:
            terms[component][monom] = value
    return tuple(
        Poly.from_dict(t, *VARIABLES, domain=fs.domain) if t else Poly(0, *VARIABLES, domain=fs.domain)
        for t in terms
    )


def minimal_degree(
    C: PlaneCurve,
    mode: MinimalDegreeMode = MinimalDegreeMode.LEAF,
    seed: int = 0,
    random_combinations: int = 50,
    random_bound: int = 1000,
) -> MinimalDegreeResult:
    """Least degree of a foliation leaving C invariant.

    For k = 0, 1, ..., d - 1 solves the linear system on forms of
    coefficient degree k + 1. FACTORS_THROUGH mode stops at the first
    nonzero solution. LEAF mode also needs a solution whose coefficient gcd
    is coprime to F; it tries the nullspace basis, then seeded random
    combinations, and records a gap when none qualifies.

    Raises:
        HypothesisError: NOT_REDUCED
        ComputationError: LEAF_WITNESS_NOT_FOUND if no degree below d works
    """
    if not is_reduced(C):
        raise HypothesisError(ErrorCode.NOT_REDUCED, f"{C} has a multiple component")

    fs = C.field
    partials = C.partials()
    principal = Ideal.of([C.F], fs, VARIABLES)
    cache: Dict[Tuple[Tuple[int, ...], int], Poly] = {}

    def reduce(monom: Tuple[int, ...], partial_index: int) -> Poly:
        key = (monom, partial_index)
        if key not in cache:
            product = make_polynomial({monom: 1}, fs) * partials[partial_index]
            cache[key] = normal_form(product, principal)
        return cache[key]

    gaps: List[int] = []
    for k in range(C.d):
        system, unknowns = _invariance_system(C, k, reduce)
        basis = nullspace(system)
        logger.debug(f"degree {k}: {len(unknowns)} unknowns, nullspace dimension {len(basis)}")
        if not basis:
            continue

        if mode == MinimalDegreeMode.FACTORS_THROUGH:
            witness = make_form(*_form_from_vector(basis[0], unknowns, fs), field_spec=fs)
            return MinimalDegreeResult(mode, k, witness)

        rng = random.Random(seed * 1000 + k)
        candidates = list(basis)
        for _ in range(random_combinations):
            combination = [fs.domain.zero] * len(unknowns)
            for vector in basis:
                if fs.kind == FieldKind.RATIONALS:
                    c = field_element(fs, rng.randint(-random_bound, random_bound))
                else:
                    c = field_element(fs, rng.randrange(fs.characteristic))
                combination = [a + c * b for a, b in zip(combination, vector)]
            candidates.append(combination)

        for index, vector in enumerate(candidates):
            coefficients = _form_from_vector(vector, unknowns, fs)
            if all(p.is_zero for p in coefficients):
                continue
            if not gcd(gcd_many(list(coefficients)), C.F).is_ground:
                continue
            fol = make_foliation(make_form(*coefficients, field_spec=fs))
            if fol.m != k:
                logger.warning(f"leaf witness at degree {k} saturates to degree {fol.m}")
            logger.debug(f"leaf witness at degree {k} from candidate {index}")
            return MinimalDegreeResult(mode, fol.m, fol.form, fol, gaps)

        logger.warning(f"degree {k}: invariant forms exist but none has C as a leaf")
        gaps.append(k)

    raise ComputationError(ErrorCode.LEAF_WITNESS_NOT_FOUND, f"no foliation of degree < {C.d} found for {C}")
