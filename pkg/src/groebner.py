"""Ideal arithmetic on top of sympy's Buchberger implementation.

Ideals keep their reduced Groebner bases cached per term order. On top of
the bases this module computes normal forms, quotients, saturations,
elimination, Krull dimension, Hilbert functions, colength and regularity.
``oracle_colength`` recomputes colength from Macaulay matrices alone, with
no Groebner basis anywhere, and is used to cross-check the staircase path.

Usage:
    from src.groebner import Ideal, colength, saturate, irrelevant_ideal

    J = Ideal.of([Fx, Fy, Fz])
    sigma_ideal = saturate(J, irrelevant_ideal(J.gens, J.field))
    tau = colength(sigma_ideal, projective=True)

Term orders are named by strings: "grevlex" (default), "lex", "elim:<v>"
(lex block on v, grevlex on the rest, v moved first) and "lexlast:<v>"
(lex with v as the smallest variable).
"""

import logging
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly, Symbol
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import ProductOrder, grevlex, lex

from src.algebra import change_gens, field_of, format_polynomial, monomials_of_degree, variable
from src.errors import ComputationError, LeafboundError
from src.models import ErrorCode, FieldSpec

logger = logging.getLogger(__name__)

GREVLEX = "grevlex"
LEX = "lex"

# Sentinel for a colength that is not finite
INFINITE = None

SATURATION_MAX_ITERATIONS = 50

# Auxiliary variable for intersections and the Rabinowitsch trick
_AUX = sympy.Dummy("t")

# lex on the first variable, grevlex on the rest
_ELIMINATE_FIRST = ProductOrder((lex, lambda m: m[:1]), (grevlex, lambda m: m[1:]))


def elimination_order(var: Symbol) -> str:
    """Name of the order that eliminates ``var``."""
    return f"elim:{var}"


def lex_last(var: Symbol) -> str:
    """Name of the lex order with ``var`` as the smallest variable."""
    return f"lexlast:{var}"


def _resolve_order(order: str, gens: Tuple[Symbol, ...]):
    """Map an order name to (sympy order, generator tuple used for the computation)."""
    if order == GREVLEX:
        return grevlex, gens
    if order == LEX:
        return lex, gens
    kind, _, name = order.partition(":")
    matches = [g for g in gens if str(g) == name]
    if not matches:
        raise LeafboundError(ErrorCode.UNKNOWN_VARIABLE, f"order {order} names no generator of {gens}")
    var = matches[0]
    others = tuple(g for g in gens if g != var)
    if kind == "elim":
        return _ELIMINATE_FIRST, (var,) + others
    if kind == "lexlast":
        return lex, others + (var,)
    raise ValueError(f"Unknown term order: {order}")


# ==================== Ideals ====================

@dataclass(eq=False)
class Ideal:
    """An ideal of k[gens] given by generators.

    Attributes:
        generators: Nonzero generators
        gens: Ring variables
        field: Coefficient field
        saturated: True once saturated with respect to the irrelevant ideal
    """
    generators: List[Poly]
    gens: Tuple[Symbol, ...]
    field: FieldSpec
    saturated: bool = False
    _bases: Dict[str, List[Poly]] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def of(
        cls,
        polys: Sequence[Poly],
        field_spec: Optional[FieldSpec] = None,
        gens: Optional[Sequence[Symbol]] = None,
        saturated: bool = False,
    ) -> "Ideal":
        """Build an ideal, dropping zero generators and aligning generators.

        Raises:
            LeafboundError: FIELD_MISMATCH if the polynomials live over different fields
        """
        polys = list(polys)
        if gens is None:
            if not polys:
                raise ValueError("generators needed to infer the ring of an empty ideal")
            gens = polys[0].gens
        gens = tuple(gens)
        if field_spec is None:
            if not polys:
                raise ValueError("field needed for an empty ideal")
            field_spec = field_of(polys[0])
        generators = []
        for p in polys:
            if p.domain != field_spec.domain:
                raise LeafboundError(ErrorCode.FIELD_MISMATCH, f"{p.domain} vs {field_spec.domain}")
            if not p.is_zero:
                generators.append(change_gens(p, gens))
        return cls(generators, gens, field_spec, saturated)

    def with_generators(self, extra: Sequence[Poly]) -> "Ideal":
        """The ideal plus extra generators."""
        return Ideal.of(self.generators + list(extra), self.field, self.gens)

    @property
    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous for g in self.generators)

    def is_unit(self) -> bool:
        """True if the ideal is the whole ring."""
        return any(g.is_ground for g in groebner_basis(self))

    def contains(self, other: "Ideal") -> bool:
        """True if every generator of ``other`` lies in this ideal."""
        return all(normal_form(g, self).is_zero for g in other.generators)

    def same_as(self, other: "Ideal") -> bool:
        """Mutual containment."""
        return self.contains(other) and other.contains(self)

    def __str__(self) -> str:
        return "(" + ", ".join(format_polynomial(g) for g in self.generators) + ")"


def unit_ideal(gens: Sequence[Symbol], field_spec: FieldSpec) -> Ideal:
    """The whole ring."""
    return Ideal.of([Poly(1, *gens, domain=field_spec.domain)], field_spec, gens)


def irrelevant_ideal(gens: Sequence[Symbol], field_spec: FieldSpec) -> Ideal:
    """The ideal generated by all variables."""
    return Ideal.of([variable(g, field_spec, gens) for g in gens], field_spec, gens)


def _is_irrelevant(J: Ideal) -> bool:
    covered = set()
    for g in J.generators:
        if not (g.is_monomial and g.total_degree() == 1):
            return False
        covered.add(g.monoms()[0].index(1))
    return covered == set(range(len(J.gens)))


# ==================== Groebner bases and normal forms ====================

def _compute_basis(I: Ideal, order: str) -> List[Poly]:
    if not I.generators:
        return []
    sym_order, gens = _resolve_order(order, I.gens)
    polys = [change_gens(g, gens) for g in I.generators]
    basis = sympy.groebner(polys, *gens, order=sym_order, domain=I.field.domain, method="buchberger")
    result = [change_gens(Poly(g, *gens, domain=I.field.domain), I.gens) for g in basis.exprs]
    logger.debug(f"{order} basis of {len(I.generators)} generators: {len(result)} elements")
    return result


def groebner_basis(I: Ideal, order: str = GREVLEX) -> List[Poly]:
    """Reduced, monic Groebner basis of ``I`` for the named order (cached).

    The basis polynomials are expressed over ``I.gens`` whatever the order.
    """
    with I._lock:
        basis = I._bases.get(order)
        if basis is None:
            basis = _compute_basis(I, order)
            I._bases[order] = basis
    return list(basis)


def normal_form(p: Poly, I: Ideal, order: str = GREVLEX) -> Poly:
    """Remainder of ``p`` modulo the Groebner basis of ``I``; zero iff p is in I."""
    p = change_gens(p, I.gens)
    basis = groebner_basis(I, order)
    if not basis:
        return p
    if p.is_zero:
        return p
    sym_order, gens = _resolve_order(order, I.gens)
    if gens != I.gens:
        raise ValueError(f"normal_form needs an order on the ideal's own variables, got {order}")
    _, remainder = sympy.reduced(p, basis, *gens, order=sym_order, domain=I.field.domain, polys=True)
    return change_gens(Poly(remainder, *gens, domain=I.field.domain), I.gens)


def dump_basis(I: Ideal, order: str = GREVLEX) -> str:
    """One basis element per line, in canonical text, for golden comparisons."""
    return "\n".join(format_polynomial(g) for g in groebner_basis(I, order))


# ==================== Leading monomials and dimension ====================

def leading_monomials(I: Ideal) -> List[Tuple[int, ...]]:
    """Leading exponent vectors of the grevlex basis."""
    return [g.monoms(order="grevlex")[0] for g in groebner_basis(I, GREVLEX)]


def _divides(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _krull_from_monomials(lms: List[Tuple[int, ...]], n: int) -> int:
    if any(not any(m) for m in lms):
        return -1
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            allowed = set(subset)
            if not any(all(i in allowed for i, e in enumerate(m) if e) for m in lms):
                return size
    return 0


def krull_dimension(I: Ideal) -> int:
    """Krull dimension of k[gens]/I; -1 for the unit ideal.

    Computed from the initial ideal: the largest set of variables that
    supports no leading monomial.
    """
    return _krull_from_monomials(leading_monomials(I), len(I.gens))


def _hilbert_value(lms: List[Tuple[int, ...]], n: int, t: int) -> int:
    return sum(
        1 for m in monomials_of_degree(n, t)
        if not any(_divides(lm, m) for lm in lms)
    )


def _stable_degree(lms: List[Tuple[int, ...]], n: int) -> int:
    """A degree from which the Hilbert function equals the Hilbert polynomial."""
    if not lms:
        return 0
    return sum(max(m[i] for m in lms) for i in range(n))


# ==================== Colength, Hilbert function, regularity ====================

def colength(I: Ideal, projective: bool = False) -> Optional[int]:
    """Vector-space dimension of the quotient, or INFINITE (None).

    Args:
        I: The ideal
        projective: Count the degree of the projective scheme of a homogeneous
            ideal (stable Hilbert value) instead of dim k[gens]/I

    Returns:
        Number of standard monomials (affine), the constant Hilbert polynomial
        (projective), or INFINITE when that number is not finite
    """
    lms = leading_monomials(I)
    n = len(I.gens)
    dimension = _krull_from_monomials(lms, n)
    if dimension == -1:
        return 0
    if not projective:
        if dimension != 0:
            return INFINITE
        bounds = []
        for i in range(n):
            pure = [m[i] for m in lms if m[i] and all(e == 0 for j, e in enumerate(m) if j != i)]
            bounds.append(min(pure))
        return sum(
            1 for t in range(sum(bounds) + 1) for m in monomials_of_degree(n, t)
            if all(e < b for e, b in zip(m, bounds)) and not any(_divides(lm, m) for lm in lms)
        )
    if not I.is_homogeneous:
        raise LeafboundError(ErrorCode.NOT_HOMOGENEOUS, "projective colength needs a homogeneous ideal")
    if dimension == 0:
        return 0
    if dimension >= 2:
        return INFINITE
    return _hilbert_value(lms, n, _stable_degree(lms, n))


@dataclass
class HilbertTable:
    """Values of the Hilbert function of k[gens]/I.

    Attributes:
        values: degree -> dimension of the degree-t piece
        stable_value: Constant Hilbert polynomial, or None if not constant
        stabilized: The table reaches the stable value by its last degree
        saturated: Whether the ideal was saturated
    """
    values: Dict[int, int]
    stable_value: Optional[int]
    stabilized: bool
    saturated: bool

    def first_degree_reaching(self, value: int) -> Optional[int]:
        """Least tabulated degree whose value equals ``value``."""
        for t in sorted(self.values):
            if self.values[t] == value:
                return t
        return None


def hilbert_function(I: Ideal, up_to: int) -> HilbertTable:
    """Hilbert function of a homogeneous ideal for degrees 0..up_to."""
    if not I.is_homogeneous:
        raise LeafboundError(ErrorCode.NOT_HOMOGENEOUS, "Hilbert function needs a homogeneous ideal")
    if not I.saturated:
        logger.debug("Hilbert function of an ideal not marked saturated")
    lms = leading_monomials(I)
    n = len(I.gens)
    values = {t: _hilbert_value(lms, n, t) for t in range(up_to + 1)}
    stable = colength(I, projective=True)
    return HilbertTable(
        values=values,
        stable_value=stable,
        stabilized=stable is not None and values[up_to] == stable,
        saturated=I.saturated,
    )


def regularity(I: Ideal) -> int:
    """1 + the least degree where the Hilbert function reaches its stable value.

    0 for the empty scheme. The ideal should be saturated.

    Raises:
        ComputationError: NOT_ZERO_DIMENSIONAL if the scheme is not finite
    """
    if not I.saturated:
        logger.warning("regularity of an ideal not marked saturated")
    degree = colength(I, projective=True)
    if degree is INFINITE:
        raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, "regularity needs a finite scheme")
    if degree == 0:
        return 0
    lms = leading_monomials(I)
    n = len(I.gens)
    for t in range(_stable_degree(lms, n) + 1):
        if _hilbert_value(lms, n, t) == degree:
            return t + 1
    raise ComputationError(ErrorCode.NOT_STABILIZED, "Hilbert function never reached its stable value")


# ==================== Elimination, intersection, quotient, saturation ====================

def _eliminate_auxiliary(polys: Sequence[Poly], I_gens: Tuple[Symbol, ...], field_spec: FieldSpec) -> Ideal:
    """Intersect the ideal of k[t, gens] generated by ``polys`` with k[gens]."""
    ext = (_AUX,) + I_gens
    lifted = [change_gens(p, ext) for p in polys if not p.is_zero]
    basis = sympy.groebner(lifted, *ext, order=_ELIMINATE_FIRST, domain=field_spec.domain, method="buchberger")
    kept = []
    for expr in basis.exprs:
        g = Poly(expr, *ext, domain=field_spec.domain)
        if g.degree(_AUX) == 0:
            kept.append(change_gens(g, I_gens))
    return Ideal.of(kept, field_spec, I_gens)


def intersect(I: Ideal, K: Ideal) -> Ideal:
    """I intersect K, by eliminating t from t*I + (1 - t)*K."""
    ext = (_AUX,) + I.gens
    t = variable(_AUX, I.field, ext)
    one = Poly(1, *ext, domain=I.field.domain)
    polys = [t * change_gens(g, ext) for g in I.generators]
    polys += [(one - t) * change_gens(k, ext) for k in K.generators]
    return _eliminate_auxiliary(polys, I.gens, I.field)


def quotient_by_element(I: Ideal, g: Poly) -> Ideal:
    """(I : g) = (I intersect (g)) / g."""
    g = change_gens(g, I.gens)
    if normal_form(g, I).is_zero:
        return unit_ideal(I.gens, I.field)
    both = intersect(I, Ideal.of([g], I.field, I.gens))
    return Ideal.of([k.exquo(g) for k in both.generators], I.field, I.gens)


def ideal_quotient(I: Ideal, J: Ideal) -> Ideal:
    """(I : J) = {p : pJ contained in I}, the intersection of (I : g) over generators g of J."""
    result = None
    for g in J.generators:
        part = quotient_by_element(I, g)
        result = part if result is None else intersect(result, part)
    if result is None:
        return unit_ideal(I.gens, I.field)
    return result


def _saturate_principal(I: Ideal, g: Poly) -> Ideal:
    """(I : g^inf) as (I + (1 - t*g)) intersect k[gens]."""
    ext = (_AUX,) + I.gens
    t = variable(_AUX, I.field, ext)
    one = Poly(1, *ext, domain=I.field.domain)
    polys = [change_gens(h, ext) for h in I.generators] + [one - t * change_gens(g, ext)]
    return _eliminate_auxiliary(polys, I.gens, I.field)


def _saturate_irrelevant(I: Ideal) -> Optional[Ideal]:
    """Saturate a homogeneous ideal by the irrelevant ideal via a variable missing V(I).

    With v last in grevlex, dividing every basis element by its largest power
    of v gives (I : v^inf), which is the saturation when V(I) misses v = 0.
    Returns None when no variable qualifies.
    """
    for var in reversed(I.gens):
        section = I.with_generators([variable(var, I.field, I.gens)])
        if krull_dimension(section) > 0:
            continue
        order_gens = tuple(g for g in I.gens if g != var) + (var,)
        reordered = [change_gens(g, order_gens) for g in I.generators]
        gb = sympy.groebner(reordered, *order_gens, order=grevlex, domain=I.field.domain, method="buchberger")
        divided = []
        for expr in gb.exprs:
            g = Poly(expr, *order_gens, domain=I.field.domain)
            k = min(m[-1] for m in g.monoms())
            terms = {m[:-1] + (m[-1] - k,): c for m, c in g.terms()}
            divided.append(change_gens(Poly.from_dict(terms, *order_gens, domain=I.field.domain), I.gens))
        logger.debug(f"saturated by the irrelevant ideal through {var}")
        return Ideal.of(divided, I.field, I.gens)
    return None


def saturate(I: Ideal, J: Ideal, max_iterations: int = SATURATION_MAX_ITERATIONS) -> Ideal:
    """(I : J^inf).

    A principal J uses the Rabinowitsch trick; J = (x, y, z) with I
    homogeneous divides out a variable that misses V(I); otherwise the
    quotient is iterated until mutual containment.

    Raises:
        ComputationError: SATURATION_DIVERGED after ``max_iterations`` quotients
    """
    irrelevant = _is_irrelevant(J)
    result = None
    if not J.generators:
        result = unit_ideal(I.gens, I.field)
    elif J.is_unit() or I.is_unit():
        result = Ideal.of(I.generators, I.field, I.gens)
    elif len(J.generators) == 1:
        result = _saturate_principal(I, J.generators[0])
    elif irrelevant and I.is_homogeneous:
        result = _saturate_irrelevant(I)

    if result is None:
        current = I
        for iteration in range(max_iterations):
            following = ideal_quotient(current, J)
            if current.contains(following):
                logger.debug(f"saturation stabilized after {iteration} quotients")
                result = current
                break
            current = following
        else:
            raise ComputationError(
                ErrorCode.SATURATION_DIVERGED,
                f"no stabilization after {max_iterations} quotients",
            )

    result.saturated = I.saturated or irrelevant
    return result


def eliminate(I: Ideal, keep: Symbol) -> Poly:
    """Monic generator of I intersect k[keep], for zero-dimensional affine I.

    Raises:
        ComputationError: NOT_ZERO_DIMENSIONAL otherwise
    """
    dimension = krull_dimension(I)
    if dimension == -1:
        return Poly(1, keep, domain=I.field.domain)
    if dimension != 0:
        raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, f"cannot eliminate down to {keep} in {I}")
    position = I.gens.index(keep)
    for g in groebner_basis(I, lex_last(keep)):
        if all(e == 0 for m in g.monoms() for i, e in enumerate(m) if i != position):
            terms = {(m[position],): c for m, c in g.terms()}
            return Poly.from_dict(terms, keep, domain=I.field.domain).monic()
    raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, f"no univariate element in {keep}")


# ==================== Macaulay oracle ====================

def _oracle_value(I: Ideal, bound: int) -> int:
    n = len(I.gens)
    domain = I.field.domain
    columns = [m for t in range(bound, -1, -1) for m in monomials_of_degree(n, t)]
    index = {m: i for i, m in enumerate(columns)}
    half = bound // 2
    low_start = sum(1 for m in columns if sum(m) > half)
    low_count = len(columns) - low_start

    rows = []
    for g in I.generators:
        degree = g.total_degree()
        terms = g.terms()
        for t in range(bound - degree + 1):
            for shift in monomials_of_degree(n, t):
                row = [domain.zero] * len(columns)
                for monom, coeff in terms:
                    row[index[tuple(a + b for a, b in zip(monom, shift))]] = coeff
                rows.append(row)
    if not rows:
        return low_count

    _, pivots = DomainMatrix(rows, (len(rows), len(columns)), domain).rref()
    independent = sum(1 for p in pivots if p >= low_start)
    return low_count - independent


def oracle_colength(I: Ideal, degree_bound: int) -> int:
    """Affine colength from Macaulay matrices, without any Groebner basis.

    Multiples of the generators up to ``degree_bound`` span a subspace V;
    the colength is the number of monomials of degree <= bound//2 minus
    dim(V restricted to those degrees). The value must agree at
    ``degree_bound`` and ``degree_bound + 1``.

    Raises:
        ComputationError: NOT_STABILIZED if the two values differ
    """
    first = _oracle_value(I, degree_bound)
    second = _oracle_value(I, degree_bound + 1)
    logger.debug(f"oracle: bound {degree_bound} -> {first}, bound {degree_bound + 1} -> {second}")
    if first != second:
        raise ComputationError(
            ErrorCode.NOT_STABILIZED,
            f"oracle gave {first} at bound {degree_bound} and {second} at {degree_bound + 1}",
        )
    return first
