"""Singularity invariants of reduced plane curves.

Computes the singular scheme of a curve F = 0 in P^2 (the saturated
Jacobian ideal), its degree tau and regularity sigma, and per-cluster local
data: Tjurina, Milnor and polar lengths, Saito's quasi-homogeneity test and
the count u of non-quasi-homogeneous points.

Clusters are the Galois orbits of singular points seen through the
x-eliminant after a seeded coordinate change puts the scheme in shape
position. Everything stays in the base field.

Usage:
    from src.curves import PlaneCurve, analyze_curve
    from src.models import FieldSpec

    C = PlaneCurve.from_text("x^3*y - x*y^3", FieldSpec.rationals())
    inv = analyze_curve(C, seed=0)
    print(inv.tau, inv.sigma, inv.u)
"""

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Set, Tuple

from sympy import Poly, nextprime
from sympy.polys.polyerrors import DomainError

from src.algebra import (
    AFFINE_VARIABLES,
    IDENTITY,
    VARIABLES,
    X,
    Y,
    Z,
    apply_linear_change,
    change_gens,
    constant,
    dehomogenize,
    differentiate,
    field_element,
    field_of,
    format_polynomial,
    gcd_many,
    make_polynomial,
    parse_polynomial,
    random_linear_change,
    substitute_linear,
    variable,
)
from src.config import AnalysisConfig
from src.errors import ComputationError, HypothesisError, LeafboundError
from src.groebner import (
    Ideal,
    colength,
    eliminate,
    groebner_basis,
    irrelevant_ideal,
    krull_dimension,
    regularity,
    saturate,
)
from src.models import CurveInvariants, ErrorCode, FieldKind, FieldSpec, Irreducibility, SingularCluster

logger = logging.getLogger(__name__)


# ==================== Curves ====================

@dataclass(frozen=True)
class PlaneCurve:
    """A curve F = 0 in P^2 over a field.

    Attributes:
        F: Homogeneous polynomial in x, y, z of degree >= 1
        field: Coefficient field
    """
    F: Poly
    field: FieldSpec

    def __post_init__(self):
        F = change_gens(self.F, VARIABLES)
        if F.domain != self.field.domain:
            raise LeafboundError(ErrorCode.FIELD_MISMATCH, f"{F.domain} vs {self.field.domain}")
        if F.is_zero or F.is_ground:
            raise LeafboundError(ErrorCode.DEGREE_TOO_LOW, "a curve needs a polynomial of degree >= 1")
        if not F.is_homogeneous:
            raise LeafboundError(ErrorCode.NOT_HOMOGENEOUS, f"{format_polynomial(F)} is not homogeneous")
        object.__setattr__(self, "F", F)

    @classmethod
    def from_text(cls, text: str, field_spec: FieldSpec) -> "PlaneCurve":
        """Parse a curve equation."""
        return cls(parse_polynomial(text, field_spec), field_spec)

    @property
    def d(self) -> int:
        return self.F.total_degree()

    def partials(self) -> Tuple[Poly, Poly, Poly]:
        return tuple(differentiate(self.F, v) for v in VARIABLES)

    def affine_equation(self) -> Poly:
        """f(x, y) = F(x, y, 1)."""
        return dehomogenize(self.F, Z)

    def transformed(self, matrix: Sequence[Sequence[int]]) -> "PlaneCurve":
        """The curve F(M v)."""
        if tuple(map(tuple, matrix)) == IDENTITY:
            return self
        return PlaneCurve(apply_linear_change(self.F, matrix), self.field)

    def __str__(self) -> str:
        return format_polynomial(self.F)


def jacobian_ideal(C: PlaneCurve) -> Ideal:
    """(F_x, F_y, F_z), not saturated."""
    return Ideal.of(list(C.partials()), C.field, VARIABLES)


def tjurina_ideal(f: Poly) -> Ideal:
    """Affine (f, f_x, f_y) in k[x, y]."""
    f = change_gens(f, AFFINE_VARIABLES)
    return Ideal.of([f, differentiate(f, X), differentiate(f, Y)], field_of(f), AFFINE_VARIABLES)


def is_reduced(C: PlaneCurve) -> bool:
    """gcd(F, F_x, F_y, F_z) = 1.

    In characteristic p a p-th power factor has all partials divisible by
    it, so the same test rejects it.
    """
    return gcd_many([C.F, *C.partials()]).is_ground


# ==================== Singular scheme ====================

@lru_cache(maxsize=256)
def singular_scheme(C: PlaneCurve) -> Tuple[Ideal, int]:
    """Saturated Jacobian ideal of C and its degree tau.

    Raises:
        HypothesisError: NOT_REDUCED, or CHAR_DIVIDES_DEGREE when p | d
            (Euler's relation no longer puts F in the Jacobian ideal)
    """
    if not is_reduced(C):
        raise HypothesisError(ErrorCode.NOT_REDUCED, f"{C} has a multiple component")
    if C.field.divides(C.d):
        raise HypothesisError(
            ErrorCode.CHAR_DIVIDES_DEGREE,
            f"characteristic {C.field.characteristic} divides the degree {C.d}",
        )
    sigma_ideal = saturate(jacobian_ideal(C), irrelevant_ideal(VARIABLES, C.field))
    tau = colength(sigma_ideal, projective=True)
    if tau is None:
        raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, f"singular scheme of {C} is not finite")
    logger.debug(f"singular scheme of {C}: degree {tau}")
    return sigma_ideal, tau


def regularity_sigma(C: PlaneCurve) -> int:
    """Regularity of the singular scheme; 0 for a smooth curve."""
    sigma_ideal, tau = singular_scheme(C)
    if tau == 0:
        return 0
    return regularity(sigma_ideal)


# ==================== Clusters ====================

@dataclass
class ClusterSplit:
    """A curve in shape position, with its clusters.

    Attributes:
        curve: The input curve
        transformed: The curve after the coordinate change
        matrix: Coordinate change applied
        coordinate_seed: Derived seed of the successful attempt
        tjurina: Affine Tjurina ideal of the transformed curve
        eliminant: Squarefree part of the x-eliminant
        factors: Irreducible factors of the eliminant, one per cluster
    """
    curve: PlaneCurve
    transformed: PlaneCurve
    matrix: Tuple[Tuple[int, ...], ...]
    coordinate_seed: int
    tjurina: Optional[Ideal] = None
    eliminant: Optional[Poly] = None
    factors: List[Poly] = field(default_factory=list)


def _attempt_seed(seed: int, attempt: int) -> int:
    return seed * 1000 + attempt


def _lift(p: Poly) -> Poly:
    return change_gens(p, AFFINE_VARIABLES)


def split_clusters(
    C: PlaneCurve,
    seed: int = 0,
    attempts: int = 20,
    coefficient_bound: int = 3,
) -> ClusterSplit:
    """Find coordinates putting the singular points in shape position.

    Attempt 0 keeps the coordinates; attempt k draws a random invertible
    change from ``random.Random(seed * 1000 + k)``. An attempt succeeds when
    no singular point lies on z = 0 and x separates the singular points.

    Raises:
        ComputationError: SHAPE_POSITION_FAILED when every attempt fails
    """
    _, tau = singular_scheme(C)
    if tau == 0:
        return ClusterSplit(C, C, IDENTITY, _attempt_seed(seed, 0))

    for attempt in range(attempts):
        derived = _attempt_seed(seed, attempt)
        if attempt == 0:
            matrix = IDENTITY
        else:
            matrix = random_linear_change(random.Random(derived), C.field, coefficient_bound)
        D = C.transformed(matrix)
        sigma_ideal, _ = singular_scheme(D)

        at_infinity = sigma_ideal.with_generators([variable(Z, C.field, VARIABLES)])
        if colength(at_infinity, projective=True) != 0:
            logger.debug(f"attempt {attempt}: singular point on z = 0")
            continue

        T = tjurina_ideal(D.affine_equation())
        affine_tau = colength(T)
        if affine_tau != tau:
            logger.warning(f"attempt {attempt}: affine Tjurina length {affine_tau} differs from tau {tau}")
            continue

        sx = eliminate(T, X).sqf_part()
        sy = eliminate(T, Y).sqf_part()
        radical = T.with_generators([_lift(sx), _lift(sy)])
        points = colength(radical)
        if points != sx.degree():
            logger.debug(f"attempt {attempt}: {points} points but eliminant degree {sx.degree()}")
            continue

        _, factor_list = sx.factor_list()
        factors = sorted((f.monic() for f, _ in factor_list), key=lambda f: (f.degree(), format_polynomial(f)))
        logger.info(f"shape position at attempt {attempt} (seed {derived}): {len(factors)} clusters, {points} points")
        return ClusterSplit(C, D, matrix, derived, T, sx, factors)

    raise ComputationError(
        ErrorCode.SHAPE_POSITION_FAILED,
        f"no coordinate change in {attempts} attempts separates the singular points; try a larger prime",
    )


def _random_combination(polys: Sequence[Poly], rng: random.Random, field_spec: FieldSpec, bound: int) -> Poly:
    result = Poly(0, *polys[0].gens, domain=field_spec.domain)
    for p in polys:
        c = rng.randint(-bound, bound) or 1
        result = result + p.mul_ground(field_element(field_spec, c))
    return result


def _isolated_length(
    E: Ideal,
    f: Poly,
    support: Ideal,
    h: Poly,
    q: Poly,
    rng: random.Random,
    attempts: int,
    bound: int,
) -> int:
    """Length of the part of V(E) lying on the cluster V(support).

    Components of V(E) off the curve are removed by saturating with an
    element g of (E : f^inf) that does not vanish on the cluster; other
    clusters are removed by saturating with q.
    """
    off_curve = saturate(E, Ideal.of([f], E.field, E.gens))
    g = constant(1, E.field, E.gens)
    if not off_curve.is_unit():
        basis = groebner_basis(off_curve)
        for _ in range(attempts):
            candidate = _random_combination(basis, rng, E.field, bound)
            if support.with_generators([candidate]).is_unit():
                g = candidate
                break
        else:
            raise ComputationError(
                ErrorCode.SHAPE_POSITION_FAILED,
                "no element separates the cluster from critical points off the curve",
            )

    unwanted = g * _lift(q)
    localized = saturate(E, Ideal.of([unwanted], E.field, E.gens)) if not unwanted.is_ground else E
    if not saturate(localized, Ideal.of([_lift(h)], E.field, E.gens)).is_unit():
        raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, "localized scheme is not supported on the cluster")
    length = colength(localized)
    if length is None:
        raise ComputationError(ErrorCode.NOT_ZERO_DIMENSIONAL, "localized scheme is not finite")
    return length


def general_polars(
    split: ClusterSplit,
    seed: int = 0,
    attempts: int = 20,
    bound: int = 3,
) -> Tuple[Poly, Poly]:
    """Two seeded random polars aF_x + bF_y + cF_z, in the chart z = 1.

    Raises:
        ComputationError: POLAR_SEARCH_FAILED if every draw shares a component
    """
    partials = split.transformed.partials()
    fs = split.curve.field
    for attempt in range(attempts):
        rng = random.Random(_attempt_seed(seed, attempt))
        polars = [_random_combination(partials, rng, fs, bound) for _ in range(2)]
        affine = [dehomogenize(p, Z) for p in polars]
        E = Ideal.of(affine, fs, AFFINE_VARIABLES)
        if len(E.generators) == 2 and krull_dimension(E) == 0:
            logger.debug(f"general polars found at attempt {attempt}")
            return _lift(affine[0]), _lift(affine[1])
        logger.debug(f"attempt {attempt}: polars meet in a curve, reseeding")
    raise ComputationError(ErrorCode.POLAR_SEARCH_FAILED, f"no pair of general polars in {attempts} attempts")


def cluster_invariants(
    split: ClusterSplit,
    index: int,
    seed: int = 0,
    options: Optional[AnalysisConfig] = None,
    polars: Optional[Tuple[Poly, Poly]] = None,
) -> SingularCluster:
    """Tjurina, Milnor and polar lengths of one cluster.

    Milnor and polar lengths and the quasi-homogeneity flag are only
    computed in characteristic 0; they stay None otherwise.

    Raises:
        ComputationError: CLUSTER_ORDER_VIOLATED unless tau <= eps <= mu
    """
    options = options or AnalysisConfig()
    fs = split.curve.field
    h = split.factors[index]
    q = constant(1, fs, (X,))
    for j, other in enumerate(split.factors):
        if j != index:
            q = q * change_gens(other, (X,))

    T = split.tjurina
    if q.is_ground:
        T_c = T
    else:
        T_c = saturate(T, Ideal.of([_lift(q)], fs, AFFINE_VARIABLES))
    cluster = SingularCluster(
        eliminant_factor=format_polynomial(h),
        point_count=h.degree(),
        tjurina_length=colength(T_c),
    )
    if fs.kind != FieldKind.RATIONALS:
        return cluster

    f = _lift(split.transformed.affine_equation())
    rng = random.Random(_attempt_seed(seed, index))
    milnor_ideal = Ideal.of([differentiate(f, X), differentiate(f, Y)], fs, AFFINE_VARIABLES)
    cluster.milnor_length = _isolated_length(
        milnor_ideal, f, T_c, h, q, rng, options.polar_attempts, options.coefficient_bound
    )

    if polars is None:
        polars = general_polars(split, seed, options.polar_attempts, options.coefficient_bound)
    polar_ideal = Ideal.of(list(polars), fs, AFFINE_VARIABLES)
    cluster.polar_length = _isolated_length(
        polar_ideal, f, T_c, h, q, rng, options.polar_attempts, options.coefficient_bound
    )

    cluster.quasi_homogeneous = cluster.tjurina_length == cluster.milnor_length
    if not cluster.tjurina_length <= cluster.polar_length <= cluster.milnor_length:
        raise ComputationError(
            ErrorCode.CLUSTER_ORDER_VIOLATED,
            f"cluster {cluster.eliminant_factor}: tau {cluster.tjurina_length}, "
            f"eps {cluster.polar_length}, mu {cluster.milnor_length} out of order",
        )
    return cluster


# ==================== Irreducibility ====================

CERTIFICATE_PRIME = 32003
CERTIFICATE_PRIMES = 5


def _reduction_mod_p(F: Poly, p: int) -> Poly:
    """Primitive integer multiple of F, reduced mod p.

    The content is 1, so the reduction of a homogeneous F is nonzero and
    keeps the degree.
    """
    _, integral = F.clear_denoms(convert=True)
    _, primitive = integral.primitive()
    return make_polynomial({m: int(c) for m, c in primitive.terms()}, FieldSpec.prime(p))


def _line_restriction(F: Poly, rng: random.Random, field_spec: FieldSpec) -> Optional[Poly]:
    """F(t*P + Q) for random points P, Q; None when the restriction drops degree."""
    p = field_spec.characteristic
    point = [rng.randrange(p) for _ in range(3)]
    direction = [rng.randrange(p) for _ in range(3)]
    images = [
        make_polynomial({(1, 0): a, (0, 1): b}, field_spec, AFFINE_VARIABLES)
        for a, b in zip(point, direction)
    ]
    restricted = dehomogenize(substitute_linear(F, images), Y)
    if restricted.is_zero or restricted.degree() != F.total_degree():
        return None
    return restricted


def _subset_sums(degrees: Sequence[int]) -> Set[int]:
    sums = {0}
    for k in degrees:
        sums |= {s + k for s in sums}
    return sums


def absolutely_irreducible_mod_p(F: Poly, field_spec: FieldSpec, rng: random.Random, lines: int = 20) -> bool:
    """Certify that F over F_p stays irreducible over the algebraic closure.

    A factor of degree a over F_p restricts to a factor of degree a on
    every line, so once the factor degrees of the line restrictions share
    no subset sum besides 0 and d, F is irreducible over F_p. A simple root
    of a restriction is a smooth F_p-point. Frobenius fixes it, so the only
    component through it is defined over F_p and is all of C.
    """
    d = F.total_degree()
    possible = set(range(d + 1))
    smooth_point = False
    for _ in range(lines):
        g = _line_restriction(F, rng, field_spec)
        if g is None:
            continue
        _, factors = g.factor_list()
        possible &= _subset_sums([h.degree() for h, e in factors for _ in range(e)])
        smooth_point = smooth_point or any(h.degree() == 1 and e == 1 for h, e in factors)
        if smooth_point and possible <= {0, d}:
            return True
    return False


def certificate_primes(count: int = CERTIFICATE_PRIMES, start: int = CERTIFICATE_PRIME) -> List[int]:
    """``count`` consecutive primes from ``start`` on."""
    primes = [nextprime(start - 1)]
    while len(primes) < count:
        primes.append(nextprime(primes[-1]))
    return primes


def irreducibility_status(
    C: PlaneCurve,
    milnor_total: Optional[int] = None,
    seed: int = 0,
    lines: int = 20,
) -> Irreducibility:
    """Certificate for (absolute) irreducibility.

    Lines are irreducible. A nontrivial factor over the base field proves
    reducibility. In characteristic 0 a total Milnor number below d - 1
    proves irreducibility, since two components of degrees a and b meet
    with total multiplicity ab >= d - 1. A smooth curve is irreducible in
    any characteristic. Otherwise F over F_p, or the reduction of F modulo
    a few primes from 32003 on, goes through ``absolutely_irreducible_mod_p``;
    an absolutely irreducible reduction of the same degree lifts to Q.
    Everything else is unknown.
    """
    d = C.d
    if d == 1:
        return Irreducibility.IRREDUCIBLE
    try:
        _, factors = C.F.factor_list()
        if len(factors) > 1 or factors[0][1] > 1:
            return Irreducibility.REDUCIBLE
    except (NotImplementedError, DomainError) as e:
        logger.debug(f"no factorization over {C.field.label}: {e}")

    if C.field.kind == FieldKind.RATIONALS:
        if milnor_total is not None and milnor_total < d - 1:
            return Irreducibility.IRREDUCIBLE
        reductions = [(_reduction_mod_p(C.F, p), FieldSpec.prime(p)) for p in certificate_primes()]
    else:
        _, tau = singular_scheme(C)
        if tau == 0:
            return Irreducibility.IRREDUCIBLE
        reductions = [(C.F, C.field)]

    for k, (G, fs) in enumerate(reductions):
        if absolutely_irreducible_mod_p(G, fs, random.Random(_attempt_seed(seed, k)), lines):
            logger.debug(f"{C}: absolutely irreducible over {fs.label}")
            return Irreducibility.IRREDUCIBLE
    return Irreducibility.UNKNOWN


# ==================== Curve-level invariants ====================


def analyze_curve(C: PlaneCurve, seed: int = 0, options: Optional[AnalysisConfig] = None) -> CurveInvariants:
    """Full invariant computation for a reduced curve.

    Raises:
        HypothesisError: NOT_REDUCED or CHAR_DIVIDES_DEGREE
        ComputationError: when a seeded search fails or a cluster is out of order
    """
    options = options or AnalysisConfig()
    sigma_ideal, tau = singular_scheme(C)
    sigma = regularity(sigma_ideal) if tau else 0
    rationals = C.field.kind == FieldKind.RATIONALS

    clusters: List[SingularCluster] = []
    coordinate_seed = _attempt_seed(seed, 0)
    if tau:
        split = split_clusters(C, seed, options.coordinate_attempts, options.coefficient_bound)
        coordinate_seed = split.coordinate_seed
        polars = None
        if rationals:
            polars = general_polars(split, seed, options.polar_attempts, options.coefficient_bound)
        clusters = [cluster_invariants(split, i, seed, options, polars) for i in range(len(split.factors))]
        total = sum(c.tjurina_length for c in clusters)
        if total != tau:
            logger.error(f"{C}: cluster Tjurina lengths sum to {total}, singular scheme has degree {tau}")

    u = None
    milnor_total = None
    if rationals:
        u = sum(c.point_count for c in clusters if c.quasi_homogeneous is False)
        milnor_total = sum(c.milnor_length for c in clusters)

    invariants = CurveInvariants(
        d=C.d,
        reduced=True,
        irreducibility=irreducibility_status(C, milnor_total, seed, options.line_attempts),
        tau=tau,
        u=u,
        sigma=sigma,
        clusters=clusters,
        coordinate_seed=coordinate_seed,
    )
    logger.info(f"{C}: d={C.d} tau={tau} sigma={sigma} u={u} clusters={len(clusters)}")
    return invariants


def count_u(C: PlaneCurve, seed: int = 0, options: Optional[AnalysisConfig] = None) -> int:
    """Number of non-quasi-homogeneous singular points.

    Raises:
        HypothesisError: CHAR_NOT_ZERO over a prime field
    """
    if C.field.kind != FieldKind.RATIONALS:
        raise HypothesisError(ErrorCode.CHAR_NOT_ZERO, "quasi-homogeneity is only decided in characteristic 0")
    return analyze_curve(C, seed, options).u
