"""Data models for Leafbound.

This module contains the enums and result dataclasses shared by the curve,
foliation and bounds modules. Polynomials are rendered to text before they
reach these records, so everything here serializes straight to JSON.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from sympy import GF, QQ

Number = Union[int, Fraction]


class FieldKind(Enum):
    """Base field of a computation."""
    RATIONALS = "rationals"
    PRIME_FIELD = "prime-field"


class Irreducibility(Enum):
    """Outcome of the irreducibility certificate."""
    IRREDUCIBLE = "irreducible"
    REDUCIBLE = "reducible"
    UNKNOWN = "unknown"


class MinimalDegreeMode(Enum):
    """Search mode for the least degree of an invariant foliation.

    LEAF requires the curve to be a leaf (no component in the singular
    locus); FACTORS_THROUGH only requires the tangency divisibility.
    """
    LEAF = "leaf"
    FACTORS_THROUGH = "factors_through"


class TheoremId(Enum):
    """Identifiers of the verified bounds."""
    P2_3 = "P2.3"      # reg S = 2m
    T2_5 = "T2.5"      # d <= m + 1 (+ rho)
    L3_1 = "L3.1"      # sigma <= d - 2 + (tau - u)/(d - 1)
    T3_2 = "T3.2"      # (d-1)(d-m-1) + u <= tau
    P3_3A = "P3.3a"    # m <= d - 1, tau <= (d-1)(d-m-1) + m^2
    P3_3B = "P3.3b"    # binomial refinement for irreducible curves
    R3_4 = "R3.4"      # two-sided bound in the factoring mode
    R3_4B = "R3.4b"    # binomial refinement in the factoring mode
    I3_3 = "I3.3"      # tau = d(d-m-2) + deg(S n C)


class ErrorCode(Enum):
    """Machine-readable failure codes carried by LeafboundError."""
    # Input and plumbing
    PARSE_ERROR = "PARSE_ERROR"
    UNREPRESENTABLE_COEFFICIENT = "UNREPRESENTABLE_COEFFICIENT"
    UNKNOWN_VARIABLE = "UNKNOWN_VARIABLE"
    FIELD_MISMATCH = "FIELD_MISMATCH"
    DEGREE_TOO_LOW = "DEGREE_TOO_LOW"
    NOT_HOMOGENEOUS = "NOT_HOMOGENEOUS"

    # Hypotheses
    NOT_REDUCED = "NOT_REDUCED"
    CHAR_DIVIDES_DEGREE = "CHAR_DIVIDES_DEGREE"
    CHAR_NOT_ZERO = "CHAR_NOT_ZERO"
    EULER_VIOLATED = "EULER_VIOLATED"
    ALL_ZERO = "ALL_ZERO"
    DEGREE_MISMATCH = "DEGREE_MISMATCH"
    DEGREE_ZERO = "DEGREE_ZERO"

    # Computations
    NOT_ZERO_DIMENSIONAL = "NOT_ZERO_DIMENSIONAL"
    NOT_STABILIZED = "NOT_STABILIZED"
    SATURATION_DIVERGED = "SATURATION_DIVERGED"
    SHAPE_POSITION_FAILED = "SHAPE_POSITION_FAILED"
    POLAR_SEARCH_FAILED = "POLAR_SEARCH_FAILED"
    DEGENERATE_LINE = "DEGENERATE_LINE"
    COORDINATE_SEARCH_FAILED = "COORDINATE_SEARCH_FAILED"
    LEAF_WITNESS_NOT_FOUND = "LEAF_WITNESS_NOT_FOUND"
    DEG_S_MISMATCH = "DEG_S_MISMATCH"
    CLUSTER_ORDER_VIOLATED = "CLUSTER_ORDER_VIOLATED"


@dataclass(frozen=True)
class FieldSpec:
    """The base field: Q, or F_p for a prime p < 2^31.

    Attributes:
        kind: Rationals or prime field
        characteristic: 0 for Q, p otherwise
    """
    kind: FieldKind
    characteristic: int = 0

    def __post_init__(self):
        """Validate the characteristic."""
        from sympy import isprime

        if self.kind == FieldKind.RATIONALS and self.characteristic != 0:
            raise ValueError(f"Q has characteristic 0, got {self.characteristic}")
        if self.kind == FieldKind.PRIME_FIELD:
            p = self.characteristic
            if not isprime(p) or p >= 2 ** 31:
                raise ValueError(f"Prime field needs a prime below 2^31, got {p}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(FieldKind.RATIONALS, 0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(FieldKind.PRIME_FIELD, p)

    @property
    def domain(self):
        """The sympy domain used for coefficients."""
        if self.kind == FieldKind.RATIONALS:
            return QQ
        return GF(self.characteristic)

    @property
    def label(self) -> str:
        """Short label used in reports ("Q" or "F_p")."""
        if self.kind == FieldKind.RATIONALS:
            return "Q"
        return f"F_{self.characteristic}"

    def divides(self, n: int) -> bool:
        """True if the characteristic is positive and divides n."""
        return self.characteristic > 0 and n % self.characteristic == 0

    @classmethod
    def from_label(cls, label: str) -> "FieldSpec":
        """Inverse of ``label``."""
        if label == "Q":
            return cls.rationals()
        if label.startswith("F_"):
            return cls.prime(int(label[2:]))
        raise ValueError(f"Unknown field label: {label}")


def number_to_json(value: Optional[Number]) -> Any:
    """Render an exact number: integers stay integers, other rationals become "a/b"."""
    if value is None:
        return None
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def number_from_json(value: Any) -> Optional[Fraction]:
    """Inverse of ``number_to_json``."""
    if value is None:
        return None
    return Fraction(value)


@dataclass
class SingularCluster:
    """One Galois orbit of singular points after a generic coordinate change.

    Attributes:
        eliminant_factor: Irreducible factor of the x-eliminant, as text
        point_count: Number of geometric points in the cluster
        tjurina_length: Sum of the Tjurina numbers over the cluster
        milnor_length: Sum of the Milnor numbers over the cluster
        polar_length: Sum of the local intersection numbers of two general polars
        quasi_homogeneous: Saito's criterion; None in positive characteristic
    """
    eliminant_factor: str
    point_count: int
    tjurina_length: int = 0
    milnor_length: Optional[int] = None
    polar_length: Optional[int] = None
    quasi_homogeneous: Optional[bool] = None

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "eliminant_factor": self.eliminant_factor,
            "point_count": self.point_count,
            "tjurina_length": self.tjurina_length,
            "milnor_length": self.milnor_length,
            "polar_length": self.polar_length,
            "quasi_homogeneous": self.quasi_homogeneous,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SingularCluster":
        """Create from dictionary."""
        return cls(
            eliminant_factor=data["eliminant_factor"],
            point_count=data["point_count"],
            tjurina_length=data.get("tjurina_length", 0),
            milnor_length=data.get("milnor_length"),
            polar_length=data.get("polar_length"),
            quasi_homogeneous=data.get("quasi_homogeneous"),
        )


@dataclass
class CurveInvariants:
    """Singularity invariants of a reduced plane curve.

    Attributes:
        d: Degree of the curve
        reduced: Whether gcd(F, F_x, F_y, F_z) = 1
        irreducibility: Certificate outcome
        tau: Total Tjurina number (degree of the singular scheme)
        u: Number of non-quasi-homogeneous singular points (None in char p)
        sigma: Regularity of the singular scheme (0 for smooth curves)
        clusters: Per-cluster local data
        coordinate_seed: Seed of the coordinate change that split the clusters
    """
    d: int
    reduced: bool
    irreducibility: Irreducibility
    tau: int
    u: Optional[int]
    sigma: int
    clusters: List[SingularCluster] = field(default_factory=list)
    coordinate_seed: int = 0

    @property
    def rho(self) -> int:
        """rho = sigma - d + 2."""
        return self.sigma - self.d + 2

    @property
    def mu(self) -> Optional[int]:
        """Total Milnor number, when every cluster has one."""
        lengths = [c.milnor_length for c in self.clusters]
        if any(length is None for length in lengths):
            return None
        return sum(lengths)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "d": self.d,
            "reduced": self.reduced,
            "irreducibility": self.irreducibility.value,
            "tau": self.tau,
            "u": self.u,
            "sigma": self.sigma,
            "rho": self.rho,
            "mu": self.mu,
            "clusters": [c.to_dict() for c in self.clusters],
            "coordinate_seed": self.coordinate_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CurveInvariants":
        """Create from dictionary."""
        return cls(
            d=data["d"],
            reduced=data["reduced"],
            irreducibility=Irreducibility(data["irreducibility"]),
            tau=data["tau"],
            u=data.get("u"),
            sigma=data["sigma"],
            clusters=[SingularCluster.from_dict(c) for c in data.get("clusters", [])],
            coordinate_seed=data.get("coordinate_seed", 0),
        )


@dataclass
class LeafCheckResult:
    """Outcome of the leaf test for a curve and a 1-form.

    Attributes:
        is_leaf: Divisibility holds and no component lies in the singular locus
        factors_through_only: Divisibility holds but some component is singular
        tangency_remainders: Normal forms of the three wedge coefficients mod F
    """
    is_leaf: bool
    factors_through_only: bool
    tangency_remainders: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "is_leaf": self.is_leaf,
            "factors_through_only": self.factors_through_only,
            "tangency_remainders": list(self.tangency_remainders),
        }


@dataclass
class TheoremVerdict:
    """Result of checking one bound on one curve.

    ``holds`` and ``equality`` are None when the hypotheses are not met.
    """
    theorem_id: TheoremId
    hypotheses_met: bool
    reasons: List[str] = field(default_factory=list)
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    holds: Optional[bool] = None
    equality: Optional[bool] = None
    equality_case_consistent: Optional[bool] = None
    skipped: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "id": self.theorem_id.value,
            "hypotheses": {"met": self.hypotheses_met, "reasons": list(self.reasons)},
            "lhs": number_to_json(self.lhs),
            "rhs": number_to_json(self.rhs),
            "holds": self.holds,
            "equality": self.equality,
            "equality_case_consistent": self.equality_case_consistent,
            "skipped": self.skipped,
            "details": {k: _detail_to_json(v) for k, v in self.details.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TheoremVerdict":
        """Create from dictionary."""
        hypotheses = data.get("hypotheses", {})
        return cls(
            theorem_id=TheoremId(data["id"]),
            hypotheses_met=hypotheses.get("met", False),
            reasons=list(hypotheses.get("reasons", [])),
            lhs=number_from_json(data.get("lhs")),
            rhs=number_from_json(data.get("rhs")),
            holds=data.get("holds"),
            equality=data.get("equality"),
            equality_case_consistent=data.get("equality_case_consistent"),
            skipped=data.get("skipped"),
            details=dict(data.get("details", {})),
        )


def _detail_to_json(value: Any) -> Any:
    if isinstance(value, Fraction):
        return number_to_json(value)
    return value


@dataclass
class StageError:
    """A pipeline stage that failed without aborting the report."""
    stage: str
    code: ErrorCode
    message: str

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {"stage": self.stage, "code": self.code.value, "message": self.message}


@dataclass
class BoundsReport:
    """Everything computed for one curve, plus the verdicts.

    Attributes:
        curve_hash: sha256 of the canonical text of F
        curve: Canonical text of F
        field: Field label
        seed: Seed that drove every randomized choice
        invariants: Curve invariants, if that stage succeeded
        m_leaf: Least degree of a foliation with the curve as leaf
        m_factors: Least degree in the factoring mode
        hamilton_degree: Degree of the Hamilton foliation
    """
    curve_hash: str
    curve: str
    field: str
    seed: int
    invariants: Optional[CurveInvariants] = None
    m_leaf: Optional[int] = None
    m_factors: Optional[int] = None
    hamilton_degree: Optional[int] = None
    leaf_gaps: List[int] = field(default_factory=list)
    claimed_irreducibility: Optional[str] = None
    verdicts: List[TheoremVerdict] = field(default_factory=list)
    errors: List[StageError] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        """True if no evaluated verdict failed."""
        return all(v.holds is not False for v in self.verdicts)

    def verdict(self, theorem_id: TheoremId) -> Optional[TheoremVerdict]:
        """First verdict with the given id."""
        for v in self.verdicts:
            if v.theorem_id == theorem_id:
                return v
        return None

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        inv = self.invariants
        return {
            "curve": self.curve_hash,
            "curve_text": self.curve,
            "field": self.field,
            "seed": self.seed,
            "invariants": {
                "d": inv.d if inv else None,
                "tau": inv.tau if inv else None,
                "u": inv.u if inv else None,
                "sigma": inv.sigma if inv else None,
                "rho": inv.rho if inv else None,
            },
            "irreducibility": inv.irreducibility.value if inv else None,
            "claimed_irreducibility": self.claimed_irreducibility,
            "clusters": [c.to_dict() for c in inv.clusters] if inv else [],
            "foliation": {
                "m_leaf": self.m_leaf,
                "m_factors": self.m_factors,
                "hamilton_degree": self.hamilton_degree,
                "leaf_gaps": list(self.leaf_gaps),
            },
            "verdicts": [v.to_dict() for v in self.verdicts],
            "errors": [e.to_dict() for e in self.errors],
        }
