"""Exact polynomial algebra over Q and prime fields.

Polynomials are sympy ``Poly`` objects whose generators are drawn, in order,
from (x, y, z) and whose domain is the ``FieldSpec`` domain (QQ or GF(p)).
This module adds the pieces sympy does not provide in the shape the rest of
the package needs: a strict parser with error positions, a canonical
printer, chart changes, linear substitutions and exact nullspaces.

Usage:
    from src.algebra import X, parse_polynomial, differentiate, format_polynomial
    from src.models import FieldSpec

    F = parse_polynomial("x^3*y - x*y^3", FieldSpec.rationals())
    print(format_polynomial(differentiate(F, X)))
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly, Symbol
from sympy.polys.matrices import DomainMatrix

from src.errors import LeafboundError, ParseError
from src.models import ErrorCode, FieldKind, FieldSpec

logger = logging.getLogger(__name__)

X, Y, Z = sympy.symbols("x y z")
VARIABLES: Tuple[Symbol, ...] = (X, Y, Z)
AFFINE_VARIABLES: Tuple[Symbol, ...] = (X, Y)
_BY_NAME = {str(v): v for v in VARIABLES}

IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# ==================== Fields and construction ====================

def field_of(p: Poly) -> FieldSpec:
    """Recover the FieldSpec of a polynomial from its domain."""
    domain = p.domain
    if domain.is_FiniteField:
        return FieldSpec.prime(int(domain.characteristic()))
    if domain.is_QQ or domain.is_ZZ:
        return FieldSpec.rationals()
    raise LeafboundError(ErrorCode.FIELD_MISMATCH, f"Unsupported coefficient domain {domain}")


def field_element(field_spec: FieldSpec, value: Any):
    """Convert an int, Fraction or sympy rational into a domain element.

    Raises:
        LeafboundError: UNREPRESENTABLE_COEFFICIENT if the denominator vanishes mod p
    """
    domain = field_spec.domain
    if isinstance(value, sympy.Rational):
        value = Fraction(int(value.p), int(value.q))
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
        if field_spec.kind == FieldKind.RATIONALS:
            return domain(value.numerator, value.denominator)
        p = field_spec.characteristic
        if value.denominator % p == 0:
            raise LeafboundError(
                ErrorCode.UNREPRESENTABLE_COEFFICIENT,
                f"{value} has no value in F_{p}",
            )
        return domain(value.numerator * pow(value.denominator, -1, p))
    return domain.convert(value)


def make_polynomial(
    terms: Dict[Tuple[int, ...], Any],
    field_spec: FieldSpec,
    gens: Sequence[Symbol] = VARIABLES,
) -> Poly:
    """Build a polynomial from an exponent-vector -> coefficient map."""
    converted = {}
    for monom, coeff in terms.items():
        if len(monom) != len(gens):
            raise ValueError(f"Exponent vector {monom} does not match generators {gens}")
        element = field_element(field_spec, coeff)
        if element:
            converted[tuple(monom)] = element
    if not converted:
        return Poly(0, *gens, domain=field_spec.domain)
    return Poly.from_dict(converted, *gens, domain=field_spec.domain)


def constant(value: Any, field_spec: FieldSpec, gens: Sequence[Symbol] = VARIABLES) -> Poly:
    """The constant polynomial ``value``."""
    return make_polynomial({(0,) * len(gens): value}, field_spec, gens)


def variable(var: Symbol, field_spec: FieldSpec, gens: Sequence[Symbol] = VARIABLES) -> Poly:
    """The polynomial ``var`` in the given generators."""
    exps = tuple(1 if g == var else 0 for g in gens)
    return make_polynomial({exps: 1}, field_spec, gens)


def change_gens(p: Poly, gens: Sequence[Symbol]) -> Poly:
    """Re-express ``p`` over another generator tuple.

    Generators of ``p`` missing from ``gens`` must not occur in ``p``.
    """
    gens = tuple(gens)
    if tuple(p.gens) == gens:
        return p
    positions = []
    for g in p.gens:
        positions.append(gens.index(g) if g in gens else None)
    terms = {}
    for monom, coeff in p.terms():
        exps = [0] * len(gens)
        for position, e in zip(positions, monom):
            if position is None:
                if e:
                    raise LeafboundError(
                        ErrorCode.UNKNOWN_VARIABLE,
                        f"{format_polynomial(p)} involves a variable outside {gens}",
                    )
                continue
            exps[position] = e
        terms[tuple(exps)] = coeff
    if not terms:
        return Poly(0, *gens, domain=p.domain)
    return Poly.from_dict(terms, *gens, domain=p.domain)


def monomials_of_degree(n: int, t: int) -> Iterator[Tuple[int, ...]]:
    """Exponent vectors of length n and total degree t, lexicographically descending."""
    if n == 0:
        if t == 0:
            yield ()
        return
    if n == 1:
        yield (t,)
        return
    for first in range(t, -1, -1):
        for rest in monomials_of_degree(n - 1, t - first):
            yield (first,) + rest


# ==================== Parsing and printing ====================

_OPERATORS = "+-*/^()"


@dataclass
class _Token:
    kind: str   # "int", "var", "op", "end"
    text: str
    position: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            start = i
            while i < len(text) and text[i].isdigit():
                i += 1
            tokens.append(_Token("int", text[start:i], start))
        elif ch.isalpha() or ch == "_":
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            name = text[start:i]
            if name not in _BY_NAME:
                raise ParseError(f"unknown variable {name!r}", start, code=ErrorCode.UNKNOWN_VARIABLE)
            tokens.append(_Token("var", name, start))
        elif ch in _OPERATORS:
            tokens.append(_Token("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _PolynomialParser:
    """Recursive-descent parser building the polynomial directly in the target field.

    Grammar:
        expr  := term (('+' | '-') term)*
        term  := unary ('*' unary)*
        unary := ('+' | '-') unary | power
        power := atom ('^' INT)?
        atom  := INT ('/' INT)? | VAR | '(' expr ')'
    """

    def __init__(self, text: str, field_spec: FieldSpec, gens: Sequence[Symbol]):
        self.tokens = _tokenize(text)
        self.index = 0
        self.field = field_spec
        self.gens = tuple(gens)

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def parse(self) -> Poly:
        value = self._expr()
        token = self.current
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.position)
        return value

    def _expr(self) -> Poly:
        value = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> Poly:
        value = self._unary()
        while True:
            token = self.current
            if token.kind == "op" and token.text == "*":
                self._advance()
                value = value * self._unary()
            elif token.kind == "op" and token.text == "/":
                raise ParseError("division is only allowed inside a rational literal a/b", token.position)
            elif token.kind in ("int", "var") or (token.kind == "op" and token.text == "("):
                raise ParseError("implicit multiplication is not allowed, use '*'", token.position)
            else:
                return value

    def _unary(self) -> Poly:
        token = self.current
        if token.kind == "op" and token.text in "+-":
            self._advance()
            value = self._unary()
            return value if token.text == "+" else -value
        return self._power()

    def _power(self) -> Poly:
        base = self._atom()
        token = self.current
        if token.kind == "op" and token.text == "^":
            self._advance()
            exponent = self.current
            if exponent.kind != "int":
                raise ParseError("exponent must be a non-negative integer", exponent.position)
            self._advance()
            return base ** int(exponent.text)
        return base

    def _atom(self) -> Poly:
        token = self._advance()
        if token.kind == "int":
            value = Fraction(int(token.text))
            if self.current.kind == "op" and self.current.text == "/":
                self._advance()
                denominator = self.current
                if denominator.kind != "int":
                    raise ParseError("expected an integer denominator", denominator.position)
                self._advance()
                if int(denominator.text) == 0:
                    raise ParseError("zero denominator", denominator.position)
                value = Fraction(int(token.text), int(denominator.text))
            try:
                return constant(value, self.field, self.gens)
            except LeafboundError as e:
                raise ParseError(e.message, token.position, code=e.code)
        if token.kind == "var":
            var = _BY_NAME[token.text]
            if var not in self.gens:
                raise ParseError(
                    f"variable {token.text!r} not allowed here",
                    token.position,
                    code=ErrorCode.UNKNOWN_VARIABLE,
                )
            return variable(var, self.field, self.gens)
        if token.kind == "op" and token.text == "(":
            value = self._expr()
            closing = self.current
            if not (closing.kind == "op" and closing.text == ")"):
                raise ParseError("missing ')'", closing.position)
            self._advance()
            return value
        if token.kind == "end":
            raise ParseError("unexpected end of expression", token.position)
        raise ParseError(f"unexpected {token.text!r}", token.position)


def parse_polynomial(
    text: str,
    field_spec: FieldSpec,
    gens: Sequence[Symbol] = VARIABLES,
) -> Poly:
    """Parse an expression in x, y, z into a polynomial over ``field_spec``.

    Args:
        text: Expression using integers, a/b literals, + - * ^ and parentheses
        field_spec: Coefficient field
        gens: Generators of the result

    Returns:
        The polynomial in canonical sparse form

    Raises:
        ParseError: On syntax errors (with position) or coefficients that do
            not exist in the field, e.g. 1/p over F_p
    """
    return _PolynomialParser(text, field_spec, gens).parse()


def format_polynomial(p: Poly) -> str:
    """Canonical text of ``p``: grevlex term order, '^' powers, 'a/b*' coefficients.

    The output parses back to the same polynomial.
    """
    if p.is_zero:
        return "0"
    pieces = []
    for monom, coeff in p.terms(order="grevlex"):
        value = p.domain.to_sympy(coeff)
        negative = value < 0
        magnitude = -value if negative else value
        factors = [str(g) if e == 1 else f"{g}^{e}" for g, e in zip(p.gens, monom) if e]
        if magnitude != 1 or not factors:
            factors.insert(0, str(magnitude))
        pieces.append((negative, "*".join(factors)))
    negative, body = pieces[0]
    text = f"-{body}" if negative else body
    for negative, body in pieces[1:]:
        text += f" - {body}" if negative else f" + {body}"
    return text


# ==================== Calculus and charts ====================

def differentiate(p: Poly, var: Symbol) -> Poly:
    """Formal partial derivative; over F_p the exponent is reduced in the field.

    Raises:
        LeafboundError: UNKNOWN_VARIABLE if ``var`` is not a generator of ``p``
    """
    if var not in p.gens:
        raise LeafboundError(ErrorCode.UNKNOWN_VARIABLE, f"{var} is not a variable of {p.gens}")
    return p.diff(var)


def homogenize(p: Poly, var: Symbol, degree: int) -> Poly:
    """Homogenize ``p`` to the given degree using ``var``.

    Raises:
        LeafboundError: DEGREE_TOO_LOW if ``degree`` is below the degree of ``p``
    """
    gens = tuple(v for v in VARIABLES if v in p.gens or v == var)
    if p.is_zero:
        return Poly(0, *gens, domain=p.domain)
    if degree < p.total_degree():
        raise LeafboundError(
            ErrorCode.DEGREE_TOO_LOW,
            f"cannot homogenize a degree {p.total_degree()} polynomial to degree {degree}",
        )
    target = gens.index(var)
    terms: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in change_gens(p, gens).terms():
        exps = list(monom)
        exps[target] += degree - sum(monom)
        key = tuple(exps)
        terms[key] = terms.get(key, p.domain.zero) + coeff
    terms = {m: c for m, c in terms.items() if c}
    if not terms:
        return Poly(0, *gens, domain=p.domain)
    return Poly.from_dict(terms, *gens, domain=p.domain)


def dehomogenize(p: Poly, var: Symbol) -> Poly:
    """Substitute ``var`` = 1 and drop it from the generators."""
    if var not in p.gens:
        raise LeafboundError(ErrorCode.UNKNOWN_VARIABLE, f"{var} is not a variable of {p.gens}")
    return p.eval(var, 1)


# ==================== GCD ====================

def gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor; gcd(p, 0) is p made monic.

    Raises:
        LeafboundError: FIELD_MISMATCH if the coefficient fields differ
    """
    if p.domain != q.domain:
        raise LeafboundError(ErrorCode.FIELD_MISMATCH, f"{p.domain} vs {q.domain}")
    result = p.gcd(q)
    if result.is_zero:
        return result
    return result.monic()


def gcd_many(polys: Sequence[Poly]) -> Poly:
    """gcd of all polynomials in the list (zeros ignored)."""
    nonzero = [p for p in polys if not p.is_zero]
    if not nonzero:
        return polys[0]
    result = nonzero[0].monic()
    for p in nonzero[1:]:
        if result.is_ground:
            break
        result = gcd(result, p)
    return result


# ==================== Linear changes of coordinates ====================

def substitute_linear(p: Poly, images: Sequence[Poly]) -> Poly:
    """Replace the i-th generator of ``p`` by ``images[i]``.

    All images share generators and domain; the result lives over them.
    """
    if len(images) != len(p.gens):
        raise ValueError(f"Need {len(p.gens)} images, got {len(images)}")
    target_gens = images[0].gens
    domain = images[0].domain
    result = Poly(0, *target_gens, domain=domain)
    powers: Dict[Tuple[int, int], Poly] = {}

    def power(i: int, e: int) -> Poly:
        if (i, e) not in powers:
            powers[(i, e)] = images[i] ** e
        return powers[(i, e)]

    one = Poly(1, *target_gens, domain=domain)
    for monom, coeff in p.terms():
        term = one
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        result = result + term.mul_ground(coeff)
    return result


def apply_linear_change(p: Poly, matrix: Sequence[Sequence[int]]) -> Poly:
    """P(M v): the i-th variable becomes sum_j M[i][j] * v_j."""
    field_spec = field_of(p)
    gens = tuple(p.gens)
    images = []
    for row in matrix:
        terms = {}
        for j, entry in enumerate(row):
            if entry:
                terms[tuple(1 if k == j else 0 for k in range(len(gens)))] = entry
        images.append(make_polynomial(terms, field_spec, gens))
    return substitute_linear(p, images)


def random_linear_change(rng: random.Random, field_spec: FieldSpec, bound: int) -> Tuple[Tuple[int, ...], ...]:
    """Random 3x3 integer matrix with entries in [-bound, bound], invertible over the field."""
    while True:
        matrix = tuple(tuple(rng.randint(-bound, bound) for _ in range(3)) for _ in range(3))
        det = int(sympy.Matrix(matrix).det())
        if det != 0 and not field_spec.divides(det):
            return matrix


def random_polynomial(
    rng: random.Random,
    field_spec: FieldSpec,
    degree: int,
    gens: Sequence[Symbol] = VARIABLES,
    homogeneous: bool = True,
    coefficient_bound: int = 5,
) -> Poly:
    """Dense random polynomial with a nonzero x^degree term.

    Coefficients lie in [-bound, bound] over Q and are uniform over F_p.
    """
    def draw() -> int:
        if field_spec.kind == FieldKind.RATIONALS:
            return rng.randint(-coefficient_bound, coefficient_bound)
        return rng.randrange(field_spec.characteristic)

    degrees = [degree] if homogeneous else range(degree, -1, -1)
    terms = {}
    for t in degrees:
        for monom in monomials_of_degree(len(gens), t):
            terms[monom] = draw()
    leading = (degree,) + (0,) * (len(gens) - 1)
    while not field_element(field_spec, terms[leading]):
        terms[leading] = draw()
    return make_polynomial(terms, field_spec, gens)


# ==================== Exact linear algebra ====================

@dataclass
class LinearSystem:
    """Homogeneous linear system over a field.

    Attributes:
        rows: Coefficient rows (ints, Fractions or domain elements)
        field: Coefficient field
        labels: Optional names of the unknowns
        width: Number of unknowns
    """
    rows: List[List[Any]]
    field: FieldSpec
    labels: List[str] = field(default_factory=list)
    width: Optional[int] = None

    def __post_init__(self):
        if self.width is None:
            self.width = len(self.labels) if self.labels else (len(self.rows[0]) if self.rows else 0)
        for i, row in enumerate(self.rows):
            if len(row) != self.width:
                raise ValueError(f"Row {i} has width {len(row)}, expected {self.width}")


def nullspace(system: LinearSystem) -> List[List[Any]]:
    """Exact basis of the right nullspace, one domain-element list per vector.

    The basis is empty exactly when the matrix has full column rank.
    """
    domain = system.field.domain
    n = system.width
    if n == 0:
        return []
    if not system.rows:
        return [[domain.one if i == j else domain.zero for i in range(n)] for j in range(n)]

    entries = [[field_element(system.field, v) for v in row] for row in system.rows]
    matrix = DomainMatrix(entries, (len(entries), n), domain)
    reduced, pivots = matrix.rref()
    dense = reduced.to_Matrix()
    pivot_rows = [[domain.from_sympy(dense[i, j]) for j in range(n)] for i in range(len(pivots))]

    basis = []
    pivot_set = set(pivots)
    for free in range(n):
        if free in pivot_set:
            continue
        vector = [domain.zero] * n
        vector[free] = domain.one
        for row, column in zip(pivot_rows, pivots):
            vector[column] = -row[free]
        basis.append(vector)
    logger.debug(f"nullspace: {len(system.rows)}x{n} system, rank {len(pivots)}, dimension {len(basis)}")
    return basis
