"""Line-oriented input files.

    # comment
    field Q                    (or: field F 32003)
    curve x^3*y - x*y^3
    foliation y ; -x ; 0
    ideal x^2 ; y              (affine, in x and y)
    meta irreducible true      (true | false | unknown)
    meta description four concurrent lines

Usage:
    from src.documents import load_document

    doc = load_document("examples/cone4.lb")
    curve = doc.curve
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from sympy import Poly

from src.algebra import AFFINE_VARIABLES, parse_polynomial
from src.curves import PlaneCurve
from src.errors import LeafboundError, ParseError
from src.foliations import Foliation, make_foliation
from src.models import ErrorCode, FieldSpec

logger = logging.getLogger(__name__)

DIRECTIVES = ("field", "curve", "foliation", "ideal", "meta")

_CLAIMS = {"true": "irreducible", "false": "reducible", "unknown": "unknown"}


@dataclass
class InputDocument:
    """Parsed contents of an input file.

    Attributes:
        field: Coefficient field (Q when the file has no field line)
        curve: The curve, if given
        foliation_coefficients: (A, B, C), if given
        ideal: Affine ideal generators, if given
        claimed_irreducibility: "irreducible", "reducible" or "unknown"
        description: Free text
        source: File name or "<string>"
    """
    field: FieldSpec
    curve: Optional[PlaneCurve] = None
    foliation_coefficients: Optional[Tuple[Poly, Poly, Poly]] = None
    ideal: List[Poly] = field(default_factory=list)
    claimed_irreducibility: Optional[str] = None
    description: str = ""
    source: str = "<string>"

    def foliation(self) -> Optional[Foliation]:
        """Saturated foliation from the coefficients.

        Raises:
            HypothesisError: if the coefficients do not form a valid 1-form
        """
        if self.foliation_coefficients is None:
            return None
        return make_foliation(*self.foliation_coefficients, field_spec=self.field)


def _parse_field(argument: str, line: int) -> FieldSpec:
    parts = argument.split()
    if parts == ["Q"]:
        return FieldSpec.rationals()
    if len(parts) == 2 and parts[0] == "F" and parts[1].isdigit():
        try:
            return FieldSpec.prime(int(parts[1]))
        except ValueError as e:
            raise ParseError(str(e), line=line)
    raise ParseError(f"expected 'field Q' or 'field F <p>', got {argument!r}", line=line)


def _parse_poly(text: str, field_spec: FieldSpec, line: int, gens=None) -> Poly:
    try:
        if gens is None:
            return parse_polynomial(text, field_spec)
        return parse_polynomial(text, field_spec, gens)
    except ParseError as e:
        raise e.at_line(line)


def _split_list(argument: str, line: int) -> List[str]:
    parts = [p.strip() for p in argument.split(";")]
    if any(not p for p in parts):
        raise ParseError("empty entry in ';'-separated list", line=line)
    return parts


def parse_document(text: str, source: str = "<string>") -> InputDocument:
    """Parse the text of an input file.

    Raises:
        ParseError: with the offending line number
    """
    statements = []
    field_spec = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        directive, _, argument = stripped.partition(" ")
        argument = argument.strip()
        if directive not in DIRECTIVES:
            raise ParseError(f"unknown directive {directive!r}", line=number)
        if not argument:
            raise ParseError(f"'{directive}' needs an argument", line=number)
        if directive == "field":
            if field_spec is not None:
                raise ParseError("field given twice", line=number)
            field_spec = _parse_field(argument, number)
        else:
            statements.append((number, directive, argument))

    doc = InputDocument(field=field_spec or FieldSpec.rationals(), source=source)
    seen = set()
    for number, directive, argument in statements:
        if directive in seen and directive != "meta":
            raise ParseError(f"'{directive}' given twice", line=number)
        seen.add(directive)

        if directive == "curve":
            F = _parse_poly(argument, doc.field, number)
            try:
                doc.curve = PlaneCurve(F, doc.field)
            except LeafboundError as e:
                raise ParseError(e.message, line=number, code=e.code)
        elif directive == "foliation":
            parts = _split_list(argument, number)
            if len(parts) != 3:
                raise ParseError(f"foliation needs three coefficients, got {len(parts)}", line=number)
            doc.foliation_coefficients = tuple(_parse_poly(p, doc.field, number) for p in parts)
        elif directive == "ideal":
            doc.ideal = [_parse_poly(p, doc.field, number, AFFINE_VARIABLES) for p in _split_list(argument, number)]
        else:
            key, _, value = argument.partition(" ")
            value = value.strip()
            if key == "irreducible":
                if value not in _CLAIMS:
                    raise ParseError(f"meta irreducible expects true, false or unknown, got {value!r}", line=number)
                doc.claimed_irreducibility = _CLAIMS[value]
            elif key == "description":
                doc.description = value
            else:
                raise ParseError(f"unknown meta key {key!r}", line=number)

    if doc.curve is None and doc.foliation_coefficients is None and not doc.ideal:
        raise ParseError("input has no curve, foliation or ideal")
    logger.debug(f"parsed {source}: field {doc.field.label}, curve {'yes' if doc.curve else 'no'}")
    return doc


def load_document(path: str) -> InputDocument:
    """Read and parse an input file.

    Raises:
        ParseError: on malformed content, or when the file cannot be read
    """
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}", code=ErrorCode.PARSE_ERROR)
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 text (byte {e.start})", code=ErrorCode.PARSE_ERROR)
    return parse_document(text, source=str(file_path))
