"""Shared fixtures."""

from pathlib import Path
from typing import Callable

import pytest

from src.algebra import AFFINE_VARIABLES, parse_polynomial
from src.curves import PlaneCurve
from src.models import FieldSpec

Q = FieldSpec.rationals()
F_32003 = FieldSpec.prime(32003)


def affine(text: str, field_spec: FieldSpec = Q):
    """Polynomial in x, y."""
    return parse_polynomial(text, field_spec, AFFINE_VARIABLES)


def projective(text: str, field_spec: FieldSpec = Q):
    """Polynomial in x, y, z."""
    return parse_polynomial(text, field_spec)


def curve(text: str, field_spec: FieldSpec = Q) -> PlaneCurve:
    return PlaneCurve.from_text(text, field_spec)


@pytest.fixture
def write_input(tmp_path: Path) -> Callable[[str, str], str]:
    """Write an input file into tmp_path and return its path."""
    def write(text: str, name: str = "input.lb") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def isolated_cwd(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run from an empty directory so no leafbound.yaml or .env is picked up."""
    for name in ("LEAFBOUND_SEED", "LEAFBOUND_WORKERS", "LEAFBOUND_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
