"""Built-in corpus of curves with expected values.

Every entry carries the values it must reproduce, each tagged with where
the value comes from: "published" (known closed forms such as tau = (d-1)^2 for
concurrent lines), "trivial" (smoothness and similar) or "derived"
(computed once and cross-checked by the Macaulay oracle). ``run_corpus``
runs the full pipeline on each entry, compares, and fails on any mismatch
or any false verdict.

Usage:
    from src.corpus import builtin_corpus, run_corpus

    entries = builtin_corpus(config.corpus, tag="cones")
    results = run_corpus(entries, config, seed=0)
"""

import concurrent.futures
import logging
import random
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from src.algebra import VARIABLES, format_polynomial, random_polynomial
from src.bounds import full_report
from src.config import AnalysisConfig, Config, CorpusConfig
from src.curves import PlaneCurve
from src.errors import LeafboundError
from src.foliations import hamilton_foliation, tangency_degree_check
from src.models import BoundsReport, FieldSpec

logger = logging.getLogger(__name__)

PROVENANCES = ("published", "trivial", "derived", "blessed")

# Observable values an entry may pin down
OBSERVABLES = ("tau", "sigma", "u", "clusters", "m_leaf", "m_factors", "hamilton_degree")


@dataclass
class Expected:
    """One expected value.

    Attributes:
        value: Target value
        relation: "eq" or "ge" (computed >= value)
        provenance: Where the value comes from
    """
    value: int
    relation: str = "eq"
    provenance: str = "derived"

    def matches(self, computed: Optional[int]) -> bool:
        if computed is None:
            return False
        if self.relation == "ge":
            return computed >= self.value
        return computed == self.value

    def describe(self) -> str:
        symbol = ">=" if self.relation == "ge" else "="
        return f"{symbol} {self.value} [{self.provenance}]"


@dataclass
class CorpusEntry:
    """A curve with tags and expected values."""
    name: str
    curve: str
    field: FieldSpec
    tags: List[str] = field(default_factory=list)
    expected: Dict[str, Expected] = field(default_factory=dict)
    description: str = ""

    def plane_curve(self) -> PlaneCurve:
        return PlaneCurve.from_text(self.curve, self.field)


@dataclass
class EntryResult:
    """Outcome of running one entry."""
    index: int
    name: str
    computed: Dict[str, Optional[int]] = field(default_factory=dict)
    mismatches: List[str] = field(default_factory=list)
    failed_verdicts: List[str] = field(default_factory=list)
    tangency_mismatches: List[int] = field(default_factory=list)
    error: Optional[str] = None
    report: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return not (self.mismatches or self.failed_verdicts or self.tangency_mismatches or self.error)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "index": self.index,
            "name": self.name,
            "passed": self.passed,
            "computed": dict(self.computed),
            "mismatches": list(self.mismatches),
            "failed_verdicts": list(self.failed_verdicts),
            "tangency_mismatches": list(self.tangency_mismatches),
            "error": self.error,
            "report": self.report,
        }


# ==================== Built-in entries ====================

_LINES = ["x", "y", "(x + y)", "(x - y)", "(x - 2*y)", "(x + 2*y)"]


def _exp(value: int, provenance: str = "derived", relation: str = "eq") -> Expected:
    return Expected(value, relation, provenance)


def _cones() -> List[CorpusEntry]:
    entries = []
    for d in range(2, 7):
        entries.append(CorpusEntry(
            name=f"cone{d}",
            curve="*".join(_LINES[:d]),
            field=FieldSpec.rationals(),
            tags=["cones"],
            expected={
                "tau": _exp((d - 1) ** 2, "published"),
                "sigma": _exp(2 * d - 3, "published"),
                "u": _exp(0, "published"),
                "m_leaf": _exp(0, "derived"),
                "m_factors": _exp(0, "derived"),
                "clusters": _exp(1, "trivial"),
            },
            description=f"{d} concurrent lines",
        ))
    return entries


def _fixed_entries() -> List[CorpusEntry]:
    Q = FieldSpec.rationals()
    return [
        CorpusEntry("conic", "x*z - y^2", Q, ["smooth", "conic"], {
            "tau": _exp(0, "trivial"),
            "sigma": _exp(0, "trivial"),
            "u": _exp(0, "trivial"),
            "m_leaf": _exp(1, "derived"),
            "m_factors": _exp(1, "derived"),
            "hamilton_degree": _exp(1, "published"),
        }, "smooth conic"),
        CorpusEntry("fermat-cubic", "x^3 + y^3 + z^3", Q, ["smooth"], {
            "tau": _exp(0, "trivial"),
            "sigma": _exp(0, "trivial"),
            "u": _exp(0, "trivial"),
            "m_leaf": _exp(2, "derived"),
            "hamilton_degree": _exp(2, "published"),
        }, "smooth cubic"),
        CorpusEntry("nodal-cubic", "y^2*z - x^2*(x + z)", Q, ["cubics", "nodes"], {
            "tau": _exp(1, "published"),
            "sigma": _exp(1, "trivial"),
            "u": _exp(0, "published"),
            "clusters": _exp(1, "trivial"),
            "m_leaf": _exp(2, "derived"),
        }, "ordinary node"),
        CorpusEntry("cuspidal-cubic", "y^2*z - x^3", Q, ["cubics", "cusps"], {
            "tau": _exp(2, "derived"),
            "sigma": _exp(2, "derived"),
            "u": _exp(0, "derived"),
            "clusters": _exp(1, "trivial"),
            "m_leaf": _exp(1, "derived"),
        }, "ordinary cusp"),
        CorpusEntry("two-nodes", "y*(y*z - x^2 + x*z)", Q, ["cubics", "nodes", "clusters"], {
            "tau": _exp(2, "derived"),
            "u": _exp(0, "derived"),
            "clusters": _exp(2, "derived"),
        }, "conic and a secant line: two rational nodes"),
        CorpusEntry("conjugate-nodes", "y*(y*z - x^2 + 2*z^2)", Q, ["cubics", "nodes", "clusters"], {
            "tau": _exp(2, "derived"),
            "u": _exp(0, "derived"),
            "clusters": _exp(1, "derived"),
        }, "nodes at x^2 = 2: one cluster of two points"),
        CorpusEntry("a2-a3-quartic", "y^2*z^2 - x^3*z + x^4", Q, ["quartics", "cusps"], {
            "tau": _exp(5, "derived"),
            "u": _exp(0, "derived"),
        }, "quartic with a cusp and a tacnode"),
        CorpusEntry("cusp-and-line", "(y^2*z - x^3)*(x + y + z)", Q, ["quartics", "cusps", "nodes"], {
            "tau": _exp(5, "derived"),
            "u": _exp(0, "derived"),
            "clusters": _exp(2, "derived"),
        }, "cuspidal cubic and a line through three smooth points"),
        CorpusEntry("nonqh-quintic", "x^5 + y^5 + x^2*y^2*z", Q, ["nonqh"], {
            "tau": _exp(10, "derived"),
            "u": _exp(1, "derived"),
            "clusters": _exp(1, "trivial"),
        }, "a single non-quasi-homogeneous point"),
        CorpusEntry("five-lines", "x*y*(x + y)*(x - y)*(x + z)", Q, ["lines", "gaps", "remark34"], {
            "tau": _exp(13, "derived"),
            "u": _exp(0, "derived"),
            "m_factors": _exp(1, "published"),
            "m_leaf": _exp(3, "published", relation="ge"),
        }, "four concurrent lines and a general line"),
    ]


def _random_entries(config: CorpusConfig) -> List[CorpusEntry]:
    fs = FieldSpec.prime(config.random_prime)
    entries = []
    for d in config.random_degrees:
        F = random_polynomial(random.Random(d), fs, d, VARIABLES, homogeneous=True)
        entries.append(CorpusEntry(
            name=f"random-{fs.label}-d{d}",
            curve=format_polynomial(F),
            field=fs,
            tags=["random"],
            expected={
                "tau": _exp(0, "derived"),
                "sigma": _exp(0, "trivial"),
                "m_leaf": _exp(d - 1, "derived"),
                "hamilton_degree": _exp(d - 1, "published"),
            },
            description=f"seeded random curve of degree {d}",
        ))
    return entries


def builtin_corpus(config: Optional[CorpusConfig] = None, tag: Optional[str] = None) -> List[CorpusEntry]:
    """All built-in entries, optionally only those with ``tag`` (or that name)."""
    config = config or CorpusConfig()
    entries = _cones() + _fixed_entries() + _random_entries(config)
    if tag:
        entries = [e for e in entries if tag in e.tags or e.name == tag]
    return entries


# ==================== Expected-value file ====================

def load_blessed(path: Path) -> Dict[str, Dict[str, int]]:
    """Values written by ``--bless``, keyed by entry name."""
    if not path.exists():
        return {}
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    return {name: dict(values or {}) for name, values in data.get("entries", {}).items()}


def save_blessed(path: Path, results: List[EntryResult], seed: int) -> None:
    """Write computed values, keeping entries that were not run."""
    existing = load_blessed(path)
    for result in results:
        if result.error is None:
            existing[result.name] = {k: v for k, v in result.computed.items() if v is not None}
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with open(path, "w") as f:
        yaml.dump({"seed": seed, "entries": existing}, f, default_flow_style=False, sort_keys=False)
    logger.info(f"Blessed {len(results)} entries into {path}")


def _merged_expectations(entry: CorpusEntry, blessed: Dict[str, Dict[str, int]]) -> Dict[str, Expected]:
    expected = dict(entry.expected)
    for key, value in blessed.get(entry.name, {}).items():
        if key in OBSERVABLES and key not in expected:
            expected[key] = Expected(int(value), "eq", "blessed")
    return expected


# ==================== Running ====================

def observed_values(report: BoundsReport) -> Dict[str, Optional[int]]:
    """Observable values of a report, keyed as in OBSERVABLES."""
    inv = report.invariants
    return {
        "tau": inv.tau if inv else None,
        "sigma": inv.sigma if inv else None,
        "u": inv.u if inv else None,
        "clusters": len(inv.clusters) if inv else None,
        "m_leaf": report.m_leaf,
        "m_factors": report.m_factors,
        "hamilton_degree": report.hamilton_degree,
    }


def run_entry(
    indexed_entry,
    options: AnalysisConfig,
    seed: int,
    blessed: Dict[str, Dict[str, int]],
) -> EntryResult:
    """Run one entry. Top-level so worker processes can pickle it."""
    index, entry = indexed_entry
    result = EntryResult(index=index, name=entry.name)
    try:
        C = entry.plane_curve()
        report = full_report(C, options, seed)
    except LeafboundError as e:
        result.error = f"{e.code.value}: {e.message}"
        logger.error(f"{entry.name}: {result.error}")
        return result

    result.report = report.to_dict()
    result.computed = observed_values(report)
    for key, expected in _merged_expectations(entry, blessed).items():
        computed = result.computed.get(key)
        if not expected.matches(computed):
            result.mismatches.append(f"{key}: computed {computed}, expected {expected.describe()}")
    for error in report.errors:
        result.mismatches.append(f"stage {error.stage} failed: {error.code.value}")
    result.failed_verdicts = [v.theorem_id.value for v in report.verdicts if v.holds is False]

    if report.hamilton_degree is not None:
        try:
            hamilton = hamilton_foliation(C, seed, options.coordinate_attempts, options.coefficient_bound)
            for line in range(options.tangency_lines):
                degree = tangency_degree_check(hamilton.foliation, seed + line, options.line_attempts)
                if degree != hamilton.foliation.m:
                    result.tangency_mismatches.append(degree)
        except LeafboundError as e:
            result.mismatches.append(f"tangency check failed: {e.code.value}")

    status = "PASS" if result.passed else "FAIL"
    logger.info(f"[{index}] {entry.name}: {status}")
    return result


def run_corpus(
    entries: List[CorpusEntry],
    config: Config,
    seed: int = 0,
    workers: Optional[int] = None,
) -> List[EntryResult]:
    """Run entries, in a process pool when more than one worker is configured.

    Results come back in entry order whatever the completion order.
    """
    workers = workers or config.corpus.workers
    blessed = load_blessed(config.resolve_path(config.corpus.expected_file))
    job = partial(run_entry, options=config.analysis, seed=seed, blessed=blessed)
    indexed = list(enumerate(entries))
    logger.info(f"Running {len(entries)} corpus entries with {workers} worker(s)")

    if workers <= 1:
        return [job(item) for item in indexed]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(job, indexed, chunksize=1))
