#!/usr/bin/env python3
"""Leafbound - Main Entry Point.

Command-line surface for curve invariants, foliation degrees and the
verification of degree bounds.

Usage:
    python -m src.main [--config CONFIG] [--debug] <command> [options]

Commands:
    analyze FILE            invariants of the curve in FILE
    verify FILE             full pipeline and every bound verdict
    corpus list|run         built-in corpus
    oracle colength FILE    Macaulay-matrix colength of an ideal

Exit codes: 0 success, 1 false verdict / corpus mismatch / unexpected error,
2 parse error, 3 hypothesis violation, 4 oracle did not stabilize.
"""

import argparse
import json
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import List, Optional

import yaml

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.algebra import AFFINE_VARIABLES
from src.bounds import full_report
from src.config import OUTPUT_FORMATS, Config, load_config
from src.corpus import EntryResult, builtin_corpus, run_corpus, save_blessed
from src.curves import analyze_curve, tjurina_ideal
from src.documents import InputDocument, load_document
from src.errors import ComputationError, HypothesisError, LeafboundError, ParseError
from src.foliations import foliation_regularity, is_leaf, tangency_degree_check
from src.groebner import Ideal, oracle_colength
from src.models import BoundsReport, CurveInvariants, ErrorCode

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_NOT_STABILIZED = 4

HYPOTHESIS_CODES = {
    ErrorCode.NOT_REDUCED,
    ErrorCode.CHAR_DIVIDES_DEGREE,
    ErrorCode.CHAR_NOT_ZERO,
}


def setup_logging(config: Config, debug: bool = False) -> None:
    """Configure logging based on config settings.

    Console output goes to stderr so JSON on stdout stays parseable.

    Args:
        config: Configuration object
        debug: Enable debug mode
    """
    level = logging.DEBUG if debug else getattr(
        logging, config.logging.level.upper(), logging.INFO
    )

    formatter = logging.Formatter(
        "%(asctime)s %(levelname)s %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # File handler (if configured)
    if config.logging.file:
        log_path = config.resolve_path(config.logging.file)
        if not log_path.parent.exists():
            log_path.parent.mkdir(parents=True)

        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=config.logging.max_size_mb * 1024 * 1024,
            backupCount=config.logging.backup_count,
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    logger.debug(f"Logging configured (level: {logging.getLevelName(level)})")


# ==================== Rendering ====================

def _emit(data: dict, fmt: str, text: str) -> None:
    if fmt == "json":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def render_invariants(inv: CurveInvariants) -> str:
    """Text rendering of curve invariants."""
    lines = [
        f"d              {inv.d}",
        f"reduced        {inv.reduced}",
        f"irreducibility {inv.irreducibility.value}",
        f"tau            {inv.tau}",
        f"u              {inv.u if inv.u is not None else 'n/a'}",
        f"sigma          {inv.sigma}",
        f"rho            {inv.rho}",
        f"clusters       {len(inv.clusters)}",
    ]
    for c in inv.clusters:
        qh = "n/a" if c.quasi_homogeneous is None else ("yes" if c.quasi_homogeneous else "no")
        lines.append(
            f"  {c.eliminant_factor}: points={c.point_count} tau={c.tjurina_length} "
            f"mu={c.milnor_length} eps={c.polar_length} quasi-homogeneous={qh}"
        )
    return "\n".join(lines)


def render_report(report: BoundsReport) -> str:
    """Text rendering of a bounds report."""
    lines = [f"curve {report.curve} over {report.field} (seed {report.seed})"]
    if report.invariants:
        inv = report.invariants
        lines.append(f"d={inv.d} tau={inv.tau} u={inv.u} sigma={inv.sigma} rho={inv.rho} "
                     f"irreducibility={inv.irreducibility.value}")
    lines.append(f"m_leaf={report.m_leaf} m_factors={report.m_factors} hamilton={report.hamilton_degree}"
                 + (f" gaps={report.leaf_gaps}" if report.leaf_gaps else ""))
    for v in report.verdicts:
        data = v.to_dict()
        if v.skipped:
            lines.append(f"  {data['id']:6} SKIP  {v.skipped}")
            continue
        status = "OK" if v.holds else "FAIL"
        eq = " (equality)" if v.equality else ""
        lines.append(f"  {data['id']:6} {status:5} {data['lhs']} <= {data['rhs']}{eq}")
    for e in report.errors:
        lines.append(f"  error in {e.stage}: {e.code.value}: {e.message}")
    return "\n".join(lines)


def render_corpus(results: List[EntryResult]) -> str:
    """Pass/fail matrix."""
    header = f"{'#':>3} {'entry':24} {'tau':>4} {'sigma':>5} {'u':>3} {'m_leaf':>6} {'m_fact':>6}  status"
    lines = [header]
    for r in results:
        c = r.computed

        def cell(key, width):
            value = c.get(key)
            return f"{'-' if value is None else value:>{width}}"

        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.index:>3} {r.name:24} {cell('tau', 4)} {cell('sigma', 5)} {cell('u', 3)} "
                     f"{cell('m_leaf', 6)} {cell('m_factors', 6)}  {status}")
        for problem in r.mismatches + [f"verdict {v} false" for v in r.failed_verdicts]:
            lines.append(f"      {problem}")
        if r.error:
            lines.append(f"      {r.error}")
    passed = sum(1 for r in results if r.passed)
    lines.append(f"{passed}/{len(results)} entries passed")
    return "\n".join(lines)


# ==================== Commands ====================

def _require_curve(doc: InputDocument):
    if doc.curve is None:
        raise ParseError(f"{doc.source} has no curve line")
    return doc.curve


def cmd_analyze(args, config: Config) -> int:
    """Print curve invariants, or foliation data for a foliation-only file."""
    doc = load_document(args.file)
    seed = args.seed if args.seed is not None else config.analysis.seed
    fmt = args.format or config.output.format

    if doc.curve is None and doc.foliation_coefficients is not None:
        fol = doc.foliation()
        data = fol.to_dict()
        data["regularity"] = foliation_regularity(fol)
        data["tangency_degree"] = tangency_degree_check(fol, seed, config.analysis.line_attempts)
        text = (f"m={fol.m} deg_s={fol.deg_s} regularity={data['regularity']} "
                f"tangency_degree={data['tangency_degree']}")
        _emit(data, fmt, text)
        return EXIT_OK

    inv = analyze_curve(_require_curve(doc), seed, config.analysis)
    _emit(inv.to_dict(), fmt, render_invariants(inv))
    return EXIT_OK


def cmd_verify(args, config: Config) -> int:
    """Run the full pipeline and print every verdict."""
    doc = load_document(args.file)
    C = _require_curve(doc)
    seed = args.seed if args.seed is not None else config.analysis.seed
    fmt = args.format or config.output.format

    foliation = doc.foliation()
    report = full_report(C, config.analysis, seed, foliation, doc.claimed_irreducibility)
    data = report.to_dict()
    text = render_report(report)
    if foliation is not None and report.invariants is not None:
        leaf = is_leaf(C, foliation)
        data["input_foliation"] = {**foliation.to_dict(), "leaf": leaf.to_dict()}
        text += f"\ninput foliation: m={foliation.m} leaf={leaf.is_leaf} factors_through_only={leaf.factors_through_only}"
    _emit(data, fmt, text)

    if any(e.code in HYPOTHESIS_CODES for e in report.errors):
        return EXIT_HYPOTHESIS
    return EXIT_OK if report.all_hold and not report.errors else EXIT_FAILED


def cmd_corpus(args, config: Config) -> int:
    """List or run the built-in corpus."""
    entries = builtin_corpus(config.corpus, args.filter)
    fmt = getattr(args, "format", None) or config.output.format

    if args.action == "list":
        data = {"count": len(entries), "entries": [{"name": e.name, "tags": e.tags} for e in entries]}
        text = "\n".join([f"{len(entries)} entries"] + [f"  {e.name:24} {', '.join(e.tags)}" for e in entries])
        _emit(data, fmt, text)
        return EXIT_OK

    if not entries:
        print(f"Error: no corpus entry matches {args.filter!r}")
        return EXIT_FAILED
    seed = args.seed if args.seed is not None else config.analysis.seed
    results = run_corpus(entries, config, seed)
    if args.bless:
        save_blessed(config.resolve_path(config.corpus.expected_file), results, seed)
    _emit({"results": [r.to_dict() for r in results]}, fmt, render_corpus(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_oracle(args, config: Config) -> int:
    """Macaulay-matrix colength of the file's ideal (or its curve's affine Tjurina ideal)."""
    doc = load_document(args.file)
    if doc.ideal:
        ideal = Ideal.of(doc.ideal, doc.field, AFFINE_VARIABLES)
    else:
        ideal = tjurina_ideal(_require_curve(doc).affine_equation())
    bound = args.bound if args.bound is not None else config.oracle.default_bound
    print(oracle_colength(ideal, bound))
    return EXIT_OK


def exit_code_for(error: LeafboundError) -> int:
    """Exit code for an exception escaping a command."""
    if isinstance(error, ParseError):
        return EXIT_PARSE
    if isinstance(error, HypothesisError) or error.code in HYPOTHESIS_CODES:
        return EXIT_HYPOTHESIS
    if isinstance(error, ComputationError) and error.code == ErrorCode.NOT_STABILIZED:
        return EXIT_NOT_STABILIZED
    return EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the analyze, verify, corpus and oracle commands."""
    parser = argparse.ArgumentParser(
        description="Leafbound - invariant curves of plane foliations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Invariants of a curve
    python -m src.main analyze curves/cone4.lb

    # Every bound, as JSON
    python -m src.main verify curves/conic.lb --format json

    # Run the concurrent-line cones of the corpus
    python -m src.main corpus run --filter cones

    # Oracle colength with a larger degree bound
    python -m src.main oracle colength curves/ideal.lb --bound 12
        """
    )
    parser.add_argument(
        "--config", "-c",
        default=None,
        help="Path to configuration file (default: leafbound.local.yaml or leafbound.yaml if present)"
    )
    parser.add_argument(
        "--debug", "-d",
        action="store_true",
        help="Enable debug logging"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_common(sub, with_file: bool = True):
        if with_file:
            sub.add_argument("file", help="Input file")
        sub.add_argument("--seed", type=int, default=None, help="Seed for every randomized choice")
        sub.add_argument("--format", choices=OUTPUT_FORMATS, default=None, help="Output format")

    add_common(commands.add_parser("analyze", help="Curve invariants"))
    add_common(commands.add_parser("verify", help="Full report with bound verdicts"))

    corpus = commands.add_parser("corpus", help="Built-in corpus")
    corpus.add_argument("action", choices=("list", "run"))
    corpus.add_argument("--filter", default=None, help="Only entries with this tag or name")
    corpus.add_argument("--bless", action="store_true", help="Write computed values to the expected-values file")
    add_common(corpus, with_file=False)

    oracle = commands.add_parser("oracle", help="Macaulay-matrix oracle")
    oracle.add_argument("subcommand", choices=("colength",))
    oracle.add_argument("file", help="Input file with an ideal or a curve")
    oracle.add_argument("--bound", type=int, default=None, help="Degree bound of the Macaulay matrix")
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "corpus": cmd_corpus,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
    except (FileNotFoundError, ValueError, yaml.YAMLError) as e:
        print(f"Error: {e}")
        return EXIT_FAILED

    setup_logging(config, args.debug)

    try:
        return COMMANDS[args.command](args, config)
    except LeafboundError as e:
        print(f"Error: {e}")
        if args.debug:
            import traceback
            traceback.print_exc()
        return exit_code_for(e)
    except KeyboardInterrupt:
        print("\nInterrupted")
        return EXIT_FAILED
    except Exception as e:
        print(f"Error: {e}")
        if args.debug:
            import traceback
            traceback.print_exc()
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
