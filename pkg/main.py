"""
Command-line entry point for moment-angle cohomology rings.

Usage:
    python main.py --complex "m=4; facets={1,2},{2,3},{3,4},{4,1}" --pairs disk-sphere:2 --cmd ring
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import List, Optional, Tuple

from config import compute_config
from decomposition import betti_table, decompose, hochster_table, poincare_series
from errors import MomentAngleError, PreconditionError, VerificationFailure
from exact_linalg import CoefficientRing
from geometric_model import verify_eta_ring, verify_splitting
from inputs import parse_int_list, load_complex, parse_pairs
from star_ring import multiplication_table, ungraded_iso_check

logger = logging.getLogger(__name__)

COMMANDS = ("betti", "ring", "verify", "table", "regrade-check")


@dataclass
class JobSpec:
    complex_source: str
    pairs: str
    coeff: str = "Z"
    command: str = "betti"
    output: str = "text"
    budget: Optional[int] = None
    compare_suspend: Optional[str] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise PreconditionError(f"Unknown command {self.command!r}; choose one of {', '.join(COMMANDS)}")
        if self.output not in ("text", "structured"):
            raise PreconditionError(f"Unknown output format {self.output!r}")
        if self.command == "regrade-check" and not self.compare_suspend:
            raise PreconditionError("regrade-check needs --compare-suspend '[t1,...];[t1',...]'")
        if self.budget is not None and self.budget <= 0:
            raise PreconditionError("Budget must be positive")


def _render(spec: JobSpec, document: dict, lines: List[str]) -> str:
    if spec.output == "structured":
        return json.dumps(document, sort_keys=True, indent=2)
    return "\n".join(lines)


def _betti(spec, K, P, R) -> Tuple[int, str]:
    module = decompose(K, P, R, spec.budget)
    rows = betti_table(module)
    series = poincare_series(module)
    lines = [f"{'I':<16}{'degree':>8}{'rank':>6}  torsion"]
    lines += [f"{r['I']:<16}{r['degree']:>8}{r['rank']:>6}  {r['torsion'] or ''}" for r in rows]
    lines.append(f"Poincare series: {series.as_expr()}")
    document = {"rows": rows, "poincare": {str(k[0]): int(v) for k, v in sorted(series.terms())}}
    return 0, _render(spec, document, lines)


def _table(spec, K, P, R) -> Tuple[int, str]:
    table = hochster_table(decompose(K, P, R, spec.budget))
    lines = [f"|I|={size} degree {q}: {rank}" for (size, q), rank in table.items()]
    document = {"table": [[size, q, rank] for (size, q), rank in table.items()]}
    return 0, _render(spec, document, lines)


def _ring(spec, K, P, R) -> Tuple[int, str]:
    star = multiplication_table(K, P, R, spec.budget)
    return 0, _render(spec, star.to_document(), star.lines())


def _verify(spec, K, P, R) -> Tuple[int, str]:
    star = multiplication_table(K, P, R, spec.budget)
    reports = [
        verify_splitting(K, P, R, star.module, spec.budget),
        verify_eta_ring(K, P, R, star, spec.budget),
    ]
    lines = [line for report in reports for line in report.lines()]
    for report in reports:
        if report.counterexample:
            lines.append(f"counterexample: {json.dumps(report.counterexample, sort_keys=True)}")
    document = {"reports": [report.to_dict() for report in reports]}
    return (0 if all(r.passed for r in reports) else 1), _render(spec, document, lines)


def _regrade_check(spec, K, P, R) -> Tuple[int, str]:
    first, _, second = spec.compare_suspend.partition(";")
    verdict = ungraded_iso_check(K, P, parse_int_list(first), parse_int_list(second), R, spec.budget)
    return (0 if verdict.passed else 1), _render(spec, verdict.to_dict(), verdict.lines())


HANDLERS = {
    "betti": _betti,
    "ring": _ring,
    "verify": _verify,
    "table": _table,
    "regrade-check": _regrade_check,
}


def run(spec: JobSpec) -> Tuple[int, str]:
    """Run one job; returns the exit code and the report text."""
    try:
        spec.validate()
        K = load_complex(spec.complex_source)
        P = parse_pairs(spec.pairs, K.m)
        R = CoefficientRing.parse(spec.coeff)
        logger.info(f"Running {spec.command} on {K.describe()} with {P.label()} over {R.label}")
        return HANDLERS[spec.command](spec, K, P, R)
    except VerificationFailure as e:
        logger.error(f"Verification failed: {e}")
        detail = json.dumps(e.report, sort_keys=True, default=str) if e.report else ""
        return e.exit_code, f"FAIL: {e}\n{detail}".rstrip()
    except MomentAngleError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code, f"error: {e}"
    except Exception as e:
        logger.exception(f"Unexpected {type(e).__name__} while running {spec.command}: {e}")
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Cohomology rings of generalized moment-angle complexes")
    parser.add_argument("--complex", required=True, help="complex file path or inline 'm=<int>; facets={..},..'")
    parser.add_argument("--pairs", required=True,
                        help="disk-sphere:n | disk-sphere:[n1,..] | pair-file:<path> | cone:<ring-file>, "
                             "optionally ';suspend:[t1,..]'")
    parser.add_argument("--coeff", default="Z", help="Z or Zp:<prime>")
    parser.add_argument("--cmd", default="betti", choices=COMMANDS)
    parser.add_argument("--out", default="text", choices=("text", "structured"))
    parser.add_argument("--budget", type=int, default=None, help="simplex budget for geometric models")
    parser.add_argument("--compare-suspend", default=None, help="'[t1,..];[t1\\',..]' for regrade-check")
    parser.add_argument("--record", action="store_true", help="record the job in the run ledger")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=compute_config["log_level"])
    spec = JobSpec(args.complex, args.pairs, args.coeff, args.cmd, args.out, args.budget, args.compare_suspend)
    if args.record or compute_config["record_runs"]:
        from worker import process_job

        result = process_job(None, spec)
        exit_code, report = result["exit_code"], result["report"]
    else:
        exit_code, report = run(spec)
    print(report)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
