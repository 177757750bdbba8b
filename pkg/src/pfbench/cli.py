"""Command-line entry point. Every subcommand prints one JSON document on stdout.

Exit codes: 0 success or certified, 2 refuted or violated, 3 inconclusive,
64 usage error, 65 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bandop, intertwine
from .classes import CERTIFY_TOL, OperatorClass, SphereOptConfig, Verdict, class_check
from .linalg import (
    DimensionError,
    DomainError,
    MatrixFormatError,
    NotHermitianError,
    PreconditionError,
    load_matrix,
    vector_to_pairs,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_INPUT = 65

COUNTEREXAMPLE_TOL = 1e-14
GAMMA_TOL = 1e-10
PF_TOL = 1e-8

log = logging.getLogger("pfbench")

_VERDICT_EXIT = {Verdict.CERTIFIED: EXIT_OK, Verdict.REFUTED: EXIT_VIOLATION, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}
_KINDS = {"paranormal": OperatorClass.PARANORMAL, "star-paranormal": OperatorClass.STAR_PARANORMAL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfbench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("check-class", help="certify or refute class membership of a matrix")
    p.add_argument("--input", required=True, help="JSON matrix file")
    p.add_argument("--class", dest="cls", required=True, choices=[c.value for c in OperatorClass])
    p.add_argument("--restarts", type=_positive_int, default=SphereOptConfig.restarts)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=CERTIFY_TOL, help="certification tolerance")

    p = sub.add_parser("verify-example", help="reproduce the paranormal counterexample on l^2")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--sweep", type=_positive_int, default=bandop.SWEEP_K, help="largest support in the defect sweep")
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("band-defect", help="defect minimum of a band operator on finite supports")
    p.add_argument("--op", required=True, help="paper-t or shift:w0,w1,...")
    p.add_argument("--kind", required=True, choices=sorted(_KINDS))
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--restarts", type=_positive_int, default=SphereOptConfig.restarts)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gamma-check", help="check X -> A X B against its Kronecker matrix and adjoint")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--samples", type=_positive_int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("pf-test", help="intertwining trials A X = X U with unitary U")
    p.add_argument("--a", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=1)
    return parser


def _check_class(args) -> tuple[dict, int]:
    t = load_matrix(args.input)
    cfg = SphereOptConfig(restarts=args.restarts, seed=args.seed)
    cert = class_check(t, OperatorClass(args.cls), cfg, certify_tol=args.tol)
    return cert.to_dict(), _VERDICT_EXIT[cert.verdict]


def _verify_example(args) -> tuple[dict, int]:
    report = bandop.verify_counterexample(args.k)
    head = bandop.two_dim_head_check(args.samples, seed=args.seed)
    cfg = SphereOptConfig(seed=args.seed)
    sweep = bandop.defect_sweep(bandop.paper_t(), OperatorClass.PARANORMAL, range(1, args.sweep + 1), cfg)
    sweep_ok = all(m.value >= -CERTIFY_TOL for _, m in sweep)
    residual_ok = report.forward_residual <= COUNTEREXAMPLE_TOL and abs(report.adjoint_residual - 1.0) <= COUNTEREXAMPLE_TOL
    passed = residual_ok and head.passed() and sweep_ok
    doc = {
        "operator": "paper-t",
        "kind": OperatorClass.PARANORMAL.value,
        "k": args.k,
        "residuals": [report.forward_residual, report.adjoint_residual],
        "head_check": head.to_dict(),
        "sweep": [{"k": k, "defect": m.value} for k, m in sweep],
        "defect": min(m.value for _, m in sweep),
        "witness": None,
        "passed": passed,
    }
    return doc, EXIT_OK if passed else EXIT_VIOLATION


def _band_defect(args) -> tuple[dict, int]:
    try:
        op = bandop.parse_operator(args.op)
    except DomainError as exc:
        raise UsageError(f"pfbench band-defect: error: --op: {exc}") from None
    cfg = SphereOptConfig(restarts=args.restarts, seed=args.seed)
    res = bandop.support_defect_min(op, _KINDS[args.kind], args.k, cfg)
    negative = res.value < -CERTIFY_TOL
    doc = {
        "operator": op.name,
        "kind": args.kind,
        "k": args.k,
        "defect": res.value,
        "witness": vector_to_pairs(res.argmin) if negative else None,
    }
    return doc, EXIT_VIOLATION if negative else EXIT_OK


def _gamma_check(args) -> tuple[dict, int]:
    a, b = load_matrix(args.a), load_matrix(args.b)
    action = intertwine.gamma_action_check(a, b, args.samples, args.seed)
    adj = intertwine.gamma_adjoint_check(a, b, args.samples, args.seed)
    passed = action <= GAMMA_TOL and adj <= GAMMA_TOL
    doc = {"action_residual": action, "adjoint_residual": adj, "samples": args.samples, "passed": passed}
    return doc, EXIT_OK if passed else EXIT_VIOLATION


def _pf_test(args) -> tuple[dict, int]:
    a = load_matrix(args.a)
    trials = []
    worst = 0.0
    for seed in range(args.seed, args.seed + args.trials):
        result = intertwine.pf_theorem_trial(a, seed=seed)
        worst = max(worst, result.max_relative_adjoint)
        trials.append({"diagnostics": result.diagnostics, "reports": [r.to_dict() for r in result.reports]})
    passed = worst <= PF_TOL
    doc = {"trials": trials, "max_relative_adjoint": worst, "passed": passed}
    return doc, EXIT_OK if passed else EXIT_VIOLATION


_COMMANDS = {
    "check-class": _check_class,
    "verify-example": _verify_example,
    "band-defect": _band_defect,
    "gamma-check": _gamma_check,
    "pf-test": _pf_test,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(f"{parser.format_usage()}pfbench: error: a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr)
        doc, code = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (MatrixFormatError, DimensionError, DomainError, PreconditionError, NotHermitianError) as exc:
        print(f"pfbench: input error: {exc}", file=stderr)
        return EXIT_INPUT
    # repr-based float output is the shortest string that round-trips exactly
    stdout.write(json.dumps(_jsonable(doc), sort_keys=True) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
