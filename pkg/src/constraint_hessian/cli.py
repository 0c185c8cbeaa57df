"""Command-line front end.

Exit codes: 0 success, 2 parse or validation error, 3 point off the
manifold, 4 oracle mismatch, 5 negative stability verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .errors import ConstraintHessianError, OffManifoldError, SingularGramianError
from .gramian import restricted_hessian
from .orthogonal import NU_ORDER, SkewBasisElement, geodesic_second_derivative, restricted_hessian_on, skew_pairs
from .problem import ProblemError, load_problem
from .so3 import SET_LABELS, sweep
from .stability import (
    CERTIFIED,
    CERTIFIED_MODULO_DECAY,
    CRITICAL_RTOL,
    classify,
    critical_residual,
    neg_gradient_field,
    stability_certificate,
    symmetric_eigenvalues,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_OFF_MANIFOLD = 3
EXIT_ORACLE = 4
EXIT_VERDICT = 5
ORACLE_TOL = 5e-5

SWEEP_HEADER = ["alpha", "set", "lambda1", "lambda2", "lambda3", "classification", "q0", "q1", "q2", "q3"]


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def fmt(v: float) -> str:
    """17 significant digits; round-trips every double."""
    return format(float(v), ".17g")


def _load(path):
    try:
        return load_problem(path)
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_INVALID, f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise _Fail(EXIT_INVALID, f"cannot read problem file: {exc}")
    except OffManifoldError as exc:
        raise _Fail(EXIT_OFF_MANIFOLD, str(exc))
    except (ProblemError, ConstraintHessianError, KeyError, TypeError, ValueError) as exc:
        raise _Fail(EXIT_INVALID, f"invalid problem: {exc}")


def _hessian_for(problem, basis_name):
    if problem.n is not None:
        hess = restricted_hessian_on(problem.cost, problem.orthogonal_point)
        if basis_name == "nu":
            if problem.n != 3:
                raise _Fail(EXIT_INVALID, "the nu basis requires n = 3")
            hess = hess.permuted(NU_ORDER)
            labels = ("nu_1", "nu_2", "nu_3")
        else:
            labels = hess.basis.labels
        return hess, labels
    if basis_name == "nu":
        raise _Fail(EXIT_INVALID, "the nu basis requires an O(3) problem")
    basis = problem.basis("null")
    return restricted_hessian(problem.constraints, problem.cost, basis), tuple(
        f"v_{i + 1}" for i in range(basis.dim)
    )


def cmd_hessian(args) -> int:
    problem = _load(args.problem)
    try:
        hess, labels = _hessian_for(problem, args.basis)
    except SingularGramianError as exc:
        raise _Fail(EXIT_INVALID, str(exc))
    w = symmetric_eigenvalues(hess.matrix)
    resid, scale = critical_residual(problem.constraints, problem.cost, problem.point)
    critical = resid <= CRITICAL_RTOL * scale
    result = {
        "kind": problem.kind,
        "basis": list(labels),
        "multipliers": [float(v) for v in hess.multipliers],
        "hessian": [[float(v) for v in row] for row in hess.matrix],
        "eigenvalues": [float(v) for v in w],
        "classification": classify(w, hess.matrix),
        "critical_residual": resid,
        "critical": bool(critical),
    }
    if not critical:
        result["note"] = f"not a critical point (residual {resid:.6g})"
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["quantity", "i", "j", "value"])
        for i, v in enumerate(result["multipliers"]):
            writer.writerow(["multiplier", i + 1, "", fmt(v)])
        for i, row in enumerate(result["hessian"]):
            for j, v in enumerate(row):
                writer.writerow(["hessian", i + 1, j + 1, fmt(v)])
        for i, v in enumerate(result["eigenvalues"]):
            writer.writerow(["eigenvalue", i + 1, "", fmt(v)])
        writer.writerow(["critical_residual", "", "", fmt(resid)])
        writer.writerow(["classification", "", "", result["classification"]])
        if not critical:
            writer.writerow(["note", "", "", result["note"]])
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def sweep_csv(alpha_min: float, alpha_max: float, steps: int, labels) -> str:
    """CSV text of a sweep over ``steps`` equally spaced parameter values."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in sweep(np.linspace(alpha_min, alpha_max, steps), labels):
        lam = ["", "", ""] if row.eigenvalues is None else [fmt(v) for v in row.eigenvalues]
        q = ["", "", "", ""] if row.quaternion is None else [fmt(v) for v in row.quaternion]
        writer.writerow([fmt(row.alpha), row.set_label, *lam, row.classification, *q])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    labels = [s.strip() for s in args.sets.split(",") if s.strip()]
    bad = [s for s in labels if s not in SET_LABELS]
    if bad or not labels:
        raise _Fail(EXIT_INVALID, f"unknown sets {bad}; choose from {','.join(SET_LABELS)}")
    if args.steps < 2:
        raise _Fail(EXIT_INVALID, "--steps must be at least 2")
    lo, hi = args.alpha_min, args.alpha_max
    if not (-math.pi <= lo <= hi <= math.pi):
        raise _Fail(EXIT_INVALID, f"need -pi <= alpha-min <= alpha-max <= pi, got [{lo}, {hi}]")
    text = sweep_csv(lo, hi, args.steps, labels)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load(args.problem)
    if problem.n is None:
        raise _Fail(EXIT_INVALID, "verify needs an orthogonal or so3-example problem")
    if not args.h > 0:
        raise _Fail(EXIT_INVALID, "--h must be positive")
    p = problem.orthogonal_point
    hess = restricted_hessian_on(problem.cost, p)
    rows = []
    for i, (a, b) in enumerate(skew_pairs(p.n)):
        formula = float(hess.matrix[i, i])
        oracle = geodesic_second_derivative(problem.cost, p, SkewBasisElement(a, b), args.h)
        rows.append((f"omega_{a}{b}", formula, oracle, abs(formula - oracle)))
    worst = max(r[3] for r in rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["direction", "formula", "oracle", "abs_diff"])
    for name, formula, oracle, diff in rows:
        writer.writerow([name, fmt(formula), fmt(oracle), fmt(diff)])
    sys.stdout.write(buf.getvalue())
    sys.stdout.write(f"# max abs_diff {fmt(worst)} tolerance {fmt(ORACLE_TOL)}\n")
    return EXIT_OK if worst <= ORACLE_TOL else EXIT_ORACLE


def cmd_stability(args) -> int:
    problem = _load(args.problem)
    vf_name = args.vector_field or problem.vector_field
    X = neg_gradient_field(problem.cost) if vf_name == "neg-gradient" else None
    if args.samples < 1 or not args.radius > 0:
        raise _Fail(EXIT_INVALID, "--samples must be >= 1 and --radius positive")
    try:
        verdict = stability_certificate(
            problem.constraints, problem.cost, X, problem.point, problem.basis("omega"),
            radius=args.radius, n_samples=args.samples, seed=args.seed,
        )
    except OffManifoldError as exc:
        raise _Fail(EXIT_OFF_MANIFOLD, str(exc))
    except SingularGramianError as exc:
        raise _Fail(EXIT_INVALID, str(exc))
    out = verdict.to_dict()
    out["seed"] = args.seed
    out["samples"] = args.samples if X is not None else 0
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK if verdict.verdict in (CERTIFIED, CERTIFIED_MODULO_DECAY) else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="constraint-hessian",
        description="Restricted Hessians, multipliers and stability checks on constraint manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hessian", help="multipliers, restricted Hessian, eigenvalues")
    p.add_argument("problem")
    p.add_argument("--basis", choices=("omega", "nu"), default="omega")
    fmt_group = p.add_mutually_exclusive_group()
    fmt_group.add_argument("--json", dest="format", action="store_const", const="json")
    fmt_group.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format="json", func=cmd_hessian)

    p = sub.add_parser("sweep", help="eigenvalues of the five critical families over alpha")
    p.add_argument("--alpha-min", type=float, default=-math.pi)
    p.add_argument("--alpha-max", type=float, default=math.pi)
    p.add_argument("--steps", type=int, default=181)
    p.add_argument("--sets", default=",".join(SET_LABELS))
    p.add_argument("--out", default=None, help="output CSV path (default: standard output)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="compare the Hessian formula against the geodesic oracle")
    p.add_argument("problem")
    p.add_argument("--h", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stability", help="stability certificate at the problem point")
    p.add_argument("problem")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=0.1)
    p.add_argument("--vector-field", choices=("neg-gradient",), default=None)
    p.set_defaults(func=cmd_stability)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
