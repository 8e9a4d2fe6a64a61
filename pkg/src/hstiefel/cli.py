"""Command-line front end.

Every successful command writes exactly one JSON document (or one CSV
stream) to stdout.  Domain failures exit with status 1 and a JSON error
object; malformed arguments exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import flow as flowmod
from .group_action import transitivity_witness
from .jsonio import (
    dumps,
    group_element_to_dict,
    matrix_from_dict,
    matrix_to_dict,
    point_from_dict,
    point_matrix_from_dict,
    point_to_dict,
)
from .morse import (
    critical_level,
    critical_levels,
    gradient,
    height,
    hessian_spectrum,
    is_critical,
    notable_point,
    sigma_invariants,
)
from .quaternion import DEFAULT_TOL, QuaternionError, unitarity_residual
from .qsvd import relative_svd, svd
from .stiefel import ManifoldError, random_point, validate_point

TOL_ENV = "HSTIEFEL_TOL"


class UsageError(Exception):
    pass


def _tolerance() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV} must be a decimal float, got {raw!r}") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def _read_json(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise QuaternionError(f"{path}: invalid JSON ({exc})") from exc


def _load_point(path: str, tol: float):
    return point_from_dict(_read_json(path), tol)


# commands -------------------------------------------------------------------


def cmd_levels(args, tol):
    return critical_levels(args.n, args.k)


def cmd_notable(args, tol):
    return point_to_dict(notable_point(args.n, args.k, args.q))


def cmd_random_point(args, tol):
    return point_to_dict(random_point(args.n, args.k, args.seed))


def cmd_analyze(args, tol):
    mat = point_matrix_from_dict(_read_json(args.point))
    try:
        x = validate_point(mat, tol)
    except ManifoldError as exc:
        return {"on_manifold": False, "constraint_residual": exc.residual}
    crit, res = is_critical(x, tol)
    out = {
        "on_manifold": True,
        "constraint_residual": x.residual(),
        "height": height(x),
        "grad_norm": gradient(x).norm(),
        "critical": crit,
        "critical_residual": res,
    }
    if crit:
        out["level"] = critical_level(x, tol)
    return out


def cmd_spectrum(args, tol):
    x = _load_point(args.point, tol)
    report = hessian_spectrum(x, tol)
    q = critical_level(x, tol)
    inv = sigma_invariants(x.n, x.k, q)
    matches = (report.mult_minus2, report.mult_zero, report.mult_plus2) == (
        inv.index,
        inv.kernel_dim,
        inv.plus_dim,
    )
    return {"spectrum": report.to_dict(), "level": q, "invariants": inv.to_dict(), "matches": matches}


def cmd_invariants(args, tol):
    return sigma_invariants(args.n, args.k, args.q).to_dict()


def cmd_svd(args, tol):
    a = matrix_from_dict(_read_json(args.matrix))
    f = svd(a)
    return {
        "u": matrix_to_dict(f.U),
        "s": f.S,
        "v": matrix_to_dict(f.V),
        "reconstruction_residual": (f.reconstruct() - a).norm(),
        "u_residual": unitarity_residual(f.U),
        "v_residual": unitarity_residual(f.V),
    }


def cmd_rel_svd(args, tol):
    x = _load_point(args.point, tol)
    rel = relative_svd(x, tol=tol)
    t, p = rel.blocks()
    return {
        "p": rel.p,
        "q": rel.q,
        "r": rel.r,
        "c": rel.c,
        "s": rel.s,
        "m": matrix_to_dict(rel.m),
        "a": matrix_to_dict(rel.a),
        "b": matrix_to_dict(rel.b),
        "residual_t": (t - x.T).norm(),
        "residual_p": (p - x.P).norm(),
        "m_residual": unitarity_residual(rel.m),
        "a_residual": unitarity_residual(rel.a),
        "b_residual": unitarity_residual(rel.b),
    }


def cmd_limits(args, tol):
    x = _load_point(args.point, tol)
    backward, forward = flowmod.flow_limits(x)
    lo, hi = flowmod.limit_levels(x)
    return {
        "backward": {"level": lo, "point": point_to_dict(backward)},
        "forward": {"level": hi, "point": point_to_dict(forward)},
    }


def _both_csv(closed, rk4, with_points: bool) -> tuple[str, float]:
    header = ["t", "h_closed", "h_rk4", "deviation"]
    n, k = closed.points[0].n, closed.points[0].k
    if with_points:
        cols = flowmod.point_columns(n, k)
        header += ["closed_" + c for c in cols] + ["rk4_" + c for c in cols]
    lines = [",".join(header)]
    worst = 0.0
    for i, t in enumerate(closed.times):
        dev = (closed.points[i].mat - rk4.points[i].mat).norm()
        worst = max(worst, dev)
        row = [t, closed.heights[i], rk4.heights[i], dev]
        if with_points:
            row += list(closed.points[i].mat.real_vector()) + list(rk4.points[i].mat.real_vector())
        lines.append(",".join(flowmod.fmt(v) for v in row))
    return "\n".join(lines) + "\n", worst


def cmd_flow(args, tol):
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if not args.t0 < args.t1:
        raise UsageError("--t0 must be smaller than --t1")
    x = _load_point(args.point, tol)
    summary = None
    if args.method == "closed":
        text = flowmod.closed_form_trajectory(x, args.t0, args.t1, args.steps).to_csv(args.points)
    elif args.method == "rk4":
        traj = flowmod.numerical_flow(x, args.t0, args.t1, args.steps, args.reproject)
        text = traj.to_csv(args.points)
    else:
        closed = flowmod.closed_form_trajectory(x, args.t0, args.t1, args.steps)
        rk4 = flowmod.numerical_flow(x, args.t0, args.t1, args.steps, args.reproject)
        text, worst = _both_csv(closed, rk4, args.points)
        summary = {"max_deviation": worst, "rk4_drift": rk4.drift, "steps": args.steps}
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if summary is not None:
        sys.stderr.write(dumps(summary) + "\n")
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hstiefel",
        description="Morse-Bott analysis of h(x) = Tr(P*P) on quaternionic Stiefel manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def nk(p, with_q=False):
        p.add_argument("n", type=int)
        p.add_argument("k", type=int)
        if with_q:
            p.add_argument("q", type=int)

    p = sub.add_parser("levels", help="critical levels of h on X_{n,k}")
    nk(p)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("notable", help="notable point of the level q")
    nk(p, True)
    p.set_defaults(func=cmd_notable)

    p = sub.add_parser("random-point", help="seeded random point of X_{n,k}")
    nk(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random_point)

    p = sub.add_parser("analyze", help="height, gradient norm and criticality of a point")
    p.add_argument("point", help="point JSON file, or - for stdin")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", help="Hessian spectrum at a critical point")
    p.add_argument("point")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("invariants", help="closed-form invariants of the level q")
    nk(p, True)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("svd", help="quaternionic SVD of a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("rel-svd", help="relative SVD of a Stiefel point")
    p.add_argument("point")
    p.set_defaults(func=cmd_rel_svd)

    p = sub.add_parser("flow", help="gradient flow trajectory as CSV")
    p.add_argument("point")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--method", choices=["closed", "rk4", "both"], default="closed")
    p.add_argument("--reproject", action="store_true")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--points", action="store_true", help="append flattened point entries to each row")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("limits", help="backward and forward limits of the flow line")
    p.add_argument("point")
    p.set_defaults(func=cmd_limits)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = _tolerance()
        payload = args.func(args, tol)
    except UsageError as exc:
        sys.stderr.write(f"hstiefel {args.command}: {exc}\n")
        return 2
    except (QuaternionError, ValueError, OSError) as exc:
        sys.stdout.write(dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 1
    if payload is not None:
        sys.stdout.write(dumps(payload) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
