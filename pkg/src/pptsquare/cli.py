"""Command-line interface: ``pptsquare <command> ...``."""

import argparse
import json
import sys
from fractions import Fraction

from . import io
from .channel import ChoiMatrix, choi_of_map, compose, map_of_choi
from .entanglement import Witness, default_registry, load_registry, pairing, ppt_test
from .families import StateFamily, family_state
from .matrix import PSD_TOL
from .scan import default_grid, load_grid, scan, write_csv, write_json
from .sqroot import (
    GENERAL_PAIR,
    SQUARE_ROOT,
    FactorizationProblem,
    SolverConfig,
    solve_factorization,
    verify_solution,
)


def _emit(text, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _dims(text):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("dims must look like A,B,C") from exc
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must look like A,B,C")
    return parts


def cmd_choi(args):
    phi = io.read_map(args.map)
    _emit(io.write_choi(choi_of_map(phi)), args.out)
    return 0


def cmd_map(args):
    choi = io.read_choi(args.choi, args.in_dim, args.out_dim)
    _emit(io.write_map(map_of_choi(choi)), args.out)
    return 0


def cmd_compose(args):
    result = compose(io.read_map(args.outer), io.read_map(args.inner))
    _emit(io.write_map(result), args.out)
    return 0


def cmd_ppt(args):
    M, _ = io.read_matrix(args.state)
    verdict = ppt_test(M, args.tol, args.dim_a, args.dim_b)
    _emit(json.dumps(verdict.as_dict(), indent=2))
    return 0


def cmd_pair(args):
    phi = io.read_map(args.witness)
    M, dims = io.read_matrix(args.state)
    dims = dims or (phi.in_dim, phi.out_dim)
    value = pairing(ChoiMatrix(M, *dims), Witness(phi))
    out = {"pairing": float(value), "negative": bool(value < 0)}
    if isinstance(value, Fraction):
        out["exact"] = str(value)
    _emit(json.dumps(out, indent=2))
    return 0


def cmd_sqroot(args):
    a, b, c = args.dims
    target = io.read_choi(args.target, a, c)
    settings = io.load_json(args.config) if args.config else {}
    require_cp = tuple(settings.pop("require_cp", (False, False)))
    require_ccp = tuple(settings.pop("require_ccp", (False, False)))
    if args.restarts is not None:
        settings["restarts"] = args.restarts
    if args.seed is not None:
        settings["seed"] = args.seed
    config = SolverConfig.from_dict(settings)
    mode = SQUARE_ROOT if args.mode == "square" else GENERAL_PAIR
    problem = FactorizationProblem(target, (a, b, c), mode, require_cp, require_ccp)
    solutions = solve_factorization(problem, config)
    report = []
    for sol in solutions:
        entry = sol.as_dict()
        entry["verification"] = verify_solution(sol, target, residual_tol=config.residual_tol).as_dict()
        report.append(entry)
    _emit(json.dumps({"dims": [a, b, c], "mode": mode, "count": len(report), "solutions": report},
                     indent=2))
    return 0 if report else 1


def cmd_scan(args):
    if args.family != "agkl":
        raise ValueError("only the agkl family can be scanned")
    grid = load_grid(args.grid) if args.grid else default_grid()
    registry = load_registry(args.witness_dir) if args.witness_dir else default_registry()
    records, summary = scan(grid, args.tol, registry)
    if args.out:
        write_json(records, summary, args.out)
    if args.csv:
        write_csv(records, args.csv)
    print(json.dumps(summary.as_dict(), indent=2))
    if summary.detected_points:
        print("ENTANGLEMENT SCREEN FIRED at (a, t) = "
              + ", ".join(f"({a}, {t})" for a, t in summary.detected_points)
              + "; evidence only, see the report", file=sys.stderr)
    return summary.exit_code


def cmd_family(args):
    params = {}
    if args.name == "agkl":
        if args.a is None or args.t is None:
            raise ValueError("agkl needs --a and --t")
        params = {"a": args.a, "t": args.t}
    fs = family_state(StateFamily(args.name, params))
    dim_a, dim_b = fs.cuts[0]
    _emit(io.write_matrix(fs.matrix, dim_a=dim_a, dim_b=dim_b), args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pptsquare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("choi", help="Choi matrix of a map file")
    p.add_argument("--map", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_choi)

    p = sub.add_parser("map", help="map tensor of a Choi matrix file")
    p.add_argument("--choi", required=True)
    p.add_argument("--in-dim", type=int, required=True)
    p.add_argument("--out-dim", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("compose", help="outer o inner")
    p.add_argument("--outer", required=True)
    p.add_argument("--inner", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("ppt", help="PSD and partial-transpose test")
    p.add_argument("--state", required=True)
    p.add_argument("--dim-a", type=int, required=True)
    p.add_argument("--dim-b", type=int, required=True)
    p.add_argument("--tol", type=float, default=PSD_TOL)
    p.set_defaults(func=cmd_ppt)

    p = sub.add_parser("pair", help="witness pairing tr(rho C^T)")
    p.add_argument("--state", required=True)
    p.add_argument("--witness", required=True)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("sqroot", help="factor a target channel")
    p.add_argument("--target", required=True)
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--mode", choices=("square", "pair"), default="square")
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_sqroot)

    p = sub.add_parser("scan", help="grid scan of the composite construction")
    p.add_argument("--family", required=True)
    p.add_argument("--grid")
    p.add_argument("--witness-dir")
    p.add_argument("--tol", type=float, default=PSD_TOL)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("family", help="write a family member as a matrix file")
    p.add_argument("--name", required=True, choices=("ones9", "choi3x3", "agkl"))
    p.add_argument("--a", type=_fraction)
    p.add_argument("--t", type=_fraction)
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
