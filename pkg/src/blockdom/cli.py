"""Command line interface.

Exit codes: 0 success (for ``check``: dominant), 1 input/usage errors,
2 dominance failures, 3 singular or overflowing inversion, 4 golden
mismatch in ``reproduce``.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import DominanceViolation, compute_bounds, compute_tau_omega
from .dominance import check_row_block_dominance
from .experiments import EXPERIMENT_IDS, SEEDED_IDS, ExperimentSpec, run_experiment
from .gershgorin import compare_regions, eval_grid
from .inverse import (RecurrenceOverflowError, assemble_inverse,
                      condition_estimate, ikebe_factors, residual)
from .kernels import NormKind, SingularError
from .matrixio import (MatrixFileError, dump_json_text, read_matrix_file,
                       write_json_file, write_matrix_file)
from .structures import BlockTridiagonalMatrix


def _parse_t(value: str):
    if value == "all":
        return "all"
    t = int(value)
    if t < 1:
        raise ValueError("t must be positive")
    return t


def _parse_box(value: str):
    if value == "auto":
        return None
    parts = value.split(",")
    if len(parts) != 4:
        raise ValueError("box must be 'auto' or RE_MIN,RE_MAX,IM_MIN,IM_MAX")
    re_min, re_max, im_min, im_max = (float(p) for p in parts)
    if not (re_min < re_max and im_min < im_max):
        raise ValueError("box must satisfy RE_MIN < RE_MAX and IM_MIN < IM_MAX")
    return re_min, re_max, im_min, im_max


def _require_tridiag(mat):
    if not isinstance(mat, BlockTridiagonalMatrix):
        raise MatrixFileError(
            "this command needs a block_tridiagonal matrix file", "$.kind")
    return mat


def cmd_check(args) -> int:
    report = check_row_block_dominance(read_matrix_file(args.input), args.norm)
    print(dump_json_text(report.to_json_dict()))
    return 0 if report.dominant else 2


def cmd_invert(args) -> int:
    a = _require_tridiag(read_matrix_file(args.input))
    z = assemble_inverse(ikebe_factors(a))
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_file(out / "inverse.json", z.to_general())
    res = residual(a, z, args.norm)
    write_json_file(out / "residual.json", {
        "norm": args.norm.value,
        "residual": res,
        "condition_estimate": condition_estimate(a, z, args.norm),
        "diag_consistency": z.diag_consistency,
    })
    print(f"residual ({args.norm.value}-norm): {res:.6e}")
    print(f"wrote {out / 'inverse.json'} and {out / 'residual.json'}")
    return 0


def cmd_bounds(args) -> int:
    a = _require_tridiag(read_matrix_file(args.input))
    report = check_row_block_dominance(a, args.norm)
    if not report.dominant:
        print("matrix is not row block diagonally dominant; bounds do not apply",
              file=sys.stderr)
        return 2
    t_max = max(1, a.n - 1)
    table = compute_tau_omega(a, args.norm, t_max)
    if args.t == "all":
        t_values = range(1, t_max + 1)
    else:
        if args.t > t_max:
            raise ValueError(f"t={args.t} exceeds the refinement range 1..{t_max}")
        t_values = [args.t]
    z = assemble_inverse(ikebe_factors(a))
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for t in t_values:
        rep = compute_bounds(a, z, table, t)
        rep.write_csv(out / f"bounds_t{t}.csv")
        summaries.append(rep.summary_dict())
        eu = "n/a" if rep.max_eu is None else f"{rep.max_eu:.6g}"
        el = "n/a" if rep.max_el is None else f"{rep.max_el:.6g}"
        print(f"t={t} max_Eu={eu} max_El={el} rho1={rep.rho1:.6g} rho2={rep.rho2:.6g}")
    write_json_file(out / "bounds_summary.json", summaries)
    print(f"wrote per-step CSVs and {out / 'bounds_summary.json'}")
    return 0


def cmd_gershgorin(args) -> int:
    mat = read_matrix_file(args.input)
    grid = eval_grid(mat, args.box, args.nx, args.ny, args.norm)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    grid.write_csv(out / "grid.csv")
    summary = compare_regions(grid)
    write_json_file(out / "region_summary.json", {
        **summary.to_json_dict(),
        "box": [grid.re_min, grid.re_max, grid.im_min, grid.im_max],
        "nx": grid.nx, "ny": grid.ny, "norm": args.norm.value})
    print(f"union nodes: new={summary.union_count_new} fv={summary.union_count_fv} "
          f"violations={summary.containment_violations}")
    print(f"wrote {out / 'grid.csv'} and {out / 'region_summary.json'}")
    return 0


def cmd_reproduce(args) -> int:
    if args.experiment in SEEDED_IDS and args.seed is None:
        print(f"{args.experiment} needs --seed for its row scaling", file=sys.stderr)
        return 1
    output = Path(args.output) if args.output else Path("out") / args.experiment
    spec = ExperimentSpec(
        exp_id=args.experiment, seed=args.seed, norm=args.norm,
        output_dir=output, t_values=None if args.t == "all" else (args.t,),
        nx=args.nx, ny=args.ny, box=args.box)
    result = run_experiment(spec)
    for msg in result.messages:
        print(msg)
    print(f"{args.experiment}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockdom",
        description="Block diagonal dominance checks, block tridiagonal "
                    "inversion, inverse decay bounds, and block Gershgorin "
                    "inclusion regions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_norm(p):
        p.add_argument("--norm", type=NormKind, choices=list(NormKind),
                       default=NormKind.TWO, metavar="{one,inf,fro,two}",
                       help="matrix norm (default: two)")

    p = sub.add_parser("check", help="row block diagonal dominance report")
    p.add_argument("--input", required=True, help="matrix JSON file")
    add_norm(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("invert", help="invert a block tridiagonal matrix")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--output", default="out", help="artifact directory")
    add_norm(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("bounds", help="decay bounds on the inverse block norms")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--output", default="out", help="artifact directory")
    p.add_argument("--t", type=_parse_t, default="all",
                   help="refinement step (default: all)")
    add_norm(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gershgorin", help="inclusion region grids")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--output", default="out", help="artifact directory")
    p.add_argument("--box", type=_parse_box, default=None,
                   help="auto (default) or RE_MIN,RE_MAX,IM_MIN,IM_MAX")
    p.add_argument("--nx", type=int, default=200, help="grid nodes along re")
    p.add_argument("--ny", type=int, default=200, help="grid nodes along im")
    add_norm(p)
    p.set_defaults(func=cmd_gershgorin)

    p = sub.add_parser("reproduce", help="run a named experiment against "
                                         "its expected results")
    p.add_argument("experiment", choices=EXPERIMENT_IDS)
    p.add_argument("--seed", type=int, default=None,
                   help="row-scaling seed (required for seeded experiments)")
    p.add_argument("--output", default=None, help="artifact directory")
    p.add_argument("--t", type=_parse_t, default="all")
    p.add_argument("--nx", type=int, default=400)
    p.add_argument("--ny", type=int, default=400)
    p.add_argument("--box", type=_parse_box, default=None)
    add_norm(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except MatrixFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularError, RecurrenceOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DominanceViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
