"""Command-line front end.

Exit status: 0 on success, 1 on validation or shape errors (the message
names the offending field), 2 on I/O errors and malformed files.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import setfile
from .convert import to_cpz
from .enclosure import DEMO_CONFIG, demo_pipeline
from .linalg import ConvergenceError, DomainError, ShapeError, ValidationError
from .oracle import WitnessSampleConfig, point_cloud
from .ops import (
    cartesian_product,
    convex_hull,
    intersect,
    linear_map,
    minkowski_sum,
    quadratic_map,
    union,
)
from .regularize import compact
from .sets import is_regular, representation_size

BINARY_OPS = {
    "minksum": minkowski_sum,
    "cartprod": cartesian_product,
    "convhull": convex_hull,
    "intersect": intersect,
    "union": union,
}

FIG3_FILES = (
    "P.csv",
    "piece_above.csv",
    "piece_below.csv",
    "enclosure_f1.csv",
    "enclosure_f2.csv",
    "union.csv",
)


class UsageError(Exception):
    pass


def write_csv(points: np.ndarray, path) -> None:
    """One point per line, comma separated, exact repr of every double."""
    lines = [",".join(repr(float(v)) for v in row) for row in np.atleast_2d(points)]
    Path(path).write_text("".join(line + "\n" for line in lines) if len(points) else "")


def _load_cpz(path):
    return to_cpz(setfile.load(path))


def _cmd_convert(args):
    if args.to != "cpz":
        raise UsageError(f"--to: only 'cpz' is supported, got {args.to!r}")
    setfile.save(_load_cpz(args.input), args.output)


def _cmd_op(args):
    kind, operands = args.kind, args.operands
    if kind in ("linmap", "quadmap"):
        if len(operands) != 2:
            raise UsageError(f"{kind} takes a matrix file and a set file")
        mats = setfile.load_matrices(operands[0])
        s = _load_cpz(operands[1])
        if kind == "linmap":
            if len(mats) != 1:
                raise UsageError("linmap takes a single matrix")
            out = linear_map(mats[0], s)
        else:
            out = quadratic_map(mats, s)
    else:
        if len(operands) != 2:
            raise UsageError(f"{kind} takes two set files")
        out = BINARY_OPS[kind](_load_cpz(operands[0]), _load_cpz(operands[1]))
    setfile.save(out, args.output)


def _config(args) -> WitnessSampleConfig:
    return WitnessSampleConfig(draws=args.draws, reject_tol=args.reject_tol,
                               polish_steps=args.polish_steps, seed=args.seed)


def _cmd_sample(args):
    write_csv(point_cloud(_load_cpz(args.input), _config(args)), args.output)


def _cmd_regularize(args):
    setfile.save(compact(_load_cpz(args.input)), args.output)


def _cmd_info(args):
    s = _load_cpz(args.input)
    d = s.dims()
    print(f"n={d['n']} p={d['p']} h={d['h']} m={d['m']} q={d['q']} "
          f"size={representation_size(s)} regular={str(is_regular(s)).lower()}")


def _cmd_demo(args):
    cfg = _config(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    res = demo_pipeline(cfg)
    above, below = res.pieces
    clouds = (
        point_cloud(res.P, cfg),
        above.cloud,
        below.cloud,
        point_cloud(above.enclosure, cfg),
        point_cloud(below.enclosure, cfg),
        point_cloud(res.union, cfg),
    )
    for name, pts in zip(FIG3_FILES, clouds):
        write_csv(pts, out / name)
        print(f"{out / name}: {len(pts)} points")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpzono", description="Constrained polynomial zonotopes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a set file to a CPZ")
    p.add_argument("input")
    p.add_argument("--to", default="cpz")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_convert)

    p = sub.add_parser("op", help="apply a set operation")
    p.add_argument("kind", choices=["linmap", "quadmap", *BINARY_OPS])
    p.add_argument("operands", nargs="+",
                   help="linmap/quadmap: MATRIX SET; others: SET SET")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_op)

    def sampling(p, draws, seed):
        p.add_argument("--draws", type=int, default=draws)
        p.add_argument("--seed", type=int, default=seed)
        p.add_argument("--reject-tol", type=float, default=math.inf)
        p.add_argument("--polish-steps", type=int, default=25)

    p = sub.add_parser("sample", help="write a witness point cloud as CSV")
    p.add_argument("input")
    sampling(p, 10_000, 0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_sample)

    p = sub.add_parser("regularize", help="merge duplicate monomials")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_regularize)

    p = sub.add_parser("info", help="print dimensions, size and regularity")
    p.add_argument("input")
    p.set_defaults(run=_cmd_info)

    p = sub.add_parser("demo", help="nonlinear-map demo point clouds")
    p.add_argument("name", choices=["fig3"])
    sampling(p, DEMO_CONFIG.draws, DEMO_CONFIG.seed)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=_cmd_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.run(args)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ShapeError, ValidationError, DomainError, ConvergenceError,
            ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
