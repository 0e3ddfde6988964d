"""Command line interface.

Exit codes: 0 success, 1 bad input or I/O failure, 2 verification failure,
3 solver did not converge, 4 deck labels do not match.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import hyp2
from .balance import NoConvergence, SolverConfig, solve
from .fileio import (FormatError, read_config, read_mapping, read_mesh_or_mapping,
                     read_weights, write_mapping, write_mesh, write_trace, write_weights)
from .fuchsian import GenusTooSmall, regular_group
from .gmap import GeodesicMapping, LabelMismatch, Weights
from .render import RenderStyle, write_svg
from .simplicial import builtin_mapping, euler_char
from .verify import embedding_report
from .weights import MorphPlan, NotEmbedded, mvc, morph

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_SOLVER, EXIT_LABELS = 0, 1, 2, 3, 4


def _solver_config(args) -> tuple[SolverConfig, int]:
    kw, seed = {}, 0
    if getattr(args, "config", None):
        kw, file_seed = read_config(args.config)
        if file_seed is not None:
            seed = file_seed
    for key in ("tau", "eps", "max_iters", "backtrack"):
        val = getattr(args, key, None)
        if val is not None:
            kw[key] = val
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    return SolverConfig(**kw), seed


def _initial_lifts(n: int, seed: int) -> np.ndarray:
    """Lifts scattered within 1e-3 of the base point."""
    rng = np.random.default_rng(seed)
    x = np.zeros((n, 3))
    x[:, :2] = rng.normal(0.0, 1e-3, (n, 2))
    return hyp2.project_arr(x)


def cmd_mesh(args) -> int:
    m = builtin_mapping(regular_group(args.genus), refine=args.refine)
    write_mesh(args.out, m.complex, m.labels)
    c = m.complex
    print(f"n={c.n} E={c.num_edges} F={len(c.faces)} chi={euler_char(c)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg, seed = _solver_config(args)
    c, labels, lifts = read_mesh_or_mapping(args.input)
    if lifts is None:
        lifts = _initial_lifts(c.n, seed)
    m0 = GeodesicMapping(c, labels, lifts)
    if args.weights:
        w = read_weights(args.weights, c)
    elif args.random is not None:
        w = Weights.random(c, args.random, np.random.default_rng(seed))
    else:
        w = Weights.uniform(c)
    try:
        m, trace = solve(m0, w, cfg)
    except NoConvergence as exc:
        path = args.trace or f"{args.out}.trace"
        write_trace(path, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        print(f"trace written to {path}", file=sys.stderr)
        return EXIT_SOLVER
    write_mapping(args.out, m)
    if args.trace:
        write_trace(args.trace, trace)
    print(f"mu={trace.final:.3e} sweeps={trace.sweeps}")
    return EXIT_OK


def cmd_mvc(args) -> int:
    m = read_mapping(args.mapping)
    write_weights(args.out, mvc(m))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = embedding_report(read_mapping(args.mapping), paranoid=args.paranoid)
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_morph(args) -> int:
    cfg, _ = _solver_config(args)
    m0, m1 = read_mapping(args.map0), read_mapping(args.map1)
    if m0.complex != m1.complex or m0.labels != m1.labels:
        raise LabelMismatch("endpoint mappings carry different deck labels")
    plan = MorphPlan(m0, m1, frames=args.frames, cfg=cfg, log_space=args.log_space)
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        frames = morph(plan)
    except NoConvergence as exc:
        path = os.path.join(args.out_dir, "failed.trace")
        write_trace(path, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        print(f"trace written to {path}", file=sys.stderr)
        return EXIT_SOLVER
    style = RenderStyle()
    for k, f in enumerate(frames):
        stem = os.path.join(args.out_dir, f"frame_{k:03d}")
        write_mapping(stem + ".map", f)
        write_svg(stem + ".svg", f, style=style)
    print(f"wrote {len(frames)} frames to {args.out_dir}")
    return EXIT_OK


def cmd_render(args) -> int:
    style = RenderStyle(radius=args.radius, stroke=args.stroke,
                        polygon=not args.no_polygon, translates=args.translates)
    write_svg(args.out, read_mapping(args.mapping), style=style)
    return EXIT_OK


def _solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--tau", type=float, help="step damping in (0, 1]")
    g.add_argument("--eps", type=float, help="stop when max |r_i|/W_i < eps")
    g.add_argument("--max-iters", dest="max_iters", type=int)
    g.add_argument("--backtrack", type=float, help="step shrink factor on rejection")
    g.add_argument("--seed", type=int)
    g.add_argument("--config", help="text file of 'key value' solver settings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyptutte",
        description="Balanced geodesic triangulations of closed hyperbolic surfaces.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh", help="write the builtin mesh of a regular surface")
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--refine", type=int, default=0, help="number of 1-to-4 subdivisions")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("solve", help="solve for the balanced mapping")
    p.add_argument("input", help="mesh or mapping file (a mapping is used as the start)")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--weights", help="weights file")
    src.add_argument("--uniform", action="store_true", help="unit weights (default)")
    src.add_argument("--random", type=float, metavar="LAMBDA",
                     help="log-uniform random weights in [1, LAMBDA]")
    p.add_argument("--trace", help="write the residual trace here")
    p.add_argument("-o", "--out", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mvc", help="mean value weights of an embedded mapping")
    p.add_argument("mapping")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_mvc)

    p = sub.add_parser("verify", help="embedding report; exit 2 on failure")
    p.add_argument("mapping")
    p.add_argument("--paranoid", action="store_true", help="add the O(F^2) overlap check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("morph", help="morph between two mappings")
    p.add_argument("map0")
    p.add_argument("map1")
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--log-space", dest="log_space", action="store_true",
                   help="interpolate weights geometrically")
    p.add_argument("-o", "--out-dir", dest="out_dir", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_morph)

    p = sub.add_parser("render", help="draw a mapping in the Poincare disk")
    p.add_argument("mapping")
    p.add_argument("--radius", type=float, default=400.0)
    p.add_argument("--stroke", type=float, default=0.6)
    p.add_argument("--no-polygon", dest="no_polygon", action="store_true")
    p.add_argument("--translates", type=float, metavar="D",
                   help="also draw translates within distance D of the base")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except LabelMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LABELS
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NotEmbedded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (OSError, FormatError, GenusTooSmall, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
