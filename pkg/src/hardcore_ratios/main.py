#!/usr/bin/env python3
# -*- coding: utf-8 -*-
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import platform
import sys
import time
from fractions import Fraction
from importlib import metadata
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence

from .cayley import Rect, cayley_zeros, spherical_derivative_field, write_pgm, write_polyline_csv, write_zeros_csv
from .config import (
    CARDIOID_SAMPLES,
    CATALOG_MAX_VERTICES,
    RADIUS_EXPONENT,
    RENDER_DEPTH,
    RENDER_RECT,
    RENDER_RESOLUTION,
    RENDER_THRESHOLD,
    SEARCH_BUDGET,
    ZERO_PRECISION_DIGITS,
    get_setting,
    load_config,
    setup_logging,
    write_manifest,
)
from .datamodels import RunManifest
from .errors import HardcoreError, ParseError
from .exact_arith import GaussianRational, parse_rational
from .fast_impl import design_implementer, emit_tree, replay_plan, run_fast_implementation, search_fast_implementer
from .fast_impl.sources import PairSourceManager
from .graph_core import RootedGraph, enumerate_catalog, find_minimal_zero_tree, format_ratio, partition
from .moebius import classify, f_lambda, fixed_points, tr_squared
from .regions import RegionManager, cardioid_boundary

logger = logging.getLogger("hardcore")

Payload = Iterator[Dict[str, Any]]


# --- Argument parsing ---
def _gaussian(text: str) -> GaussianRational:
    try:
        return GaussianRational.parse(text)
    except ParseError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _pixels(text: str) -> tuple:
    try:
        width, height = (int(p) for p in text.lower().split("x"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected WxH, got '{text}'") from e
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError("resolution must be positive")
    return width, height


def _rect(text: str) -> Rect:
    try:
        return Rect.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1, got '{text}'") from e


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the parse-error code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(ParseError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser(config: Dict[str, Any]) -> argparse.ArgumentParser:
    parser = _Parser(prog="hcratio", description="Occupation ratios of the hard-core model")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized searches, recorded in the manifest")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="Worker threads for rendering")
    parser.add_argument("--manifest", type=str, help="Write a run manifest to this path")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ratio", help="Exact (Z_in, Z_out, ratio) of a rooted graph")
    p.add_argument("graph", help="Graph JSON, inline or a path to a file")
    p.add_argument("--lambda", dest="lam", type=_gaussian, required=True)
    p.set_defaults(handler=cmd_ratio)

    p = sub.add_parser("zeros", help="Smallest tree with a zero at lambda")
    p.add_argument("--lambda", dest="lam", type=_gaussian, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--max-vertices", type=int, default=10)
    p.add_argument("--dot", action="store_true", help="Also print the tree in DOT format")
    p.set_defaults(handler=cmd_zeros)

    p = sub.add_parser("classify", help="Classify f_lambda(z) = lambda/(1+z)")
    p.add_argument("--lambda", dest="lam", type=_gaussian, required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("regions", help="Region verdicts for lambda")
    p.add_argument("--lambda", dest="lam", type=_gaussian, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.set_defaults(handler=cmd_regions)

    p = sub.add_parser("implement", help="Build a tree whose ratio approximates a target")
    p.add_argument("--lambda0", type=_gaussian, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--target", type=_gaussian, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--catalog-size", type=int, default=get_setting(config, "search", "catalog_size", CATALOG_MAX_VERTICES))
    p.add_argument("--budget", type=int, default=get_setting(config, "search", "budget", SEARCH_BUDGET))
    p.add_argument("--radius-exponent", type=int, default=get_setting(config, "search", "radius_exponent", RADIUS_EXPONENT))
    p.add_argument("--source", type=str, help="Pair source name (catalog)")
    p.add_argument("--value-only", action="store_true", help="Use seed pairs; report the plan without a tree")
    p.add_argument("--save-implementer", type=str, help="Write the certified implementer as JSON")
    p.add_argument("--load-implementer", type=str, help="Reuse an implementer written by --save-implementer")
    p.set_defaults(handler=cmd_implement)

    p = sub.add_parser("render-activity", help="Spherical-derivative field of Cayley ratios as PGM")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--depth", type=int, default=get_setting(config, "render", "depth", RENDER_DEPTH))
    p.add_argument("--rect", type=_rect, default=Rect(*RENDER_RECT))
    p.add_argument("--px", type=_pixels, default=tuple(get_setting(config, "render", "resolution", RENDER_RESOLUTION)))
    p.add_argument("--threshold", type=float, default=get_setting(config, "render", "threshold", RENDER_THRESHOLD))
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=cmd_render_activity)

    p = sub.add_parser("render-cardioid", help="Boundary of the cardioid as a CSV polyline")
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--samples", type=int, default=CARDIOID_SAMPLES)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=cmd_render_cardioid)

    p = sub.add_parser("cayley-zeros", help="Zeros of the depth-n Cayley tree polynomial")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--precision", type=int, default=ZERO_PRECISION_DIGITS)
    p.add_argument("--out", type=str)
    p.set_defaults(handler=cmd_cayley_zeros)

    p = sub.add_parser("catalog", help="Dump the tree catalog at lambda0 as JSON lines")
    p.add_argument("--lambda0", type=_gaussian, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--max-vertices", type=int, default=8)
    p.set_defaults(handler=cmd_catalog)

    p = sub.add_parser("explore", help="Interactive parameter explorer")
    p.add_argument("--theme", type=str, help="Theme for this run")
    p.set_defaults(handler=cmd_explore)
    return parser


# --- Commands ---
def _read_graph(text: str) -> RootedGraph:
    if os.path.exists(text):
        try:
            with open(text, "r") as f:
                text = f.read()
        except OSError as e:
            raise ParseError(f"cannot read graph file: {e}") from e
    return RootedGraph.from_json(text)


def cmd_ratio(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    graph = _read_graph(args.graph)
    yield partition(graph, args.lam).to_json()


def cmd_zeros(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    tree = find_minimal_zero_tree(args.lam, args.delta, args.max_vertices)
    if tree is None:
        yield {"lambda": str(args.lam), "found": False, "max_vertices": args.max_vertices}
        return
    out: Dict[str, Any] = {"lambda": str(args.lam), "found": True, "tree": tree.to_json()}
    if args.dot:
        out["dot"] = tree.to_dot()
    yield out


def cmd_classify(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    m = f_lambda(args.lam)
    points = fixed_points(m)
    yield {
        "lambda": str(args.lam),
        "kind": classify(m).value,
        "tr_squared": str(tr_squared(m)),
        "fixed_points": [str(z) for z in points.points],
        "fixed_point_kinds": [k.value for k in points.kinds],
        "exact": points.exact,
    }


def cmd_regions(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    manager = RegionManager(config)
    for verdict in manager.verdicts(args.lam, args.delta):
        yield {"lambda": str(args.lam), "delta": args.delta, **verdict.to_json()}


def _implementer(args: argparse.Namespace, config: Dict[str, Any]):
    from .fast_impl import FastImplementer

    if args.load_implementer:
        try:
            with open(args.load_implementer, "r") as f:
                imp = FastImplementer.from_json(json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise ParseError(f"cannot read implementer: {e}") from e
        if imp.lambda0 != args.lambda0 or imp.delta != args.delta:
            raise ParseError("saved implementer was built for another lambda0 or delta")
        return imp
    if args.value_only:
        return design_implementer(args.lambda0, args.delta, args.radius_exponent)

    manager = PairSourceManager(config, seed=args.seed)
    if args.source:
        source = manager.get_source(args.source)
        if source is None:
            raise ParseError(f"unknown pair source '{args.source}'")
    else:
        sources = manager.get_all_sources()
        source = sources[0] if sources else None
    catalog = enumerate_catalog(args.delta, args.lambda0, args.catalog_size)
    return search_fast_implementer(
        args.lambda0, args.delta, catalog, args.budget, source, args.radius_exponent
    )


def cmd_implement(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    timings: Dict[str, float] = {}
    started = time.perf_counter()
    imp = _implementer(args, config)
    timings["implementer"] = round(time.perf_counter() - started, 6)
    if args.save_implementer:
        with open(args.save_implementer, "w") as f:
            json.dump(imp.to_json(), f, indent=2)

    started = time.perf_counter()
    plan = run_fast_implementation(imp, args.target, args.eps)
    timings["plan"] = round(time.perf_counter() - started, 6)
    value = replay_plan(plan)
    out: Dict[str, Any] = {
        **plan.to_json(),
        "replay_error_squared": str((value - plan.target).norm()),
        "certificate": imp.certificate.to_json() if imp.certificate else None,
    }
    if imp.has_trees:
        started = time.perf_counter()
        tree, pair = emit_tree(plan, imp)
        timings["tree"] = round(time.perf_counter() - started, 6)
        out.update({"tree": tree.to_json(), "z_in": str(pair.z_in), "z_out": str(pair.z_out)})
    out["timings"] = timings
    yield out


def cmd_render_activity(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    field = spherical_derivative_field(args.rect, args.px, args.d, args.depth, args.threads)
    image = field.to_image(args.threshold)
    write_pgm(args.out, image)
    yield {
        "out": args.out,
        "resolution": list(args.px),
        "white_pixels": int((image == 255).sum()),
        "depth": args.depth,
        "d": args.d,
    }


def cmd_render_cardioid(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    points = cardioid_boundary(args.delta, args.samples)
    thetas = [2 * math.pi * k / args.samples for k in range(len(points))]
    write_polyline_csv(args.out, points, thetas)
    yield {"out": args.out, "delta": args.delta, "points": len(points)}


def cmd_cayley_zeros(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    zeros = cayley_zeros(args.d, args.n, args.precision)
    if args.out:
        write_zeros_csv(args.out, zeros)
    for z in zeros:
        yield {
            "n": z.depth,
            "re": repr(float(z.root.real)),
            "im": repr(float(z.root.imag)),
            "residual": repr(float(z.residual)),
            "certified": z.certified,
        }


def cmd_catalog(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    catalog = enumerate_catalog(args.delta, args.lambda0, args.max_vertices)
    for entry in catalog:
        yield {"code": entry.code, "vertices": entry.size, "ratio": format_ratio(entry.ratio)}


def cmd_explore(args: argparse.Namespace, config: Dict[str, Any]) -> Payload:
    from .app import HardcoreApp
    from .config import load_themes

    available_themes = load_themes()
    theme_name = args.theme or config.get("theme") or "dracula"
    if theme_name not in available_themes:
        print(f"Theme '{theme_name}' not found, falling back to dracula.", file=sys.stderr)
        theme_name = "dracula"
    logger.info("Using theme: %s", theme_name)
    HardcoreApp(theme=theme_name, config=config).run()
    return iter(())


# --- Manifest ---
def _versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in ("hardcore-ratios", "mpmath", "numpy", "scipy", "sympy"):
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {}
    for key, value in vars(args).items():
        if key == "handler":
            continue
        if isinstance(value, (GaussianRational, Fraction, Rect)):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        flags[key] = value
    return flags


def _emit(records: Iterator[Dict[str, Any]]) -> List[str]:
    outputs = []
    for record in records:
        print(json.dumps(record, sort_keys=True))
        if isinstance(record.get("out"), str):
            outputs.append(record["out"])
    return outputs


# --- Entrypoint ---
def main(argv: Optional[Sequence[str]] = None) -> int:
    config = load_config()
    parser = build_parser(config)
    args = parser.parse_args(argv)

    debug_path = setup_logging(args.debug)
    if debug_path:
        print(f"Debug logging enabled: {debug_path}", file=sys.stderr)

    handler: Callable[[argparse.Namespace, Dict[str, Any]], Payload] = args.handler
    manifest = RunManifest(args.command, _flags(args), args.seed, _versions())
    started = time.perf_counter()
    code = 0
    try:
        manifest.outputs = _emit(handler(args, config))
    except HardcoreError as e:
        logger.exception("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        if e.diagnostics:
            print(json.dumps({"error": str(e), "diagnostics": e.diagnostics}, default=str), file=sys.stderr)
        code = e.exit_code
    except Exception as e:
        logger.exception("Command crashed: %s", e)
        print(f"internal error: {e}", file=sys.stderr)
        code = 5
    manifest.timing["seconds"] = round(time.perf_counter() - started, 6)
    if args.manifest:
        data = manifest.to_json()
        data["exit_code"] = code
        write_manifest(args.manifest, data)
    return code


if __name__ == "__main__":
    sys.exit(main())
