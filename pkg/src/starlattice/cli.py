"""Command-line interface.

Exit codes: 0 success, 1 a domain-level negative result (invalid lattice,
count mismatch, design error), 2 usage or I/O problems.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import counting, design, scaling
from .kinematics import Bias, compressed_cell
from .model import (
    EdgeProfile,
    GeometryParams,
    LatticeError,
    ParseError,
    parse_encoding,
    parse_heightmap,
    serialize_encoding,
)
from .render import CSV, SVG, RenderSpec, render
from .validity import check_validity

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _out_dir(path: str) -> Path:
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {path}: {exc.strerror or exc}") from exc
    return d


def _geom(args) -> GeometryParams:
    return GeometryParams(args.s1, args.s2, args.crossbar, getattr(args, "compression", None) or 0.0)


def _load_encoding(path: str):
    text = _read(path)
    try:
        return parse_encoding(text)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from exc


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    enc = _load_encoding(args.file)
    report = check_validity(enc)
    if report.is_valid:
        print("valid")
        return EXIT_OK
    print(f"invalid: {len(report.violations)} crossbar violation(s)")
    for r, c in report.violations:
        print(f"{r} {c}")
    return EXIT_NEGATIVE


def cmd_joints(args) -> int:
    enc = _load_encoding(args.file)
    report = check_validity(enc)
    print(report.joint_grid.as_table())
    return EXIT_OK if report.is_valid else EXIT_NEGATIVE


def cmd_count(args) -> int:
    methods = ["brute", "dp"] if args.method == "both" else [args.method]
    records = []
    for m in methods:
        try:
            records.append(counting.count(args.rows, args.cols, m, threads=args.threads))
        except counting.SizeLimitExceeded as exc:
            hint = " (try --method dp)" if m == "brute" else ""
            print(f"error: {exc}{hint}", file=sys.stderr)
            return EXIT_NEGATIVE
    for rec in records:
        print(rec.to_tsv())
    if len({r.valid_count for r in records}) > 1:
        print("error: methods disagree", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK


def _fit_dataset(args) -> scaling.FitDataset:
    if args.table:
        return scaling.parse_count_table(_read(args.table))
    if args.self_compute:
        counts = {k: counting.count_dp(*k).valid_count for k in scaling.reference_table()}
        return scaling.reference_dataset(counts)
    return scaling.reference_dataset()


def cmd_fit(args) -> int:
    data = _fit_dataset(args)
    variants = scaling.VARIANTS if args.variant == "both" else (args.variant,)
    models = [scaling.fit_scaling(data, v) for v in variants]
    print(scaling.format_report(models, data))
    return EXIT_OK


def cmd_predict(args) -> int:
    if args.k is not None:
        model = scaling.FitModel(*args.k, variant="given")
    else:
        model = scaling.fit_scaling(_fit_dataset(args), args.variant)
    est = scaling.predict_count(model, args.rows, args.cols)
    prob = counting.valid_probability(args.rows, args.cols, est)
    print(f"{args.rows}\t{args.cols}\t{est:.6g}\t{round(est)}")
    print(f"probability: {prob.value:.6g} ({prob.percent:.6g} %)")
    return EXIT_OK


def _load_profile(path: str) -> design.ProfilePolyline:
    text = _read(path)
    try:
        return design.parse_profile(text)
    except (ValueError, LatticeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _profile_edge(args):
    prof = _load_profile(args.profile)
    rows = args.rows if args.rows else prof.segment_count
    return design.approximate_profile(prof, rows, _geom(args), compression_c=args.compression)


def cmd_profile(args) -> int:
    edge, c = _profile_edge(args)
    print(str(edge))
    print(f"compression: {c:.6f}")
    return EXIT_OK


def cmd_generate(args) -> int:
    if (args.profile is None) == (args.edge is None):
        raise UsageError("give exactly one of --profile or --edge")
    if args.edge is not None:
        try:
            edge = EdgeProfile.parse(args.edge)
        except ParseError as exc:
            raise UsageError(str(exc)) from exc
    else:
        edge, c = _profile_edge(args)
        print(f"edge: {edge}")
        print(f"compression: {c:.6f}")
    result = design.generate_lattice(edge, design.Mode(args.mode))
    if args.out:
        _write(args.out, serialize_encoding(result.lattice) + "\n")
    print(f"layers: {result.layer_count}")
    return EXIT_OK


def cmd_render(args) -> int:
    enc = _load_encoding(args.file)
    geom = _geom(args)
    kind = SVG if args.format == "svg" else CSV
    if args.theta is not None:
        spec = RenderSpec(theta=args.theta, kind=kind, scale=args.scale, stroke_mm=args.stroke)
    else:
        bias = Bias.ABOVE if args.above else Bias.BELOW
        theta = compressed_cell(geom, bias).theta
        spec = RenderSpec(theta=theta, kind=kind, scale=args.scale, stroke_mm=args.stroke)
    _write(args.out, render(enc, geom, spec))
    return EXIT_OK


def _write_layers(out_dir: str, stem: str, edges, geom, mode) -> None:
    d = _out_dir(out_dir)
    for i, edge in enumerate(edges):
        lat = design.generate_lattice(edge, mode).lattice
        (d / f"{stem}_{i:02d}.lat").write_text(serialize_encoding(lat) + "\n")


def cmd_text(args) -> int:
    geom = _geom(args)
    mode = design.Mode(args.mode)
    total = 0
    for ch in args.string:
        if ch.isspace():
            continue
        edges = design.letter_to_layers(ch)
        _write_layers(args.out_dir, f"glyph_{ch.upper()}", edges, geom, mode)
        total += len(edges)
    print(f"layers: {total} compression: {design.display_compression(geom):.6f}")
    return EXIT_OK


def cmd_heightmap(args) -> int:
    text = _read(args.file)
    try:
        hm = parse_heightmap(text)
    except ParseError as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    bad = design.validate_heightmap(hm)
    if bad:
        print(f"invalid: {len(bad)} height step(s) larger than one unit")
        for v in bad:
            print(f"layer {v.layer} row {v.row} step {v.step}")
        return EXIT_NEGATIVE
    geom = _geom(args)
    edges, c = design.heightmap_to_layers(hm, geom)
    _write_layers(args.out_dir, "layer", edges, geom, design.Mode(args.mode))
    print(f"layers: {len(edges)} compression: {c:.6f}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _add_geometry(p: argparse.ArgumentParser, compression: bool = True) -> None:
    p.add_argument("--s1", type=float, default=10.0, help="horizontal half-link length, mm")
    p.add_argument("--s2", type=float, default=20.0, help="vertical link length, mm")
    p.add_argument("--crossbar", type=float, default=20.0, help="crossbar length L, mm")
    if compression:
        p.add_argument("--compression", type=float, default=None, help="compression per cell, mm")


def _add_table(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--table", help="count table: rows of 'A B count [fit|validation]'")
    g.add_argument("--self-compute", action="store_true", help="use this package's exact DP counts")
    p.add_argument("--variant", choices=scaling.VARIANTS + ("both",), default="averaged")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starlattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an encoding file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("joints", help="print the symbolic joint offsets")
    p.add_argument("file")
    p.set_defaults(func=cmd_joints)

    p = sub.add_parser("count", help="count valid A x B encodings")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--method", choices=("brute", "dp", "both"), default="dp")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("fit", help="fit the scaling law")
    _add_table(p)
    p.set_defaults(func=cmd_fit)
    p.set_defaults(variant="both")

    p = sub.add_parser("predict", help="predicted valid count and probability")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--k", type=float, nargs=3, metavar=("K1", "K2", "K3"), default=None)
    _add_table(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("profile", help="approximate a profile by an edge")
    p.add_argument("profile", help="points file, one 'x y' per line")
    p.add_argument("--rows", type=int, default=None, help="links in the edge (default: points - 1)")
    _add_geometry(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("generate", help="grow a flat-backed lattice from an edge")
    p.add_argument("--profile", default=None)
    p.add_argument("--edge", default=None)
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--mode", choices=[m.value for m in design.Mode], default="spread")
    p.add_argument("--out", default=None)
    _add_geometry(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="SVG or CSV footprint of an encoding")
    p.add_argument("file")
    p.add_argument("--theta", type=float, default=None, help="joint angle in radians")
    p.add_argument("--above", action="store_true", help="use the theta > pi/2 branch with --compression")
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--stroke", type=float, default=0.8)
    p.add_argument("--out", default=None)
    _add_geometry(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("text", help="layer encodings for a string of glyphs")
    p.add_argument("string")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--mode", choices=[m.value for m in design.Mode], default="spread")
    _add_geometry(p, compression=False)
    p.set_defaults(func=cmd_text)

    p = sub.add_parser("heightmap", help="layer encodings for a height map")
    p.add_argument("file")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--mode", choices=[m.value for m in design.Mode], default="spread")
    _add_geometry(p)
    p.set_defaults(func=cmd_heightmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LatticeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
