"""Command-line interface: shape generation, measurement, ordering, export.

Data outputs (VOXL volumes, CSV tables, field slices) go to files; every
output file gets a ``<file>.manifest.json`` sidecar recording the command,
configuration, input digests, tool version and wall-clock duration.
Diagnostics go to stderr; the exit status is 0 exactly when the command
completed.

Measurement CSV schema (one header row, then one row per shape)::

    name,rho1,rho2,delta1,delta2,e_11,e_12,e_21,e_22,mean,bins,band1_size,band2_size
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .distance import distance_transform
from .field import ScreenedPoissonProblem, normalize, solve_screened_poisson
from .grid import VoxelVolume
from .measure import (
    MEASURE_KEYS,
    CongruityResult,
    MeasureConfig,
    Ordering,
    congruity_measure,
    derive_parameters,
    order_shapes,
)
from .shapes import (
    CompositeCubeSpec,
    composite_cube_set,
    deviation_set,
    make_composite_cube,
    make_concave_face,
    make_cube,
    make_cube_with_attachment,
    make_sphere,
)
from .voxl import load_voxl, save_voxl

CSV_HEADER = "name,rho1,rho2,delta1,delta2,e_11,e_12,e_21,e_22,mean,bins,band1_size,band2_size"
THREADS_ENV = "CONGRUITY_THREADS"


@dataclass
class RunManifest:
    """Provenance sidecar written next to every output file."""

    command: list[str]
    config: dict
    inputs: dict[str, str]
    version: str
    duration_seconds: float

    def write(self, output_path: Path) -> None:
        payload = {
            "output": output_path.name,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "version": self.version,
            "duration_seconds": self.duration_seconds,
        }
        sidecar = output_path.with_name(output_path.name + ".manifest.json")
        sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        args.handler(args, argv, started)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------- helpers

def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def _config_from_args(args: argparse.Namespace) -> MeasureConfig:
    fractions = tuple(float(f) for f in args.delta_fractions.split(","))
    return MeasureConfig(
        bin_count=args.bins,
        rho_exponent=args.rho_exponent,
        delta_fractions=fractions,
        band_tolerance=args.tolerance,
    )


def _config_dict(config: MeasureConfig) -> dict:
    return {
        "bins": config.bin_count,
        "rho_exponent": config.rho_exponent,
        "delta_fractions": list(config.delta_fractions),
        "band_tolerance": config.band_tolerance,
        "solver_tolerance": config.solver_tolerance,
        "max_iterations": config.max_iterations,
        "direct_solver_limit": config.direct_solver_limit,
    }


def _manifest(args_list: list[str], config: dict, inputs: dict[str, str],
              started: float) -> RunManifest:
    return RunManifest(
        command=["congruity", *args_list],
        config=config,
        inputs=inputs,
        version=__version__,
        duration_seconds=time.monotonic() - started,
    )


def _csv_row(name: str, result: CongruityResult) -> str:
    e = result.entropies
    cells = [
        name,
        _fmt(result.rho[0]), _fmt(result.rho[1]),
        _fmt(result.delta[0]), _fmt(result.delta[1]),
        _fmt(e[0, 0]), _fmt(e[0, 1]), _fmt(e[1, 0]), _fmt(e[1, 1]),
        _fmt(result.mean_entropy),
        str(result.config.bin_count),
        str(result.band_sizes[0]), str(result.band_sizes[1]),
    ]
    return ",".join(cells)


def _write_csv(path: Path, rows: list[str]) -> None:
    path.write_text(CSV_HEADER + "\n" + "".join(row + "\n" for row in rows))


def _append_csv(path: Path, row: str) -> None:
    new_file = not path.exists()
    with open(path, "a") as fh:
        if new_file:
            fh.write(CSV_HEADER + "\n")
        fh.write(row + "\n")


def _print_measure_report(name: str, result: CongruityResult, out=None) -> None:
    out = out or sys.stdout
    e = result.entropies
    print(f"shape: {name}", file=out)
    print(f"  rho1={result.rho[0]:g} rho2={result.rho[1]:.6g} "
          f"delta1={result.delta[0]:.6g} delta2={result.delta[1]:.6g} "
          f"thickness={result.thickness:.6g}", file=out)
    print(f"  e[1,1]={e[0, 0]:.6f}  e[1,2]={e[0, 1]:.6f}", file=out)
    print(f"  e[2,1]={e[1, 0]:.6f}  e[2,2]={e[1, 1]:.6f}", file=out)
    print(f"  mean={result.mean_entropy:.6f}  bands=({result.band_sizes[0]}, "
          f"{result.band_sizes[1]})  bins={result.config.bin_count}", file=out)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)


def _ordering_report(ordering: Ordering,
                     results: list[tuple[str, CongruityResult]]) -> str:
    by_name = dict(results)
    lines = ["ascending mean entropy:"]
    for pos, name in enumerate(ordering.by_mean, start=1):
        lines.append(f"  {pos}. {name}  mean={by_name[name].mean_entropy:.6f}")
    for i, k in MEASURE_KEYS:
        chain = " < ".join(ordering.by_measure[(i, k)])
        lines.append(f"by e[{i},{k}]: {chain}")
    lines.append(f"consensus: {'yes' if ordering.consensus else 'no'}")
    if ordering.ties:
        for group in ordering.ties:
            lines.append(f"tie on mean entropy: {', '.join(group)}")
    else:
        lines.append("ties: none")
    return "\n".join(lines) + "\n"


def _thread_count(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def _measure_many(volumes: list[tuple[str, VoxelVolume]], config: MeasureConfig,
                  threads: int) -> list[tuple[str, CongruityResult]]:
    # executor.map preserves submission order, so output is thread-count
    # independent
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            measured = list(pool.map(lambda nv: congruity_measure(nv[1], config), volumes))
    else:
        measured = [congruity_measure(v, config) for _, v in volumes]
    return [(name, result) for (name, _), result in zip(volumes, measured)]


# ------------------------------------------------------------- subcommands

def _cmd_gen(args: argparse.Namespace, argv: list[str], started: float) -> None:
    inputs: dict[str, str] = {}
    if args.shape == "sphere":
        volume = make_sphere(args.radius, padding=args.padding, dim=args.dim,
                             spacing=args.spacing)
        config = {"shape": "sphere", "radius": args.radius}
    elif args.shape == "cube":
        volume = make_cube(args.side, padding=args.padding, dim=args.dim,
                           spacing=args.spacing)
        config = {"shape": "cube", "side": args.side}
    elif args.shape == "composite":
        faces = tuple(f for f in args.faces.split(",") if f)
        spec = CompositeCubeSpec(args.base, args.attach, faces, dim=args.dim,
                                 padding=args.padding, spacing=args.spacing)
        volume = make_composite_cube(spec)
        config = {"shape": "composite", "base": args.base, "attach": args.attach,
                  "faces": list(faces)}
    elif args.shape == "attachment":
        volume = make_cube_with_attachment(args.base, args.attach, args.face,
                                           dim=args.dim, padding=args.padding,
                                           spacing=args.spacing)
        config = {"shape": "attachment", "base": args.base, "attach": args.attach,
                  "face": args.face}
    else:  # carve
        source = Path(args.input)
        volume = make_concave_face(load_voxl(source), args.face, args.depth)
        config = {"shape": "carve", "face": args.face, "depth": args.depth}
        inputs[str(source)] = _digest(source)

    out = Path(args.out)
    save_voxl(volume, out)
    config.update({"padding": args.padding, "dim": volume.dim, "spacing": volume.spacing})
    _manifest(argv, config, inputs, started).write(out)
    print(f"{out}: {volume.interior_count} interior voxels, "
          f"extents {'x'.join(str(n) for n in volume.extents)}")


def _cmd_measure(args: argparse.Namespace, argv: list[str], started: float) -> None:
    config = _config_from_args(args)
    source = Path(args.input)
    volume = load_voxl(source)
    result = congruity_measure(volume, config)
    _print_measure_report(source.stem, result)
    if args.csv:
        csv_path = Path(args.csv)
        _append_csv(csv_path, _csv_row(source.stem, result))
        _manifest(argv, _config_dict(config), {str(source): _digest(source)},
                  started).write(csv_path)


def _cmd_order(args: argparse.Namespace, argv: list[str], started: float) -> None:
    if len(args.inputs) < 2:
        raise ValueError("order needs at least two input volumes")
    config = _config_from_args(args)
    paths = [Path(p) for p in args.inputs]
    volumes = [(p.stem, load_voxl(p)) for p in paths]
    results = _measure_many(volumes, config, _thread_count(args))
    ordering = order_shapes(results)
    sys.stdout.write(_ordering_report(ordering, results))
    if args.csv:
        csv_path = Path(args.csv)
        _write_csv(csv_path, [_csv_row(name, result) for name, result in results])
        digests = {str(p): _digest(p) for p in paths}
        _manifest(argv, _config_dict(config), digests, started).write(csv_path)


def _cmd_slice(args: argparse.Namespace, argv: list[str], started: float) -> None:
    source = Path(args.input)
    volume = load_voxl(source)
    config = _config_from_args(args)
    dist = distance_transform(volume)
    params = derive_parameters(volume, dist, config)
    rho = params.rho1 if args.rho_index == 1 else params.rho2
    problem = ScreenedPoissonProblem(
        volume, rho, solver_tolerance=config.solver_tolerance,
        max_iterations=config.max_iterations,
        direct_solver_limit=config.direct_solver_limit,
    )
    field = normalize(solve_screened_poisson(problem))

    if volume.dim == 2:
        plane = field.values
    else:
        if args.axis is None or args.index is None:
            raise ValueError("3D input needs --axis and --index")
        array_axis = volume.dim - 1 - "xyz".index(args.axis)
        extent = volume.extents["xyz".index(args.axis)]
        if not 0 <= args.index < extent:
            raise ValueError(
                f"slice index {args.index} out of range for axis {args.axis} "
                f"(extent {extent})"
            )
        plane = field.values.take(args.index, axis=array_axis)

    out = Path(args.out)
    with open(out, "w") as fh:
        for row in plane:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    slice_config = _config_dict(config)
    slice_config.update({"rho_index": args.rho_index, "axis": args.axis,
                         "index": args.index})
    _manifest(argv, slice_config, {str(source): _digest(source)}, started).write(out)
    print(f"{out}: {plane.shape[0]} x {plane.shape[1]} slice of normalized field "
          f"(rho index {args.rho_index})")


def _cmd_repro(args: argparse.Namespace, argv: list[str], started: float) -> None:
    config = _config_from_args(args)
    threads = _thread_count(args)
    outdir = Path(args.outdir)
    shape_dir = outdir / "shapes"
    shape_dir.mkdir(parents=True, exist_ok=True)

    families = [
        ("composite_set", composite_cube_set()),
        ("deviation_set", deviation_set()),
    ]
    for family_name, volumes in families:
        print(f"measuring {family_name} ({len(volumes)} shapes, "
              f"{threads} thread(s))", file=sys.stderr)
        digests = {}
        for name, volume in volumes:
            voxl_path = shape_dir / f"{name}.voxl"
            save_voxl(volume, voxl_path)
            _manifest(argv, {"family": family_name, "shape": name}, {},
                      started).write(voxl_path)
            digests[str(voxl_path)] = _digest(voxl_path)

        results = _measure_many(volumes, config, threads)
        ordering = order_shapes(results)

        csv_path = outdir / f"{family_name}.csv"
        _write_csv(csv_path, [_csv_row(name, result) for name, result in results])
        _manifest(argv, _config_dict(config), digests, started).write(csv_path)

        report_path = outdir / f"{family_name}_order.txt"
        report = _ordering_report(ordering, results)
        report_path.write_text(report)
        _manifest(argv, _config_dict(config), digests, started).write(report_path)

        print(f"== {family_name} ==")
        sys.stdout.write(report)


# ------------------------------------------------------------------ parser

def _add_measure_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bins", type=int, default=MeasureConfig().bin_count,
                        help="histogram bin count (default %(default)s)")
    parser.add_argument("--rho-exponent", type=float,
                        default=MeasureConfig().rho_exponent,
                        help="exponent for the second smoothness parameter")
    parser.add_argument("--delta-fractions", default="0.05,0.1",
                        help="comma-separated fractions of max thickness")
    parser.add_argument("--tolerance", type=float, default=None,
                        help="band half-width in world units (default: h/2)")


def _add_gen_common(parser: argparse.ArgumentParser, dim_default: int = 3) -> None:
    parser.add_argument("--padding", type=int, default=2,
                        help="exterior padding voxels (default %(default)s)")
    parser.add_argument("--dim", type=int, choices=(2, 3), default=dim_default)
    parser.add_argument("--spacing", type=float, default=1.0,
                        help="world units per voxel (default %(default)s)")
    parser.add_argument("--out", required=True, help="output VOXL path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congruity",
        description="Entropy-based shape congruity measures on voxel volumes.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate shapes as VOXL files")
    gen_sub = gen.add_subparsers(dest="shape", required=True)

    g_sphere = gen_sub.add_parser("sphere", help="discretized ball")
    g_sphere.add_argument("--radius", type=float, required=True,
                          help="radius in voxels")
    _add_gen_common(g_sphere)

    g_cube = gen_sub.add_parser("cube", help="solid cube")
    g_cube.add_argument("--side", type=int, required=True, help="side in voxels")
    _add_gen_common(g_cube)

    g_comp = gen_sub.add_parser("composite", help="cube with face attachments")
    g_comp.add_argument("--base", type=int, required=True)
    g_comp.add_argument("--attach", type=int, required=True)
    g_comp.add_argument("--faces", default="",
                        help="comma-separated faces, e.g. +x,-x (empty for none)")
    _add_gen_common(g_comp)

    g_att = gen_sub.add_parser("attachment", help="cube with one attachment")
    g_att.add_argument("--base", type=int, required=True)
    g_att.add_argument("--attach", type=int, required=True)
    g_att.add_argument("--face", default="+x", help="face token, use --face=-x form")
    _add_gen_common(g_att)

    g_carve = gen_sub.add_parser("carve", help="carve a concave dish into a face")
    g_carve.add_argument("--input", required=True, help="source VOXL file")
    g_carve.add_argument("--face", required=True, help="face token, use --face=-x form")
    g_carve.add_argument("--depth", type=float, required=True,
                         help="dish radius in voxels")
    g_carve.add_argument("--padding", type=int, default=2, help=argparse.SUPPRESS)
    g_carve.add_argument("--out", required=True, help="output VOXL path")

    for p in (g_sphere, g_cube, g_comp, g_att, g_carve):
        p.set_defaults(handler=_cmd_gen)

    measure_p = sub.add_parser("measure", help="congruity measure of one volume")
    measure_p.add_argument("input", help="VOXL file")
    _add_measure_flags(measure_p)
    measure_p.add_argument("--csv", default=None,
                           help="append one CSV row to this file")
    measure_p.set_defaults(handler=_cmd_measure)

    order_p = sub.add_parser("order", help="order volumes by entropy")
    order_p.add_argument("inputs", nargs="+", help="two or more VOXL files")
    _add_measure_flags(order_p)
    order_p.add_argument("--csv", default=None, help="write the measure matrix here")
    order_p.add_argument("--threads", type=int, default=None,
                         help=f"parallel measures (default ${THREADS_ENV} or 1)")
    order_p.set_defaults(handler=_cmd_order)

    slice_p = sub.add_parser("slice", help="export a plane of the normalized field")
    slice_p.add_argument("input", help="VOXL file")
    slice_p.add_argument("--rho-index", type=int, choices=(1, 2), required=True)
    slice_p.add_argument("--axis", choices=("x", "y", "z"), default=None)
    slice_p.add_argument("--index", type=int, default=None)
    _add_measure_flags(slice_p)
    slice_p.add_argument("--out", required=True, help="output CSV path")
    slice_p.set_defaults(handler=_cmd_slice)

    repro_p = sub.add_parser(
        "repro",
        help="generate, measure and order both bundled shape families",
    )
    repro_p.add_argument("--outdir", required=True)
    _add_measure_flags(repro_p)
    repro_p.add_argument("--threads", type=int, default=None,
                         help=f"parallel measures (default ${THREADS_ENV} or 1)")
    repro_p.set_defaults(handler=_cmd_repro)

    return parser


if __name__ == "__main__":
    sys.exit(main())
