"""Command-line surface: morph runs, sweeps, file generation, demos.

Every command that writes files also writes a ``manifest.json`` next to
them recording the full configuration (flags, input digests, per-frame
diagnostics), with no timestamps or absolute paths, so re-running a
command with the manifest's settings reproduces byte-identical outputs.

Exit codes: 0 success, 2 usage, 3 missing file, 4 bad file format,
5 dimension mismatch, 6 invalid value, 7 solver failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from .barycenter import BarycenterConfig, pairwise_barycenter
from .errors import (
    DimensionMismatchError,
    FormatError,
    InvalidParameterError,
    InvalidWeightsError,
    SolverFailureError,
    TokenMorphError,
)
from .selective import DEFAULT_TAU, morph_texture, selective_texture_tokens
from .synth import KINDS, gen_synthetic
from .tokenio import (
    read_tokens,
    tokens_to_binary_bytes,
    tokens_to_json_bytes,
)
from .tokens import TokenSet, index_lerp
from .toydemo import decode_tokens_to_shape, render_trajectory_svg
from .trajectory import MorphConfig, morph_geometry
from .ot import w2_distance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_FORMAT = 4
EXIT_DIMENSION = 5
EXIT_INVALID_VALUE = 6
EXIT_SOLVER = 7

OUT_DIR_ENV = "TOKENMORPH_OUT_DIR"
DEFAULT_OUT_DIR = "tokenmorph_out"
DEFAULT_TAU_GRID = (0.2, 0.3, 0.4, 0.6, 0.8)

_EXTENSIONS = {"json": "json", "binary": "bmt"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line, machine-parsable
        raise _UsageError(message)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail("missing-file", str(exc), EXIT_MISSING_FILE)
    except IsADirectoryError as exc:
        return _fail("missing-file", str(exc), EXIT_MISSING_FILE)
    except (FormatError, InvalidWeightsError) as exc:
        return _fail("format", str(exc), EXIT_FORMAT)
    except DimensionMismatchError as exc:
        return _fail("dimension-mismatch", str(exc), EXIT_DIMENSION)
    except InvalidParameterError as exc:
        return _fail("invalid-value", str(exc), EXIT_INVALID_VALUE)
    except SolverFailureError as exc:
        return _fail("solver-failure", str(exc), EXIT_SOLVER)
    except TokenMorphError as exc:
        return _fail("error", str(exc), EXIT_INVALID_VALUE)


def _fail(category: str, message: str, code: int) -> int:
    print(f"tokenmorph: error[{category}]: {message}", file=sys.stderr)
    return code


def _build_parser() -> _Parser:
    parser = _Parser(prog="tokenmorph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("dist", help="print the W2 distance between two token files")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("barycenter", help="blend two token sets at one beta")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--init", choices=("source", "target", "lerp"), default="source")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_barycenter)

    p = sub.add_parser("morph", help="full morphing trajectory between two token files")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--frames", type=int, default=6, metavar="J",
                   help="number of intermediate frames (J+2 total)")
    p.add_argument("--init", choices=("sequential", "linear-init", "naive-lerp"),
                   default="sequential")
    p.add_argument("--tau", type=float, default=None,
                   help="also write selectively blended frames at this threshold")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_morph)

    p = sub.add_parser("texture-select", help="selective blending of one token file")
    p.add_argument("blended")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_texture_select)

    p = sub.add_parser("sweep-tau", help="selective blending across a threshold grid")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--grid", default=",".join(str(t) for t in DEFAULT_TAU_GRID),
                   help="comma-separated thresholds")
    p.add_argument("--frames", type=int, default=6, metavar="J")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_sweep_tau)

    p = sub.add_parser("gen-synthetic", help="write a seeded synthetic token file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None, help="output stem (default: the kind)")
    _add_output_flags(p)
    p.set_defaults(func=_cmd_gen_synthetic)

    p = sub.add_parser("demo", help="2-D morph rendered as an SVG strip")
    p.add_argument("--frames", type=int, default=6, metavar="J")
    p.add_argument("--points", type=int, default=24, help="tokens per shape")
    p.add_argument("--tau", type=float, default=None)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_demo)

    return parser


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-5)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${OUT_DIR_ENV} or ./{DEFAULT_OUT_DIR})")
    p.add_argument("--format", choices=tuple(_EXTENSIONS), default="json")


def _resolve_out_dir(arg: str | None) -> Path:
    out = Path(arg or os.environ.get(OUT_DIR_ENV, DEFAULT_OUT_DIR))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _write(out_dir: Path, name: str, data: bytes) -> str:
    (out_dir / name).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _tokens_writer(fmt: str):
    return tokens_to_json_bytes if fmt == "json" else tokens_to_binary_bytes


def _input_entry(path: str) -> dict:
    data = Path(path).read_bytes()
    tokens = read_tokens(path)
    return {
        "file": Path(path).name,
        "sha256": hashlib.sha256(data).hexdigest(),
        "n": tokens.n,
        "d": tokens.m,
    }


def _write_manifest(out_dir: Path, body: dict) -> None:
    body = dict(body)
    body["manifest"] = "tokenmorph-run/1"
    _write(out_dir, "manifest.json", _json_bytes(body))


def _cmd_dist(args) -> int:
    source = read_tokens(args.source)
    target = read_tokens(args.target)
    print(w2_distance(source, target))
    return EXIT_OK


def _cmd_barycenter(args) -> int:
    source = read_tokens(args.source)
    target = read_tokens(args.target)
    init = {"source": source, "target": target}.get(args.init)
    if init is None:
        init = index_lerp(source, target, args.beta)
    config = BarycenterConfig(max_iterations=args.max_iter, stop_threshold=args.tol)
    result = pairwise_barycenter(source, target, args.beta, init, config)

    out_dir = _resolve_out_dir(args.out_dir)
    ext = _EXTENSIONS[args.format]
    digest = _write(out_dir, f"barycenter.{ext}", _tokens_writer(args.format)(result.support))
    _write_manifest(out_dir, {
        "command": "barycenter",
        "parameters": {
            "beta": args.beta,
            "init": args.init,
            "max_iter": args.max_iter,
            "tol": args.tol,
            "format": args.format,
        },
        "inputs": {"source": _input_entry(args.source), "target": _input_entry(args.target)},
        "outputs": [{"file": f"barycenter.{ext}", "sha256": digest}],
        "diagnostics": {
            "iterations_used": result.iterations_used,
            "converged": result.converged,
            "objective": result.objective,
        },
    })
    print(out_dir)
    return EXIT_OK


def _cmd_morph(args) -> int:
    source = read_tokens(args.source)
    target = read_tokens(args.target)
    config = MorphConfig(
        J=args.frames,
        init_mode=args.init.replace("-", "_"),
        barycenter_config=BarycenterConfig(
            max_iterations=args.max_iter, stop_threshold=args.tol
        ),
    )
    trajectory = morph_geometry(source, target, config)

    out_dir = _resolve_out_dir(args.out_dir)
    ext = _EXTENSIONS[args.format]
    writer = _tokens_writer(args.format)

    frame_entries = []
    for k, (frame, beta, diag) in enumerate(
        zip(trajectory.frames, trajectory.betas, trajectory.frame_diagnostics)
    ):
        name = f"frame_{k:03d}.{ext}"
        digest = _write(out_dir, name, writer(frame))
        frame_entries.append({
            "file": name,
            "sha256": digest,
            "beta": beta,
            "iterations": diag.iterations_used,
            "converged": diag.converged,
            "objective": diag.objective,
        })
    index = {
        "files": [entry["file"] for entry in frame_entries],
        "betas": list(trajectory.betas),
    }
    _write(out_dir, "frames_index.json", _json_bytes(index))

    texture_entries = None
    if args.tau is not None:
        reports = morph_texture(trajectory, source, target, args.tau)
        texture_entries = []
        for k, report in enumerate(reports):
            name = f"texture_{k:03d}.{ext}"
            digest = _write(out_dir, name, writer(report.output))
            copied = sum(1 for d in report.decisions if not d.kept_barycenter)
            texture_entries.append({
                "file": name,
                "sha256": digest,
                "copied_from_source": copied,
                "kept_barycenter": report.output.n - copied,
            })

    manifest = {
        "command": "morph",
        "parameters": {
            "frames": args.frames,
            "init": args.init,
            "tau": args.tau,
            "max_iter": args.max_iter,
            "tol": args.tol,
            "format": args.format,
        },
        "inputs": {"source": _input_entry(args.source), "target": _input_entry(args.target)},
        "betas": list(trajectory.betas),
        "frames": frame_entries,
        "step_w2": list(trajectory.step_w2),
    }
    if texture_entries is not None:
        manifest["texture_frames"] = texture_entries
    _write_manifest(out_dir, manifest)
    print(out_dir)
    return EXIT_OK


def _cmd_texture_select(args) -> int:
    blended = read_tokens(args.blended)
    source = read_tokens(args.source)
    target = read_tokens(args.target)
    report = selective_texture_tokens(blended, source, target, args.tau)

    out_dir = _resolve_out_dir(args.out_dir)
    ext = _EXTENSIONS[args.format]
    digest = _write(out_dir, f"selected.{ext}", _tokens_writer(args.format)(report.output))
    decisions = [
        {
            "token": k,
            "nearest_source_index": d.nearest_source_index,
            "nearest_target_index": d.nearest_target_index,
            "sim": d.sim,
            "kept_barycenter": d.kept_barycenter,
        }
        for k, d in enumerate(report.decisions)
    ]
    report_digest = _write(out_dir, "selection_report.json",
                           _json_bytes({"tau": args.tau, "decisions": decisions}))
    _write_manifest(out_dir, {
        "command": "texture-select",
        "parameters": {"tau": args.tau, "format": args.format},
        "inputs": {
            "blended": _input_entry(args.blended),
            "source": _input_entry(args.source),
            "target": _input_entry(args.target),
        },
        "outputs": [
            {"file": f"selected.{ext}", "sha256": digest},
            {"file": "selection_report.json", "sha256": report_digest},
        ],
    })
    print(out_dir)
    return EXIT_OK


def _cmd_sweep_tau(args) -> int:
    try:
        grid = tuple(float(part) for part in args.grid.split(",") if part.strip())
    except ValueError as exc:
        raise InvalidParameterError(f"bad --grid value: {exc}") from None
    if not grid:
        raise InvalidParameterError("--grid must name at least one threshold")

    source = read_tokens(args.source)
    target = read_tokens(args.target)
    config = MorphConfig(
        J=args.frames,
        barycenter_config=BarycenterConfig(
            max_iterations=args.max_iter, stop_threshold=args.tol
        ),
    )
    trajectory = morph_geometry(source, target, config)

    out_dir = _resolve_out_dir(args.out_dir)
    outputs = []
    for tau in grid:
        reports = morph_texture(trajectory, source, target, tau)
        per_frame = []
        for k, report in enumerate(reports):
            copied = sum(1 for d in report.decisions if not d.kept_barycenter)
            per_frame.append({
                "frame": k,
                "beta": trajectory.betas[k],
                "copied_from_source": copied,
                "kept_barycenter": report.output.n - copied,
            })
        total_tokens = len(reports) * source.n
        total_copied = sum(entry["copied_from_source"] for entry in per_frame)
        name = f"sweep_tau_{tau}.json"
        digest = _write(out_dir, name, _json_bytes({
            "tau": tau,
            "per_frame": per_frame,
            "copied_fraction": total_copied / total_tokens,
        }))
        outputs.append({"file": name, "sha256": digest, "tau": tau})

    _write_manifest(out_dir, {
        "command": "sweep-tau",
        "parameters": {
            "grid": list(grid),
            "frames": args.frames,
            "max_iter": args.max_iter,
            "tol": args.tol,
            "format": args.format,
        },
        "inputs": {"source": _input_entry(args.source), "target": _input_entry(args.target)},
        "outputs": outputs,
    })
    print(out_dir)
    return EXIT_OK


def _cmd_gen_synthetic(args) -> int:
    generated = gen_synthetic(args.kind, args.n, args.d, args.seed)
    out_dir = _resolve_out_dir(args.out_dir)
    ext = _EXTENSIONS[args.format]
    writer = _tokens_writer(args.format)
    stem = args.name or args.kind

    outputs = []
    if isinstance(generated, tuple):
        for suffix, tokens in zip(("source", "target"), generated):
            name = f"{stem}_{suffix}.{ext}"
            outputs.append({"file": name, "sha256": _write(out_dir, name, writer(tokens))})
    else:
        name = f"{stem}.{ext}"
        outputs.append({"file": name, "sha256": _write(out_dir, name, writer(generated))})

    _write_manifest(out_dir, {
        "command": "gen-synthetic",
        "parameters": {
            "kind": args.kind,
            "n": args.n,
            "d": args.d,
            "seed": args.seed,
            "name": stem,
            "format": args.format,
        },
        "outputs": outputs,
    })
    print(out_dir)
    return EXIT_OK


def _cmd_demo(args) -> int:
    source, target = _demo_shapes(args.points)
    config = MorphConfig(J=args.frames)
    trajectory = morph_geometry(source, target, config)
    frames = trajectory.frames
    if args.tau is not None:
        frames = tuple(r.output for r in morph_texture(trajectory, source, target, args.tau))
    shapes = [decode_tokens_to_shape(frame) for frame in frames]
    svg = render_trajectory_svg(shapes)

    out_dir = _resolve_out_dir(args.out_dir)
    outputs = [
        {"file": "demo.svg", "sha256": _write(out_dir, "demo.svg", svg.encode("utf-8"))},
        {"file": "demo_source.json",
         "sha256": _write(out_dir, "demo_source.json", tokens_to_json_bytes(source))},
        {"file": "demo_target.json",
         "sha256": _write(out_dir, "demo_target.json", tokens_to_json_bytes(target))},
    ]
    _write_manifest(out_dir, {
        "command": "demo",
        "parameters": {"frames": args.frames, "points": args.points, "tau": args.tau},
        "outputs": outputs,
        "betas": list(trajectory.betas),
        "step_w2": list(trajectory.step_w2),
    })
    print(out_dir / "demo.svg")
    return EXIT_OK


def _demo_shapes(n: int) -> tuple[TokenSet, TokenSet]:
    """Deterministic three-lobe and five-lobe polygons as 2-D tokens."""
    if n < 3:
        raise InvalidParameterError("demo needs at least 3 tokens per shape")
    theta = 2.0 * np.pi * np.arange(n) / n
    source = np.stack([0.35 * np.cos(3.0 * theta), np.zeros(n)], axis=1)
    target = np.stack(
        [0.35 * np.cos(5.0 * theta + 0.5), 0.15 * np.sin(2.0 * theta)], axis=1
    )
    return TokenSet(source), TokenSet(target)


if __name__ == "__main__":
    sys.exit(main())
