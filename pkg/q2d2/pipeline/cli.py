"""Command line entry point: q2d2 <subcommand> [options]."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from q2d2 import environment
from q2d2.analytics.distortion import packing_efficiency, quantization_mse
from q2d2.analytics.mutual_info import MIN_FRAMES, mi_report
from q2d2.analytics.report_format import key_value_lines, write_csv
from q2d2.analytics.utilization import measure_utilization
from q2d2.codebook.codebook import (
    CodebookLayout,
    bitrate_report,
    bits_per_token,
    parameter_count,
)
from q2d2.common.errors import Q2D2Error
from q2d2.constants import HEX_ROW_OFFSET, PRESETS, TilingKind
from q2d2.grid.grid_builder import build_grid
from q2d2.grid.grid_dump import grid_to_svg, write_grid_csv
from q2d2.grid.pair_grid import PairGridSpec
from q2d2.pipeline.bench import bench
from q2d2.pipeline.sweep import parse_schedule, run_sweep, synthetic_latents
from q2d2.quantizer.config_name import parse_config_string
from q2d2.quantizer.nearest_grid import METHODS
from q2d2.quantizer.quantizer import dequantize, quantize, unbound
from q2d2.quantizer.quantizer_config import QuantizerConfig
from q2d2.tokenio.latent_ingest import FORMATS, ingest_latents
from q2d2.tokenio.token_stream import TokenStreamHeader, read_stream, write_stream
from q2d2.toy.dataset import make_synthetic_dataset
from q2d2.toy.pipeline import ToyPipeline
from q2d2.toy.train import projection_ablation, train

logger = logging.getLogger(__name__)


def _output_path(path: str) -> Path:
    resolved = environment.resolve_output_path(path)
    resolved.parent.mkdir(parents=True, exist_ok=True)
    return resolved


def _emit_frame(
    frame: pd.DataFrame, output: Optional[str], float_format="%.10g"
) -> None:
    if output:
        frame.to_csv(_output_path(output), index=False, float_format=float_format)
    else:
        frame.to_csv(sys.stdout, index=False, float_format=float_format)


def _config_from_args(args) -> Tuple[QuantizerConfig, int]:
    """Quantizer config and tokens/second from --config or --preset."""
    if args.preset:
        if args.preset not in PRESETS:
            raise ValueError(
                f"Preset {args.preset} not found, must be one of {list(PRESETS)}"
            )
        return QuantizerConfig.from_preset(args.preset), PRESETS[args.preset][2]
    return parse_config_string(args.config, args.hex_offset), 0


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--config",
        help='Quantizer config, e.g. "rhombic:7,7,7,7,7,7" or "rect:7,7+hex:9,9".',
        type=str,
    )
    group.add_argument(
        "--preset",
        help=f"Named config, one of {', '.join(PRESETS)}.",
        type=str,
    )
    parser.add_argument(
        "--hex_offset",
        help="Hexagon row offset as a fraction of dx.",
        type=float,
        default=HEX_ROW_OFFSET,
    )


def cmd_grid(args) -> int:
    levels = [int(l) for l in args.levels.split(",")]
    if len(levels) not in (1, 2):
        raise ValueError(f"--levels takes one or two level counts, got {args.levels}")
    spec = PairGridSpec.from_levels(
        TilingKind.parse(args.kind), levels[0], levels[-1], args.hex_offset
    )
    grid = build_grid(spec)
    dump = args.dump or ("csv" if args.action == "dump" else None)
    if dump is None:
        print(
            "\n".join(
                key_value_lines(
                    {
                        "kind": grid.kind.value,
                        "lx": spec.lx,
                        "ly": spec.ly,
                        "points": grid.n_points,
                        "dx": grid.dx,
                        "dy": grid.dy,
                        "min_distance": grid.min_distance(),
                        "unique_x": grid.unique_levels(0),
                        "unique_y": grid.unique_levels(1),
                        "unique_y_within_extent": grid.unique_levels(
                            1, within_extent=True
                        ),
                    }
                )
            )
        )
        return 0
    if dump == "csv":
        write_grid_csv(grid, _output_path(args.output) if args.output else sys.stdout)
    else:
        svg = grid_to_svg(grid)
        if args.output:
            _output_path(args.output).write_text(svg)
        else:
            sys.stdout.write(svg)
    return 0


def cmd_quantize(args) -> int:
    config, preset_rate = _config_from_args(args)
    latents = ingest_latents(args.input, config.d, args.format, args.apply_tanh)
    q = quantize(latents, config, args.method)
    rate = args.tokens_per_second if args.tokens_per_second is not None else preset_rate
    header = TokenStreamHeader.from_config(config, rate, len(latents))
    path = _output_path(args.output)
    n_bytes = write_stream(header, q.pair_codes, path)
    print(f"Wrote {len(latents)} frames ({n_bytes} bytes) to {path}")
    return 0


def cmd_dequantize(args) -> int:
    header, frames = read_stream(args.input)
    config = header.config()
    q = dequantize(frames, config)
    values = q.values if args.space == "bounded" else unbound(q, config)
    frame = pd.DataFrame(
        values.reshape(-1, config.d), columns=[f"v{i}" for i in range(config.d)]
    )
    _emit_frame(frame, args.output, float_format="%.17g")
    return 0


def _analysis_latents(args, config: QuantizerConfig) -> np.ndarray:
    if args.input:
        return ingest_latents(args.input, config.d, args.format, args.apply_tanh)
    return synthetic_latents(config.d, args.frames, args.seed)


def cmd_analyze(args) -> int:
    config, _ = _config_from_args(args)
    latents = _analysis_latents(args, config)
    layout = CodebookLayout.from_config(config)
    q = quantize(latents, config, "fast")
    utilization = measure_utilization(q.pair_codes, layout)
    mse = quantization_mse(latents, config, "bounded", "fast")
    packing = [
        packing_efficiency(grid, args.packing_samples, args.seed)
        for grid in config.grids
    ]
    mi = mi_report(latents, config, args.bins) if len(latents) >= MIN_FRAMES else None

    lines = [
        f"config={config.to_string()}",
        f"bits_per_token={bits_per_token(layout):.10g}",
    ]
    lines += key_value_lines(utilization, prefix="utilization.")
    lines += key_value_lines(mse, prefix="mse.")
    if mi is None:
        lines.append(f"mi=skipped (fewer than {MIN_FRAMES} frames)")
    else:
        lines += key_value_lines(mi, prefix="mi.")
    print("\n".join(lines))
    print()

    rows = []
    for j, grid in enumerate(config.grids):
        row = {
            "pair": j,
            "tiling": grid.kind.value,
            "lx": grid.spec.lx,
            "ly": grid.spec.ly,
            "points": grid.n_points,
            "used": utilization.per_pair_used[j],
            "fraction": utilization.per_pair_fraction[j],
            "mse": mse.per_pair[j],
            "nsm": packing[j].normalized_second_moment,
        }
        if mi is not None:
            row.update(mi_pre=mi.per_pair_mi_pre[j], mi_post=mi.per_pair_mi_post[j])
        rows.append(row)
    write_csv(rows, _output_path(args.csv) if args.csv else sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    kinds = [TilingKind.parse(kind) for kind in args.kinds.split(",")]
    texts = args.schedules.split(";") if args.schedules else [args.levels]
    schedules = [parse_schedule(text, args.d) for text in texts]
    latents = synthetic_latents(len(schedules[0]), args.frames, args.seed)
    if any(len(levels) != latents.shape[1] for levels in schedules):
        raise ValueError("Every schedule in a sweep must have the same dimension")
    table = run_sweep(kinds, schedules, latents, args.matched, args.progress)
    if args.csv:
        _emit_frame(table, args.csv)
    else:
        print(table.to_string(index=False))
    return 0


def cmd_train_toy(args) -> int:
    config, _ = _config_from_args(args)
    dataset = make_synthetic_dataset(args.seed, args.frames, args.input_dim)
    if args.ablation:
        ablation = projection_ablation(
            config,
            dataset,
            range(args.seed, args.seed + 5),
            args.steps,
            args.lr,
            args.batch_size,
        )
        print(ablation.to_frame().to_string(index=False))
        print(f"tanh_not_worse={ablation.tanh_not_worse}")
        return 0
    pipeline = ToyPipeline.initialize(
        config, args.input_dim, seed=args.seed, projection=args.projection
    )
    report = train(
        pipeline,
        dataset,
        args.steps,
        args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
        progress=args.progress,
    )
    print("\n".join(key_value_lines(report.summary())))
    if args.csv:
        _emit_frame(report.to_frame(), args.csv)
    return 0


def cmd_bench(args) -> int:
    config, _ = _config_from_args(args)
    print(bench(config, args.frames, args.seed).to_string(index=False))
    return 0


def cmd_codebook(args) -> int:
    config, preset_rate = _config_from_args(args)
    rate = args.tokens_per_second if args.tokens_per_second is not None else preset_rate
    report = bitrate_report(config, rate)
    if rate <= 0:
        report = report.drop(columns=["tokens_per_second", "bits_per_second"])
    print(f"config={config.to_string()}")
    print(report.to_string(index=False))
    counts = parameter_count(config, args.input_dim, args.input_dim, args.vq_dim)
    print("\n".join(key_value_lines(counts)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="q2d2", description="Two-dimensional grid quantization of latent vectors"
    )
    parser.add_argument(
        "-v", "--verbose", help="Log at INFO level.", action="store_true"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    grid = subparsers.add_parser("grid", help="Build a single pair grid.")
    grid.add_argument("action", choices=["build", "dump"])
    grid.add_argument(
        "--kind", help="rect, hex or rhombic.", type=str, required=True
    )
    grid.add_argument(
        "--levels", help="One level count, or lx,ly.", type=str, required=True
    )
    grid.add_argument("--hex_offset", type=float, default=HEX_ROW_OFFSET)
    grid.add_argument("--dump", choices=["csv", "svg"])
    grid.add_argument("--output", help="Write to this file instead of stdout.")
    grid.set_defaults(func=cmd_grid)

    quant = subparsers.add_parser("quantize", help="Latents to a token stream file.")
    _add_config_arguments(quant)
    quant.add_argument("--input", help="Latent file.", required=True)
    quant.add_argument("--output", help="Token stream file.", required=True)
    quant.add_argument("--format", choices=FORMATS, default="csv")
    quant.add_argument(
        "--apply_tanh",
        help="Pass raw values through tanh before quantizing.",
        action=argparse.BooleanOptionalAction,
        default=False,
    )
    quant.add_argument("--tokens_per_second", type=int)
    quant.add_argument("--method", choices=METHODS, default="fast")
    quant.set_defaults(func=cmd_quantize)

    dequant = subparsers.add_parser(
        "dequantize", help="Token stream to grid-point CSV."
    )
    dequant.add_argument("--input", help="Token stream file.", required=True)
    dequant.add_argument("--output", help="CSV file; stdout if omitted.")
    dequant.add_argument("--space", choices=["bounded", "latent"], default="bounded")
    dequant.set_defaults(func=cmd_dequantize)

    analyze = subparsers.add_parser("analyze", help="Utilization, MSE, packing and MI.")
    _add_config_arguments(analyze)
    analyze.add_argument("--input", help="Latent file; synthetic uniform if omitted.")
    analyze.add_argument("--format", choices=FORMATS, default="csv")
    analyze.add_argument(
        "--apply_tanh", action=argparse.BooleanOptionalAction, default=False
    )
    analyze.add_argument("--frames", type=int, default=10_000)
    analyze.add_argument("--seed", type=int, default=environment.DEFAULT_SEED)
    analyze.add_argument("--bins", type=int, default=16)
    analyze.add_argument("--packing_samples", type=int, default=100_000)
    analyze.add_argument("--csv", help="Write the per-pair table to this file.")
    analyze.set_defaults(func=cmd_analyze)

    sweep = subparsers.add_parser("sweep", help="Compare tilings over level schedules.")
    sweep.add_argument("--kinds", default="rect,hex,rhombic")
    sweep.add_argument("--levels", default="7", help="Level count(s) for one schedule.")
    sweep.add_argument(
        "--schedules", help='Several schedules separated by ";", e.g. "7;9,9,7,7,7,7".'
    )
    sweep.add_argument(
        "--d", type=int, default=6, help="Dimension for single-level schedules."
    )
    sweep.add_argument("--frames", type=int, default=10_000)
    sweep.add_argument("--seed", type=int, default=environment.DEFAULT_SEED)
    sweep.add_argument(
        "--matched",
        help="Add a rectangle row with the rhombic rows' realized point counts.",
        action=argparse.BooleanOptionalAction,
        default=False,
    )
    sweep.add_argument("--csv", help="Write CSV to this file instead of a table.")
    sweep.add_argument(
        "--progress", action=argparse.BooleanOptionalAction, default=False
    )
    sweep.set_defaults(func=cmd_sweep)

    toy = subparsers.add_parser("train-toy", help="Train the toy autoencoder.")
    _add_config_arguments(toy)
    toy.add_argument("--steps", type=int, default=5000)
    toy.add_argument("--lr", type=float, default=1.0)
    toy.add_argument("--batch_size", type=int, default=32)
    toy.add_argument("--frames", type=int, default=10_000)
    toy.add_argument("--input_dim", type=int, default=32)
    toy.add_argument("--seed", type=int, default=environment.DEFAULT_SEED)
    toy.add_argument("--projection", choices=["tanh", "clamp"], default="tanh")
    toy.add_argument(
        "--ablation",
        help="Run tanh and clamp projections over five seeds.",
        action=argparse.BooleanOptionalAction,
        default=False,
    )
    toy.add_argument("--csv", help="Write the loss curve to this file.")
    toy.add_argument("--progress", action=argparse.BooleanOptionalAction, default=False)
    toy.set_defaults(func=cmd_train_toy)

    bench_parser = subparsers.add_parser("bench", help="Quantization throughput.")
    _add_config_arguments(bench_parser)
    bench_parser.add_argument("--frames", type=int, default=10_000)
    bench_parser.add_argument("--seed", type=int, default=environment.DEFAULT_SEED)
    bench_parser.set_defaults(func=cmd_bench)

    codebook = subparsers.add_parser("codebook", help="Codebook size and bitrate.")
    _add_config_arguments(codebook)
    codebook.add_argument("--tokens_per_second", type=int)
    codebook.add_argument("--input_dim", type=int, default=512)
    codebook.add_argument("--vq_dim", type=int, default=512)
    codebook.set_defaults(func=cmd_codebook)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else environment.LOG_LEVEL)
    try:
        return args.func(args)
    except (Q2D2Error, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
