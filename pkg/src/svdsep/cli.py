"""Command-line surface: ``separate``, ``scan``, ``synth`` and ``bench``.

Every command echoes its effective parameters into a versioned JSON report
next to its outputs, exits 0 only when all requested files were written,
and routes all processing errors to stderr with a nonzero status (2 for
parse/usage problems, 1 for everything else).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bench as bench_mod
from . import io as fio
from . import linalg, signal
from .errors import ParseError, SvdsepError
from .image import METRIC_DENSITY, METRIC_SMOOTHNESS, WindowConfig, sliding_scan, threshold_map
from .synth import MixtureSpec, Region, TextureSpec, gen_mixture, gen_texture

SCHEMA_VERSION = 1


@dataclass
class RunReport:
    """Audit record of one command invocation."""

    command: str
    inputs: list
    parameters: dict
    results: dict
    work_counters: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    return obj


def _write_report(report: RunReport, prefix: str, echo: bool) -> None:
    text = report.to_json()
    with open(f"{prefix}_report.json", "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    if echo:
        print(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _order_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be an integer or 'auto', got {text!r}")


def _region_arg(text: str) -> Region:
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError(f"region must be x,y,width,height,tag, got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts[:4])
    except ValueError:
        raise argparse.ArgumentTypeError(f"region coordinates must be integers: {text!r}")
    return Region(x=x, y=y, width=w, height=h, tag=parts[4].strip())


def _layout_from_args(args, channels: signal.ChannelSet) -> signal.EmbedLayout:
    if args.layout == "hankel":
        if args.window_length is None:
            raise ParseError("hankel layout requires --window-length")
        return signal.EmbedLayout.hankel(args.window_length, stride=args.stride)
    window = args.window_length if args.window_length is not None else channels.n_samples
    offsets = tuple(args.offsets) if args.offsets else None
    return signal.EmbedLayout.channel_columns(window, offsets=offsets)


def _profile_dict(profile: signal.EgvProfile) -> dict:
    return {
        "gaps": profile.gaps,
        "singular_energies": profile.singular_energies,
        "variations": profile.variations,
        "gamma": profile.gamma,
    }


def cmd_separate(args) -> int:
    t0 = time.perf_counter()
    channels = fio.read_channels_csv(args.input)
    layout = _layout_from_args(args, channels)
    a = signal.embed(channels, layout)

    decompositions = 1
    if args.method == "svd":
        spectrum = linalg.svd(a, rank_tolerance=args.rank_tolerance)
        if spectrum.numerical_rank >= 3:
            cut = signal.find_two_cutoffs(spectrum, min_separation=args.min_separation)
        else:
            cut = signal.find_cutoff(spectrum)
        parts = signal.separate(spectrum, cut)
        values = spectrum.singular_values[: spectrum.numerical_rank]
        profile = signal.egv_profile(values)
        values_key = "singular_values"
        rank_info = {"numerical_rank": spectrum.numerical_rank}
    else:
        if args.second is None:
            raise ParseError("--method gsvd requires --second CSV")
        second = fio.read_channels_csv(args.second)
        layout_b = _layout_from_args(args, second)
        b = signal.embed(second, layout_b)
        decomp = linalg.gsvd(a, b)
        cut = signal.cutoff_from_gsvd(decomp)
        parts = signal.gsvd_separate(decomp, cut)
        values = decomp.generalized_values
        profile = signal.egv_profile(values[np.isfinite(values)])
        values_key = "generalized_values"
        rank_info = {"infinite_values": int(np.sum(np.isinf(values)))}

    names = ("dominant", "weak", "noise")
    outputs = []
    for name, part in zip(names, parts):
        out = signal.unembed(part, layout, channels.n_samples)
        if layout.mode == signal.MODE_CHANNEL_COLUMNS and channels.labels:
            out = signal.ChannelSet(out.data, sample_rate=channels.sample_rate, labels=channels.labels)
        path = f"{args.output_prefix}_{name}.csv"
        fio.write_channels_csv(path, out)
        outputs.append(path)

    report = RunReport(
        command="separate",
        inputs=[args.input] + ([args.second] if args.second else []),
        parameters={
            "method": args.method,
            "layout": args.layout,
            "window_length": layout.window_length,
            "stride": args.stride,
            "offsets": list(layout.source_offsets) if layout.source_offsets else None,
            "min_separation": args.min_separation,
            "rank_tolerance": args.rank_tolerance,
            "output_prefix": args.output_prefix,
        },
        results={
            "cutoff": {"m": cut.m, "f": cut.f, "peak_values": list(cut.peak_values),
                       "method": cut.method},
            values_key: values,
            **rank_info,
            "egv_profile": _profile_dict(profile),
            "outputs": outputs,
        },
        work_counters={"decompositions": decompositions},
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    _write_report(report, args.output_prefix, args.json)
    return 0


def cmd_scan(args) -> int:
    t0 = time.perf_counter()
    img = fio.load_gray_image(args.input)
    cfg = WindowConfig(window_size=args.window_size, stride=args.stride,
                       order=args.order, delta=args.delta, epsilon_guard=args.epsilon_guard)
    smap = sliding_scan(img, cfg, metric=args.metric, workers=args.workers)

    fio.write_grid_csv(f"{args.output_prefix}_map.csv", smap.grid)
    fio.write_pgm(f"{args.output_prefix}_map.pgm", fio.render_grid_u8(smap.grid))
    outputs = [f"{args.output_prefix}_map.csv", f"{args.output_prefix}_map.pgm"]

    mask_stats = None
    if args.threshold is not None:
        mask = threshold_map(smap, args.threshold, polarity=args.polarity)
        fio.write_pgm(f"{args.output_prefix}_mask.pgm", mask * np.uint8(255))
        outputs.append(f"{args.output_prefix}_mask.pgm")
        mask_stats = {"flagged": int(mask.sum()), "total": int(mask.size)}

    report = RunReport(
        command="scan",
        inputs=[args.input],
        parameters={
            "window_size": args.window_size, "stride": args.stride, "metric": args.metric,
            "order": args.order, "delta": args.delta, "epsilon_guard": args.epsilon_guard,
            "threshold": args.threshold, "polarity": args.polarity, "workers": args.workers,
            "output_prefix": args.output_prefix,
        },
        results={
            "grid_rows": smap.grid_rows, "grid_cols": smap.grid_cols,
            "min": float(smap.grid.min()), "max": float(smap.grid.max()),
            "mean": float(smap.grid.mean()),
            "mask": mask_stats, "outputs": outputs,
        },
        work_counters={"decompositions": smap.decompositions},
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    _write_report(report, args.output_prefix, args.json)
    return 0


def cmd_synth(args) -> int:
    t0 = time.perf_counter()
    if args.kind == "mixture":
        spec = MixtureSpec(
            samples=args.samples, channels=args.channels,
            dominant_rank=args.dominant_rank, weak_rank_span=args.weak_rank_span,
            dominant_period=args.dominant_period, weak_period=args.weak_period,
            energy_ratio_dominant_weak=args.ratio_dominant_weak,
            energy_ratio_weak_noise=args.ratio_weak_noise, seed=args.seed,
        )
        channels, (k_m, k_f) = gen_mixture(spec)
        out = f"{args.output_prefix}_signals.csv"
        fio.write_channels_csv(out, channels)
        parameters = {k: v for k, v in asdict(spec).items()}
        results = {"k_m": k_m, "k_f": k_f, "outputs": [out]}
    else:
        spec = TextureSpec(
            width=args.width, height=args.height, regions=tuple(args.region or ()),
            noise_amplitude={"smooth": args.noise_smooth, "rough": args.noise_rough,
                             "anomaly-band": args.noise_anomaly},
            base_level=args.base_level, seed=args.seed,
        )
        img, mask = gen_texture(spec)
        img_path = f"{args.output_prefix}_image.pgm"
        mask_path = f"{args.output_prefix}_mask.pgm"
        fio.write_pgm(img_path, img.to_uint8())
        fio.write_pgm(mask_path, mask.astype(np.uint8))
        parameters = {
            "width": spec.width, "height": spec.height,
            "regions": [asdict(r) for r in spec.regions],
            "noise_amplitude": spec.noise_amplitude,
            "base_level": spec.base_level, "seed": spec.seed,
        }
        results = {"tag_codes": {"smooth": 0, "rough": 1, "anomaly-band": 2},
                   "outputs": [img_path, mask_path]}

    report = RunReport(
        command=f"synth {args.kind}",
        inputs=[],
        parameters=parameters,
        results=results,
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    _write_report(report, args.output_prefix, args.json)
    return 0


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    if args.suite == "cutoff":
        records = bench_mod.run_cutoff_bench(args.sizes, reps=args.reps, seed=args.seed)
    else:
        records = bench_mod.run_scan_bench(args.window_sizes, image_side=args.image_side,
                                           reps=args.reps, seed=args.seed, workers=args.workers)
    csv_path = f"{args.output_prefix}_timings.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("suite,size,rep,milliseconds\n")
        for rec in records:
            fh.write(f"{rec.suite},{rec.problem_size},{rec.repetition},{rec.wall_time_ms:.6f}\n")
    summary = bench_mod.summarize(records)
    with open(f"{args.output_prefix}_summary.json", "w", encoding="utf-8") as fh:
        json.dump(_jsonable(summary), fh, indent=2)
        fh.write("\n")

    report = RunReport(
        command="bench",
        inputs=[],
        parameters={
            "suite": args.suite, "sizes": getattr(args, "sizes", None),
            "window_sizes": getattr(args, "window_sizes", None),
            "image_side": getattr(args, "image_side", None),
            "reps": args.reps, "seed": args.seed, "workers": args.workers,
            "output_prefix": args.output_prefix,
        },
        results={"summary": summary,
                 "outputs": [csv_path, f"{args.output_prefix}_summary.json"]},
        work_counters={"records": len(records)},
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    _write_report(report, args.output_prefix, args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svdsep",
        description="Subspace separation of multichannel signals and sliding-window texture maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sep = sub.add_parser("separate", help="split a signal CSV into dominant/weak/noise parts")
    p_sep.add_argument("input", help="signal CSV, one column per channel")
    p_sep.add_argument("--method", choices=["svd", "gsvd"], default="svd")
    p_sep.add_argument("--second", help="reference CSV for the gsvd method")
    p_sep.add_argument("--layout", choices=["channel-columns", "hankel"], default="channel-columns")
    p_sep.add_argument("--window-length", type=int, default=None)
    p_sep.add_argument("--stride", type=int, default=1)
    p_sep.add_argument("--offsets", type=_int_list, default=None,
                       help="comma-separated per-column start offsets")
    p_sep.add_argument("--min-separation", type=int, default=1)
    p_sep.add_argument("--rank-tolerance", type=float, default=None)
    p_sep.add_argument("--output-prefix", required=True)
    p_sep.add_argument("--json", action="store_true", help="echo the report to stdout")
    p_sep.set_defaults(func=cmd_separate)

    p_scan = sub.add_parser("scan", help="sliding-window texture metric over a grayscale image")
    p_scan.add_argument("input", help="PGM or 8-bit grayscale PNG image")
    p_scan.add_argument("--window-size", type=int, default=5)
    p_scan.add_argument("--stride", type=int, default=1)
    p_scan.add_argument("--metric", choices=[METRIC_SMOOTHNESS, METRIC_DENSITY],
                        default=METRIC_SMOOTHNESS)
    p_scan.add_argument("--order", type=_order_arg, default=1,
                        help="smoothness order n, or 'auto'")
    p_scan.add_argument("--delta", type=float, default=0.0,
                        help="near-equality threshold for auto order selection")
    p_scan.add_argument("--epsilon-guard", type=float, default=1e-6)
    p_scan.add_argument("--threshold", type=float, default=None)
    p_scan.add_argument("--polarity", choices=["above", "below"], default="above")
    p_scan.add_argument("--workers", type=int, default=1)
    p_scan.add_argument("--output-prefix", required=True)
    p_scan.add_argument("--json", action="store_true")
    p_scan.set_defaults(func=cmd_scan)

    p_synth = sub.add_parser("synth", help="generate seeded synthetic data with ground truth")
    synth_sub = p_synth.add_subparsers(dest="kind", required=True)

    p_mix = synth_sub.add_parser("mixture", help="dominant+weak+noise channel mixture CSV")
    p_mix.add_argument("--samples", type=int, default=400)
    p_mix.add_argument("--channels", type=int, default=8)
    p_mix.add_argument("--dominant-rank", type=int, default=2)
    p_mix.add_argument("--weak-rank-span", type=int, default=2)
    p_mix.add_argument("--dominant-period", type=int, default=40)
    p_mix.add_argument("--weak-period", type=int, default=None)
    p_mix.add_argument("--ratio-dominant-weak", type=float, default=100.0)
    p_mix.add_argument("--ratio-weak-noise", type=float, default=100.0)
    p_mix.add_argument("--seed", type=int, default=0)
    p_mix.add_argument("--output-prefix", required=True)
    p_mix.add_argument("--json", action="store_true")
    p_mix.set_defaults(func=cmd_synth)

    p_tex = synth_sub.add_parser("texture", help="smooth/rough/anomaly texture PGM")
    p_tex.add_argument("--width", type=int, default=40)
    p_tex.add_argument("--height", type=int, default=40)
    p_tex.add_argument("--region", action="append", type=_region_arg,
                       help="x,y,width,height,tag (repeatable); tags: smooth, rough, anomaly-band")
    p_tex.add_argument("--noise-smooth", type=float, default=1e-3)
    p_tex.add_argument("--noise-rough", type=float, default=0.8)
    p_tex.add_argument("--noise-anomaly", type=float, default=1e-3)
    p_tex.add_argument("--base-level", type=float, default=0.5)
    p_tex.add_argument("--seed", type=int, default=0)
    p_tex.add_argument("--output-prefix", required=True)
    p_tex.add_argument("--json", action="store_true")
    p_tex.set_defaults(func=cmd_synth)

    p_bench = sub.add_parser("bench", help="timing and work-count harness")
    p_bench.add_argument("--suite", choices=["cutoff", "scan"], required=True)
    p_bench.add_argument("--sizes", type=_int_list, default=[64, 128, 256],
                         help="sample counts for the cutoff suite")
    p_bench.add_argument("--window-sizes", type=_int_list, default=[4, 8, 16],
                         help="window sizes for the scan suite")
    p_bench.add_argument("--image-side", type=int, default=64)
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--output-prefix", required=True)
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"svdsep: parse error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"svdsep: {exc}", file=sys.stderr)
        return 2
    except SvdsepError as exc:
        print(f"svdsep: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
