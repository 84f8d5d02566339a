"""Command-line pipeline driver.

Subcommands: simulate | characterize | entropy | plan | extract | test.

Exit codes are a stable scripting contract:
    0  success
    1  runtime failure (I/O, degenerate data, failed test battery)
    2  usage or validation error (bad flags, violated security margin)

Every command is deterministic given its explicit seeds; the tool draws
no entropy of its own.  QRNG_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitstream import BitString
from .characterize import (
    build_pixel_mask,
    estimate_zeta,
    fano_curve_to_csv,
    fano_factor,
    find_operating_region,
    pixel_stats,
    PixelMask,
)
from .entropy import entropy_report, epsilon_bound, plan_extractor
from .extractor import (
    DEFAULT_K,
    DEFAULT_L,
    DEFAULT_MATRIX_SEED,
    concat_streams,
    extract,
    frame_to_bits,
    generate_matrix,
    load_matrix,
    save_matrix,
)
from .ingest import (
    FrameFileHeader,
    read_pgm,
    read_raw,
    read_sidecar,
    write_pgm,
    write_raw,
    write_sidecar,
)
from .sensor import (
    Frame,
    PRESETS,
    SensorConfig,
    get_preset,
    load_sensor_config,
    simulate_frame,
    simulate_stack,
    worker_count,
)
from .stattests import (
    DEFAULT_ALPHA,
    DEFAULT_BLOCK_SIZE,
    DEFAULT_MAX_LAG,
    export_stream,
    run_battery,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Invalid invocation; maps to exit code 2."""


@dataclass(frozen=True)
class PipelineConfig:
    """One invocation's resolved settings, checked before work starts."""

    preset: str | None
    config_path: str | None
    n_bar: float | None
    width: int
    height: int
    n_frames: int
    matrix_seed: bytes
    k: int
    l: int
    inputs: tuple[str, ...]
    out: str | None
    seed: int

    def validate(self) -> None:
        if self.preset and self.config_path:
            raise UsageError("pass --preset or --config, not both")
        if self.width < 1 or self.height < 1:
            raise UsageError("frame geometry must be positive")
        if self.n_frames < 1:
            raise UsageError("frame count must be >= 1")
        if self.n_bar is not None and self.n_bar < 0:
            raise UsageError("--nbar must be >= 0")
        if not 1 <= self.k < self.l:
            raise UsageError(f"need 1 <= k < l, got k={self.k} l={self.l}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must fit in an unsigned 64-bit integer")

    def sensor(self) -> SensorConfig:
        if self.config_path:
            return load_sensor_config(self.config_path)
        if self.preset:
            return get_preset(self.preset)
        raise UsageError("a sensor is required: pass --preset or --config")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "PipelineConfig":
        cfg = cls(
            preset=getattr(args, "preset", None),
            config_path=getattr(args, "config", None),
            n_bar=getattr(args, "nbar", None),
            width=getattr(args, "width", 1),
            height=getattr(args, "height", 1),
            n_frames=getattr(args, "frames_count", 1),
            matrix_seed=getattr(args, "matrix_seed_bytes", DEFAULT_MATRIX_SEED),
            k=getattr(args, "k", None) or DEFAULT_K,
            l=getattr(args, "l", None) or DEFAULT_L,
            inputs=tuple(getattr(args, "inputs", ()) or ()),
            out=getattr(args, "out", None),
            seed=getattr(args, "seed", 0),
        )
        cfg.validate()
        return cfg


def _emit(args: argparse.Namespace, summary: dict, text_lines: list[str]) -> None:
    """Print the human or machine form of a command summary."""
    if getattr(args, "json", False):
        print(json.dumps(summary, indent=2))
    else:
        for line in text_lines:
            print(line)


def _require_out(cfg: PipelineConfig, what: str = "directory") -> str:
    if not cfg.out:
        raise UsageError(f"--out <{what}> is required for this command")
    return cfg.out


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed_u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _hex_seed(text: str) -> bytes:
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a hex string: {exc}") from exc
    if len(raw) != 32:
        raise argparse.ArgumentTypeError(
            f"matrix seed must be 32 bytes (64 hex digits), got {len(raw)}"
        )
    return raw


def _read_frames(paths: tuple[str, ...]) -> list[Frame]:
    """Load input frames: .pgm files directly, .raw via their sidecar."""
    frames: list[Frame] = []
    for path in paths:
        if path.endswith(".pgm"):
            frames.append(read_pgm(path))
        else:
            pair = read_sidecar(path)
            if pair is None:
                raise UsageError(
                    f"{path}: not a .pgm and no sidecar JSON describes it"
                )
            header, _ = pair
            frames.extend(read_raw(path, header))
    if not frames:
        raise UsageError("no input frames given")
    return frames


def _predicted_fano(config: SensorConfig, n_bar: float) -> float | None:
    """Clamp-free shot + technical noise prediction, None at n_bar = 0."""
    absorbed = config.eta * n_bar
    if absorbed <= 0:
        return None
    return 1.0 + config.sigma_t**2 / absorbed


def _stack_summary(frames: list[Frame]) -> tuple[float, float]:
    values = np.concatenate([f.codes.ravel() for f in frames]).astype(np.float64)
    return float(values.mean()), float(values.var(ddof=1))


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.from_args(args)
    sensor = cfg.sensor()
    out_dir = _require_out(cfg)
    os.makedirs(out_dir, exist_ok=True)

    if args.sweep:
        n_bars = [float(t) for t in args.sweep.split(",") if t.strip()]
        if not n_bars:
            raise UsageError("--sweep needs a comma-separated list of intensities")
        if any(nb < 0 for nb in n_bars):
            raise UsageError("sweep intensities must be >= 0")
    elif cfg.n_bar is None:
        raise UsageError("pass --nbar or --sweep")
    else:
        n_bars = [cfg.n_bar]

    manifest_entries = []
    text = []
    for i, n_bar in enumerate(n_bars):
        stack = [
            simulate_frame(
                sensor,
                n_bar,
                cfg.width,
                cfg.height,
                cfg.seed,
                frame_id=i * cfg.n_frames + j,
            )
            for j in range(cfg.n_frames)
        ]
        if args.format == "pgm":
            files = []
            for j, frame in enumerate(stack):
                name = (
                    f"frame_{j:04d}.pgm"
                    if not args.sweep
                    else f"nbar_{i:02d}_frame_{j:04d}.pgm"
                )
                path = os.path.join(out_dir, name)
                write_pgm(frame, path)
                files.append(name)
        else:
            name = "frames.raw" if not args.sweep else f"nbar_{i:02d}.raw"
            path = os.path.join(out_dir, name)
            header = FrameFileHeader(
                format="raw16le",
                width=cfg.width,
                height=cfg.height,
                bit_depth=sensor.bit_depth,
                frame_count=cfg.n_frames,
            )
            write_raw(stack, header, path)
            write_sidecar(
                path, header, extra={"n_bar": n_bar, "seed": cfg.seed}
            )
            files = [name]
        mean, var = _stack_summary(stack)
        manifest_entries.append(
            {
                "n_bar": n_bar,
                "files": files,
                "mean_code": mean,
                "variance_code": var,
                "predicted_fano": _predicted_fano(sensor, n_bar),
            }
        )
        pf = manifest_entries[-1]["predicted_fano"]
        text.append(
            f"n_bar={n_bar:g}: {cfg.n_frames} frame(s) "
            f"{cfg.width}x{cfg.height}, mean={mean:.2f} var={var:.2f} "
            f"predicted_fano={'n/a' if pf is None else f'{pf:.4f}'}"
        )

    summary = {
        "command": "simulate",
        "config": sensor.to_dict(),
        "seed": cfg.seed,
        "out": out_dir,
        "format": args.format,
        "stacks": manifest_entries,
    }
    if args.sweep:
        manifest_path = os.path.join(out_dir, "manifest.json")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
        text.append(f"sweep manifest: {manifest_path}")
    _emit(args, summary, text)
    return EXIT_OK


def cmd_characterize(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.from_args(args)
    sensor = cfg.sensor()
    out_dir = _require_out(cfg)
    os.makedirs(out_dir, exist_ok=True)
    report: dict = {"command": "characterize", "config": sensor.to_dict()}
    text = []

    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        base = os.path.dirname(os.path.abspath(args.manifest))
        sweep: list[tuple[list[Frame], float]] = []
        for entry in manifest["stacks"]:
            paths = tuple(os.path.join(base, name) for name in entry["files"])
            sweep.append((_read_frames(paths), float(entry["n_bar"])))
        sweep.sort(key=lambda pair: pair[1])

        curve = []
        skipped = []
        for frames, n_bar in sweep:
            try:
                curve.append((n_bar, fano_factor(frames, sensor)))
            except ValueError as exc:
                skipped.append({"n_bar": n_bar, "reason": str(exc)})
        ptc = estimate_zeta(sweep)
        region = find_operating_region(curve, args.tolerance) if curve else None

        csv_path = os.path.join(out_dir, "fano.csv")
        fano_curve_to_csv(curve, csv_path)
        report.update(
            {
                "fitted_zeta": ptc.fitted_zeta,
                "fit_residual": ptc.fit_residual,
                "operating_region": list(region) if region else None,
                "fano_tolerance": args.tolerance,
                "fano_points": [
                    {
                        "n_bar": nb,
                        "mean_code": p.mean_code,
                        "variance_code": p.variance_code,
                        "fano": p.fano,
                    }
                    for nb, p in curve
                ],
                "skipped_points": skipped,
                "csv": csv_path,
            }
        )
        text.append(
            f"fitted zeta = {ptc.fitted_zeta:.4f} "
            f"(relative residual {ptc.fit_residual:.3g})"
        )
        text.append(
            "operating region: "
            + (f"[{region[0]:g}, {region[1]:g}]" if region else "none found")
        )
        text.append(f"fano curve: {csv_path}")
    else:
        frames = _read_frames(cfg.inputs)
        stats = pixel_stats(frames)
        report["n_frames"] = stats.n_frames
        report["mean_code"] = float(stats.mean.mean())
        report["mean_pixel_variance"] = float(stats.variance.mean())
        text.append(
            f"{stats.n_frames} frame(s), mean code "
            f"{report['mean_code']:.2f}, mean pixel variance "
            f"{report['mean_pixel_variance']:.2f}"
        )

        try:
            point = fano_factor(frames, sensor)
            report["fano"] = {
                "mean_code": point.mean_code,
                "variance_code": point.variance_code,
                "fano": point.fano,
            }
            text.append(f"fano factor = {point.fano:.4f}")
        except ValueError as exc:
            report["fano"] = None
            report["fano_error"] = str(exc)
            text.append(f"fano factor unavailable: {exc}")

        if stats.n_frames >= 10:
            mask = build_pixel_mask(stats, sensor)
            mask_path = os.path.join(out_dir, "mask.json")
            with open(mask_path, "w", encoding="utf-8") as fh:
                fh.write(mask.to_json())
            report["mask"] = {"path": mask_path, "n_flagged": mask.n_flagged}
            text.append(f"pixel mask: {mask_path} ({mask.n_flagged} flagged)")
        else:
            report["mask"] = None
            report["mask_error"] = "pixel mask needs >= 10 frames"
            text.append("pixel mask skipped (needs >= 10 frames)")

    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
    text.append(f"report: {report_path}")
    _emit(args, report, text)
    return EXIT_OK


def cmd_entropy(args: argparse.Namespace) -> int:
    rep = entropy_report(args.nbar, args.bits)
    summary = {"command": "entropy", **rep.to_dict()}
    _emit(
        args,
        summary,
        [
            f"H = {rep.h_quantum:.6f} bits per sample ({rep.method})",
            f"s = {rep.s:.6f} entropy per raw bit at {rep.bit_depth}-bit depth",
        ],
    )
    return EXIT_OK


def _resolve_s(args: argparse.Namespace) -> Fraction | float:
    if args.s is not None:
        return args.s
    if args.nbar is None or args.bits is None:
        raise UsageError("pass --s, or --nbar with --bits to compute it")
    rep = entropy_report(args.nbar, args.bits)
    return rep.s


def cmd_plan(args: argparse.Namespace) -> int:
    s = _resolve_s(args)
    if (args.k is None) == (args.target is None):
        raise UsageError("pass exactly one of --k (evaluate) or --target (plan)")
    if args.k is not None:
        if args.k >= args.l:
            raise UsageError(f"need k < l, got k={args.k} l={args.l}")
        log2_eps = epsilon_bound(s, args.l, args.k)
        summary = {
            "command": "plan",
            "l": args.l,
            "k": args.k,
            "s": float(s),
            "log2_epsilon": str(log2_eps),
            "log2_epsilon_float": float(log2_eps),
            "compression_factor": args.l / args.k,
        }
        text = [
            f"log2(epsilon) <= {float(log2_eps):g}  (exactly {log2_eps})",
            f"compression factor l/k = {args.l / args.k:g}",
        ]
    else:
        plan = plan_extractor(s, args.target, args.l)
        summary = {"command": "plan", **plan.to_dict()}
        text = [
            f"k = {plan.k} output bits per {plan.l}-bit block",
            f"achieved log2(epsilon) <= {float(plan.log2_epsilon):g}",
            f"compression factor l/k = {plan.compression_factor:g}",
        ]
    _emit(args, summary, text)
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = PipelineConfig.from_args(args)
    sensor = cfg.sensor()
    out_path = _require_out(cfg, what="file")
    frames = _read_frames(cfg.inputs)

    mask = None
    if args.mask:
        with open(args.mask, encoding="utf-8") as fh:
            mask = PixelMask.from_json(fh.read())
        if not mask.flags.any():
            raise ValueError("pixel mask excludes every pixel")

    # Security margin gate before any heavy work: estimate the absorbed
    # mean from the data itself, convert to entropy per raw bit, and
    # refuse extraction that would emit more bits than it gathers.
    if args.matrix:
        matrix = load_matrix(args.matrix)
        if args.l is not None and args.l != matrix.l:
            raise UsageError(f"--l {args.l} != loaded matrix l={matrix.l}")
        if args.k is not None and args.k != matrix.k:
            raise UsageError(f"--k {args.k} != loaded matrix k={matrix.k}")
        l, k = matrix.l, matrix.k
    else:
        matrix = None
        l, k = cfg.l, cfg.k

    mean_code = float(
        np.mean(
            [
                f.codes[mask.flags].mean() if mask is not None else f.codes.mean()
                for f in frames
            ]
        )
    )
    n_bar_est = mean_code / sensor.zeta - sensor.offset
    bit_depth = frames[0].bit_depth
    if n_bar_est <= 0:
        raise ValueError(
            f"estimated absorbed mean {n_bar_est:.3f} e- is not positive; "
            "frames carry no shot noise to extract"
        )
    s = entropy_report(n_bar_est, bit_depth).s

    try:
        log2_eps = epsilon_bound(s, l, k)
    except ValueError as exc:
        if not args.force:
            print(
                f"error: {exc}\n"
                f"  s = {float(s):.4f} from estimated n_bar = {n_bar_est:.1f} "
                f"at {bit_depth}-bit depth; s*l = {float(s) * l:.1f} <= k = {k}.\n"
                "  Lower k, raise l, or pass --force to extract anyway "
                "(output is NOT certified random).",
                file=sys.stderr,
            )
            return EXIT_USAGE
        log2_eps = None

    if matrix is None:
        matrix = generate_matrix(cfg.matrix_seed, k, l)
    if args.save_matrix:
        save_matrix(matrix, args.save_matrix)

    raw = concat_streams([frame_to_bits(f, mask) for f in frames])
    result = extract(raw, matrix, n_workers=worker_count())
    n_bytes, padding = export_stream(result.bits, out_path)

    summary = {
        "command": "extract",
        "frames": len(frames),
        "raw_bits": raw.n_bits,
        "l": l,
        "k": k,
        "blocks_processed": result.blocks_processed,
        "residual_bits_discarded": result.residual_bits_discarded,
        "output_bits": result.bits.n_bits,
        "output_bytes": n_bytes,
        "padding_bits": padding,
        "estimated_n_bar": n_bar_est,
        "s": float(s),
        "log2_epsilon": None if log2_eps is None else float(log2_eps),
        "forced": bool(args.force and log2_eps is None),
        "matrix_digest": matrix.digest,
        "out": out_path,
    }
    text = [
        f"{len(frames)} frame(s) -> {raw.n_bits} raw bits",
        f"{result.blocks_processed} blocks of l={l} -> "
        f"{result.bits.n_bits} output bits (k={k}); "
        f"{result.residual_bits_discarded} residual bits discarded",
        f"estimated n_bar = {n_bar_est:.2f} e-, s = {float(s):.4f}",
        (
            f"log2(epsilon) <= {float(log2_eps):g}"
            if log2_eps is not None
            else "security margin VIOLATED (--force); output not certified"
        ),
        f"wrote {n_bytes} bytes to {out_path}",
    ]
    _emit(args, summary, text)
    return EXIT_OK


def cmd_test(args: argparse.Namespace) -> int:
    try:
        data = np.fromfile(args.input, dtype=np.uint8)
    except OSError as exc:
        raise OSError(f"reading {args.input}: {exc}") from exc
    bits = np.unpackbits(data)
    if args.bits is not None:
        if args.bits > bits.size:
            raise UsageError(
                f"--bits {args.bits} exceeds the {bits.size} bits in the file"
            )
        bits = bits[: args.bits]

    report = run_battery(
        bits, alpha=args.alpha, block_size=args.block_size, max_lag=args.max_lag
    )
    if args.export:
        export_stream(bits, args.export)

    text = [f"{report.n_bits} bits, alpha = {report.alpha:g}"]
    for r in report.results:
        verdict = "PASS" if r.passed else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        text.append(
            f"  {verdict}  {r.name:<28} statistic={r.statistic:< 12.5g} "
            f"p={r.p_value:.4g}{note}"
        )
    text.append(
        f"{report.n_passed}/{len(report.results)} tests passed"
        + (f"; exported bytes to {args.export}" if args.export else "")
    )
    _emit(args, {"command": "test", **report.to_dict()}, text)
    return EXIT_OK if report.all_passed else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camrng",
        description="Camera shot-noise randomness pipeline: simulate sensor "
        "frames, characterize them, plan and run extraction, test output.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", metavar="JSON", help="sensor config file (see --preset)"
    )
    common.add_argument(
        "--seed", type=_seed_u64, default=0, help="simulation seed (default 0)"
    )
    common.add_argument("--out", metavar="PATH", help="output file or directory")
    common.add_argument(
        "--json", action="store_true", help="print machine-readable JSON only"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate", parents=[common], help="simulate sensor frames to files"
    )
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in sensor")
    p.add_argument("--nbar", type=float, help="mean absorbed photons per pixel")
    p.add_argument(
        "--sweep", metavar="LIST", help="comma-separated intensities (overrides --nbar)"
    )
    p.add_argument(
        "--frames", dest="frames_count", type=_positive_int, default=1,
        help="frames per intensity (>= 1)",
    )
    p.add_argument("--width", type=_positive_int, default=256)
    p.add_argument("--height", type=_positive_int, default=256)
    p.add_argument("--format", choices=("pgm", "raw16le"), default="pgm")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "characterize", parents=[common], help="gain, Fano, mask from frames"
    )
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument(
        "inputs", nargs="*", metavar="FRAME",
        help=".pgm files or .raw files with sidecars",
    )
    p.add_argument(
        "--manifest", metavar="JSON", help="sweep manifest from `simulate --sweep`"
    )
    p.add_argument(
        "--tolerance", type=float, default=0.15,
        help="|F-1| bound for the operating region (default 0.15)",
    )
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser(
        "entropy", parents=[common], help="per-sample quantum entropy report"
    )
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--bits", type=_positive_int, required=True, help="ADC bit depth")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser(
        "plan", parents=[common], help="extractor sizing from the security bound"
    )
    p.add_argument("--s", type=float, help="entropy per raw bit (0, 1]")
    p.add_argument("--nbar", type=float, help="compute s from this intensity...")
    p.add_argument("--bits", type=_positive_int, help="...at this bit depth")
    p.add_argument("--l", type=_positive_int, default=DEFAULT_L)
    p.add_argument("--k", type=_positive_int, help="evaluate the bound for this k")
    p.add_argument(
        "--target", type=float, help="plan k for this log2(epsilon) target (< 0)"
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser(
        "extract", parents=[common], help="frames -> extractor -> byte stream"
    )
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument(
        "inputs", nargs="*", metavar="FRAME",
        help=".pgm files or .raw files with sidecars",
    )
    p.add_argument("--l", type=_positive_int, default=None)
    p.add_argument("--k", type=_positive_int, default=None)
    p.add_argument(
        "--matrix-seed", dest="matrix_seed_bytes", type=_hex_seed,
        default=DEFAULT_MATRIX_SEED, metavar="HEX64",
        help="32-byte matrix seed in hex",
    )
    p.add_argument("--matrix", metavar="FILE", help="load matrix instead of seeding")
    p.add_argument("--save-matrix", metavar="FILE", help="persist the matrix used")
    p.add_argument("--mask", metavar="JSON", help="pixel mask to apply")
    p.add_argument(
        "--force", action="store_true",
        help="extract even when s*l <= k (output NOT certified random)",
    )
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser(
        "test", parents=[common], help="native battery over a byte stream file"
    )
    p.add_argument("input", metavar="FILE", help="byte stream (MSB-first bits)")
    p.add_argument(
        "--bits", type=_positive_int, default=None,
        help="test only the first N bits (drop export padding)",
    )
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--block-size", type=_positive_int, default=DEFAULT_BLOCK_SIZE)
    p.add_argument("--max-lag", type=_positive_int, default=DEFAULT_MAX_LAG)
    p.add_argument("--export", metavar="FILE", help="re-export tested bits as bytes")
    p.set_defaults(func=cmd_test)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
