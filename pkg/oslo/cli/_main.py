"""
A module for the oslo command: conversion, grid statistics, quality metrics,
codec training, encoding, decoding and rendering

Exit codes: 0 on success, 2 on usage, input or format errors and 3 when a
numeric computation fails (e.g. a diverging training loss).
"""

import argparse
import dataclasses
import json
import logging
from logging import Logger
from pathlib import Path
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import cv2
import numpy as np

from oslo.cli._logging import configure_logging
from oslo.codec import (
    Checkpoint,
    CodecConfig,
    CodecModel,
    LatentFile,
    decode_file,
    encode_file,
    evaluate_codec,
    load_checkpoint,
    load_dataset,
    save_checkpoint,
    to_output_range,
    train,
)
from oslo.geometry import (
    MAX_ORDER,
    Grid,
    RigidityReport,
    erp_rigidity_statistics,
    rigidity_statistics,
)
from oslo.io import (
    ErpImage,
    InterpolationMode,
    downsample_erp,
    erp_to_healpix,
    healpix_to_erp,
    mollweide_render,
    read_hpxm,
    read_image,
    write_hpxm,
    write_image,
)
from oslo.metrics import (
    Metric,
    capped,
    evaluate,
    icosphere_points,
    psnr,
    spsnr,
    write_metrics_csv,
    wspsnr_erp,
    wspsnr_healpix,
)
from oslo.ops import write_kernel_csv
from oslo.parallel import set_num_threads
from oslo.tensor import SphereMap

EXIT_OK: int = 0
EXIT_USAGE: int = 2
EXIT_NUMERIC: int = 3
HPXM_SUFFIX: str = ".hpxm"

Signal = Union[ErpImage, SphereMap]

logger: Logger = logging.getLogger(__name__)


def _order(value: str) -> int:
    order: int = int(value)
    if not 0 <= order <= MAX_ORDER:
        raise argparse.ArgumentTypeError(
            f"order must be in [0, {MAX_ORDER}], got {order}"
        )
    return order


def _positive(value: str) -> int:
    number: int = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def _emit(args: argparse.Namespace, payload: Dict[str, Any], text: str) -> None:
    """Prints JSON with --json, the readable line otherwise."""
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _read_signal(path: Path) -> Signal:
    if path.suffix.lower() == HPXM_SUFFIX:
        return read_hpxm(path)
    return read_image(path, strict_aspect=False)


def _read_map(path: Path, order: int) -> SphereMap:
    """Reads an HPXM map, or resamples an ERP image to the given order."""
    signal: Signal = _read_signal(path)
    if isinstance(signal, ErpImage):
        return erp_to_healpix(signal, order)
    return signal


def _rescaled(signal: Signal, factor: float) -> Signal:
    if isinstance(signal, ErpImage):
        return ErpImage(signal.pixels * factor, strict_aspect=False)
    return SphereMap(signal.data * factor, signal.order, patch=signal.patch)


# Commands
def _convert(args: argparse.Namespace) -> int:
    if args.direction == "erp2hpx":
        image: ErpImage = read_image(args.input, strict_aspect=False)
        source: str = f"{image.width}x{image.height}"
        if args.downsample_width is not None:
            image = downsample_erp(image, args.downsample_width)
        sphere_map: SphereMap = erp_to_healpix(image, args.order, mode=args.mode)
        write_hpxm(args.output, sphere_map)
        _emit(
            args,
            {
                "source": source,
                "order": sphere_map.order.value,
                "npix": sphere_map.npix,
                "channels": sphere_map.channels,
            },
            f"{source} ERP -> order {sphere_map.order.value} HEALPix "
            + f"({sphere_map.npix} pixels, {sphere_map.channels} channels)",
        )
        return EXIT_OK

    sphere_map = read_hpxm(args.input)
    width: int = args.width if args.width is not None else 4 << sphere_map.order.value
    image = healpix_to_erp(sphere_map, width, mode=args.mode)
    write_image(args.output, image, bit_depth=args.bit_depth)
    _emit(
        args,
        {
            "order": sphere_map.order.value,
            "width": image.width,
            "height": image.height,
            "channels": image.channels,
        },
        f"order {sphere_map.order.value} HEALPix -> {image.width}x{image.height} ERP",
    )
    return EXIT_OK


def _stats(args: argparse.Namespace) -> int:
    report: RigidityReport
    if args.grid == Grid.ERP:
        sizes: Dict[str, int] = {}
        if args.height is not None:
            sizes["height"] = args.height
        if args.width is not None:
            sizes["width"] = args.width
        report = erp_rigidity_statistics(**sizes)
    else:
        sampling: Dict[str, int] = {} if args.seed is None else {"seed": args.seed}
        report = rigidity_statistics(
            args.order, sample_size=args.sample_size, **sampling
        )
    if args.output is not None:
        report.write_csv(args.output)
    if args.json:
        header, *rows = report.to_rows()
        print(
            json.dumps(
                {
                    "grid": str(report.grid),
                    "resolution": report.resolution,
                    "sampled": report.sampled,
                    "rows": [dict(zip(header, row)) for row in rows],
                },
                sort_keys=True,
            )
        )
    elif args.output is None:
        report.write_csv(sys.stdout)
    else:
        print(
            f"{report.grid} {report.resolution}: mean relative std "
            + f"{report.mean_rel_std_pct:.2f}%"
        )
    return EXIT_OK


def _metric_value(
    metric: Metric,
    reference: Signal,
    test: Signal,
    peak: float,
    points: Optional[np.ndarray],
) -> float:
    if metric == Metric.PSNR:
        return psnr(reference, test, peak)
    if metric == Metric.SPSNR:
        return spsnr(reference, test, peak, points=points)
    if isinstance(reference, ErpImage) and isinstance(test, ErpImage):
        return wspsnr_erp(reference, test, peak)
    if isinstance(reference, SphereMap) and isinstance(test, SphereMap):
        return wspsnr_healpix(reference, test, peak)
    msg = "WS-PSNR needs two signals of the same representation"
    logger.error(msg)
    raise ValueError(msg)


def _metrics(args: argparse.Namespace) -> int:
    reference: Signal = _read_signal(args.ref)
    test: Signal = _read_signal(args.test)
    if args.peak != 1.0:
        reference, test = _rescaled(reference, args.peak), _rescaled(test, args.peak)
    points: Optional[np.ndarray] = (
        None if args.points_level is None else icosphere_points(args.points_level)
    )
    if args.metric is None:
        report = evaluate(
            reference, test, image_id=args.test.stem, peak=args.peak, points=points
        )
        if args.json:
            scores: Dict[str, Optional[float]] = {
                "psnr": report.psnr,
                "wspsnr": report.wspsnr,
                "spsnr": report.spsnr,
            }
            payload: Dict[str, Any] = dataclasses.asdict(report) | {
                key: None if value is None else capped(value)
                for key, value in scores.items()
            }
            print(json.dumps(payload, sort_keys=True))
        else:
            write_metrics_csv(sys.stdout, [report])
        return EXIT_OK
    value: float = capped(_metric_value(args.metric, reference, test, args.peak, points))
    _emit(args, {"metric": str(args.metric), "value": value}, f"{value:.2f}")
    return EXIT_OK


def _train(args: argparse.Namespace) -> int:
    config: CodecConfig = CodecConfig.load(args.config)
    overrides: Dict[str, Any] = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = dataclasses.replace(
            config, train=dataclasses.replace(config.train, **overrides)
        )
    if args.lmbda is not None:
        config = dataclasses.replace(
            config, loss=dataclasses.replace(config.loss, lmbda=args.lmbda)
        )
    dataset: List[SphereMap] = load_dataset(args.data)
    model: CodecModel = CodecModel.create(config.arch, seed=config.train.seed)
    log = train(model, dataset, config)
    if args.log is not None:
        log.write_csv(args.log)
    evaluation = evaluate_codec(model, dataset)
    metadata: Dict[str, Any] = {
        "steps": config.train.steps,
        "final_loss": log.losses[-1],
        "rate_bpp": evaluation.rate_bpp,
        "psnr": capped(evaluation.psnr),
    }
    save_checkpoint(args.output, Checkpoint(model, config, metadata))
    _emit(
        args,
        metadata | {"model_hash": model.model_hash()},
        f"Trained {config.train.steps} steps: {evaluation.rate_bpp:.4f} bpp, "
        + f"{capped(evaluation.psnr):.2f} dB",
    )
    return EXIT_OK


def _encode(args: argparse.Namespace) -> int:
    checkpoint: Checkpoint = load_checkpoint(args.model)
    x: SphereMap = _read_map(args.input, checkpoint.config.arch.order)
    latent: LatentFile = encode_file(
        checkpoint.model, x, lmbda=checkpoint.config.loss.lmbda
    )
    latent.write(args.output)
    bits_per_pixel: float = latent.rate_bits / x.npix
    _emit(
        args,
        {
            "rate_bits": latent.rate_bits,
            "rate_bpp": bits_per_pixel,
            "wspsnr": latent.wspsnr,
        },
        f"{latent.rate_bits:.0f} bits ({bits_per_pixel:.4f} bpp), "
        + f"WS-PSNR {latent.wspsnr:.2f} dB",
    )
    return EXIT_OK


def _decode(args: argparse.Namespace) -> int:
    checkpoint: Checkpoint = load_checkpoint(args.model)
    latent: LatentFile = LatentFile.read(args.input)
    x_hat: SphereMap = to_output_range(decode_file(checkpoint.model, latent))
    if args.output.suffix.lower() == HPXM_SUFFIX:
        write_hpxm(args.output, x_hat)
    else:
        width: int = args.width if args.width is not None else 4 << x_hat.order.value
        write_image(args.output, healpix_to_erp(x_hat, width), bit_depth=args.bit_depth)
    _emit(
        args,
        {"order": x_hat.order.value, "wspsnr": latent.wspsnr},
        f"Decoded order {x_hat.order.value} map (WS-PSNR {latent.wspsnr:.2f} dB "
        + "at encoding)",
    )
    return EXIT_OK


def _render(args: argparse.Namespace) -> int:
    raster = mollweide_render(read_hpxm(args.input), args.width)
    write_image(args.output, raster.to_rgba(), bit_depth=args.bit_depth)
    height, width = raster.mask.shape
    _emit(
        args,
        {"width": width, "height": height},
        f"Rendered {width}x{height} Mollweide view",
    )
    return EXIT_OK


def _kernels(args: argparse.Namespace) -> int:
    checkpoint: Checkpoint = load_checkpoint(args.model)
    order: int = args.order if args.order is not None else checkpoint.config.arch.order
    rows: int = write_kernel_csv(args.output, checkpoint.model.named_kernels(), order)
    _emit(args, {"rows": rows}, f"Wrote {rows} kernel taps")
    return EXIT_OK


# Parser
def build_parser() -> argparse.ArgumentParser:
    """Builds the oslo argument parser."""
    parser = argparse.ArgumentParser(
        prog="oslo",
        description="HEALPix geometry, spherical image metrics and a spherical codec.",
    )
    parser.add_argument("--json", action="store_true", help="Print JSON to stdout")
    parser.add_argument("--seed", type=int, help="Seed for every random draw")
    parser.add_argument("--threads", type=_positive, help="Worker thread cap")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        type=str.upper,
        help="Verbosity of the stderr log (default: %(default)s)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser("convert", help="Convert between ERP and HEALPix")
    directions = convert.add_subparsers(dest="direction", required=True)
    erp2hpx = directions.add_parser("erp2hpx", help="ERP image to HPXM map")
    erp2hpx.add_argument("--in", dest="input", type=Path, required=True)
    erp2hpx.add_argument("--out", dest="output", type=Path, required=True)
    erp2hpx.add_argument("--order", type=_order, required=True)
    erp2hpx.add_argument(
        "--mode",
        type=InterpolationMode,
        default=InterpolationMode.BILINEAR,
        choices=[InterpolationMode.BILINEAR, InterpolationMode.NEAREST],
    )
    erp2hpx.add_argument(
        "--downsample-width",
        type=_positive,
        help="Area-average the image to this width before resampling",
    )
    hpx2erp = directions.add_parser("hpx2erp", help="HPXM map to ERP image")
    hpx2erp.add_argument("--in", dest="input", type=Path, required=True)
    hpx2erp.add_argument("--out", dest="output", type=Path, required=True)
    hpx2erp.add_argument("--width", type=_positive, help="Default: 4 * 2^order")
    hpx2erp.add_argument(
        "--mode",
        type=InterpolationMode,
        default=InterpolationMode.INVERSE_DISTANCE,
        choices=[InterpolationMode.INVERSE_DISTANCE, InterpolationMode.NEAREST],
    )
    hpx2erp.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    convert.set_defaults(handler=_convert)

    stats = commands.add_parser("stats", help="Grid statistics")
    statistics = stats.add_subparsers(dest="statistic", required=True)
    rigidity = statistics.add_parser("rigidity", help="Neighbor placement regularity")
    rigidity.add_argument("--order", type=_order, default=10)
    rigidity.add_argument("--grid", type=Grid, choices=list(Grid), default=Grid.HEALPIX)
    rigidity.add_argument("--height", type=_positive, help="ERP rows")
    rigidity.add_argument("--width", type=_positive, help="ERP columns")
    rigidity.add_argument("--sample-size", type=_positive)
    rigidity.add_argument("--out", dest="output", type=Path, help="CSV destination")
    stats.set_defaults(handler=_stats)

    metrics = commands.add_parser("metrics", help="Compare two signals")
    metrics.add_argument("--ref", type=Path, required=True)
    metrics.add_argument("--test", type=Path, required=True)
    metrics.add_argument(
        "--metric", type=Metric, choices=list(Metric), help="Default: every metric"
    )
    metrics.add_argument(
        "--peak",
        type=float,
        choices=[1.0, 255.0],
        default=1.0,
        help="255 scores 8-bit code values",
    )
    metrics.add_argument(
        "--points-level", type=int, help="Icosphere level of the S-PSNR points"
    )
    metrics.set_defaults(handler=_metrics)

    training = commands.add_parser("train", help="Train a codec")
    training.add_argument("--config", type=Path, required=True)
    training.add_argument("--data", type=Path, nargs="+", required=True)
    training.add_argument("--steps", type=_positive)
    training.add_argument("--lambda", dest="lmbda", type=float)
    training.add_argument("--out", dest="output", type=Path, required=True)
    training.add_argument("--log", type=Path, help="CSV training log")
    training.set_defaults(handler=_train)

    encode = commands.add_parser("encode", help="Encode a map to latents")
    encode.add_argument("--model", type=Path, required=True)
    encode.add_argument("--in", dest="input", type=Path, required=True)
    encode.add_argument("--out", dest="output", type=Path, required=True)
    encode.set_defaults(handler=_encode)

    decode = commands.add_parser("decode", help="Decode latents to a map or image")
    decode.add_argument("--model", type=Path, required=True)
    decode.add_argument("--in", dest="input", type=Path, required=True)
    decode.add_argument("--out", dest="output", type=Path, required=True)
    decode.add_argument("--width", type=_positive, help="ERP width for image output")
    decode.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    decode.set_defaults(handler=_decode)

    render = commands.add_parser("render", help="Render a Mollweide view")
    render.add_argument("--in", dest="input", type=Path, required=True)
    render.add_argument("--out", dest="output", type=Path, required=True)
    render.add_argument("--width", type=_positive, default=1024)
    render.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    render.set_defaults(handler=_render)

    kernels = commands.add_parser("kernels", help="Dump kernel taps as CSV")
    kernels.add_argument("--model", type=Path, required=True)
    kernels.add_argument("--out", dest="output", type=Path, required=True)
    kernels.add_argument("--order", type=_order, help="Default: the model order")
    kernels.set_defaults(handler=_kernels)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Runs the oslo command.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name;
            sys.argv[1:] when None.

    Returns:
        int: The exit code.
    """
    parser: argparse.ArgumentParser = build_parser()
    try:
        args: argparse.Namespace = parser.parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_OK if exit_request.code in (None, 0) else EXIT_USAGE
    configure_logging(args.log_level)
    if args.threads is not None:
        set_num_threads(args.threads)
        cv2.setNumThreads(args.threads)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except FloatingPointError as error:
        logger.error("Numeric failure: %s", error)
        return EXIT_NUMERIC
    except (ValueError, OSError) as error:
        logger.error("%s", error)
        return EXIT_USAGE
