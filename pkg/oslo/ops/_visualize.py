"""
A module for dumping kernels with the planar position of each tap, for
plotting learned filters
"""

import csv
import logging
from logging import Logger
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from oslo.geometry import DIRECTIONS, OrderLike, RigidityReport, rigidity_statistics
from oslo.ops._kernel import Kernel

KERNEL_CSV_HEADER: Tuple[str, ...] = (
    "layer",
    "out_channel",
    "in_channel",
    "direction",
    "dx",
    "dy",
    "weight",
)


def tap_positions(order: OrderLike) -> Dict[str, Tuple[float, float]]:
    """
    Returns the mean tangent-plane position of every kernel tap.

    The center tap sits at the origin; each direction sits at its mean
    distance and circular-mean angle over the grid.
    """
    report: RigidityReport = rigidity_statistics(order)
    positions: Dict[str, Tuple[float, float]] = {"C": (0.0, 0.0)}
    for stat in report.directions:
        positions[stat.direction.name] = (
            stat.mean_dist * math.cos(stat.mean_angle),
            stat.mean_dist * math.sin(stat.mean_angle),
        )
    return positions


def kernel_rows(
    kernels: Sequence[Tuple[str, Kernel]], order: OrderLike
) -> List[Tuple[str, ...]]:
    """Returns the CSV rows of named kernels, header first."""
    positions: Dict[str, Tuple[float, float]] = tap_positions(order)
    labels: List[str] = ["C"] + [d.name for d in DIRECTIONS]
    rows: List[Tuple[str, ...]] = [KERNEL_CSV_HEADER]
    for name, kernel in kernels:
        theta = kernel.theta.values
        for out_channel in range(kernel.out_channels):
            for in_channel in range(kernel.in_channels):
                for tap, label in enumerate(labels):
                    dx, dy = positions[label]
                    rows.append(
                        (
                            name,
                            str(out_channel),
                            str(in_channel),
                            label,
                            f"{dx:.6g}",
                            f"{dy:.6g}",
                            f"{theta[out_channel, tap, in_channel]:.9g}",
                        )
                    )
    return rows


def write_kernel_csv(
    path: Union[str, Path],
    kernels: Sequence[Tuple[str, Kernel]],
    order: OrderLike,
    logger: Logger = logging.getLogger(__name__),
) -> int:
    """
    Writes named kernels as CSV, one row per tap and channel pair.

    Args:
        path (str | Path): The output file.
        kernels (Sequence[Tuple[str, Kernel]]): (layer name, kernel) pairs.
        order (Order | int): The order the kernels run at, which fixes the
            tap positions.
        logger (Logger): The logger to use for logging.

    Returns:
        int: The number of data rows written.
    """
    rows: List[Tuple[str, ...]] = kernel_rows(kernels, order)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        csv.writer(handle).writerows(rows)
    logger.info("Wrote %s kernel taps to %s", len(rows) - 1, path)
    return len(rows) - 1
