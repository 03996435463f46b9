"""
A module for spherical image quality: PSNR, WS-PSNR on ERP and HEALPix, and
S-PSNR on a uniform point set
"""

import csv
import logging
from logging import Logger
from dataclasses import dataclass
from enum import StrEnum
import math
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from oslo.geometry import vec2ang
from oslo.io import ErpImage, InterpolationMode, sample_erp, sample_healpix
from oslo.metrics._icosphere import icosphere_points
from oslo.tensor import SphereMap

CSV_CAP_DB: float = 999.0
METRICS_CSV_HEADER: Tuple[str, ...] = (
    "image_id",
    "rate_bytes",
    "psnr",
    "wspsnr",
    "spsnr",
)

Signal = Union[ErpImage, SphereMap]


class Metric(StrEnum):
    PSNR = "psnr"
    WSPSNR = "wspsnr"
    SPSNR = "spsnr"


def decibels(mse: float, peak: float = 1.0) -> float:
    """Returns 10 log10(peak^2 / mse), or +inf when mse is 0."""
    if mse <= 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def capped(value: float) -> float:
    """Caps +inf and very large scores at 999 dB for tabular output."""
    return min(value, CSV_CAP_DB)


def _values(signal: Union[Signal, np.ndarray]) -> np.ndarray:
    if isinstance(signal, ErpImage):
        return signal.pixels
    if isinstance(signal, SphereMap):
        return signal.data
    return np.asarray(signal, dtype=np.float64)


def psnr(
    reference: Union[Signal, np.ndarray],
    test: Union[Signal, np.ndarray],
    peak: float = 1.0,
    logger: Logger = logging.getLogger(__name__),
) -> float:
    """
    Unweighted PSNR over every sample of two same-shaped signals.

    Raises:
        ValueError: If the shapes differ.
    """
    a: np.ndarray = _values(reference)
    b: np.ndarray = _values(test)
    if a.shape != b.shape:
        msg = f"Cannot compare signals of shapes {a.shape} and {b.shape}"
        logger.error(msg)
        raise ValueError(msg)
    difference: np.ndarray = a.astype(np.float64) - b.astype(np.float64)
    return decibels(float(np.mean(difference * difference)), peak)


def erp_row_weights(height: int) -> np.ndarray:
    """Returns cos((v + 0.5 - H/2) pi / H) for every row v."""
    return np.cos((np.arange(height) + 0.5 - height / 2.0) * np.pi / height)


def wspsnr_erp(
    reference: ErpImage,
    test: ErpImage,
    peak: float = 1.0,
    logger: Logger = logging.getLogger(__name__),
) -> float:
    """
    WS-PSNR of two ERP images: squared errors weighted by the spherical area
    of their row.

    Raises:
        ValueError: If the image dimensions differ.
    """
    if reference.pixels.shape != test.pixels.shape:
        msg = (
            f"WS-PSNR needs equal dimensions, got {reference.pixels.shape} "
            + f"and {test.pixels.shape}"
        )
        logger.error(msg)
        raise ValueError(msg)
    difference: np.ndarray = reference.pixels.astype(np.float64) - test.pixels
    row_errors: np.ndarray = np.mean(difference * difference, axis=(1, 2))
    weights: np.ndarray = erp_row_weights(reference.height)
    return decibels(float(np.sum(weights * row_errors) / np.sum(weights)), peak)


def wspsnr_healpix(
    reference: SphereMap,
    test: SphereMap,
    peak: float = 1.0,
    logger: Logger = logging.getLogger(__name__),
) -> float:
    """
    WS-PSNR of two HEALPix maps, which is plain PSNR since every pixel has
    the same area.

    Raises:
        ValueError: If the maps differ in grid or channels.
    """
    if not reference.same_grid(test) or reference.channels != test.channels:
        msg = "WS-PSNR needs maps on the same grid with the same channels"
        logger.error(msg)
        raise ValueError(msg)
    return psnr(reference, test, peak, logger=logger)


def sample_signal(
    signal: Signal,
    points: np.ndarray,
    healpix_mode: InterpolationMode = InterpolationMode.INVERSE_DISTANCE,
    logger: Logger = logging.getLogger(__name__),
) -> np.ndarray:
    """
    Samples an ERP image (bilinear) or a full-sphere map at unit vectors.

    Returns:
        np.ndarray: (n, C) samples.
    """
    if isinstance(signal, ErpImage):
        theta, phi = vec2ang(points)
        return sample_erp(signal.pixels, theta, phi, logger=logger)
    if signal.patch is not None:
        msg = "Only full-sphere maps can be sampled on the sphere"
        logger.error(msg)
        raise ValueError(msg)
    return sample_healpix(signal.data, signal.order, points, healpix_mode, logger=logger)


def spsnr(
    reference: Signal,
    test: Signal,
    peak: float = 1.0,
    points: Optional[np.ndarray] = None,
    healpix_mode: InterpolationMode = InterpolationMode.INVERSE_DISTANCE,
    logger: Logger = logging.getLogger(__name__),
) -> float:
    """
    S-PSNR: the PSNR of both signals sampled at a shared uniform point set.

    Either signal may be an ERP image or a HEALPix map, so the score can
    compare across representations.

    Args:
        reference (ErpImage | SphereMap): The original signal.
        test (ErpImage | SphereMap): The decoded signal.
        peak (float): The peak value, 1.0 for [0, 1] signals.
        points (Optional[np.ndarray]): (n, 3) unit vectors; the 655,362-point
            icosphere by default.
        healpix_mode (InterpolationMode): inverse_distance or nearest for the
            HEALPix side.
        logger (Logger): The logger to use for logging.

    Returns:
        float: The score in dB, +inf for identical samples.

    Raises:
        ValueError: If the channel counts differ.
    """
    logger.debug(__name__)
    channels: Tuple[int, int] = (
        _values(reference).shape[2 if isinstance(reference, ErpImage) else 0],
        _values(test).shape[2 if isinstance(test, ErpImage) else 0],
    )
    if channels[0] != channels[1]:
        msg = f"S-PSNR needs equal channel counts, got {channels[0]} and {channels[1]}"
        logger.error(msg)
        raise ValueError(msg)
    points = icosphere_points() if points is None else points
    a: np.ndarray = sample_signal(reference, points, healpix_mode, logger=logger)
    b: np.ndarray = sample_signal(test, points, healpix_mode, logger=logger)
    return psnr(a, b, peak, logger=logger)


@dataclass
class QualityReport:
    """
    Represents one row of the metrics table.

    psnr and wspsnr are None when the two signals use different
    representations; only S-PSNR compares across them.
    """

    image_id: str
    rate_bytes: Optional[int]
    psnr: Optional[float]
    wspsnr: Optional[float]
    spsnr: float

    def to_row(self) -> Tuple[str, ...]:
        def cell(value: Optional[float]) -> str:
            return "" if value is None else f"{capped(value):.4f}"

        return (
            self.image_id,
            "" if self.rate_bytes is None else str(self.rate_bytes),
            cell(self.psnr),
            cell(self.wspsnr),
            cell(self.spsnr),
        )


def evaluate(
    reference: Signal,
    test: Signal,
    image_id: str = "",
    rate_bytes: Optional[int] = None,
    peak: float = 1.0,
    points: Optional[np.ndarray] = None,
    logger: Logger = logging.getLogger(__name__),
) -> QualityReport:
    """Computes every metric that applies to the pair of signals."""
    same_kind: bool = type(reference) is type(test)
    plain: Optional[float] = (
        psnr(reference, test, peak, logger=logger) if same_kind else None
    )
    weighted: Optional[float] = None
    if isinstance(reference, ErpImage) and isinstance(test, ErpImage):
        weighted = wspsnr_erp(reference, test, peak, logger=logger)
    elif isinstance(reference, SphereMap) and isinstance(test, SphereMap):
        weighted = wspsnr_healpix(reference, test, peak, logger=logger)
    report = QualityReport(
        image_id=image_id,
        rate_bytes=rate_bytes,
        psnr=plain,
        wspsnr=weighted,
        spsnr=spsnr(reference, test, peak, points=points, logger=logger),
    )
    logger.info("Quality of %s: %s", image_id or "image", report)
    return report


def write_metrics_csv(
    destination: Union[str, Path, TextIO], reports: Sequence[QualityReport]
) -> None:
    """Writes the metrics table, +inf scores capped at 999 dB."""
    rows: List[Tuple[str, ...]] = [METRICS_CSV_HEADER] + [r.to_row() for r in reports]
    if isinstance(destination, (str, Path)):
        with open(destination, "w", newline="", encoding="utf-8") as handle:
            csv.writer(handle).writerows(rows)
    else:
        csv.writer(destination).writerows(rows)
