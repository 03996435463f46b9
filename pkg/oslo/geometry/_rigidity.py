"""
A module for the regularity of neighbor placement on a sampling grid,
measured on the gnomonic tangent plane of every pixel
"""

import csv
import logging
from logging import Logger
from dataclasses import dataclass, field
from enum import StrEnum
import math
from pathlib import Path
from typing import List, Optional, TextIO, Tuple, Union

import numpy as np

from oslo.geometry._direction import DIRECTIONS, Direction
from oslo.geometry._neighbors import MISSING, neighbor_indices
from oslo.geometry._pixel import OrderLike, PixelId, as_order
from oslo.geometry._pixelization import HALF_PI, pix2vec_array, pix2zphi
from oslo.parallel import map_chunks

DEFAULT_SAMPLE_SIZE: int = 3_000_000
DEFAULT_SAMPLE_SEED: int = 0x05105
FULL_ENUMERATION_MAX_ORDER: int = 8
POLE_TOLERANCE: float = 1e-9
DEFAULT_ERP_HEIGHT: int = 2508
DEFAULT_ERP_WIDTH: int = 5016

CSV_HEADER: Tuple[str, ...] = ("direction", "mean_dist", "std_dist", "rel_std_pct")


class Grid(StrEnum):
    """The sampling grids rigidity can be measured on."""

    HEALPIX = "healpix"
    ERP = "erp"


@dataclass(frozen=True)
class TangentOffset:
    """
    Represents a neighbor center projected onto the tangent plane of a pixel.

    Attributes:
        dx (float): Offset towards local east.
        dy (float): Offset towards local north.
    """

    dx: float
    dy: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dx) and math.isfinite(self.dy)):
            msg = "Tangent offsets must be finite"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)

    @property
    def distance(self) -> float:
        return math.hypot(self.dx, self.dy)

    @property
    def angle(self) -> float:
        """Counter-clockwise angle from local east, in radians."""
        return math.atan2(self.dy, self.dx)


@dataclass(frozen=True)
class DirectionStatistics:
    """
    Summarizes the offsets of one neighbor direction over a whole grid.

    Attributes:
        direction (Direction): The neighbor direction.
        mean_dist (float): Mean tangent-plane distance.
        std_dist (float): Standard deviation of the distance.
        mean_angle (float): Circular mean of the offset angle, in radians.
        std_angle (float): Standard deviation of the angle around its mean.
        rel_std_pct (float): 100 * std_dist / mean_dist.
        count (int): How many pixels had this neighbor.
    """

    direction: Direction
    mean_dist: float
    std_dist: float
    mean_angle: float
    std_angle: float
    rel_std_pct: float
    count: int


@dataclass
class RigidityReport:
    """
    Per-direction rigidity statistics of a grid.

    Attributes:
        grid (Grid): The grid the statistics were measured on.
        resolution (str): A readable resolution, e.g. "order 10" or "2508x5016".
        directions (List[DirectionStatistics]): One entry per direction SW..S.
        sampled (bool): True when a pixel sample replaced full enumeration.
    """

    grid: Grid
    resolution: str
    directions: List[DirectionStatistics] = field(default_factory=list)
    sampled: bool = False

    def __post_init__(self) -> None:
        if len(self.directions) != len(DIRECTIONS):
            msg = "A rigidity report holds one entry per direction"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)

    @property
    def mean_rel_std_pct(self) -> float:
        """The mean of the eight relative standard deviations."""
        return float(np.mean([stat.rel_std_pct for stat in self.directions]))

    def __getitem__(self, direction: Direction) -> DirectionStatistics:
        return self.directions[Direction(direction).slot]

    def to_rows(self) -> List[Tuple[str, ...]]:
        """Returns the CSV rows: the header, 8 directions and a mean row."""
        rows: List[Tuple[str, ...]] = [CSV_HEADER]
        for stat in self.directions:
            rows.append(
                (
                    stat.direction.name,
                    f"{stat.mean_dist:.9g}",
                    f"{stat.std_dist:.9g}",
                    f"{stat.rel_std_pct:.4f}",
                )
            )
        rows.append(
            (
                "mean",
                f"{np.mean([stat.mean_dist for stat in self.directions]):.9g}",
                f"{np.mean([stat.std_dist for stat in self.directions]):.9g}",
                f"{self.mean_rel_std_pct:.4f}",
            )
        )
        return rows

    def write_csv(self, target: Union[str, Path, TextIO]) -> None:
        """Writes the report as CSV to a path or an open text stream."""
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as handle:
                csv.writer(handle).writerows(self.to_rows())
        else:
            csv.writer(target).writerows(self.to_rows())


def _local_frame(
    z: np.ndarray, sin_theta: np.ndarray, phi: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    at_pole: np.ndarray = sin_theta < POLE_TOLERANCE
    phi = np.where(at_pole, 0.0, phi)
    cos_phi: np.ndarray = np.cos(phi)
    sin_phi: np.ndarray = np.sin(phi)
    east: np.ndarray = np.stack([-sin_phi, cos_phi, np.zeros_like(phi)], axis=-1)
    north: np.ndarray = np.stack([-z * cos_phi, -z * sin_phi, sin_theta], axis=-1)
    return east, north


def tangent_offset_arrays(order: OrderLike, indices: np.ndarray) -> np.ndarray:
    """
    Projects the 8 neighbors of many pixels onto their tangent planes.

    A neighbor at unit vector v seen from center c lands at v / (v . c) - c,
    which is then expressed in the local (east, north) frame of c.

    Args:
        order (Order | int): The resolution, at least 1.
        indices (np.ndarray): Nested pixel indices.

    Returns:
        np.ndarray: An (n, 8, 2) array of (dx, dy), NaN for missing neighbors.
    """
    order = as_order(order)
    indices = np.asarray(indices, dtype=np.int64)
    z, sin_theta, phi = pix2zphi(order, indices)
    center: np.ndarray = np.stack(
        [sin_theta * np.cos(phi), sin_theta * np.sin(phi), z], axis=-1
    )
    east, north = _local_frame(z, sin_theta, phi)

    table: np.ndarray = neighbor_indices(order, indices)
    present: np.ndarray = table != MISSING
    vectors: np.ndarray = pix2vec_array(order, np.where(present, table, 0).ravel())
    vectors = vectors.reshape(table.shape + (3,))

    dots: np.ndarray = np.einsum("nkc,nc->nk", vectors, center)
    projected: np.ndarray = vectors / dots[..., None] - center[:, None, :]
    offsets: np.ndarray = np.stack(
        [
            np.einsum("nkc,nc->nk", projected, east),
            np.einsum("nkc,nc->nk", projected, north),
        ],
        axis=-1,
    )
    offsets[~present] = np.nan
    return offsets


def tangent_offsets(pixel: PixelId) -> Tuple[Optional[TangentOffset], ...]:
    """
    Returns the tangent-plane offsets of a pixel's 8 neighbors.

    The plane touches the sphere at the pixel center, +y points to the north
    pole and +x to the east. Within 1e-9 rad of a pole the phi = 0 meridian
    defines north.

    Args:
        pixel (PixelId): The central pixel, at order >= 1.

    Returns:
        Tuple[Optional[TangentOffset], ...]: Offsets for SW..S, None where the
            neighbor is missing.
    """
    row: np.ndarray = tangent_offset_arrays(pixel.order, np.array([pixel.index]))[0]
    return tuple(
        None if np.isnan(dx) else TangentOffset(float(dx), float(dy)) for dx, dy in row
    )


def _summarize(direction: Direction, offsets: np.ndarray) -> DirectionStatistics:
    offsets = offsets[~np.isnan(offsets[:, 0])]
    distance: np.ndarray = np.hypot(offsets[:, 0], offsets[:, 1])
    angle: np.ndarray = np.arctan2(offsets[:, 1], offsets[:, 0])

    mean_dist: float = float(np.mean(distance))
    std_dist: float = 0.0 if np.ptp(distance) == 0 else float(np.std(distance))
    mean_angle: float = float(np.arctan2(np.mean(np.sin(angle)), np.mean(np.cos(angle))))
    deviation: np.ndarray = np.angle(np.exp(1j * (angle - mean_angle)))
    std_angle: float = 0.0 if np.ptp(deviation) == 0 else float(np.std(deviation))
    return DirectionStatistics(
        direction=direction,
        mean_dist=mean_dist,
        std_dist=std_dist,
        mean_angle=mean_angle,
        std_angle=std_angle,
        rel_std_pct=100.0 * std_dist / mean_dist,
        count=int(distance.shape[0]),
    )


def sample_pixels(npix: int, sample_size: int, seed: int) -> np.ndarray:
    """
    Draws one pixel uniformly from each of sample_size equal index strata.

    Nested indices of neighboring strata are spatially close, so the sample
    covers every base face evenly.
    """
    bounds: np.ndarray = (np.arange(sample_size + 1, dtype=np.int64) * npix) // sample_size
    lows: np.ndarray = bounds[:-1]
    widths: np.ndarray = bounds[1:] - lows
    rng: np.random.Generator = np.random.default_rng(seed)
    return lows + np.floor(rng.random(sample_size) * widths).astype(np.int64)


def rigidity_statistics(
    order: OrderLike,
    sample_size: Optional[int] = None,
    seed: int = DEFAULT_SAMPLE_SEED,
    logger: Logger = logging.getLogger(__name__),
) -> RigidityReport:
    """
    Measures neighbor placement regularity on a HEALPix grid.

    Up to order 8 every pixel is enumerated. Above that a stratified sample of
    DEFAULT_SAMPLE_SIZE pixels is used unless sample_size says otherwise.

    Args:
        order (Order | int): The resolution, at least 1.
        sample_size (Optional[int]): Pixels to sample; None picks the default
            for the order. Sizes at or above npix enumerate every pixel.
        seed (int): Seed of the sample.
        logger (Logger): The logger to use for logging.

    Returns:
        RigidityReport: Per-direction distance and angle statistics.

    Raises:
        ValueError: If the order is 0 or sample_size is not positive.

    Example:
        >>> report = rigidity_statistics(10)
        >>> round(report[Direction.N].rel_std_pct, 1)
        13.9
    """
    order = as_order(order)
    logger.debug(__name__)
    if order.value == 0:
        msg = "Rigidity needs the 8-neighbor structure of order >= 1"
        logger.error(msg)
        raise ValueError(msg)
    if sample_size is not None and sample_size < 1:
        msg = f"Sample size must be positive, got {sample_size}"
        logger.error(msg)
        raise ValueError(msg)
    if sample_size is None and order.value > FULL_ENUMERATION_MAX_ORDER:
        sample_size = DEFAULT_SAMPLE_SIZE
    if sample_size is not None and sample_size >= order.npix:
        if order.value > FULL_ENUMERATION_MAX_ORDER:
            logger.warning(
                "Sample size %s covers all %s pixels; enumerating instead",
                sample_size,
                order.npix,
            )
        sample_size = None

    pixels: np.ndarray = (
        np.arange(order.npix, dtype=np.int64)
        if sample_size is None
        else sample_pixels(order.npix, sample_size, seed)
    )
    logger.info(
        "Measuring rigidity of %s pixels at order %s", pixels.shape[0], order.value
    )
    chunks: List[np.ndarray] = map_chunks(
        lambda chunk: tangent_offset_arrays(order, pixels[chunk]), pixels.shape[0]
    )
    offsets: np.ndarray = np.concatenate(chunks, axis=0)
    return RigidityReport(
        grid=Grid.HEALPIX,
        resolution=f"order {order.value}",
        directions=[_summarize(d, offsets[:, d.slot, :]) for d in DIRECTIONS],
        sampled=sample_size is not None,
    )


# (du, dv) of each direction on an ERP grid, v growing southward
ERP_STEPS: Tuple[Tuple[int, int], ...] = (
    (-1, 1),  # SW
    (-1, 0),  # W
    (-1, -1),  # NW
    (0, -1),  # N
    (1, -1),  # NE
    (1, 0),  # E
    (1, 1),  # SE
    (0, 1),  # S
)


def erp_tangent_offsets(height: int, width: int) -> np.ndarray:
    """
    Projects the 8 neighbors of every ERP row onto the row's tangent plane.

    All pixels of a row share the same offsets, so one value per row is
    enough. Rows without a northern or southern neighbor get NaN there.

    Args:
        height (int): Rows of the grid.
        width (int): Columns of the grid.

    Returns:
        np.ndarray: A (height, 8, 2) array of (dx, dy).
    """
    rows: np.ndarray = np.arange(height, dtype=np.float64)
    latitude: np.ndarray = HALF_PI - math.pi * (rows + 0.5) / height
    offsets: np.ndarray = np.full((height, 8, 2), np.nan)
    for slot, (du, dv) in enumerate(ERP_STEPS):
        delta_lat: float = -dv * math.pi / height
        delta_lon: float = du * 2.0 * math.pi / width
        neighbor_lat: np.ndarray = latitude + delta_lat
        valid: np.ndarray = (rows + dv >= 0) & (rows + dv < height)
        cos_lat: np.ndarray = np.cos(latitude)
        cos_neighbor: np.ndarray = np.cos(neighbor_lat)
        one_minus_cos_lon: float = 1.0 - math.cos(delta_lon)
        cos_c: np.ndarray = math.cos(delta_lat) - cos_lat * cos_neighbor * one_minus_cos_lon
        dx: np.ndarray = cos_neighbor * math.sin(delta_lon) / cos_c
        dy: np.ndarray = (
            math.sin(delta_lat) + np.sin(latitude) * cos_neighbor * one_minus_cos_lon
        ) / cos_c
        offsets[valid, slot, 0] = dx[valid]
        offsets[valid, slot, 1] = dy[valid]
    return offsets


def erp_rigidity_statistics(
    height: int = DEFAULT_ERP_HEIGHT,
    width: int = DEFAULT_ERP_WIDTH,
    logger: Logger = logging.getLogger(__name__),
) -> RigidityReport:
    """
    Measures neighbor placement regularity on an equirectangular grid.

    Every row is counted once per column, which weights rows equally. North
    and south neighbors sit at a constant offset, so their spread is exactly 0.

    Args:
        height (int): Rows of the grid, at least 2.
        width (int): Columns of the grid, at least 2.
        logger (Logger): The logger to use for logging.

    Returns:
        RigidityReport: Per-direction distance and angle statistics.

    Raises:
        ValueError: If the grid is smaller than 2x2.
    """
    logger.debug(__name__)
    if height < 2 or width < 2:
        msg = f"ERP grid must be at least 2x2, got {height}x{width}"
        logger.error(msg)
        raise ValueError(msg)
    offsets: np.ndarray = erp_tangent_offsets(height, width)
    return RigidityReport(
        grid=Grid.ERP,
        resolution=f"{height}x{width}",
        directions=[_summarize(d, offsets[:, d.slot, :]) for d in DIRECTIONS],
    )
