"""
A module for the compass-labeled 8-neighborhood of nested HEALPix pixels
"""

import logging
from logging import Logger
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from oslo.geometry._direction import DIRECTIONS, Direction
from oslo.geometry._pixel import Order, OrderLike, PixelId, as_order
from oslo.geometry._pixelization import nest2xyf, xyf2nest
from oslo.parallel import map_chunks

MISSING: int = -1

# Face-local step of each direction, in Direction order SW, W, NW, N, NE, E, SE, S
X_OFFSET: np.ndarray = np.array([-1, -1, 0, 1, 1, 1, 0, -1], dtype=np.int64)
Y_OFFSET: np.ndarray = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)

# Base face reached when leaving a face, indexed [4 + dx + 3 * dy][face]
# where dx, dy in {-1, 0, 1} say which edge was crossed. -1 marks a missing
# corner neighbor.
FACE_ARRAY: np.ndarray = np.array(
    [
        [8, 9, 10, 11, -1, -1, -1, -1, 10, 11, 8, 9],  # S
        [5, 6, 7, 4, 8, 9, 10, 11, 9, 10, 11, 8],  # SE
        [-1, -1, -1, -1, 5, 6, 7, 4, -1, -1, -1, -1],  # E
        [4, 5, 6, 7, 11, 8, 9, 10, 11, 8, 9, 10],  # SW
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],  # center
        [1, 2, 3, 0, 0, 1, 2, 3, 5, 6, 7, 4],  # NE
        [-1, -1, -1, -1, 7, 4, 5, 6, -1, -1, -1, -1],  # W
        [3, 0, 1, 2, 3, 0, 1, 2, 4, 5, 6, 7],  # NW
        [2, 3, 0, 1, -1, -1, -1, -1, 0, 1, 2, 3],  # N
    ],
    dtype=np.int64,
)

# Coordinate fix-up when entering the new face, indexed [nbnum][face // 4]:
# bit 1 mirrors x, bit 2 mirrors y, bit 4 swaps x and y.
SWAP_ARRAY: np.ndarray = np.array(
    [
        [0, 0, 3],  # S
        [0, 0, 6],  # SE
        [0, 0, 0],  # E
        [0, 0, 5],  # SW
        [0, 0, 0],  # center
        [5, 0, 0],  # NE
        [0, 0, 0],  # W
        [6, 0, 0],  # NW
        [3, 0, 0],  # N
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class NeighborRecord:
    """
    Represents the eight compass-labeled neighbors of a pixel.

    At the 24 pixels touching a corner where only three base faces meet, one
    direction has no pixel. That slot keeps its label with neighbor None and
    mask 0.

    Attributes:
        pixel (PixelId): The central pixel.
        neighbor (Tuple[Optional[PixelId], ...]): Neighbors for SW..S.
        mask (Tuple[int, ...]): 1 where the neighbor exists, 0 otherwise.
    """

    pixel: PixelId
    neighbor: Tuple[Optional[PixelId], ...]
    mask: Tuple[int, ...]

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        if len(self.neighbor) != 8 or len(self.mask) != 8:
            msg = "A neighbor record holds exactly 8 entries"
            logger.error(msg)
            raise ValueError(msg)
        for neighbor, present in zip(self.neighbor, self.mask):
            if (neighbor is None) == bool(present):
                msg = "Mask must be 0 exactly where the neighbor is absent"
                logger.error(msg)
                raise ValueError(msg)
        if self.mask.count(0) > 1:
            msg = "A pixel misses at most one neighbor"
            logger.error(msg)
            raise ValueError(msg)

    def __getitem__(self, direction: Direction) -> Optional[PixelId]:
        return self.neighbor[Direction(direction).slot]

    @property
    def missing(self) -> Optional[Direction]:
        """The direction without a neighbor, if any."""
        for direction, present in zip(DIRECTIONS, self.mask):
            if not present:
                return direction
        return None


def neighbor_indices(order: OrderLike, indices: np.ndarray) -> np.ndarray:
    """
    Computes the 8 neighbors of arbitrary nested pixels.

    Face-local coordinates are stepped in each direction. Steps leaving the
    face are resolved through FACE_ARRAY and SWAP_ARRAY.

    Args:
        order (Order | int): The resolution of the indices.
        indices (np.ndarray): Nested pixel indices.

    Returns:
        np.ndarray: An (n, 8) int64 array in Direction order, MISSING where
            the neighbor does not exist.
    """
    order = as_order(order)
    nside: int = order.nside
    ix, iy, face = nest2xyf(order, indices)
    result: np.ndarray = np.empty((ix.shape[0], 8), dtype=np.int64)
    for slot in range(8):
        x: np.ndarray = ix + X_OFFSET[slot]
        y: np.ndarray = iy + Y_OFFSET[slot]
        nbnum: np.ndarray = np.full_like(x, 4)
        nbnum -= x < 0
        nbnum += x >= nside
        nbnum -= 3 * (y < 0)
        nbnum += 3 * (y >= nside)
        x = np.mod(x, nside)
        y = np.mod(y, nside)
        new_face: np.ndarray = FACE_ARRAY[nbnum, face]
        bits: np.ndarray = SWAP_ARRAY[nbnum, face >> 2]
        x = np.where(bits & 1, nside - x - 1, x)
        y = np.where(bits & 2, nside - y - 1, y)
        swap: np.ndarray = (bits & 4).astype(bool)
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        result[:, slot] = np.where(
            new_face >= 0, xyf2nest(order, x, y, np.maximum(new_face, 0)), MISSING
        )
    return result


def neighbor_table(order: OrderLike) -> np.ndarray:
    """
    Returns the cached neighbor table of a whole order.

    The table is built once per order, in chunks run through the worker pool,
    and handed out read-only. Order(5) and 5 share one cache entry.

    Args:
        order (Order | int): The resolution, at least 1.

    Returns:
        np.ndarray: A read-only (npix, 8) int64 array, MISSING for absent
            neighbors.

    Raises:
        ValueError: If the order is 0.
    """
    return _neighbor_table(as_order(order).value)


@lru_cache(maxsize=8)
def _neighbor_table(value: int) -> np.ndarray:
    logger: Logger = logging.getLogger(__name__)
    order: Order = as_order(value)
    if order.value == 0:
        msg = "The base resolution has no 8-neighbor structure"
        logger.error(msg)
        raise ValueError(msg)
    logger.debug("Building neighbor table at order %s", order.value)
    chunks = map_chunks(
        lambda chunk: neighbor_indices(
            order, np.arange(chunk.start, chunk.stop, dtype=np.int64)
        ),
        order.npix,
    )
    table: np.ndarray = np.concatenate(chunks, axis=0)
    table.flags.writeable = False
    return table


def neighbors(
    pixel: PixelId, logger: Logger = logging.getLogger(__name__)
) -> NeighborRecord:
    """
    Returns the compass-labeled neighbors of a pixel.

    Args:
        pixel (PixelId): The central pixel, at order >= 1.
        logger (Logger): The logger to use for logging.

    Returns:
        NeighborRecord: Neighbors SW..S with their presence mask.

    Raises:
        ValueError: If the pixel is at the base resolution.

    Example:
        >>> record = neighbors(PixelId(0, Order(1)))
        >>> record[Direction.NE]
        PixelId(1@1)
    """
    if pixel.order.value == 0:
        msg = "Neighbors are defined from order 1 on; the base resolution is exempt"
        logger.error(msg)
        raise ValueError(msg)
    row: np.ndarray = neighbor_indices(pixel.order, np.array([pixel.index]))[0]
    neighbor: Tuple[Optional[PixelId], ...] = tuple(
        None if index == MISSING else PixelId(int(index), pixel.order) for index in row
    )
    mask: Tuple[int, ...] = tuple(int(index != MISSING) for index in row)
    return NeighborRecord(pixel=pixel, neighbor=neighbor, mask=mask)


def label_reciprocity(order: OrderLike) -> float:
    """
    Measures how often compass labels are reciprocal.

    For every pixel p and present neighbor q in direction k, checks whether p
    sits in slot opposite(k) of q. Inside a base face this always holds, but
    across face boundaries the labels may rotate.

    Args:
        order (Order | int): The resolution, at least 1.

    Returns:
        float: The fraction of reciprocal (p, k) pairs.
    """
    order = as_order(order)
    table: np.ndarray = neighbor_table(order)
    pixels: np.ndarray = np.arange(order.npix, dtype=np.int64)
    opposite_slots: np.ndarray = np.array([d.opposite.slot for d in DIRECTIONS])
    present: np.ndarray = table != MISSING
    back: np.ndarray = table[np.where(present, table, 0), opposite_slots[None, :]]
    reciprocal: np.ndarray = present & (back == pixels[:, None])
    return float(reciprocal.sum() / present.sum())


def missing_neighbor_pixels(order: OrderLike) -> np.ndarray:
    """Returns the indices of the pixels that have only seven neighbors."""
    table: np.ndarray = neighbor_table(as_order(order))
    return np.flatnonzero((table == MISSING).any(axis=1))
