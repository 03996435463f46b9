"""
A module for merging child pixels into their parent, and the inverse
nearest-neighbor upsampling
"""

import logging
from logging import Logger
from enum import StrEnum
from typing import Optional, Tuple

import numpy as np

from oslo.ops._patch import PatchSpec
from oslo.tensor import SphereMap, record


class PoolMode(StrEnum):
    MAX = "max"
    AVERAGE = "average"


def _coarse_patch(
    x: SphereMap, levels: int, logger: Logger
) -> Optional[PatchSpec]:
    available: int = x.order.value if x.patch is None else x.patch.depth
    if levels < 0 or levels > available:
        msg = f"Cannot pool {levels} orders from a map of {x.npix} pixels"
        logger.error(msg)
        raise ValueError(msg)
    return None if x.patch is None else x.patch.coarsen(levels, logger=logger)


def pool(
    x: SphereMap,
    mode: PoolMode,
    levels: int = 1,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Merges the 4^levels descendants of every coarse pixel into one value.

    Args:
        x (SphereMap): The input map.
        mode (PoolMode): max or average.
        levels (int): How many orders to go down.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: The pooled map, levels orders lower.

    Raises:
        ValueError: If the map has fewer than levels orders to lose.

    Example:
        >>> pool(SphereMap(np.array([[1.0, 2.0, 3.0, 4.0] * 12]), 1), PoolMode.AVERAGE).data[0, 0]
        2.5
    """
    mode = PoolMode(mode)
    patch: Optional[PatchSpec] = _coarse_patch(x, levels, logger)
    if levels == 0:
        return x
    group: int = 1 << (2 * levels)
    shape: Tuple[int, ...] = x.data.shape
    blocks: np.ndarray = x.data.reshape(shape[0], shape[1] // group, group)
    order: int = x.order.value - levels

    if mode == PoolMode.AVERAGE:
        return record(
            "pool_average",
            [x],
            SphereMap.from_op(blocks.mean(axis=2), order, patch),
            lambda g: (np.repeat(g / group, group, axis=1),),
        )

    winners: np.ndarray = blocks.argmax(axis=2)

    def max_vjp(g: np.ndarray) -> Tuple[np.ndarray]:
        grad: np.ndarray = np.zeros(blocks.shape, dtype=g.dtype)
        np.put_along_axis(grad, winners[..., None], g[..., None], axis=2)
        return (grad.reshape(shape),)

    return record(
        "pool_max",
        [x],
        SphereMap.from_op(
            np.take_along_axis(blocks, winners[..., None], axis=2)[..., 0], order, patch
        ),
        max_vjp,
    )


def upsample_nearest(
    x: SphereMap, levels: int = 1, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """Copies every pixel value to its 4^levels descendants."""
    if levels < 0:
        msg = f"Upsampling levels must be non-negative, got {levels}"
        logger.error(msg)
        raise ValueError(msg)
    if levels == 0:
        return x
    group: int = 1 << (2 * levels)
    patch: Optional[PatchSpec] = None if x.patch is None else x.patch.refine(levels)
    channels, pixels = x.data.shape
    return record(
        "upsample_nearest",
        [x],
        SphereMap.from_op(
            np.repeat(x.data, group, axis=1), x.order.value + levels, patch
        ),
        lambda g: (g.reshape(channels, pixels, group).sum(axis=2),),
    )
