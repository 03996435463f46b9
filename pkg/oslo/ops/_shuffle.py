"""
A module for the spherical pixel shuffle and sub-pixel convolution
"""

import logging
from logging import Logger
from typing import Optional, Sequence

import numpy as np

from oslo.geometry import MAX_ORDER
from oslo.ops._conv import AggregationMode, conv_nhop
from oslo.ops._kernel import Kernel
from oslo.ops._patch import PatchSpec
from oslo.tensor import SphereMap, record


def _shuffle(data: np.ndarray, group: int) -> np.ndarray:
    channels, pixels = data.shape
    sets: int = channels // group
    return (
        data.reshape(sets, group, pixels).transpose(0, 2, 1).reshape(sets, pixels * group)
    )


def _unshuffle(data: np.ndarray, group: int) -> np.ndarray:
    sets, fine = data.shape
    pixels: int = fine // group
    return (
        data.reshape(sets, pixels, group).transpose(0, 2, 1).reshape(sets * group, pixels)
    )


def pixel_shuffle(
    x: SphereMap, levels: int = 1, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Moves groups of 4^levels channels onto the 4^levels descendants.

    Channels are split into D sets of 4^levels. Slot m of set d at parent
    pixel p becomes channel d at child p * 4^levels + m.

    Args:
        x (SphereMap): A map with 4^levels * D channels.
        levels (int): How many orders to go up.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: D channels, levels orders higher.

    Raises:
        ValueError: If the channels are not divisible by 4^levels or the
            result would exceed the order cap.

    Example:
        >>> pixel_shuffle(SphereMap(np.arange(48.0).reshape(4, 12), 0)).data[0, :4]
        array([ 0., 12., 24., 36.])
    """
    if levels < 0:
        msg = f"Shuffle levels must be non-negative, got {levels}"
        logger.error(msg)
        raise ValueError(msg)
    if levels == 0:
        return x
    group: int = 1 << (2 * levels)
    if x.channels % group:
        msg = f"{x.channels} channels are not divisible by {group}"
        logger.error(msg)
        raise ValueError(msg)
    if x.order.value + levels > MAX_ORDER:
        msg = f"Shuffling {levels} orders up from {x.order.value} exceeds the cap"
        logger.error(msg)
        raise ValueError(msg)
    patch: Optional[PatchSpec] = None if x.patch is None else x.patch.refine(levels)
    return record(
        "pixel_shuffle",
        [x],
        SphereMap.from_op(_shuffle(x.data, group), x.order.value + levels, patch),
        lambda g: (_unshuffle(g, group),),
    )


def pixel_unshuffle(
    x: SphereMap, levels: int = 1, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Inverse of pixel_shuffle: gathers 4^levels children into channels.

    Raises:
        ValueError: If the map has fewer than levels orders to lose.
    """
    if levels < 0:
        msg = f"Unshuffle levels must be non-negative, got {levels}"
        logger.error(msg)
        raise ValueError(msg)
    if levels == 0:
        return x
    available: int = x.order.value if x.patch is None else x.patch.depth
    if levels > available:
        msg = f"Cannot unshuffle {levels} orders from a map of {x.npix} pixels"
        logger.error(msg)
        raise ValueError(msg)
    group: int = 1 << (2 * levels)
    patch: Optional[PatchSpec] = (
        None if x.patch is None else x.patch.coarsen(levels, logger=logger)
    )
    return record(
        "pixel_unshuffle",
        [x],
        SphereMap.from_op(_unshuffle(x.data, group), x.order.value - levels, patch),
        lambda g: (_shuffle(g, group),),
    )


def spconv(
    x: SphereMap,
    kernels: Sequence[Kernel],
    mode: AggregationMode = AggregationMode.ADDITION,
    upsample: int = 1,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Sub-pixel convolution: a stride-1 n-hop filter at the input order,
    followed by a pixel shuffle of upsample orders.

    Raises:
        ValueError: If the final channel count is not divisible by 4^upsample.
    """
    return pixel_shuffle(
        conv_nhop(x, kernels, mode=mode, stride=1, logger=logger),
        upsample,
        logger=logger,
    )
