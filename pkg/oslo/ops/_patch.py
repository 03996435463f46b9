"""
A module for patches: the descendants of one coarse pixel, used to train on
part of the sphere at a time
"""

import logging
from logging import Logger
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from oslo.geometry import (
    MISSING,
    Order,
    OrderLike,
    PixelId,
    as_order,
    descendant_range,
    neighbor_table,
    stride_log2,
)
from oslo.tensor import SphereMap


@dataclass(frozen=True)
class PatchSpec:
    """
    Represents the pixels descending from a root pixel.

    The patch holds the 4^depth pixels of descendants(root, depth) in nested
    order. Local pixel j is global pixel root.index * 4^depth + j.

    Attributes:
        root (PixelId): The coarse pixel the patch grows from.
        depth (int): How many orders below the root the patch lives.
        local_neighbors (np.ndarray): (npix, 8) local neighbor indices, MISSING
            where the neighbor is absent or outside the patch.
        boundary_mask (np.ndarray): (npix, 8) 1 where local_neighbors is set.

    Raises:
        ValueError: If depth is negative or the patch order exceeds the cap.
    """

    root: PixelId
    depth: int
    local_neighbors: np.ndarray = field(init=False, repr=False, compare=False)
    boundary_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pixels: range = descendant_range(self.root, self.depth)
        order: Order = Order(self.root.order.value + self.depth)
        if order.value == 0:
            local: np.ndarray = np.full((1, 8), MISSING, dtype=np.int64)
        else:
            table: np.ndarray = neighbor_table(order)[pixels.start : pixels.stop]
            inside: np.ndarray = (table >= pixels.start) & (table < pixels.stop)
            local = np.where(inside, table - pixels.start, MISSING)
        local.flags.writeable = False
        mask: np.ndarray = (local != MISSING).astype(np.uint8)
        mask.flags.writeable = False
        object.__setattr__(self, "local_neighbors", local)
        object.__setattr__(self, "boundary_mask", mask)

    @property
    def order(self) -> Order:
        return Order(self.root.order.value + self.depth)

    @property
    def npix(self) -> int:
        return 1 << (2 * self.depth)

    @property
    def start(self) -> int:
        """The global index of local pixel 0."""
        return self.root.index << (2 * self.depth)

    @property
    def pixels(self) -> np.ndarray:
        """The global nested indices covered, in local order."""
        return np.arange(self.start, self.start + self.npix, dtype=np.int64)

    def coarsen(
        self, levels: int, logger: Logger = logging.getLogger(__name__)
    ) -> "PatchSpec":
        """
        The same patch levels orders lower, as produced by stride and pooling.

        Raises:
            ValueError: If the patch is shallower than levels.
        """
        if levels > self.depth:
            msg = f"Patch of depth {self.depth} cannot lose {levels} orders"
            logger.error(msg)
            raise ValueError(msg)
        return PatchSpec(self.root, self.depth - levels)

    def refine(self, levels: int) -> "PatchSpec":
        """The same patch levels orders higher, as produced by pixel shuffle."""
        return PatchSpec(self.root, self.depth + levels)


def make_patch(
    order: OrderLike,
    patch_side: int,
    rng_seed: Optional[int] = None,
    logger: Logger = logging.getLogger(__name__),
) -> PatchSpec:
    """
    Draws a random square patch of patch_side x patch_side pixels.

    The root is drawn uniformly among the npix(order - n) pixels, where
    patch_side = 2^n.

    Args:
        order (Order | int): The resolution of the patch pixels.
        patch_side (int): The patch side, a power of 2.
        rng_seed (Optional[int]): The seed; equal seeds give equal patches.
        logger (Logger): The logger to use for logging.

    Returns:
        PatchSpec: The drawn patch.

    Raises:
        ValueError: If the patch is larger than a base pixel at this order.

    Example:
        >>> make_patch(6, 32, rng_seed=0).npix
        1024
    """
    order = as_order(order)
    depth: int = stride_log2(patch_side, logger=logger)
    if depth > order.value:
        msg = (
            f"A {patch_side}x{patch_side} patch does not fit in a base pixel "
            + f"at order {order.value}"
        )
        logger.error(msg)
        raise ValueError(msg)
    root_order: Order = Order(order.value - depth)
    if root_order.value == 0:
        logger.warning("Patch covers a whole base pixel at order %s", order.value)
    rng: np.random.Generator = np.random.default_rng(rng_seed)
    root: PixelId = PixelId(int(rng.integers(0, root_order.npix)), root_order)
    return PatchSpec(root, depth)


def crop_patch(
    x: SphereMap, patch: PatchSpec, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Cuts the pixels of a patch out of a full-sphere map.

    Raises:
        ValueError: If x is already a patch map or lives at another order.
    """
    if x.patch is not None:
        msg = "Map is already a patch map"
        logger.error(msg)
        raise ValueError(msg)
    if x.order != patch.order:
        msg = f"Patch is at order {patch.order.value}, map at {x.order.value}"
        logger.error(msg)
        raise ValueError(msg)
    return SphereMap(
        x.data[:, patch.start : patch.start + patch.npix].copy(), x.order, patch=patch
    )
