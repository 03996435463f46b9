"""
A module for HEALPix subdivision orders, nested pixel addresses and the
parent/child hierarchy of the nested numbering scheme
"""

import logging
from logging import Logger
from dataclasses import dataclass
from typing import List, Union

import numpy as np

MAX_ORDER: int = 13


@dataclass(frozen=True, order=True)
class Order:
    """
    Represents a HEALPix subdivision level.

    Order 0 is the base resolution with 12 pixels. Every further order splits
    each pixel into 2x2 equal-area children, so N_side = 2^order and
    npix = 12 * 4^order.

    Attributes:
        value (int): The subdivision level, between 0 and MAX_ORDER.

    Raises:
        ValueError: If the value is not an integer in [0, MAX_ORDER].
    """

    value: int

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        if isinstance(self.value, bool) or not isinstance(
            self.value, (int, np.integer)
        ):
            msg = "Order must be an integer"
            logger.error(msg)
            raise ValueError(msg)
        if self.value < 0:
            msg = f"Order must be non-negative, got {self.value}"
            logger.error(msg)
            raise ValueError(msg)
        if self.value > MAX_ORDER:
            msg = f"Order {self.value} exceeds the cap of {MAX_ORDER}"
            logger.error(msg)
            raise ValueError(msg)
        object.__setattr__(self, "value", int(self.value))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    @property
    def nside(self) -> int:
        """The number of pixels along a base-face side."""
        return 1 << self.value

    @property
    def npix(self) -> int:
        """The number of pixels on the whole sphere."""
        return 12 << (2 * self.value)


OrderLike = Union[Order, int]


def as_order(order: OrderLike) -> Order:
    """Coerces an int or Order into an Order."""
    if isinstance(order, Order):
        return order
    return Order(order)


def npix(order: OrderLike) -> int:
    """
    Returns the number of pixels of the whole sphere at the given order.

    Args:
        order (Order | int): The subdivision level.

    Returns:
        int: 12 * 4^order.

    Example:
        >>> npix(10)
        12582912
    """
    return as_order(order).npix


@dataclass(frozen=True, order=True)
class PixelId:
    """
    Represents a pixel address in the nested HEALPix scheme.

    The two low bits of the index select a child within its parent, so the
    parent of a pixel is index >> 2 one order lower.

    Attributes:
        index (int): The nested index, in [0, npix(order)).
        order (Order): The subdivision level the index refers to.

    Raises:
        ValueError: If the index is outside [0, npix(order)).
    """

    index: int
    order: Order

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        if not isinstance(self.order, Order):
            object.__setattr__(self, "order", as_order(self.order))
        if isinstance(self.index, bool) or not isinstance(
            self.index, (int, np.integer)
        ):
            msg = "Pixel index must be an integer"
            logger.error(msg)
            raise ValueError(msg)
        object.__setattr__(self, "index", int(self.index))
        if not 0 <= self.index < self.order.npix:
            msg = (
                f"Pixel index {self.index} outside [0, {self.order.npix}) "
                + f"at order {self.order.value}"
            )
            logger.error(msg)
            raise ValueError(msg)

    def __repr__(self) -> str:
        return f"PixelId({self.index}@{self.order.value})"


def parent(
    pixel: PixelId, logger: Logger = logging.getLogger(__name__)
) -> PixelId:
    """
    Returns the parent of a pixel one order lower.

    Args:
        pixel (PixelId): The child pixel, at order >= 1.
        logger (Logger): The logger to use for logging.

    Returns:
        PixelId: The pixel index >> 2 at order - 1.

    Raises:
        ValueError: If the pixel is at the base resolution.
    """
    if pixel.order.value == 0:
        msg = f"{pixel} is at the base resolution and has no parent"
        logger.error(msg)
        raise ValueError(msg)
    return PixelId(pixel.index >> 2, Order(pixel.order.value - 1))


def children(
    pixel: PixelId, logger: Logger = logging.getLogger(__name__)
) -> List[PixelId]:
    """
    Returns the four children of a pixel one order higher.

    Args:
        pixel (PixelId): The parent pixel, below the order cap.
        logger (Logger): The logger to use for logging.

    Returns:
        List[PixelId]: Pixels 4*index ... 4*index + 3 at order + 1.

    Raises:
        ValueError: If the pixel is already at the order cap.

    Example:
        >>> children(PixelId(5, Order(0)))
        [PixelId(20@1), PixelId(21@1), PixelId(22@1), PixelId(23@1)]
    """
    return descendants(pixel, 1, logger=logger)


def descendant_range(
    pixel: PixelId, depth: int, logger: Logger = logging.getLogger(__name__)
) -> range:
    """
    Returns the contiguous index range covered by a pixel depth orders higher.

    Args:
        pixel (PixelId): The ancestor pixel.
        depth (int): How many orders to descend.
        logger (Logger): The logger to use for logging.

    Returns:
        range: [index * 4^depth, (index + 1) * 4^depth).

    Raises:
        ValueError: If depth is negative or the target order exceeds the cap.
    """
    if depth < 0:
        msg = f"Depth must be non-negative, got {depth}"
        logger.error(msg)
        raise ValueError(msg)
    target: int = pixel.order.value + depth
    if target > MAX_ORDER:
        msg = f"Descending {depth} orders from {pixel} exceeds the cap of {MAX_ORDER}"
        logger.error(msg)
        raise ValueError(msg)
    span: int = 1 << (2 * depth)
    return range(pixel.index * span, (pixel.index + 1) * span)


def descendants(
    pixel: PixelId, depth: int, logger: Logger = logging.getLogger(__name__)
) -> List[PixelId]:
    """
    Returns all 4^depth descendants of a pixel, in nested order.

    Example:
        >>> [p.index for p in descendants(PixelId(5, Order(0)), 2)]
        [80, 81, 82, 83, 84, 85, 86, 87, 88, 89, 90, 91, 92, 93, 94, 95]
    """
    indices: range = descendant_range(pixel, depth, logger=logger)
    target: Order = Order(pixel.order.value + depth)
    return [PixelId(index, target) for index in indices]


def stride_log2(
    stride: int, logger: Logger = logging.getLogger(__name__)
) -> int:
    """
    Returns log2 of a power-of-two stride.

    Raises:
        ValueError: If the stride is not a positive power of two.
    """
    if isinstance(stride, bool) or not isinstance(stride, (int, np.integer)):
        msg = "Stride must be an integer"
        logger.error(msg)
        raise ValueError(msg)
    if stride < 1 or stride & (stride - 1):
        msg = f"Stride must be a power of 2, got {stride}"
        logger.error(msg)
        raise ValueError(msg)
    return int(stride).bit_length() - 1


def stride_visiting_indices(
    order: OrderLike, stride: int, logger: Logger = logging.getLogger(__name__)
) -> np.ndarray:
    """
    Returns the nested indices a filter visits with an n x n stride.

    The filter is placed at every n^2-th pixel, which is the same as taking one
    fixed child of every pixel log2(n) orders lower.

    Args:
        order (Order | int): The input resolution.
        stride (int): The stride n, a power of 2 with n^2 dividing npix(order).
        logger (Logger): The logger to use for logging.

    Returns:
        np.ndarray: The int64 indices 0, n^2, 2n^2, ...

    Raises:
        ValueError: If the stride is invalid for the order.
    """
    order = as_order(order)
    levels: int = stride_log2(stride, logger=logger)
    if levels > order.value:
        msg = (
            f"Stride {stride} needs {levels} coarser orders but order is {order.value}"
        )
        logger.error(msg)
        raise ValueError(msg)
    step: int = 1 << (2 * levels)
    return np.arange(0, order.npix, step, dtype=np.int64)


def stride_visiting_set(
    order: OrderLike, stride: int, logger: Logger = logging.getLogger(__name__)
) -> List[PixelId]:
    """
    Returns the ordered visiting set of an n x n stride as PixelIds.

    Output position j corresponds to input pixel j * n^2.

    Example:
        >>> [p.index for p in stride_visiting_set(2, 2)][:4]
        [0, 4, 8, 12]
    """
    order = as_order(order)
    return [
        PixelId(int(index), order)
        for index in stride_visiting_indices(order, stride, logger=logger)
    ]
