"""
A module for on-the-sphere convolution: the 1-hop directional filter, its
n-hop chains with aggregation, and strided subsampling
"""

import logging
from logging import Logger
from enum import StrEnum
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from oslo.geometry import MISSING, Order, neighbor_table, stride_log2
from oslo.ops._kernel import Kernel
from oslo.ops._patch import PatchSpec
from oslo.tensor import (
    ElementwiseOp,
    SphereMap,
    concat_channels,
    elementwise,
    maximum,
    record,
)


class AggregationMode(StrEnum):
    """How the outputs of the hops of an n-hop filter are combined."""

    CONCATENATION = "concatenation"
    MAX = "max"
    ADDITION = "addition"


@lru_cache(maxsize=32)
def gather_matrix(
    order: Order, patch: Optional[PatchSpec], dtype: str = "float64"
) -> sparse.csr_matrix:
    """
    Returns the sparse operator collecting the 8 neighbors of every pixel.

    Row k * P + i holds a 1 at the column of the direction-k neighbor of
    pixel i. Missing and out-of-patch neighbors leave the row empty, which is
    the w = 0 rule for them.

    Args:
        order (Order): The resolution, at least 1.
        patch (Optional[PatchSpec]): The patch, None for the whole sphere.
        dtype (str): The numpy dtype name of the matrix.

    Returns:
        sparse.csr_matrix: A (8P, P) matrix.
    """
    table: np.ndarray = (
        neighbor_table(order) if patch is None else patch.local_neighbors
    )
    pixels: int = table.shape[0]
    present: np.ndarray = (table != MISSING).T
    rows: np.ndarray = np.arange(8 * pixels, dtype=np.int64).reshape(8, pixels)
    matrix: sparse.csr_matrix = sparse.csr_matrix(
        (
            np.ones(int(present.sum()), dtype=dtype),
            (rows[present], table.T[present]),
        ),
        shape=(8 * pixels, pixels),
    )
    return matrix


def _check_convolvable(x: SphereMap, kernel: Kernel, logger: Logger) -> None:
    if x.order.value == 0:
        msg = "Convolution needs the 8-neighbor structure of order >= 1"
        logger.error(msg)
        raise ValueError(msg)
    if x.channels != kernel.in_channels:
        msg = (
            f"Kernel expects {kernel.in_channels} input channels, "
            + f"map has {x.channels}"
        )
        logger.error(msg)
        raise ValueError(msg)


def conv1hop(
    x: SphereMap, kernel: Kernel, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Applies a 1-hop directional convolution.

    For output channel l and pixel i:
    y = theta_0 x_i + sum_k theta_k x_{N_i(k)} w_{N_i(k), i} + b, where w is 0
    for missing neighbors and, on patch maps, for neighbors outside the patch.

    Args:
        x (SphereMap): The input, with kernel.in_channels channels.
        kernel (Kernel): The weights.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: kernel.out_channels channels on the same grid.

    Raises:
        ValueError: On a channel mismatch or an order-0 map.
    """
    _check_convolvable(x, kernel, logger)
    theta: np.ndarray = kernel.theta.values
    gather: sparse.csr_matrix = gather_matrix(x.order, x.patch, x.dtype.name)
    pixels: int = x.npix
    gathered: np.ndarray = np.asarray(gather @ x.data.T).reshape(8, pixels, x.channels)

    result: np.ndarray = theta[:, 0, :] @ x.data
    result += np.tensordot(theta[:, 1:, :], gathered, axes=([1, 2], [0, 2]))
    if kernel.bias is not None:
        result += kernel.bias.values[:, None]
    result = result.astype(x.dtype, copy=False)

    def vjp(g: np.ndarray) -> Tuple[np.ndarray, ...]:
        grad_theta: np.ndarray = np.empty_like(theta)
        grad_theta[:, 0, :] = g @ x.data.T
        grad_theta[:, 1:, :] = np.tensordot(g, gathered, axes=([1], [1]))
        grad_gathered: np.ndarray = np.tensordot(theta[:, 1:, :], g, axes=([0], [0]))
        grad_gathered = grad_gathered.transpose(0, 2, 1).reshape(8 * pixels, -1)
        grad_x: np.ndarray = theta[:, 0, :].T @ g + np.asarray(
            gather.T @ grad_gathered
        ).T
        if kernel.bias is None:
            return grad_x, grad_theta
        return grad_x, grad_theta, g.sum(axis=1)

    inputs: List = [x, kernel.theta]
    if kernel.bias is not None:
        inputs.append(kernel.bias)
    return record("conv1hop", inputs, x.like(result), vjp)


def strided_subsample(
    x: SphereMap, stride: int, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Keeps every stride^2-th pixel, one order lower per factor 2 of stride.

    Output pixel j is input pixel j * stride^2, which is a fixed child of
    pixel j at the output order.

    Raises:
        ValueError: If the stride is not a power of 2 fitting the map.
    """
    levels: int = stride_log2(stride, logger=logger)
    if levels == 0:
        return x
    depth_available: int = x.order.value if x.patch is None else x.patch.depth
    if levels > depth_available:
        msg = f"Stride {stride} is too large for a map of {x.npix} pixels"
        logger.error(msg)
        raise ValueError(msg)
    step: int = 1 << (2 * levels)
    patch: Optional[PatchSpec] = (
        None if x.patch is None else x.patch.coarsen(levels, logger=logger)
    )
    shape: Tuple[int, int] = x.data.shape

    def vjp(g: np.ndarray) -> Tuple[np.ndarray]:
        grad: np.ndarray = np.zeros(shape, dtype=g.dtype)
        grad[:, ::step] = g
        return (grad,)

    return record(
        "strided_subsample",
        [x],
        SphereMap.from_op(
            np.ascontiguousarray(x.data[:, ::step]), x.order.value - levels, patch
        ),
        vjp,
    )


def aggregate(
    maps: Sequence[SphereMap],
    mode: AggregationMode,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Combines hop outputs pixelwise by concatenation, maximum or sum.

    Raises:
        ValueError: If Max or Addition get maps with different channel counts.
    """
    mode = AggregationMode(mode)
    if len(maps) == 1:
        return maps[0]
    if mode == AggregationMode.CONCATENATION:
        return concat_channels(maps, logger=logger)
    if len({m.channels for m in maps}) != 1:
        msg = f"{mode} aggregation needs equal channel counts, got " + ", ".join(
            str(m.channels) for m in maps
        )
        logger.error(msg)
        raise ValueError(msg)
    result: SphereMap = maps[0]
    for other in maps[1:]:
        if mode == AggregationMode.MAX:
            result = maximum(result, other, logger=logger)
        else:
            result = elementwise(ElementwiseOp.ADD, result, other, logger=logger)
    return result


def conv_nhop(
    x: SphereMap,
    kernels: Sequence[Kernel],
    mode: AggregationMode = AggregationMode.ADDITION,
    stride: int = 1,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Applies an n-hop filter built from n chained 1-hop convolutions.

    Every hop convolves with stride 1. The last hop is then strided, the
    earlier hop outputs are subsampled to the same visiting set, and all are
    aggregated pixelwise.

    Args:
        x (SphereMap): The input map.
        kernels (Sequence[Kernel]): One kernel per hop, chained in order.
        mode (AggregationMode): How the hop outputs are combined.
        stride (int): The stride of the final layer, a power of 2.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: The aggregated map, log2(stride) orders lower.

    Raises:
        ValueError: If no kernels are given, they do not chain, or the
            aggregation mode does not fit the channel counts.
    """
    if not kernels:
        msg = "An n-hop filter needs at least one kernel"
        logger.error(msg)
        raise ValueError(msg)
    for previous, current in zip(kernels[:-1], kernels[1:]):
        if previous.out_channels != current.in_channels:
            msg = (
                f"Kernel chain breaks: {previous.out_channels} outputs feed "
                + f"{current.in_channels} inputs"
            )
            logger.error(msg)
            raise ValueError(msg)
    mode = AggregationMode(mode)
    if mode != AggregationMode.CONCATENATION and len(
        {k.out_channels for k in kernels}
    ) != 1:
        msg = f"{mode} aggregation needs equal channel counts across hops"
        logger.error(msg)
        raise ValueError(msg)

    hops: List[SphereMap] = []
    current: SphereMap = x
    for kernel in kernels:
        current = conv1hop(current, kernel, logger=logger)
        hops.append(current)
    return aggregate(
        [strided_subsample(hop, stride, logger=logger) for hop in hops],
        mode,
        logger=logger,
    )
