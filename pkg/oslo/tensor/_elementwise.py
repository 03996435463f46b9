"""
A module for pointwise operations and reductions, each with its
vector-Jacobian product
"""

import logging
from logging import Logger
from enum import StrEnum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from oslo.tensor._sphere_map import SphereMap, Scalar
from oslo.tensor._tape import record

Value = Union[SphereMap, Scalar]
Operand = Union[SphereMap, Scalar, float, int, np.ndarray]


class ElementwiseOp(StrEnum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALE = "scale"
    RELU = "relu"
    ABS = "abs"
    SQUARE = "square"
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"


BINARY_OPS: Tuple[ElementwiseOp, ...] = (
    ElementwiseOp.ADD,
    ElementwiseOp.SUB,
    ElementwiseOp.MUL,
    ElementwiseOp.SCALE,
)


class ReduceOp(StrEnum):
    SUM = "sum"
    MEAN = "mean"
    MAX = "max"


def _rewrap(like: Value, data: np.ndarray) -> Value:
    if isinstance(like, SphereMap):
        return like.like(data)
    return Scalar(data)


def _operand(
    op: ElementwiseOp,
    a: Value,
    b: Optional[Operand],
    logger: Logger,
) -> Tuple[np.ndarray, bool]:
    if b is None:
        msg = f"{op} needs a second operand"
        logger.error(msg)
        raise ValueError(msg)
    if isinstance(b, (SphereMap, Scalar)):
        if type(b) is not type(a) or b.data.shape != a.data.shape:
            msg = f"{op} operands differ in shape: {a.data.shape} vs {b.data.shape}"
            logger.error(msg)
            raise ValueError(msg)
        if isinstance(a, SphereMap) and not a.same_grid(b):
            msg = f"{op} operands live on different grids"
            logger.error(msg)
            raise ValueError(msg)
        return b.data, True
    data: np.ndarray = np.asarray(b, dtype=a.data.dtype)
    if data.ndim != 0 and data.shape != a.data.shape:
        msg = f"{op} operands differ in shape: {a.data.shape} vs {data.shape}"
        logger.error(msg)
        raise ValueError(msg)
    return data, False


def elementwise(
    op: ElementwiseOp,
    a: Value,
    b: Optional[Operand] = None,
    logger: Logger = logging.getLogger(__name__),
) -> Value:
    """
    Applies a pointwise operation.

    Binary ops take b as a value of the same shape, a number or a constant
    array of the same shape. Only SphereMap and Scalar operands receive
    gradients. scale needs a number.

    Args:
        op (ElementwiseOp): The operation.
        a (SphereMap | Scalar): The first operand.
        b (Optional[Operand]): The second operand of binary ops.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap | Scalar: A new value of a's kind; a and b are untouched.

    Raises:
        ValueError: On a shape mismatch, a missing operand or a domain
            violation (log of non-positive, sqrt of negative values).

    Example:
        >>> zero = elementwise(ElementwiseOp.ADD, x, elementwise(ElementwiseOp.SCALE, x, -1.0))
    """
    op = ElementwiseOp(op)
    x: np.ndarray = a.data
    inputs: List[Value] = [a]

    if op in BINARY_OPS:
        if op == ElementwiseOp.SCALE:
            if not isinstance(b, (int, float, np.floating, np.integer)) or isinstance(
                b, bool
            ):
                msg = "scale needs a number"
                logger.error(msg)
                raise ValueError(msg)
            factor: float = float(b)
            return record(
                op, inputs, _rewrap(a, x * factor), lambda g: (g * factor,)
            )
        other, tracked = _operand(op, a, b, logger)
        if tracked:
            inputs.append(b)  # type: ignore[arg-type]
        if op == ElementwiseOp.ADD:
            result, vjp = x + other, lambda g: (g, g)
        elif op == ElementwiseOp.SUB:
            result, vjp = x - other, lambda g: (g, -g)
        else:
            result, vjp = x * other, lambda g: (g * other, g * x)
        return record(op, inputs, _rewrap(a, result), vjp)

    if b is not None:
        msg = f"{op} takes a single operand"
        logger.error(msg)
        raise ValueError(msg)
    if op == ElementwiseOp.RELU:
        positive: np.ndarray = x > 0
        return record(
            op, inputs, _rewrap(a, x * positive), lambda g: (g * positive,)
        )
    if op == ElementwiseOp.ABS:
        sign: np.ndarray = np.sign(x)
        return record(op, inputs, _rewrap(a, np.abs(x)), lambda g: (g * sign,))
    if op == ElementwiseOp.SQUARE:
        return record(op, inputs, _rewrap(a, x * x), lambda g: (2.0 * x * g,))
    if op == ElementwiseOp.EXP:
        y: np.ndarray = np.exp(x)
        return record(op, inputs, _rewrap(a, y), lambda g: (g * y,))
    if op == ElementwiseOp.LOG:
        if (x <= 0).any():
            msg = "log needs strictly positive values"
            logger.error(msg)
            raise ValueError(msg)
        return record(op, inputs, _rewrap(a, np.log(x)), lambda g: (g / x,))
    if (x < 0).any():
        msg = "sqrt needs non-negative values"
        logger.error(msg)
        raise ValueError(msg)
    root: np.ndarray = np.sqrt(x)
    return record(
        op,
        inputs,
        _rewrap(a, root),
        lambda g: (np.divide(0.5 * g, root, out=np.zeros_like(g), where=root > 0),),
    )


def reduce(
    op: ReduceOp, x: Value, logger: Logger = logging.getLogger(__name__)
) -> Scalar:
    """
    Reduces all elements of a value to a scalar.

    max routes its gradient to the first maximal element in (channel, pixel)
    order.

    Raises:
        ValueError: If x is empty.
    """
    op = ReduceOp(op)
    data: np.ndarray = x.data
    if data.size == 0:
        msg = f"Cannot {op} an empty value"
        logger.error(msg)
        raise ValueError(msg)
    if op == ReduceOp.SUM:
        return record(
            op, [x], Scalar(data.sum()), lambda g: (np.full_like(data, g),)
        )
    if op == ReduceOp.MEAN:
        size: int = data.size
        return record(
            op, [x], Scalar(data.mean()), lambda g: (np.full_like(data, g / size),)
        )
    flat_index: int = int(np.argmax(data))

    def max_vjp(g: np.ndarray) -> Tuple[np.ndarray]:
        grad: np.ndarray = np.zeros_like(data)
        grad.flat[flat_index] = g
        return (grad,)

    return record(op, [x], Scalar(data.flat[flat_index]), max_vjp)


def concat_channels(
    maps: Sequence[SphereMap], logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Stacks maps along the channel axis.

    Raises:
        ValueError: If no maps are given or they live on different grids.
    """
    if not maps:
        msg = "Nothing to concatenate"
        logger.error(msg)
        raise ValueError(msg)
    first: SphereMap = maps[0]
    if any(not first.same_grid(other) for other in maps[1:]):
        msg = "Concatenated maps must share order and patch"
        logger.error(msg)
        raise ValueError(msg)
    bounds: np.ndarray = np.cumsum([0] + [m.channels for m in maps])
    result: np.ndarray = np.concatenate([m.data for m in maps], axis=0)
    return record(
        "concat",
        list(maps),
        first.like(result),
        lambda g: tuple(g[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])),
    )


def maximum(
    a: SphereMap, b: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Pixelwise maximum of two maps; ties route the gradient to a.

    Raises:
        ValueError: If the maps differ in shape or grid.
    """
    other, _ = _operand(ElementwiseOp.SUB, a, b, logger)
    take_a: np.ndarray = a.data >= other
    return record(
        "maximum",
        [a, b],
        a.like(np.where(take_a, a.data, other)),
        lambda g: (g * take_a, g * ~take_a),
    )


def channel_split(
    x: SphereMap, sizes: Sequence[int], logger: Logger = logging.getLogger(__name__)
) -> List[SphereMap]:
    """
    Splits a map into consecutive channel groups.

    Raises:
        ValueError: If the sizes do not add up to the channel count.
    """
    if sum(sizes) != x.channels or any(size < 1 for size in sizes):
        msg = f"Split sizes {list(sizes)} do not partition {x.channels} channels"
        logger.error(msg)
        raise ValueError(msg)
    parts: List[SphereMap] = []
    start: int = 0
    for size in sizes:
        lo, hi = start, start + size

        def part_vjp(g: np.ndarray, lo: int = lo, hi: int = hi) -> Tuple[np.ndarray]:
            grad: np.ndarray = np.zeros_like(x.data)
            grad[lo:hi] = g
            return (grad,)

        parts.append(record("split", [x], x.like(x.data[lo:hi].copy()), part_vjp))
        start = hi
    return parts
