"""
A module for the values flowing through the operator library: multi-channel
maps on a HEALPix grid, learnable parameters and scalars
"""

from __future__ import annotations

import logging
from logging import Logger
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from oslo.geometry import Order, OrderLike, as_order
from oslo.tensor._tape import Tape, check_finite, is_debug

if TYPE_CHECKING:
    from oslo.ops import PatchSpec

logger: Logger = logging.getLogger(__name__)


class Dtype(StrEnum):
    """Supported scalar precisions."""

    FLOAT32 = "float32"
    FLOAT64 = "float64"


SUPPORTED_DTYPES: Tuple[np.dtype, ...] = (np.dtype(np.float32), np.dtype(np.float64))


@dataclass(eq=False)
class SphereMap:
    """
    Represents a D-channel signal on a HEALPix grid.

    data[d, i] is feature d at nested pixel i. A map may cover the whole
    sphere, or only the pixels of a patch, in which case column j is the j-th
    descendant of the patch root.

    Attributes:
        data (np.ndarray): A (channels, pixels) float32 or float64 array.
        order (Order): The resolution of the grid.
        patch (Optional[PatchSpec]): The patch covered, None for the sphere.
        tape (Optional[Tape]): The tape the map was produced under.
        grad (Optional[np.ndarray]): d(loss)/d(data) after a backward pass.

    Raises:
        ValueError: If the array shape, dtype or values are invalid.
    """

    data: np.ndarray
    order: Order
    patch: Optional["PatchSpec"] = None
    tape: Optional[Tape] = field(default=None, repr=False)
    grad: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.order = as_order(self.order)
        data: np.ndarray = np.asarray(self.data)
        if data.dtype not in SUPPORTED_DTYPES:
            if not np.issubdtype(data.dtype, np.number):
                msg = f"Map data must be real, got {data.dtype}"
                logger.error(msg)
                raise ValueError(msg)
            data = data.astype(np.float64)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2 or data.shape[0] < 1:
            msg = f"Map data must be (channels, pixels), got shape {data.shape}"
            logger.error(msg)
            raise ValueError(msg)
        expected: int = self.expected_npix(self.order, self.patch)
        if data.shape[1] != expected:
            msg = (
                f"Map at order {self.order.value} needs {expected} pixels, "
                + f"got {data.shape[1]}"
            )
            logger.error(msg)
            raise ValueError(msg)
        check_finite("SphereMap", data)
        self.data = data

    @staticmethod
    def expected_npix(order: Order, patch: Optional["PatchSpec"]) -> int:
        if patch is None:
            return order.npix
        if patch.order != order:
            msg = f"Patch is at order {patch.order.value}, map at {order.value}"
            logger.error(msg)
            raise ValueError(msg)
        return patch.npix

    @classmethod
    def from_op(
        cls, data: np.ndarray, order: OrderLike, patch: Optional["PatchSpec"] = None
    ) -> "SphereMap":
        """
        Wraps an op result without the public validation.

        Shapes are guaranteed by the op; finiteness is only checked in debug
        mode, by the tape.
        """
        value: SphereMap = cls.__new__(cls)
        value.data = data
        value.order = as_order(order)
        value.patch = patch
        value.tape = None
        value.grad = None
        return value

    @classmethod
    def zeros(
        cls,
        order: OrderLike,
        channels: int,
        dtype: Dtype = Dtype.FLOAT64,
        patch: Optional["PatchSpec"] = None,
    ) -> "SphereMap":
        order = as_order(order)
        return cls(
            np.zeros((channels, cls.expected_npix(order, patch)), dtype=dtype),
            order,
            patch=patch,
        )

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def npix(self) -> int:
        return self.data.shape[1]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def like(self, data: np.ndarray) -> "SphereMap":
        """A map on the same grid holding other data."""
        return SphereMap.from_op(data, self.order, self.patch)

    def same_grid(self, other: "SphereMap") -> bool:
        return self.order == other.order and self.patch == other.patch

    def detach(self) -> "SphereMap":
        """A copy that is not connected to any tape."""
        return SphereMap.from_op(self.data.copy(), self.order, self.patch)


@dataclass(eq=False)
class Parameter:
    """
    Represents a learnable array.

    The shape is fixed at creation. Optimizers update values in place and
    zero grad between steps.

    Attributes:
        name (str): A unique name within the model.
        values (np.ndarray): The current values.
        grad (np.ndarray): The accumulated gradient.
    """

    name: str
    values: np.ndarray
    grad: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self.name:
            msg = "Parameter name is required"
            logger.error(msg)
            raise ValueError(msg)
        values: np.ndarray = np.array(self.values, copy=True)
        if values.dtype not in SUPPORTED_DTYPES:
            values = values.astype(np.float64)
        check_finite(f"Parameter {self.name}", values)
        self.values = values
        self.grad = np.zeros_like(values)

    @property
    def data(self) -> np.ndarray:
        return self.values

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    def assign(self, values: np.ndarray) -> None:
        """Overwrites the values in place, keeping shape and dtype."""
        values = np.asarray(values)
        if values.shape != self.values.shape:
            msg = (
                f"Parameter {self.name} has shape {self.values.shape}, "
                + f"got {values.shape}"
            )
            logger.error(msg)
            raise ValueError(msg)
        self.values[...] = values


@dataclass(eq=False)
class Scalar:
    """
    Represents a 0-d value, such as a loss.

    Attributes:
        data (np.ndarray): A 0-d array.
        tape (Optional[Tape]): The tape the value was produced under.
        grad (Optional[np.ndarray]): d(loss)/d(value) after a backward pass.
    """

    data: np.ndarray
    tape: Optional[Tape] = field(default=None, repr=False)
    grad: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data)
        if self.data.ndim != 0:
            msg = f"Scalar data must be 0-d, got shape {self.data.shape}"
            logger.error(msg)
            raise ValueError(msg)
        if is_debug():
            check_finite("Scalar", self.data)

    def __float__(self) -> float:
        return float(self.data)

    def item(self) -> float:
        return float(self.data)
