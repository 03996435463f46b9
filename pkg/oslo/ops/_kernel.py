"""
A module for the learnable weights of one on-the-sphere convolution layer
"""

import logging
from logging import Logger
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from oslo.tensor import Dtype, Parameter

TAPS: int = 9


@dataclass
class Kernel:
    """
    Represents the weights of a 1-hop spherical convolution.

    theta[l, 0, :] weighs the center pixel and theta[l, k, :] the neighbor
    in direction k (1 = SW ... 8 = S) for output channel l.

    Attributes:
        theta (Parameter): The (out_channels, 9, in_channels) weights.
        bias (Optional[Parameter]): The (out_channels,) bias.

    Raises:
        ValueError: If the shapes do not fit together.
    """

    theta: Parameter
    bias: Optional[Parameter] = None

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        shape = self.theta.shape
        if len(shape) != 3 or shape[1] != TAPS or shape[0] < 1 or shape[2] < 1:
            msg = f"Kernel weights must be (out, 9, in), got {shape}"
            logger.error(msg)
            raise ValueError(msg)
        if self.bias is not None and self.bias.shape != (shape[0],):
            msg = f"Kernel bias must be ({shape[0]},), got {self.bias.shape}"
            logger.error(msg)
            raise ValueError(msg)

    @property
    def in_channels(self) -> int:
        return self.theta.shape[2]

    @property
    def out_channels(self) -> int:
        return self.theta.shape[0]

    @staticmethod
    def create(
        name: str,
        in_channels: int,
        out_channels: int,
        bias: bool = True,
        rng: Optional[np.random.Generator] = None,
        dtype: Dtype = Dtype.FLOAT64,
    ) -> "Kernel":
        """
        Creates a kernel with fan-based uniform initialization.

        Weights are drawn from U(-a, a) with a = sqrt(6 / (9 in + 9 out)) and
        the bias starts at 0.
        """
        rng = rng if rng is not None else np.random.default_rng()
        limit: float = math.sqrt(6.0 / (TAPS * in_channels + TAPS * out_channels))
        theta: np.ndarray = rng.uniform(
            -limit, limit, size=(out_channels, TAPS, in_channels)
        ).astype(dtype)
        return Kernel(
            theta=Parameter(f"{name}.theta", theta),
            bias=(
                Parameter(f"{name}.bias", np.zeros(out_channels, dtype=dtype))
                if bias
                else None
            ),
        )

    @staticmethod
    def identity(name: str, channels: int) -> "Kernel":
        """A bias-free kernel passing the center pixel through unchanged."""
        theta: np.ndarray = np.zeros((channels, TAPS, channels))
        theta[:, 0, :] = np.eye(channels)
        return Kernel(theta=Parameter(f"{name}.theta", theta))
