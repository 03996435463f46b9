"""
A module for generalized divisive normalization and its inverse
"""

import logging
from logging import Logger
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from oslo.tensor import Dtype, Parameter, SphereMap, record

BETA_MIN: float = 1e-6
GAMMA_INIT: float = 0.1


@dataclass
class GdnParams:
    """
    The parameters of a GDN or IGDN layer over C channels.

    Attributes:
        beta (Parameter): (C,) offsets, kept >= BETA_MIN.
        gamma (Parameter): (C, C) channel coupling, kept >= 0.
    """

    beta: Parameter
    gamma: Parameter

    def __post_init__(self) -> None:
        channels: int = self.beta.shape[0]
        if self.beta.values.ndim != 1 or self.gamma.shape != (channels, channels):
            msg = (
                f"GDN needs beta (C,) and gamma (C, C), got {self.beta.shape} "
                + f"and {self.gamma.shape}"
            )
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)
        self.project()

    @property
    def channels(self) -> int:
        return self.beta.shape[0]

    @staticmethod
    def create(name: str, channels: int, dtype: Dtype = Dtype.FLOAT64) -> "GdnParams":
        """Starts from beta = 1 and gamma = 0.1 * identity."""
        return GdnParams(
            beta=Parameter(f"{name}.beta", np.ones(channels, dtype=dtype)),
            gamma=Parameter(
                f"{name}.gamma", (GAMMA_INIT * np.eye(channels)).astype(dtype)
            ),
        )

    def project(self) -> None:
        """Clamps the parameters back into their feasible set."""
        np.maximum(self.beta.values, BETA_MIN, out=self.beta.values)
        np.maximum(self.gamma.values, 0.0, out=self.gamma.values)


def gdn(
    x: SphereMap,
    params: GdnParams,
    inverse: bool = False,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Normalizes every pixel across channels.

    y_c = x_c / sqrt(beta_c + sum_j gamma_cj x_j^2), or x_c times the root
    when inverse is set.

    Raises:
        ValueError: If the map does not have params.channels channels.
    """
    if x.channels != params.channels:
        msg = f"GDN over {params.channels} channels got a {x.channels}-channel map"
        logger.error(msg)
        raise ValueError(msg)
    beta: np.ndarray = params.beta.values
    gamma: np.ndarray = params.gamma.values
    squares: np.ndarray = x.data * x.data
    norm: np.ndarray = beta[:, None] + gamma @ squares
    root: np.ndarray = np.sqrt(norm)
    scale: np.ndarray = root if inverse else 1.0 / root
    result: np.ndarray = (x.data * scale).astype(x.dtype, copy=False)

    def vjp(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # d/dn of n^(1/2) is 0.5 n^(-1/2); of n^(-1/2) it is -0.5 n^(-3/2)
        slope: np.ndarray = 0.5 / root if inverse else -0.5 / (norm * root)
        q: np.ndarray = g * x.data * slope
        grad_x: np.ndarray = g * scale + 2.0 * x.data * (gamma.T @ q)
        return grad_x, q.sum(axis=1), q @ squares.T

    return record(
        "igdn" if inverse else "gdn",
        [x, params.beta, params.gamma],
        x.like(result),
        vjp,
    )
