"""
A module for the Adam optimizer and the plateau learning-rate schedule
"""

import logging
from logging import Logger
from dataclasses import dataclass, field
import math
from typing import List, Sequence

import numpy as np

from oslo.tensor import Parameter


@dataclass
class Adam:
    """
    Adam with bias correction, updating parameters in place.

    Attributes:
        params (List[Parameter]): The parameters to optimize.
        lr (float): The step size.
        beta1 (float): The first-moment decay.
        beta2 (float): The second-moment decay.
        eps (float): The denominator offset.
    """

    params: List[Parameter]
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    steps: int = 0
    _m: List[np.ndarray] = field(default_factory=list, repr=False)
    _v: List[np.ndarray] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        names: List[str] = [p.name for p in self.params]
        if len(set(names)) != len(names):
            msg = "Optimized parameters must have unique names"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)
        self._m = [np.zeros_like(p.values) for p in self.params]
        self._v = [np.zeros_like(p.values) for p in self.params]

    def step(self) -> None:
        """Applies one update from the accumulated gradients."""
        self.steps += 1
        correction1: float = 1.0 - self.beta1**self.steps
        correction2: float = 1.0 - self.beta2**self.steps
        step_size: float = self.lr / correction1
        for param, m, v in zip(self.params, self._m, self._v):
            grad: np.ndarray = param.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            denominator: np.ndarray = np.sqrt(v / correction2) + self.eps
            param.values -= (step_size * m / denominator).astype(param.values.dtype)

    def zero_grad(self) -> None:
        for param in self.params:
            param.zero_grad()


@dataclass
class PlateauSchedule:
    """
    Lowers the learning rate when a monitored loss stops improving.

    A value improves when it is below best * (1 - threshold). After patience
    evaluations without improvement the rate is multiplied by factor.
    """

    optimizer: Adam
    factor: float = 0.316
    patience: int = 10
    threshold: float = 1e-4
    min_lr: float = 0.0
    best: float = math.inf
    stale: int = 0

    def update(
        self, value: float, logger: Logger = logging.getLogger(__name__)
    ) -> float:
        """Feeds one evaluation of the monitored loss; returns the rate."""
        if value < self.best * (1.0 - self.threshold):
            self.best = value
            self.stale = 0
            return self.optimizer.lr
        self.stale += 1
        if self.stale > self.patience:
            lowered: float = max(self.optimizer.lr * self.factor, self.min_lr)
            if lowered < self.optimizer.lr:
                logger.info(
                    "Loss plateaued at %.6g, learning rate %.3g -> %.3g",
                    self.best,
                    self.optimizer.lr,
                    lowered,
                )
                self.optimizer.lr = lowered
            self.stale = 0
        return self.optimizer.lr


def moving_average(values: Sequence[float], window: int) -> np.ndarray:
    """
    Trailing means over window values; the first window - 1 entries average
    what is available.
    """
    data: np.ndarray = np.asarray(values, dtype=np.float64)
    sums: np.ndarray = np.cumsum(np.concatenate([[0.0], data]))
    ends: np.ndarray = np.arange(1, data.size + 1)
    starts: np.ndarray = np.maximum(ends - window, 0)
    return (sums[ends] - sums[starts]) / (ends - starts)
