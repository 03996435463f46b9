"""
A module for the Bjontegaard delta rate between two rate-distortion curves
"""

import logging
from logging import Logger
from dataclasses import dataclass
import math
from typing import Any, List, Sequence, Tuple

import numpy as np
from scipy import interpolate

MIN_POINTS: int = 4
INTEGRATION_SAMPLES: int = 100


@dataclass
class RdCurve:
    """
    Represents the rate-distortion points of one codec.

    Attributes:
        rates (np.ndarray): Positive rates (bytes or bits per pixel), strictly
            increasing.
        qualities (np.ndarray): Qualities in dB, distinct and finite.

    Raises:
        ValueError: On fewer than 4 points, mismatched lengths, non-positive or
            unordered rates, or repeated or non-finite qualities.
    """

    rates: np.ndarray
    qualities: np.ndarray

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        self.rates = np.asarray(self.rates, dtype=np.float64)
        self.qualities = np.asarray(self.qualities, dtype=np.float64)
        if self.rates.ndim != 1 or self.rates.shape != self.qualities.shape:
            msg = (
                "RD curve needs equal-length 1-D rates and qualities, got "
                + f"{self.rates.shape} and {self.qualities.shape}"
            )
            logger.error(msg)
            raise ValueError(msg)
        if self.rates.size < MIN_POINTS:
            msg = f"RD curve needs at least {MIN_POINTS} points, got {self.rates.size}"
            logger.error(msg)
            raise ValueError(msg)
        if (self.rates <= 0).any() or (np.diff(self.rates) <= 0).any():
            msg = "RD curve rates must be positive and strictly increasing"
            logger.error(msg)
            raise ValueError(msg)
        if not np.isfinite(self.qualities).all():
            msg = "RD curve qualities must be finite"
            logger.error(msg)
            raise ValueError(msg)
        if np.unique(self.qualities).size != self.qualities.size:
            msg = "RD curve qualities must be distinct"
            logger.error(msg)
            raise ValueError(msg)

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.rates.tolist(), self.qualities.tolist()))

    @staticmethod
    def from_json(data: Sequence[Any]) -> "RdCurve":
        """
        Loads a curve from a JSON array of [rate, quality] pairs or of
        {"rate": ..., "quality": ...} objects.

        Example:
            >>> RdCurve.from_json([[1, 30], [2, 32], [4, 34], [8, 36]]).rates
            array([1., 2., 4., 8.])
        """
        pairs: List[Tuple[float, float]] = [
            (float(p["rate"]), float(p["quality"]))
            if isinstance(p, dict)
            else (float(p[0]), float(p[1]))
            for p in data
        ]
        pairs.sort()
        return RdCurve(
            rates=np.array([p[0] for p in pairs]),
            qualities=np.array([p[1] for p in pairs]),
        )

    def to_json(self) -> List[List[float]]:
        return [[rate, quality] for rate, quality in self.points]


def bd_rate(
    reference: RdCurve,
    test: RdCurve,
    logger: Logger = logging.getLogger(__name__),
) -> float:
    """
    Returns the average rate difference of test against reference at equal
    quality, in percent. Negative values are savings.

    Log-rates are interpolated over quality with monotone piecewise cubics and
    integrated with the trapezoid rule over the overlapping quality range.

    Args:
        reference (RdCurve): The anchor codec.
        test (RdCurve): The codec under test.
        logger (Logger): The logger to use for logging.

    Returns:
        float: The BD-rate in percent.

    Raises:
        ValueError: If the quality ranges do not overlap.

    Example:
        >>> anchor = RdCurve([1.0, 2.0, 4.0, 8.0, 16.0], [25.0, 26.0, 27.0, 28.0, 29.0])
        >>> round(bd_rate(anchor, RdCurve(anchor.rates * 0.75, anchor.qualities)), 6)
        -25.0
    """
    low: float = max(reference.qualities.min(), test.qualities.min())
    high: float = min(reference.qualities.max(), test.qualities.max())
    if high <= low:
        msg = (
            f"Quality ranges do not overlap: [{reference.qualities.min()}, "
            + f"{reference.qualities.max()}] and [{test.qualities.min()}, "
            + f"{test.qualities.max()}]"
        )
        logger.error(msg)
        raise ValueError(msg)
    samples, step = np.linspace(low, high, num=INTEGRATION_SAMPLES, retstep=True)

    def integral(curve: RdCurve) -> float:
        order: np.ndarray = np.argsort(curve.qualities)
        log_rates: np.ndarray = interpolate.pchip_interpolate(
            curve.qualities[order], np.log(curve.rates[order]), samples
        )
        return float(np.trapezoid(log_rates, dx=step))

    average: float = (integral(test) - integral(reference)) / (high - low)
    result: float = (math.exp(average) - 1.0) * 100.0
    logger.debug("BD-rate over [%.3f, %.3f] dB: %.4f%%", low, high, result)
    return result
