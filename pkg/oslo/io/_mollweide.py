"""
A module for rendering sphere maps in the Mollweide projection
"""

import logging
from logging import Logger
from dataclasses import dataclass
import math
from typing import Tuple

import numpy as np

from oslo.geometry import TWO_PI, ang2pix_array
from oslo.tensor import SphereMap

SQRT2: float = math.sqrt(2.0)


@dataclass
class MollweideRaster:
    """
    Represents a rendered Mollweide view.

    The ellipse spans the full W x W/2 raster, longitude 0 in the center and
    the north pole at the top.

    Attributes:
        pixels (np.ndarray): (H, W, C) values, 0 outside the ellipse.
        mask (np.ndarray): (H, W) booleans, True inside the ellipse.
    """

    pixels: np.ndarray
    mask: np.ndarray

    def to_rgba(self) -> np.ndarray:
        """Returns (H, W, 4) values with a transparent outside."""
        color: np.ndarray = (
            np.repeat(self.pixels, 3, axis=2)
            if self.pixels.shape[2] == 1
            else self.pixels
        )
        return np.concatenate(
            [color, self.mask[:, :, None].astype(color.dtype)], axis=2
        )


def mollweide_inverse(
    width: int, height: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns (theta, phi, mask) at the raster pixel centers.

    x runs over [-2 sqrt 2, 2 sqrt 2] and y over [-sqrt 2, sqrt 2]; points
    outside x^2 / 8 + y^2 / 2 <= 1 are masked out and get theta = phi = 0.
    """
    x: np.ndarray = ((np.arange(width) + 0.5) / width * 4.0 - 2.0) * SQRT2
    y: np.ndarray = (1.0 - (np.arange(height) + 0.5) / height * 2.0) * SQRT2
    grid_x, grid_y = np.meshgrid(x, y)
    mask: np.ndarray = grid_x**2 / 8.0 + grid_y**2 / 2.0 <= 1.0
    auxiliary: np.ndarray = np.arcsin(np.clip(grid_y / SQRT2, -1.0, 1.0))
    latitude: np.ndarray = np.arcsin(
        np.clip((2.0 * auxiliary + np.sin(2.0 * auxiliary)) / np.pi, -1.0, 1.0)
    )
    cos_auxiliary: np.ndarray = np.cos(auxiliary)
    longitude: np.ndarray = np.divide(
        np.pi * grid_x,
        2.0 * SQRT2 * cos_auxiliary,
        out=np.zeros_like(grid_x),
        where=cos_auxiliary > 0.0,
    )
    theta: np.ndarray = np.where(mask, np.pi / 2.0 - latitude, 0.0)
    phi: np.ndarray = np.where(mask, np.mod(longitude, TWO_PI), 0.0)
    return theta, phi, mask


def mollweide_render(
    sphere_map: SphereMap, width: int, logger: Logger = logging.getLogger(__name__)
) -> MollweideRaster:
    """
    Renders a full-sphere map by nearest-pixel lookup.

    Args:
        sphere_map (SphereMap): A 1- or 3-channel map.
        width (int): The raster width; the height is width // 2.
        logger (Logger): The logger to use for logging.

    Returns:
        MollweideRaster: The rendered view.

    Raises:
        ValueError: If the map is a patch map, has another channel count, or
            the width is below 2.
    """
    if sphere_map.channels not in (1, 3):
        msg = f"Mollweide rendering needs 1 or 3 channels, got {sphere_map.channels}"
        logger.error(msg)
        raise ValueError(msg)
    if sphere_map.patch is not None:
        msg = "Only full-sphere maps can be rendered"
        logger.error(msg)
        raise ValueError(msg)
    if width < 2:
        msg = f"Render width must be at least 2, got {width}"
        logger.error(msg)
        raise ValueError(msg)
    height: int = width // 2
    theta, phi, mask = mollweide_inverse(width, height)
    indices: np.ndarray = ang2pix_array(sphere_map.order, theta, phi)
    pixels: np.ndarray = sphere_map.data[:, indices].transpose(1, 2, 0)
    pixels = np.where(mask[:, :, None], pixels, 0.0)
    logger.debug("Rendered %sx%s Mollweide view", width, height)
    return MollweideRaster(pixels=pixels, mask=mask)
