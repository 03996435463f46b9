"""
A module for equirectangular images and their resampling to and from HEALPix
"""

import logging
from logging import Logger
from dataclasses import dataclass
from typing import Optional, Tuple

import cv2
import numpy as np

from oslo.geometry import (
    TWO_PI,
    OrderLike,
    all_pixels,
    ang2vec,
    as_order,
    pix2ang_array,
)
from oslo.io._interpolation import InterpolationMode, sample_erp, sample_healpix
from oslo.tensor import SphereMap


@dataclass
class ErpImage:
    """
    Represents an equirectangular (longitude-latitude) image.

    Row v covers colatitudes around pi (v + 0.5) / H from north to south and
    column u longitudes around 2 pi (u + 0.5) / W eastward from 0.

    Attributes:
        pixels (np.ndarray): (H, W, C) samples, nominally in [0, 1].
        strict_aspect (bool): Whether W = 2H is enforced.

    Raises:
        ValueError: If the shape is invalid or the values are not finite.
    """

    pixels: np.ndarray
    strict_aspect: bool = True

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        pixels: np.ndarray = np.asarray(self.pixels)
        if pixels.dtype not in (np.float32, np.float64):
            pixels = pixels.astype(np.float64)
        if pixels.ndim == 2:
            pixels = pixels[:, :, None]
        if pixels.ndim != 3:
            msg = f"ERP pixels must be (H, W, C), got shape {pixels.shape}"
            logger.error(msg)
            raise ValueError(msg)
        height, width = pixels.shape[:2]
        if width < 2 or height < 1:
            msg = f"ERP images need W >= 2 and H >= 1, got {width}x{height}"
            logger.error(msg)
            raise ValueError(msg)
        if self.strict_aspect and width != 2 * height:
            msg = f"ERP width must be twice its height, got {width}x{height}"
            logger.error(msg)
            raise ValueError(msg)
        if not np.isfinite(pixels).all():
            msg = "ERP pixels must be finite"
            logger.error(msg)
            raise ValueError(msg)
        self.pixels = pixels

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


def erp_angles(height: int, width: int) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the (H,) colatitudes and (W,) longitudes of pixel centers."""
    theta: np.ndarray = np.pi * (np.arange(height) + 0.5) / height
    phi: np.ndarray = TWO_PI * (np.arange(width) + 0.5) / width
    return theta, phi


def erp_to_healpix(
    image: ErpImage,
    order: OrderLike,
    mode: InterpolationMode = InterpolationMode.BILINEAR,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Resamples an ERP image onto every pixel center of a HEALPix order.

    Args:
        image (ErpImage): The source image.
        order (Order | int): The target order.
        mode (InterpolationMode): bilinear (default) or nearest.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: A (C, 12 * 4^order) map.

    Example:
        >>> erp_to_healpix(ErpImage(np.ones((8, 16, 3))), 2).data.shape
        (3, 192)
    """
    logger.debug(__name__)
    order = as_order(order)
    theta, phi = pix2ang_array(order, all_pixels(order))
    samples: np.ndarray = sample_erp(image.pixels, theta, phi, mode, logger=logger)
    logger.info(
        "Resampled %sx%s ERP to order %s", image.width, image.height, order.value
    )
    return SphereMap(np.ascontiguousarray(samples.T), order)


def healpix_to_erp(
    sphere_map: SphereMap,
    width: int,
    height: Optional[int] = None,
    mode: InterpolationMode = InterpolationMode.INVERSE_DISTANCE,
    logger: Logger = logging.getLogger(__name__),
) -> ErpImage:
    """
    Resamples a full-sphere map onto the pixel centers of a W x H raster.

    Args:
        sphere_map (SphereMap): The source map.
        width (int): The raster width.
        height (Optional[int]): The raster height, width // 2 by default.
        mode (InterpolationMode): inverse_distance (default) or nearest.
        logger (Logger): The logger to use for logging.

    Returns:
        ErpImage: The (H, W, C) image.

    Raises:
        ValueError: If the map is a patch map or the size is invalid.
    """
    logger.debug(__name__)
    if sphere_map.patch is not None:
        msg = "Only full-sphere maps can be projected to ERP"
        logger.error(msg)
        raise ValueError(msg)
    height = width // 2 if height is None else height
    if width < 2 or height < 1:
        msg = f"ERP images need W >= 2 and H >= 1, got {width}x{height}"
        logger.error(msg)
        raise ValueError(msg)
    theta, phi = erp_angles(height, width)
    grid_theta, grid_phi = np.meshgrid(theta, phi, indexing="ij")
    samples: np.ndarray = sample_healpix(
        sphere_map.data,
        sphere_map.order,
        ang2vec(grid_theta.ravel(), grid_phi.ravel()),
        mode,
        logger=logger,
    )
    logger.info(
        "Resampled order %s to %sx%s ERP", sphere_map.order.value, width, height
    )
    return ErpImage(
        samples.reshape(height, width, sphere_map.channels),
        strict_aspect=width == 2 * height,
    )


def downsample_erp(
    image: ErpImage,
    width: int,
    height: Optional[int] = None,
    logger: Logger = logging.getLogger(__name__),
) -> ErpImage:
    """
    Shrinks an ERP image by area averaging.

    Raises:
        ValueError: If the target is larger than the source in either axis.
    """
    height = width // 2 if height is None else height
    if width > image.width or height > image.height or width < 2 or height < 1:
        msg = (
            f"Cannot area-downsample {image.width}x{image.height} "
            + f"to {width}x{height}"
        )
        logger.error(msg)
        raise ValueError(msg)
    resized: np.ndarray = cv2.resize(
        np.ascontiguousarray(image.pixels),
        (width, height),
        interpolation=cv2.INTER_AREA,
    )
    return ErpImage(resized, strict_aspect=width == 2 * height)
