"""
A module for reading and writing 8-bit and 16-bit PNG and PPM images
"""

import logging
from logging import Logger
from pathlib import Path
from typing import Tuple, Union

import cv2
import numpy as np

from oslo.io._erp import ErpImage

SUPPORTED_BIT_DEPTHS: Tuple[int, ...] = (8, 16)


def _to_rgb(raw: np.ndarray) -> np.ndarray:
    if raw.ndim == 2:
        return raw[:, :, None]
    if raw.shape[2] == 4:
        return cv2.cvtColor(raw, cv2.COLOR_BGRA2RGB)
    return cv2.cvtColor(raw, cv2.COLOR_BGR2RGB)


def read_image(
    path: Union[str, Path],
    strict_aspect: bool = True,
    logger: Logger = logging.getLogger(__name__),
) -> ErpImage:
    """
    Reads a PNG or PPM file into [0, 1] values.

    8-bit values are divided by 255 and 16-bit values by 65535. Color images
    come back as RGB; an alpha channel is dropped.

    Args:
        path (str | Path): The image file.
        strict_aspect (bool): Whether to require W = 2H.
        logger (Logger): The logger to use for logging.

    Returns:
        ErpImage: The image.

    Raises:
        OSError: If the file is missing or cannot be decoded.
        ValueError: If the bit depth is not 8 or 16.
    """
    path = Path(path)
    if not path.is_file():
        msg = f"No image at {path}"
        logger.error(msg)
        raise FileNotFoundError(msg)
    raw: np.ndarray = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        msg = f"Could not decode image {path}"
        logger.error(msg)
        raise OSError(msg)
    if raw.dtype == np.uint8:
        peak: float = 255.0
    elif raw.dtype == np.uint16:
        peak = 65535.0
    else:
        msg = f"Unsupported image sample type {raw.dtype} in {path}"
        logger.error(msg)
        raise ValueError(msg)
    logger.debug("Read %s (%s, %s)", path, raw.shape, raw.dtype)
    return ErpImage(_to_rgb(raw).astype(np.float64) / peak, strict_aspect=strict_aspect)


def write_image(
    path: Union[str, Path],
    pixels: Union[ErpImage, np.ndarray],
    bit_depth: int = 8,
    logger: Logger = logging.getLogger(__name__),
) -> None:
    """
    Writes [0, 1] values as a PNG or PPM file.

    Values are clipped to [0, 1] and rounded to the nearest code. One, three
    or four (RGBA) channels are accepted.

    Raises:
        ValueError: On an unsupported bit depth or channel count.
        OSError: If the encoder refuses the file.
    """
    if bit_depth not in SUPPORTED_BIT_DEPTHS:
        msg = f"Bit depth must be 8 or 16, got {bit_depth}"
        logger.error(msg)
        raise ValueError(msg)
    values: np.ndarray = pixels.pixels if isinstance(pixels, ErpImage) else pixels
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 2:
        values = values[:, :, None]
    channels: int = values.shape[2]
    if channels not in (1, 3, 4):
        msg = f"Images need 1, 3 or 4 channels, got {channels}"
        logger.error(msg)
        raise ValueError(msg)
    peak: int = (1 << bit_depth) - 1
    codes: np.ndarray = np.rint(np.clip(values, 0.0, 1.0) * peak).astype(
        np.uint8 if bit_depth == 8 else np.uint16
    )
    if channels == 3:
        codes = cv2.cvtColor(codes, cv2.COLOR_RGB2BGR)
    elif channels == 4:
        codes = cv2.cvtColor(codes, cv2.COLOR_RGBA2BGRA)
    else:
        codes = codes[:, :, 0]
    try:
        written: bool = cv2.imwrite(str(path), codes)
    except cv2.error as error:
        msg = f"Could not write image {path}: {error}"
        logger.error(msg)
        raise OSError(msg) from error
    if not written:
        msg = f"Could not write image {path}"
        logger.error(msg)
        raise OSError(msg)
    logger.info("Wrote %s-bit image %s", bit_depth, path)
