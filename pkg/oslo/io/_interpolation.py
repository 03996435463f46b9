"""
A module for sampling sphere signals at arbitrary directions: bilinear or
nearest on equirectangular rasters, inverse-distance or nearest on HEALPix
"""

import logging
from logging import Logger
from enum import StrEnum
from typing import List, Tuple

import numpy as np

from oslo.geometry import (
    MISSING,
    TWO_PI,
    OrderLike,
    as_order,
    neighbor_table,
    pix2vec_array,
    vec2pix_array,
)
from oslo.parallel import map_chunks

NEAREST_COUNT: int = 4
COINCIDENT: float = 1e-12


class InterpolationMode(StrEnum):
    BILINEAR = "bilinear"
    INVERSE_DISTANCE = "inverse_distance"
    NEAREST = "nearest"


def erp_coordinates(
    theta: np.ndarray, phi: np.ndarray, height: int, width: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns fractional (u, v) raster coordinates of directions.

    Integer coordinates land on pixel centers: u = W phi / (2 pi) - 0.5 and
    v = H theta / pi - 0.5.
    """
    u: np.ndarray = np.asarray(phi, dtype=np.float64) * (width / TWO_PI) - 0.5
    v: np.ndarray = np.asarray(theta, dtype=np.float64) * (height / np.pi) - 0.5
    return u, v


def _bilinear(pixels: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    height, width = pixels.shape[:2]
    u0: np.ndarray = np.floor(u)
    v0: np.ndarray = np.floor(v)
    fu: np.ndarray = (u - u0)[:, None]
    fv: np.ndarray = (v - v0)[:, None]
    # wrap in longitude, clamp in latitude
    left: np.ndarray = np.mod(u0.astype(np.int64), width)
    right: np.ndarray = np.mod(left + 1, width)
    top: np.ndarray = np.clip(v0.astype(np.int64), 0, height - 1)
    bottom: np.ndarray = np.clip(v0.astype(np.int64) + 1, 0, height - 1)
    upper: np.ndarray = (1.0 - fu) * pixels[top, left] + fu * pixels[top, right]
    lower: np.ndarray = (1.0 - fu) * pixels[bottom, left] + fu * pixels[bottom, right]
    return (1.0 - fv) * upper + fv * lower


def sample_erp(
    pixels: np.ndarray,
    theta: np.ndarray,
    phi: np.ndarray,
    mode: InterpolationMode = InterpolationMode.BILINEAR,
    logger: Logger = logging.getLogger(__name__),
) -> np.ndarray:
    """
    Samples an (H, W, C) equirectangular raster at (theta, phi) directions.

    Args:
        pixels (np.ndarray): The raster, rows from north to south.
        theta (np.ndarray): Colatitudes of the n samples.
        phi (np.ndarray): Longitudes of the n samples.
        mode (InterpolationMode): bilinear or nearest.
        logger (Logger): The logger to use for logging.

    Returns:
        np.ndarray: (n, C) samples.

    Raises:
        ValueError: If the mode is not available for rasters.
    """
    mode = InterpolationMode(mode)
    if mode == InterpolationMode.INVERSE_DISTANCE:
        msg = "Inverse-distance sampling applies to HEALPix maps only"
        logger.error(msg)
        raise ValueError(msg)
    height, width = pixels.shape[:2]
    theta = np.ravel(theta)
    phi = np.ravel(phi)

    def chunk(window: slice) -> np.ndarray:
        u, v = erp_coordinates(theta[window], phi[window], height, width)
        if mode == InterpolationMode.NEAREST:
            columns: np.ndarray = np.mod(np.rint(u).astype(np.int64), width)
            rows: np.ndarray = np.clip(np.rint(v).astype(np.int64), 0, height - 1)
            return pixels[rows, columns]
        return _bilinear(pixels, u, v)

    parts: List[np.ndarray] = map_chunks(chunk, theta.shape[0])
    if not parts:
        return np.zeros((0, pixels.shape[2]), dtype=pixels.dtype)
    return np.concatenate(parts, axis=0)


def _candidates(order_value: int, nearest: np.ndarray) -> np.ndarray:
    if order_value == 0:
        return np.broadcast_to(np.arange(12, dtype=np.int64), (nearest.shape[0], 12))
    return np.concatenate(
        [nearest[:, None], neighbor_table(order_value)[nearest]], axis=1
    )


def _inverse_distance(
    data: np.ndarray, order_value: int, vectors: np.ndarray
) -> np.ndarray:
    nearest: np.ndarray = vec2pix_array(order_value, vectors)
    candidates: np.ndarray = _candidates(order_value, nearest)
    missing: np.ndarray = candidates == MISSING
    safe: np.ndarray = np.where(missing, nearest[:, None], candidates)
    centers: np.ndarray = pix2vec_array(order_value, safe.ravel()).reshape(
        safe.shape + (3,)
    )
    cosines: np.ndarray = np.einsum("nkd,nd->nk", centers, vectors)
    sines: np.ndarray = np.linalg.norm(np.cross(centers, vectors[:, None, :]), axis=-1)
    distances: np.ndarray = np.arctan2(sines, cosines)
    distances[missing] = np.inf

    closest: np.ndarray = np.argpartition(distances, NEAREST_COUNT - 1, axis=1)[
        :, :NEAREST_COUNT
    ]
    chosen: np.ndarray = np.take_along_axis(safe, closest, axis=1)
    chosen_distances: np.ndarray = np.take_along_axis(distances, closest, axis=1)
    coincident: np.ndarray = chosen_distances < COINCIDENT
    weights: np.ndarray = np.where(
        coincident.any(axis=1, keepdims=True),
        coincident.astype(np.float64),
        1.0 / np.maximum(chosen_distances, COINCIDENT),
    )
    weights /= weights.sum(axis=1, keepdims=True)
    return np.einsum("cnk,nk->nc", data[:, chosen], weights)


def sample_healpix(
    data: np.ndarray,
    order: OrderLike,
    vectors: np.ndarray,
    mode: InterpolationMode = InterpolationMode.INVERSE_DISTANCE,
    logger: Logger = logging.getLogger(__name__),
) -> np.ndarray:
    """
    Samples a full-sphere (C, P) nested map at unit vectors.

    Inverse-distance mode takes the 4 pixel centers closest to each direction
    among the containing pixel and its 8 neighbors, weighted by the inverse
    geodesic distance. A direction that hits a center exactly returns that
    pixel's value.

    Args:
        data (np.ndarray): The (C, P) map values.
        order (Order | int): The order of the map.
        vectors (np.ndarray): (n, 3) unit vectors.
        mode (InterpolationMode): inverse_distance or nearest.
        logger (Logger): The logger to use for logging.

    Returns:
        np.ndarray: (n, C) samples.

    Raises:
        ValueError: If the mode is not available for HEALPix maps.
    """
    mode = InterpolationMode(mode)
    if mode == InterpolationMode.BILINEAR:
        msg = "Bilinear sampling applies to equirectangular rasters only"
        logger.error(msg)
        raise ValueError(msg)
    order = as_order(order)
    vectors = np.asarray(vectors, dtype=np.float64).reshape(-1, 3)

    def chunk(window: slice) -> np.ndarray:
        part: np.ndarray = vectors[window]
        if mode == InterpolationMode.NEAREST:
            return data[:, vec2pix_array(order, part)].T
        return _inverse_distance(data, order.value, part)

    parts: List[np.ndarray] = map_chunks(chunk, vectors.shape[0])
    if not parts:
        return np.zeros((0, data.shape[0]), dtype=data.dtype)
    return np.concatenate(parts, axis=0)
