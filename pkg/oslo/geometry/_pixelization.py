"""
A module for converting between nested HEALPix indices, face-local
coordinates and positions on the unit sphere
"""

import logging
from logging import Logger
from dataclasses import dataclass
import math
from typing import Tuple

import numpy as np

from oslo.geometry._pixel import Order, OrderLike, PixelId, as_order

TWO_PI: float = 2.0 * math.pi
HALF_PI: float = 0.5 * math.pi

# Ring number of the northernmost corner of each base face, in units of N_side
JRLL: np.ndarray = np.array([2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4], dtype=np.int64)
# Longitude index of each base face center, in units of pi/4
JPLL: np.ndarray = np.array([1, 3, 5, 7, 0, 2, 4, 6, 1, 3, 5, 7], dtype=np.int64)


@dataclass(frozen=True)
class SphericalPoint:
    """
    Represents a point on the unit sphere.

    Attributes:
        theta (float): Colatitude in radians, in [0, pi].
        phi (float): Longitude in radians, wrapped into [0, 2*pi).

    Raises:
        ValueError: If theta is outside [0, pi] or either angle is not finite.
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            msg = "Angles must be finite"
            logger.error(msg)
            raise ValueError(msg)
        if not 0.0 <= self.theta <= math.pi:
            msg = f"Colatitude {self.theta} outside [0, pi]"
            logger.error(msg)
            raise ValueError(msg)
        phi: float = math.fmod(self.phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(phi))

    def to_vector(self) -> np.ndarray:
        """Returns the unit 3-vector of this point."""
        return ang2vec(np.array([self.theta]), np.array([self.phi]))[0]


def _spread_bits(values: np.ndarray) -> np.ndarray:
    values = values.astype(np.int64)
    values = (values | (values << 8)) & 0x00FF00FF
    values = (values | (values << 4)) & 0x0F0F0F0F
    values = (values | (values << 2)) & 0x33333333
    values = (values | (values << 1)) & 0x55555555
    return values


def _compress_bits(values: np.ndarray) -> np.ndarray:
    values = values.astype(np.int64) & 0x55555555
    values = (values | (values >> 1)) & 0x33333333
    values = (values | (values >> 2)) & 0x0F0F0F0F
    values = (values | (values >> 4)) & 0x00FF00FF
    values = (values | (values >> 8)) & 0x0000FFFF
    return values


def nest2xyf(
    order: OrderLike, indices: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Splits nested indices into face-local (x, y) coordinates and base face.

    x grows towards the north-east edge of the face, y towards the north-west
    edge. They are the even and odd bits of the in-face index.

    Args:
        order (Order | int): The resolution of the indices.
        indices (np.ndarray): Nested pixel indices.

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: ix, iy and face arrays.
    """
    order = as_order(order)
    indices = np.asarray(indices, dtype=np.int64)
    face: np.ndarray = indices >> (2 * order.value)
    in_face: np.ndarray = indices & ((1 << (2 * order.value)) - 1)
    return _compress_bits(in_face), _compress_bits(in_face >> 1), face


def xyf2nest(
    order: OrderLike, ix: np.ndarray, iy: np.ndarray, face: np.ndarray
) -> np.ndarray:
    """Inverse of nest2xyf."""
    order = as_order(order)
    face = np.asarray(face, dtype=np.int64)
    return (
        (face << (2 * order.value))
        + _spread_bits(np.asarray(ix))
        + (_spread_bits(np.asarray(iy)) << 1)
    )


def pix2zphi(
    order: OrderLike, indices: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns z = cos(theta), sin(theta) and phi of nested pixel centers.

    sin(theta) is computed from 1 - |z| directly in the polar caps so that
    colatitudes near the poles keep full precision.
    """
    order = as_order(order)
    nside: int = order.nside
    ix, iy, face = nest2xyf(order, indices)
    fact2: float = 4.0 / order.npix
    fact1: float = (nside << 1) * fact2

    jr: np.ndarray = (JRLL[face] << order.value) - ix - iy - 1
    north: np.ndarray = jr < nside
    south: np.ndarray = jr > 3 * nside
    polar: np.ndarray = north | south

    nr: np.ndarray = np.where(north, jr, np.where(south, 4 * nside - jr, nside))
    one_minus_abs_z: np.ndarray = nr.astype(np.float64) ** 2 * fact2
    z_polar: np.ndarray = np.where(north, 1.0 - one_minus_abs_z, one_minus_abs_z - 1.0)
    z_equator: np.ndarray = (2 * nside - jr) * fact1
    z: np.ndarray = np.where(polar, z_polar, z_equator)
    sin_theta: np.ndarray = np.where(
        polar,
        np.sqrt(one_minus_abs_z * (2.0 - one_minus_abs_z)),
        np.sqrt(np.maximum(0.0, (1.0 - z_equator) * (1.0 + z_equator))),
    )

    kshift: np.ndarray = np.where(polar, 0, (jr - nside) & 1)
    jp: np.ndarray = (JPLL[face] * nr + ix - iy + 1 + kshift) // 2
    jp = np.where(jp > 4 * nside, jp - 4 * nside, jp)
    jp = np.where(jp < 1, jp + 4 * nside, jp)
    phi: np.ndarray = (jp - (kshift + 1) * 0.5) * (HALF_PI / nr)
    return z, sin_theta, phi


def pix2ang_array(
    order: OrderLike, indices: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (theta, phi) arrays of nested pixel centers."""
    z, sin_theta, phi = pix2zphi(order, indices)
    return np.arctan2(sin_theta, z), phi


def pix2vec_array(order: OrderLike, indices: np.ndarray) -> np.ndarray:
    """Returns the (n, 3) unit vectors of nested pixel centers."""
    z, sin_theta, phi = pix2zphi(order, indices)
    return np.stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), z], axis=-1)


def ang2vec(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Returns the (n, 3) unit vectors of (theta, phi) arrays."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    sin_theta: np.ndarray = np.sin(theta)
    return np.stack(
        [sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)], axis=-1
    )


def vec2ang(vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (theta, phi) of (n, 3) vectors; phi is wrapped into [0, 2*pi)."""
    vectors = np.asarray(vectors, dtype=np.float64)
    theta: np.ndarray = np.arctan2(
        np.hypot(vectors[..., 0], vectors[..., 1]), vectors[..., 2]
    )
    phi: np.ndarray = np.mod(np.arctan2(vectors[..., 1], vectors[..., 0]), TWO_PI)
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    return theta, phi


def ang2pix_array(
    order: OrderLike, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """
    Returns the nested indices of the pixels containing (theta, phi) points.

    Args:
        order (Order | int): The target resolution.
        theta (np.ndarray): Colatitudes in [0, pi].
        phi (np.ndarray): Longitudes in radians, any range.

    Returns:
        np.ndarray: int64 nested pixel indices.
    """
    order = as_order(order)
    nside: int = order.nside
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    z: np.ndarray = np.cos(theta)
    za: np.ndarray = np.abs(z)
    tt: np.ndarray = np.mod(phi * (1.0 / HALF_PI), 4.0)
    tt = np.where(tt >= 4.0, tt - 4.0, tt)

    # Equatorial belt
    temp1: np.ndarray = nside * (0.5 + tt)
    temp2: np.ndarray = nside * (z * 0.75)
    jp_eq: np.ndarray = (temp1 - temp2).astype(np.int64)
    jm_eq: np.ndarray = (temp1 + temp2).astype(np.int64)
    ifp: np.ndarray = jp_eq >> order.value
    ifm: np.ndarray = jm_eq >> order.value
    face_eq: np.ndarray = np.where(
        ifp == ifm, ifp | 4, np.where(ifp < ifm, ifp, ifm + 8)
    )
    ix_eq: np.ndarray = jm_eq & (nside - 1)
    iy_eq: np.ndarray = nside - (jp_eq & (nside - 1)) - 1

    # Polar caps; 1 - |z| from the half angle keeps precision near the poles
    one_minus_za: np.ndarray = np.where(
        z >= 0.0, 2.0 * np.sin(0.5 * theta) ** 2, 2.0 * np.cos(0.5 * theta) ** 2
    )
    ntt: np.ndarray = np.minimum(3, tt.astype(np.int64))
    tp: np.ndarray = tt - ntt
    tmp: np.ndarray = nside * np.sqrt(3.0 * one_minus_za)
    jp_pol: np.ndarray = np.minimum((tp * tmp).astype(np.int64), nside - 1)
    jm_pol: np.ndarray = np.minimum(((1.0 - tp) * tmp).astype(np.int64), nside - 1)
    north: np.ndarray = z > 0.0
    face_pol: np.ndarray = np.where(north, ntt, ntt + 8)
    ix_pol: np.ndarray = np.where(north, nside - jm_pol - 1, jp_pol)
    iy_pol: np.ndarray = np.where(north, nside - jp_pol - 1, jm_pol)

    equatorial: np.ndarray = za <= 2.0 / 3.0
    return xyf2nest(
        order,
        np.where(equatorial, ix_eq, ix_pol),
        np.where(equatorial, iy_eq, iy_pol),
        np.where(equatorial, face_eq, face_pol),
    )


def vec2pix_array(order: OrderLike, vectors: np.ndarray) -> np.ndarray:
    """Returns the nested indices of the pixels containing (n, 3) vectors."""
    theta, phi = vec2ang(vectors)
    return ang2pix_array(order, theta, phi)


def pix2ang(pixel: PixelId) -> SphericalPoint:
    """
    Returns the center of a nested pixel.

    Example:
        >>> pix2ang(PixelId(0, Order(0)))
        SphericalPoint(theta=0.8410686705679303, phi=0.7853981633974483)
    """
    theta, phi = pix2ang_array(pixel.order, np.array([pixel.index]))
    return SphericalPoint(float(theta[0]), float(phi[0]))


def pix2vec(pixel: PixelId) -> np.ndarray:
    """Returns the unit 3-vector of a nested pixel center."""
    return pix2vec_array(pixel.order, np.array([pixel.index]))[0]


def ang2pix(
    point: SphericalPoint,
    order: OrderLike,
    logger: Logger = logging.getLogger(__name__),
) -> PixelId:
    """
    Returns the nested pixel containing a point.

    Args:
        point (SphericalPoint): The point on the sphere.
        order (Order | int): The target resolution.
        logger (Logger): The logger to use for logging.

    Returns:
        PixelId: The containing pixel.

    Raises:
        ValueError: If point is not a SphericalPoint.
    """
    if not isinstance(point, SphericalPoint):
        msg = "Point must be an instance of oslo.geometry.SphericalPoint"
        logger.error(msg)
        raise ValueError(msg)
    order = as_order(order)
    index = ang2pix_array(order, np.array([point.theta]), np.array([point.phi]))
    return PixelId(int(index[0]), order)


def all_pixels(order: OrderLike) -> np.ndarray:
    """Returns every nested index of an order, in order."""
    return np.arange(as_order(order).npix, dtype=np.int64)

