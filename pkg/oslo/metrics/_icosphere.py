"""
A module for the uniform point set: the vertices of a subdivided icosahedron
"""

import logging
from logging import Logger
from functools import lru_cache
import math
from typing import List, Tuple

import numpy as np

UNIFORM_LEVEL: int = 8
MAX_LEVEL: int = 10


def icosahedron() -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns the (12, 3) vertices and (20, 3) faces of a unit icosahedron.

    Vertex 0 is the north pole and vertex 11 the south pole; the two rings of
    five sit at z = +-1/sqrt(5), the lower ring turned by 36 degrees.
    """
    ring_z: float = 1.0 / math.sqrt(5.0)
    ring_r: float = 2.0 / math.sqrt(5.0)
    upper: np.ndarray = np.arange(5) * (2.0 * np.pi / 5.0)
    lower: np.ndarray = upper + np.pi / 5.0
    vertices: np.ndarray = np.vstack(
        [
            [0.0, 0.0, 1.0],
            np.column_stack(
                [ring_r * np.cos(upper), ring_r * np.sin(upper), np.full(5, ring_z)]
            ),
            np.column_stack(
                [ring_r * np.cos(lower), ring_r * np.sin(lower), np.full(5, -ring_z)]
            ),
            [0.0, 0.0, -1.0],
        ]
    )
    faces: List[Tuple[int, int, int]] = []
    for i in range(5):
        j: int = (i + 1) % 5
        faces.append((0, 1 + i, 1 + j))
        faces.append((1 + i, 6 + i, 1 + j))
        faces.append((1 + j, 6 + i, 6 + j))
        faces.append((11, 6 + j, 6 + i))
    return vertices, np.array(faces, dtype=np.int64)


def subdivide(
    vertices: np.ndarray, faces: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Splits every triangle in four at its edge midpoints, pushed to the sphere.

    Shared edges get one midpoint, so the vertex count goes from V to
    V + E.
    """
    edges: np.ndarray = np.sort(faces[:, [[0, 1], [1, 2], [2, 0]]], axis=2)
    unique, inverse = np.unique(edges.reshape(-1, 2), axis=0, return_inverse=True)
    midpoints: np.ndarray = vertices[unique[:, 0]] + vertices[unique[:, 1]]
    midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
    middle: np.ndarray = vertices.shape[0] + inverse.reshape(-1, 3)
    a, b, c = faces.T
    ab, bc, ca = middle.T
    refined: np.ndarray = np.concatenate(
        [
            np.column_stack([a, ab, ca]),
            np.column_stack([b, bc, ab]),
            np.column_stack([c, ca, bc]),
            np.column_stack([ab, bc, ca]),
        ]
    )
    return np.vstack([vertices, midpoints]), refined


@lru_cache(maxsize=4)
def icosphere_points(
    level: int = UNIFORM_LEVEL, logger: Logger = logging.getLogger(__name__)
) -> np.ndarray:
    """
    Returns the 10 * 4^level + 2 unit vertices of a subdivided icosahedron.

    The default level gives the 655,362-point set used by S-PSNR. The set is
    deterministic and the result is read-only.

    Args:
        level (int): The number of subdivisions, 0 to 10.
        logger (Logger): The logger to use for logging.

    Returns:
        np.ndarray: (10 * 4^level + 2, 3) unit vectors.

    Raises:
        ValueError: If level is outside [0, 10].

    Example:
        >>> icosphere_points(1).shape
        (42, 3)
    """
    if not 0 <= level <= MAX_LEVEL:
        msg = f"Icosphere level must be in [0, {MAX_LEVEL}], got {level}"
        logger.error(msg)
        raise ValueError(msg)
    vertices, faces = icosahedron()
    for _ in range(level):
        vertices, faces = subdivide(vertices, faces)
    logger.debug("Built level-%s icosphere with %s points", level, vertices.shape[0])
    vertices.flags.writeable = False
    return vertices
