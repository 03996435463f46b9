"""A module for the compass labels of the eight HEALPix neighbors"""

from enum import IntEnum


class Direction(IntEnum):
    """
    Represents the compass direction of a neighbor relative to a pixel.

    The integer codes 1..8 follow the neighbor list order SW, W, NW, N, NE, E,
    SE, S. Slot 0 of a convolution kernel is the central pixel, slots 1..8
    are these directions.
    """

    SW = 1
    W = 2
    NW = 3
    N = 4
    NE = 5
    E = 6
    SE = 7
    S = 8

    @property
    def slot(self) -> int:
        """Zero-based column of this direction in neighbor tables."""
        return self.value - 1

    @property
    def opposite(self) -> "Direction":
        """The direction pointing back from the neighbor."""
        return Direction((self.value + 3) % 8 + 1)


DIRECTIONS: tuple[Direction, ...] = tuple(Direction)
