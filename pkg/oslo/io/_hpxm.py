"""
A module for the HPXM container: one full-sphere map per file

Layout, little-endian:
    magic    4 bytes  b"HPXM"
    version  u8       1
    order    u8
    channels u16
    dtype    u8       0 = float32, 1 = float64
    payload  channels * npix scalars, channel-major, nested pixel order
"""

import logging
from logging import Logger
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

import numpy as np

from oslo.geometry import MAX_ORDER, Order
from oslo.tensor import SphereMap

MAGIC: bytes = b"HPXM"
VERSION: int = 1
HEADER_DTYPE: np.dtype = np.dtype(
    [
        ("magic", "S4"),
        ("version", "u1"),
        ("order", "u1"),
        ("channels", "<u2"),
        ("dtype", "u1"),
    ]
)
DTYPE_CODES: Dict[int, np.dtype] = {
    0: np.dtype("<f4"),
    1: np.dtype("<f8"),
}


@dataclass(frozen=True)
class HpxmHeader:
    """
    Represents the fixed-size header of an HPXM file.

    Attributes:
        order (int): The order of the map.
        channels (int): The number of channels.
        dtype_code (int): 0 for float32, 1 for float64.
        version (int): The format version.
    """

    order: int
    channels: int
    dtype_code: int
    version: int = VERSION

    @property
    def dtype(self) -> np.dtype:
        return DTYPE_CODES[self.dtype_code]

    @property
    def payload_bytes(self) -> int:
        return self.channels * Order(self.order).npix * self.dtype.itemsize

    def to_bytes(self) -> bytes:
        header: np.ndarray = np.zeros((), dtype=HEADER_DTYPE)
        header["magic"] = MAGIC
        header["version"] = self.version
        header["order"] = self.order
        header["channels"] = self.channels
        header["dtype"] = self.dtype_code
        return header.tobytes()

    @staticmethod
    def from_bytes(
        raw: bytes, logger: Logger = logging.getLogger(__name__)
    ) -> "HpxmHeader":
        """
        Parses and validates a header.

        Raises:
            ValueError: On a short buffer, a bad magic, an unknown version or
                dtype, or an order beyond the cap.
        """
        if len(raw) < HEADER_DTYPE.itemsize:
            msg = f"HPXM header needs {HEADER_DTYPE.itemsize} bytes, got {len(raw)}"
            logger.error(msg)
            raise ValueError(msg)
        header: np.ndarray = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
        if bytes(header["magic"]) != MAGIC:
            msg = f"Bad HPXM magic {bytes(header['magic'])!r}"
            logger.error(msg)
            raise ValueError(msg)
        if int(header["version"]) != VERSION:
            msg = f"Unsupported HPXM version {int(header['version'])}"
            logger.error(msg)
            raise ValueError(msg)
        if int(header["dtype"]) not in DTYPE_CODES:
            msg = f"Unsupported HPXM dtype code {int(header['dtype'])}"
            logger.error(msg)
            raise ValueError(msg)
        if int(header["order"]) > MAX_ORDER or int(header["channels"]) < 1:
            msg = (
                f"Invalid HPXM order {int(header['order'])} or channel count "
                + f"{int(header['channels'])}"
            )
            logger.error(msg)
            raise ValueError(msg)
        return HpxmHeader(
            order=int(header["order"]),
            channels=int(header["channels"]),
            dtype_code=int(header["dtype"]),
        )


def encode_hpxm(
    sphere_map: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> bytes:
    """
    Serializes a full-sphere map, keeping its float32 or float64 dtype.

    Raises:
        ValueError: If the map is a patch map or has too many channels.
    """
    if sphere_map.patch is not None:
        msg = "Only full-sphere maps can be written to HPXM"
        logger.error(msg)
        raise ValueError(msg)
    if sphere_map.channels > np.iinfo(np.uint16).max:
        msg = f"HPXM holds at most 65535 channels, got {sphere_map.channels}"
        logger.error(msg)
        raise ValueError(msg)
    code: int = 0 if sphere_map.dtype == np.float32 else 1
    header = HpxmHeader(sphere_map.order.value, sphere_map.channels, code)
    payload: np.ndarray = np.ascontiguousarray(sphere_map.data, dtype=header.dtype)
    return header.to_bytes() + payload.tobytes()


def decode_hpxm(raw: bytes, logger: Logger = logging.getLogger(__name__)) -> SphereMap:
    """
    Parses an HPXM buffer.

    Raises:
        ValueError: If the header is malformed, the payload is truncated or has
            trailing bytes, or the values are not finite.
    """
    header: HpxmHeader = HpxmHeader.from_bytes(raw, logger=logger)
    payload: bytes = raw[HEADER_DTYPE.itemsize :]
    if len(payload) != header.payload_bytes:
        msg = (
            f"HPXM payload should hold {header.payload_bytes} bytes, "
            + f"got {len(payload)}"
        )
        logger.error(msg)
        raise ValueError(msg)
    data: np.ndarray = np.frombuffer(payload, dtype=header.dtype).reshape(
        header.channels, -1
    )
    return SphereMap(data.astype(header.dtype.type, copy=True), header.order)


def write_hpxm(
    path: Union[str, Path],
    sphere_map: SphereMap,
    logger: Logger = logging.getLogger(__name__),
) -> None:
    """Writes a map to an HPXM file."""
    Path(path).write_bytes(encode_hpxm(sphere_map, logger=logger))
    logger.info(
        "Wrote %s-channel order-%s map to %s",
        sphere_map.channels,
        sphere_map.order.value,
        path,
    )


def read_hpxm(
    path: Union[str, Path], logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Reads a map from an HPXM file.

    Raises:
        OSError: If the file cannot be read.
        ValueError: If the content is malformed.
    """
    return decode_hpxm(Path(path).read_bytes(), logger=logger)
