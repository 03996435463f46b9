"""
A module for latent files: the quantized latents of one map, with what is
needed to decode them

Layout, little-endian:
    magic       4 bytes  b"OSLT"
    version     u8       1
    json_bytes  u32
    json        UTF-8 header (hashes, orders, lambda, rate, quality, shapes,
                input dtype)
    y_hat       int32, (M, P)
    nu_hat      int32, (N, Q)
    digest      32 bytes, SHA-256 of everything above

The rate is the estimated entropy of the latents under the model, a lower
bound of what an arithmetic coder would spend.
"""

import hashlib
import json
import logging
from logging import Logger
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from oslo.codec._config import json_dumps
from oslo.codec._model import CodecModel, encode_forward, synthesize
from oslo.geometry import PixelId, as_order
from oslo.metrics import capped, wspsnr_healpix
from oslo.ops import PatchSpec
from oslo.tensor import Dtype, SphereMap

MAGIC: bytes = b"OSLT"
VERSION: int = 1
HEADER_DTYPE: np.dtype = np.dtype([("magic", "S4"), ("version", "u1"), ("json_bytes", "<u4")])
SYMBOL_DTYPE: np.dtype = np.dtype("<i4")
DIGEST_BYTES: int = 32


@dataclass
class LatentFile:
    """
    Represents an encoded map.

    Attributes:
        arch_hash (str): The architecture digest of the encoding model.
        model_hash (str): The weight digest of the encoding model.
        order (int): The order of the encoded map.
        latent_order (int): The order of y_hat.
        hyper_order (int): The order of nu_hat.
        rate_bits (float): The estimated size of the latents in bits.
        wspsnr (float): The WS-PSNR of the decoded map, capped at 999 dB.
        y_hat (np.ndarray): (M, P) integer latents.
        nu_hat (np.ndarray): (N, Q) integer hyper-latents.
        lmbda (Optional[float]): The lambda the model was trained with.
        patch (Optional[Tuple[int, int, int]]): Root index, root order and
            depth of the encoded patch; None for a full-sphere map.
        dtype (Dtype): The precision of the encoded map, which the decoder
            runs in.

    Raises:
        ValueError: If the rate is negative, the latents are not integers or
            the dtype is not float32 or float64.
    """

    arch_hash: str
    model_hash: str
    order: int
    latent_order: int
    hyper_order: int
    rate_bits: float
    wspsnr: float
    y_hat: np.ndarray
    nu_hat: np.ndarray
    lmbda: Optional[float] = None
    patch: Optional[Tuple[int, int, int]] = None
    dtype: Dtype = Dtype.FLOAT64

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        if self.dtype not in tuple(Dtype):
            msg = f"Latent dtype must be one of {[str(d) for d in Dtype]}, got {self.dtype}"
            logger.error(msg)
            raise ValueError(msg)
        self.dtype = Dtype(self.dtype)
        if not self.rate_bits >= 0.0:
            msg = f"Latent rate must be non-negative, got {self.rate_bits}"
            logger.error(msg)
            raise ValueError(msg)
        for name in ("y_hat", "nu_hat"):
            symbols: np.ndarray = np.asarray(getattr(self, name))
            if symbols.ndim != 2 or not np.issubdtype(symbols.dtype, np.integer):
                msg = f"{name} must be a 2-D integer array, got {symbols.dtype} {symbols.shape}"
                logger.error(msg)
                raise ValueError(msg)
            setattr(self, name, symbols.astype(SYMBOL_DTYPE))

    @property
    def patch_spec(self) -> Optional[PatchSpec]:
        """The patch of the encoded map, None for the whole sphere."""
        if self.patch is None:
            return None
        index, root_order, depth = self.patch
        return PatchSpec(PixelId(index, root_order), depth)

    def header_json(self) -> Dict[str, Any]:
        return {
            "arch_hash": self.arch_hash,
            "model_hash": self.model_hash,
            "order": self.order,
            "latent_order": self.latent_order,
            "hyper_order": self.hyper_order,
            "lambda": self.lmbda,
            "rate_bits": self.rate_bits,
            "wspsnr": self.wspsnr,
            "patch": None if self.patch is None else list(self.patch),
            "y_shape": list(self.y_hat.shape),
            "nu_shape": list(self.nu_hat.shape),
            "dtype": str(self.dtype),
        }

    def to_bytes(self) -> bytes:
        body: bytes = json_dumps(self.header_json()).encode("utf-8")
        header: np.ndarray = np.zeros((), dtype=HEADER_DTYPE)
        header["magic"] = MAGIC
        header["version"] = VERSION
        header["json_bytes"] = len(body)
        content: bytes = (
            header.tobytes()
            + body
            + np.ascontiguousarray(self.y_hat, dtype=SYMBOL_DTYPE).tobytes()
            + np.ascontiguousarray(self.nu_hat, dtype=SYMBOL_DTYPE).tobytes()
        )
        return content + hashlib.sha256(content).digest()

    @staticmethod
    def from_bytes(
        raw: bytes, logger: Logger = logging.getLogger(__name__)
    ) -> "LatentFile":
        """
        Parses a latent file.

        Raises:
            ValueError: If the file is truncated, tampered with or malformed.
        """

        def corrupt(detail: str) -> ValueError:
            msg = f"Corrupt latent file: {detail}"
            logger.error(msg)
            return ValueError(msg)

        if len(raw) < HEADER_DTYPE.itemsize + DIGEST_BYTES:
            raise corrupt(f"{len(raw)} bytes is too short")
        content, digest = raw[:-DIGEST_BYTES], raw[-DIGEST_BYTES:]
        header: np.ndarray = np.frombuffer(content, dtype=HEADER_DTYPE, count=1)[0]
        if bytes(header["magic"]) != MAGIC:
            raise corrupt(f"bad magic {bytes(header['magic'])!r}")
        if int(header["version"]) != VERSION:
            raise corrupt(f"unsupported version {int(header['version'])}")
        if hashlib.sha256(content).digest() != digest:
            raise corrupt("integrity hash mismatch")
        start: int = HEADER_DTYPE.itemsize
        end: int = start + int(header["json_bytes"])
        try:
            meta: Dict[str, Any] = json.loads(content[start:end].decode("utf-8"))
            y_shape: Tuple[int, int] = tuple(meta["y_shape"])  # type: ignore[assignment]
            nu_shape: Tuple[int, int] = tuple(meta["nu_shape"])  # type: ignore[assignment]
            dtype_name: str = meta["dtype"]
        except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise corrupt(f"unreadable header ({exc})") from exc
        if dtype_name not in tuple(Dtype):
            raise corrupt(f"unsupported dtype {dtype_name!r}")
        y_count: int = int(np.prod(y_shape))
        nu_count: int = int(np.prod(nu_shape))
        if len(content) - end != (y_count + nu_count) * SYMBOL_DTYPE.itemsize:
            raise corrupt("symbol payload does not match the header shapes")
        y_hat: np.ndarray = np.frombuffer(
            content, dtype=SYMBOL_DTYPE, count=y_count, offset=end
        ).reshape(y_shape)
        nu_hat: np.ndarray = np.frombuffer(
            content,
            dtype=SYMBOL_DTYPE,
            count=nu_count,
            offset=end + y_count * SYMBOL_DTYPE.itemsize,
        ).reshape(nu_shape)
        return LatentFile(
            arch_hash=meta["arch_hash"],
            model_hash=meta["model_hash"],
            order=int(meta["order"]),
            latent_order=int(meta["latent_order"]),
            hyper_order=int(meta["hyper_order"]),
            rate_bits=float(meta["rate_bits"]),
            wspsnr=float(meta["wspsnr"]),
            y_hat=y_hat.copy(),
            nu_hat=nu_hat.copy(),
            lmbda=meta.get("lambda"),
            patch=None if meta.get("patch") is None else tuple(meta["patch"]),
            dtype=Dtype(dtype_name),
        )

    def write(
        self, path: Union[str, Path], logger: Logger = logging.getLogger(__name__)
    ) -> None:
        Path(path).write_bytes(self.to_bytes())
        logger.info("Wrote latents (%.0f bits estimated) to %s", self.rate_bits, path)

    @staticmethod
    def read(
        path: Union[str, Path], logger: Logger = logging.getLogger(__name__)
    ) -> "LatentFile":
        return LatentFile.from_bytes(Path(path).read_bytes(), logger=logger)


def to_output_range(x_hat: SphereMap) -> SphereMap:
    """Clips a reconstruction to [0, 1] and stores it as float32."""
    return SphereMap(
        np.clip(x_hat.data, 0.0, 1.0).astype(np.float32), x_hat.order, patch=x_hat.patch
    )


def _symbols(x: SphereMap, name: str, logger: Logger) -> np.ndarray:
    limit: int = np.iinfo(SYMBOL_DTYPE).max
    if np.abs(x.data).max(initial=0.0) > limit:
        msg = f"{name} exceeds the int32 symbol range"
        logger.error(msg)
        raise ValueError(msg)
    return x.data.astype(SYMBOL_DTYPE)


def encode_file(
    model: CodecModel,
    x: SphereMap,
    lmbda: Optional[float] = None,
    logger: Logger = logging.getLogger(__name__),
) -> LatentFile:
    """
    Encodes a map with rounding and packs the integer latents.

    The recorded WS-PSNR is that of to_output_range(decode_file(...)), which
    is what `oslo decode` writes.

    Args:
        model (CodecModel): The trained codec.
        x (SphereMap): The map to encode, at the model order.
        lmbda (Optional[float]): The training lambda, kept as metadata.
        logger (Logger): The logger to use for logging.

    Returns:
        LatentFile: The latents and their estimated rate.

    Raises:
        ValueError: If x does not fit the model.
    """
    logger.debug(__name__)
    result = encode_forward(model, x, training=False, logger=logger)
    patch: Optional[Tuple[int, int, int]] = (
        None
        if x.patch is None
        else (x.patch.root.index, x.patch.root.order.value, x.patch.depth)
    )
    latent = LatentFile(
        arch_hash=model.arch.arch_hash(),
        model_hash=model.model_hash(),
        order=x.order.value,
        latent_order=result.y_hat.order.value,
        hyper_order=result.nu_hat.order.value,
        rate_bits=result.rate_bits.item(),
        wspsnr=capped(wspsnr_healpix(x, to_output_range(result.x_hat), logger=logger)),
        y_hat=_symbols(result.y_hat, "y_hat", logger),
        nu_hat=_symbols(result.nu_hat, "nu_hat", logger),
        lmbda=lmbda,
        patch=patch,
        dtype=Dtype(x.dtype.name),
    )
    logger.info(
        "Encoded order-%s map: %.0f bits, %.4f bpp, WS-PSNR %.2f dB",
        latent.order,
        latent.rate_bits,
        latent.rate_bits / x.npix,
        latent.wspsnr,
    )
    return latent


def decode_file(
    model: CodecModel,
    latent: LatentFile,
    logger: Logger = logging.getLogger(__name__),
) -> SphereMap:
    """
    Reconstructs a map from its latents.

    The result equals the x_hat of the rounding forward pass bit for bit.

    Raises:
        ValueError: If the file was written by another architecture or other
            weights, or its latents do not fit the model.
    """
    logger.debug(__name__)
    if latent.arch_hash != model.arch.arch_hash():
        msg = (
            f"Latent architecture hash {latent.arch_hash} does not match the "
            + f"model's {model.arch.arch_hash()}"
        )
        logger.error(msg)
        raise ValueError(msg)
    if latent.model_hash != model.model_hash():
        msg = "Latent file was written with other model weights"
        logger.error(msg)
        raise ValueError(msg)
    patch: Optional[PatchSpec] = latent.patch_spec
    if patch is not None:
        patch = patch.coarsen(latent.order - latent.latent_order, logger=logger)
    expected: int = SphereMap.expected_npix(as_order(latent.latent_order), patch)
    if latent.y_hat.shape != (model.arch.channels_m, expected):
        msg = (
            f"Latents of shape {latent.y_hat.shape} do not fit the model, "
            + f"expected ({model.arch.channels_m}, {expected})"
        )
        logger.error(msg)
        raise ValueError(msg)
    y_hat = SphereMap(
        latent.y_hat.astype(np.dtype(latent.dtype)), latent.latent_order, patch=patch
    )
    return synthesize(model, y_hat, logger=logger)
