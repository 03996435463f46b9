"""
A module for the OSLM model checkpoint

Layout, little-endian:
    magic       4 bytes  b"OSLM"
    version     u8       1
    json_bytes  u32
    json        UTF-8 {"config": ..., "parameters": [{"name", "shape"}], "metadata": ...}
    blobs       float32 values of every parameter, in manifest order
    digest      32 bytes, SHA-256 of everything above
"""

import hashlib
import json
import logging
from logging import Logger
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from oslo.codec._config import CodecConfig, json_dumps
from oslo.codec._model import CodecModel
from oslo.tensor import Parameter

MAGIC: bytes = b"OSLM"
VERSION: int = 1
HEADER_DTYPE: np.dtype = np.dtype([("magic", "S4"), ("version", "u1"), ("json_bytes", "<u4")])
BLOB_DTYPE: np.dtype = np.dtype("<f4")
DIGEST_BYTES: int = 32


@dataclass
class Checkpoint:
    """
    Represents a trained model with the configuration it was trained under.

    Attributes:
        model (CodecModel): The codec.
        config (CodecConfig): Architecture, lambda and training settings.
        metadata (Dict[str, Any]): Free-form JSON facts, such as final rate.
    """

    model: CodecModel
    config: CodecConfig
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.model.arch.arch_hash() != self.config.arch.arch_hash():
            msg = "Checkpoint config describes another architecture than the model"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)


def _corrupt(detail: str, logger: Logger) -> ValueError:
    msg = f"Corrupt OSLM checkpoint: {detail}"
    logger.error(msg)
    return ValueError(msg)


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    """Serializes a checkpoint; weights are stored as float32."""
    params: List[Parameter] = checkpoint.model.parameters()
    manifest: Dict[str, Any] = {
        "config": checkpoint.config.to_json(),
        "parameters": [{"name": p.name, "shape": list(p.shape)} for p in params],
        "metadata": checkpoint.metadata,
    }
    body: bytes = json_dumps(manifest).encode("utf-8")
    header: np.ndarray = np.zeros((), dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["json_bytes"] = len(body)
    blobs: bytes = b"".join(
        np.ascontiguousarray(p.values, dtype=BLOB_DTYPE).tobytes() for p in params
    )
    content: bytes = header.tobytes() + body + blobs
    return content + hashlib.sha256(content).digest()


def decode_checkpoint(
    raw: bytes, logger: Logger = logging.getLogger(__name__)
) -> Checkpoint:
    """
    Parses a checkpoint and rebuilds its model.

    Raises:
        ValueError: On a bad magic, version or digest, malformed JSON, or
            parameters that do not match the stored architecture.
    """
    if len(raw) < HEADER_DTYPE.itemsize + DIGEST_BYTES:
        raise _corrupt(f"{len(raw)} bytes is too short", logger)
    content, digest = raw[:-DIGEST_BYTES], raw[-DIGEST_BYTES:]
    header: np.ndarray = np.frombuffer(content, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise _corrupt(f"bad magic {bytes(header['magic'])!r}", logger)
    if int(header["version"]) != VERSION:
        raise _corrupt(f"unsupported version {int(header['version'])}", logger)
    if hashlib.sha256(content).digest() != digest:
        raise _corrupt("integrity hash mismatch", logger)

    start: int = HEADER_DTYPE.itemsize
    end: int = start + int(header["json_bytes"])
    try:
        manifest: Dict[str, Any] = json.loads(content[start:end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise _corrupt(f"unreadable manifest ({exc})", logger) from exc
    if not isinstance(manifest, dict) or not {"config", "parameters"} <= manifest.keys():
        raise _corrupt("manifest lacks config or parameters", logger)
    config: CodecConfig = CodecConfig.from_json(manifest["config"])
    model: CodecModel = CodecModel.create(config.arch, seed=0)
    params: Dict[str, Parameter] = model.named_parameters()
    entries: List[Dict[str, Any]] = manifest["parameters"]
    if [e["name"] for e in entries] != list(params):
        raise _corrupt("parameters do not match the architecture", logger)

    offset: int = end
    for entry in entries:
        param: Parameter = params[entry["name"]]
        if tuple(entry["shape"]) != param.shape:
            raise _corrupt(f"{param.name} has shape {entry['shape']}", logger)
        size: int = param.size * BLOB_DTYPE.itemsize
        if offset + size > len(content):
            raise _corrupt("truncated weights", logger)
        values: np.ndarray = np.frombuffer(
            content, dtype=BLOB_DTYPE, count=param.size, offset=offset
        )
        param.assign(values.reshape(param.shape).astype(param.values.dtype))
        offset += size
    if offset != len(content):
        raise _corrupt(f"{len(content) - offset} trailing bytes", logger)
    return Checkpoint(model, config, manifest.get("metadata", {}))


def save_checkpoint(
    path: Union[str, Path],
    checkpoint: Checkpoint,
    logger: Logger = logging.getLogger(__name__),
) -> None:
    Path(path).write_bytes(encode_checkpoint(checkpoint))
    logger.info(
        "Wrote checkpoint with %s parameters to %s",
        len(checkpoint.model.parameters()),
        path,
    )


def load_checkpoint(
    path: Union[str, Path], logger: Logger = logging.getLogger(__name__)
) -> Checkpoint:
    """
    Reads a checkpoint file.

    Raises:
        OSError: If the file cannot be read.
        ValueError: If the content is corrupt.
    """
    return decode_checkpoint(Path(path).read_bytes(), logger=logger)
