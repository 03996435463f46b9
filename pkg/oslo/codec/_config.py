"""
A module for the codec configuration: architecture, loss and training
settings, loadable from JSON
"""

import hashlib
import json
import logging
from logging import Logger
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, Dict, Optional, Union

from oslo.geometry import MAX_ORDER, stride_log2
from oslo.ops import AggregationMode


class Nonlinearity(StrEnum):
    GDN = "gdn"
    RELU = "relu"


def _levels_of_step(step: int, what: str, logger: Logger) -> int:
    """Orders crossed by a pixel step of 4^k."""
    if step < 1 or step & (step - 1) or (step.bit_length() - 1) % 2:
        msg = f"{what} must be a power of 4 in pixels, got {step}"
        logger.error(msg)
        raise ValueError(msg)
    return (step.bit_length() - 1) // 2


@dataclass
class ArchConfig:
    """
    Represents the shape of the spherical hyperprior autoencoder.

    stride and upsample are counted in pixels: a step of 4 moves one order,
    like a 2x2 step on a planar grid.

    Attributes:
        order (int): The order of the input maps.
        num_stages (int): Strided layers in the encoder, shuffles in the
            decoder.
        hyper_stages (int): Strided layers in the hyper-encoder.
        channels_n (int): Internal channels N.
        channels_m (int): Bottleneck channels M.
        image_channels (int): Channels of the input maps.
        hops (int): Hops of every spherical filter.
        stride (int): The pixel step of each strided layer.
        upsample (int): The pixel step of each sub-pixel layer.
        aggregation (AggregationMode): How the hops of a filter combine.
        nonlinearity (Nonlinearity): GDN/IGDN or ReLU between main layers.

    Raises:
        ValueError: If the stages run the latents below order 1 or a field is
            out of range.
    """

    order: int = 6
    num_stages: int = 3
    hyper_stages: int = 2
    channels_n: int = 32
    channels_m: int = 48
    image_channels: int = 3
    hops: int = 2
    stride: int = 4
    upsample: int = 4
    aggregation: AggregationMode = AggregationMode.ADDITION
    nonlinearity: Nonlinearity = Nonlinearity.GDN

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        self.aggregation = AggregationMode(self.aggregation)
        self.nonlinearity = Nonlinearity(self.nonlinearity)
        for name in ("num_stages", "channels_n", "channels_m", "image_channels", "hops"):
            if getattr(self, name) < 1:
                msg = f"{name} must be at least 1, got {getattr(self, name)}"
                logger.error(msg)
                raise ValueError(msg)
        if self.hyper_stages < 0:
            msg = f"hyper_stages must be non-negative, got {self.hyper_stages}"
            logger.error(msg)
            raise ValueError(msg)
        if not 1 <= self.order <= MAX_ORDER:
            msg = f"Input order must be in [1, {MAX_ORDER}], got {self.order}"
            logger.error(msg)
            raise ValueError(msg)
        if _levels_of_step(self.stride, "Stride", logger) != _levels_of_step(
            self.upsample, "Upsample", logger
        ):
            msg = "Stride and upsample must cross the same number of orders"
            logger.error(msg)
            raise ValueError(msg)
        if self.aggregation == AggregationMode.CONCATENATION:
            group: int = self.stride
            outputs: Dict[str, int] = {
                "channels_n": self.channels_n,
                "channels_m": self.channels_m,
                "image_channels * upsample": self.image_channels * group,
            }
            for name, count in outputs.items():
                if count % self.hops:
                    msg = f"Concatenation needs {name} divisible by {self.hops} hops"
                    logger.error(msg)
                    raise ValueError(msg)
        if self.hyper_order < 1:
            msg = (
                f"{self.num_stages} + {self.hyper_stages} stages of stride "
                + f"{self.stride} leave order {self.hyper_order} from order "
                + f"{self.order}; convolution needs order >= 1"
            )
            logger.error(msg)
            raise ValueError(msg)

    @property
    def levels_per_stage(self) -> int:
        """Orders crossed by one strided or sub-pixel layer."""
        return (self.stride.bit_length() - 1) // 2

    @property
    def op_stride(self) -> int:
        """The per-axis stride handed to the convolution ops."""
        return 1 << self.levels_per_stage

    @property
    def latent_order(self) -> int:
        return self.order - self.num_stages * self.levels_per_stage

    @property
    def hyper_order(self) -> int:
        return self.latent_order - self.hyper_stages * self.levels_per_stage

    @property
    def total_levels(self) -> int:
        return self.order - self.hyper_order

    @staticmethod
    def from_json(json: Dict[str, Any]) -> "ArchConfig":
        """
        Create an ArchConfig from a JSON object; missing keys keep their
        defaults.
        """
        known: Dict[str, Any] = {
            key: value
            for key, value in json.items()
            if key in ArchConfig.__dataclass_fields__
        }
        return ArchConfig(**known)

    def to_json(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "num_stages": self.num_stages,
            "hyper_stages": self.hyper_stages,
            "channels_n": self.channels_n,
            "channels_m": self.channels_m,
            "image_channels": self.image_channels,
            "hops": self.hops,
            "stride": self.stride,
            "upsample": self.upsample,
            "aggregation": str(self.aggregation),
            "nonlinearity": str(self.nonlinearity),
        }

    def arch_hash(self) -> str:
        """A short digest of the architecture, stored in latent files."""
        canonical: bytes = json_dumps(self.to_json()).encode("utf-8")
        return hashlib.sha256(canonical).hexdigest()[:16]


@dataclass
class LossConfig:
    """
    The rate-distortion trade-off: loss = MSE + lmbda * bits per input pixel.

    Raises:
        ValueError: If lmbda is negative or not finite.
    """

    lmbda: float = 0.01

    def __post_init__(self) -> None:
        self.lmbda = float(self.lmbda)
        if not self.lmbda >= 0.0 or self.lmbda == float("inf"):
            msg = f"Lambda must be finite and non-negative, got {self.lmbda}"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)

    @staticmethod
    def from_json(json: Dict[str, Any]) -> "LossConfig":
        return LossConfig(lmbda=json.get("lambda", json.get("lmbda", 0.01)))

    def to_json(self) -> Dict[str, Any]:
        return {"lambda": self.lmbda}


@dataclass
class TrainConfig:
    """
    Represents the optimization settings.

    Attributes:
        steps (int): Optimizer steps.
        batch_size (int): Patches averaged per step.
        learning_rate (float): The Adam step size.
        beta1 (float): The Adam first-moment decay.
        beta2 (float): The Adam second-moment decay.
        epsilon (float): The Adam denominator offset.
        patch_side (Optional[int]): The patch side in pixels, a power of 2;
            None trains on whole maps.
        seed (int): Seeds initialization, patch draws and noise.
        average_window (int): Steps in the moving-average loss.
        plateau_patience (Optional[int]): Windows without improvement before
            the learning rate drops; None keeps it fixed.
        plateau_factor (float): The learning-rate multiplier on a plateau.
        plateau_threshold (float): The relative improvement that counts.

    Raises:
        ValueError: If a count is not positive or a rate is out of range.
    """

    steps: int = 2000
    batch_size: int = 10
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    patch_side: Optional[int] = 32
    seed: int = 0
    average_window: int = 200
    plateau_patience: Optional[int] = None
    plateau_factor: float = 0.316
    plateau_threshold: float = 1e-4

    def __post_init__(self) -> None:
        logger: Logger = logging.getLogger(__name__)
        for name in ("steps", "batch_size", "average_window"):
            if getattr(self, name) < 1:
                msg = f"{name} must be at least 1, got {getattr(self, name)}"
                logger.error(msg)
                raise ValueError(msg)
        if self.learning_rate <= 0.0:
            msg = f"Learning rate must be positive, got {self.learning_rate}"
            logger.error(msg)
            raise ValueError(msg)
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            msg = f"Adam betas must be in [0, 1), got {self.beta1}, {self.beta2}"
            logger.error(msg)
            raise ValueError(msg)
        if not 0.0 < self.plateau_factor < 1.0:
            msg = f"Plateau factor must be in (0, 1), got {self.plateau_factor}"
            logger.error(msg)
            raise ValueError(msg)
        if self.plateau_patience is not None and self.plateau_patience < 1:
            msg = f"Plateau patience must be at least 1, got {self.plateau_patience}"
            logger.error(msg)
            raise ValueError(msg)
        if self.patch_side is not None:
            stride_log2(self.patch_side, logger=logger)

    @staticmethod
    def from_json(json: Dict[str, Any]) -> "TrainConfig":
        known: Dict[str, Any] = {
            key: value
            for key, value in json.items()
            if key in TrainConfig.__dataclass_fields__
        }
        return TrainConfig(**known)

    def to_json(self) -> Dict[str, Any]:
        return {
            "steps": self.steps,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "patch_side": self.patch_side,
            "seed": self.seed,
            "average_window": self.average_window,
            "plateau_patience": self.plateau_patience,
            "plateau_factor": self.plateau_factor,
            "plateau_threshold": self.plateau_threshold,
        }


@dataclass
class CodecConfig:
    """
    The configuration file of `oslo train`: {"arch": {...}, "loss": {...},
    "train": {...}}, every section optional.

    Raises:
        ValueError: If patches are too small for the architecture.
    """

    arch: ArchConfig = field(default_factory=ArchConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self) -> None:
        if self.train.patch_side is None:
            return
        depth: int = self.train.patch_side.bit_length() - 1
        if depth > self.arch.order:
            msg = (
                f"A {self.train.patch_side}-pixel patch does not fit at order "
                + f"{self.arch.order}"
            )
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)
        if depth < self.arch.total_levels:
            msg = (
                f"Patch side {self.train.patch_side} is too small: the model "
                + f"descends {self.arch.total_levels} orders"
            )
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)

    @staticmethod
    def from_json(json: Dict[str, Any]) -> "CodecConfig":
        return CodecConfig(
            arch=ArchConfig.from_json(json.get("arch", {})),
            loss=LossConfig.from_json(json.get("loss", {})),
            train=TrainConfig.from_json(json.get("train", {})),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "arch": self.arch.to_json(),
            "loss": self.loss.to_json(),
            "train": self.train.to_json(),
        }

    @staticmethod
    def load(
        path: Union[str, Path], logger: Logger = logging.getLogger(__name__)
    ) -> "CodecConfig":
        """
        Reads a JSON configuration file.

        Raises:
            ValueError: If the file is not a JSON object.
        """
        with open(path, "r", encoding="utf-8") as handle:
            try:
                data: Any = json.load(handle)
            except json.JSONDecodeError as exc:
                msg = f"Config {path} is not valid JSON: {exc}"
                logger.error(msg)
                raise ValueError(msg) from exc
        if not isinstance(data, dict):
            msg = f"Config {path} must hold a JSON object"
            logger.error(msg)
            raise ValueError(msg)
        return CodecConfig.from_json(data)


def json_dumps(data: Any) -> str:
    """Canonical JSON: sorted keys, no whitespace."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))
