"""
A module for rate-distortion training of the codec
"""

import csv
import logging
from logging import Logger
from dataclasses import dataclass, field
import math
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from oslo.codec._config import CodecConfig
from oslo.codec._model import CodecModel, check_input, encode_forward, rd_loss
from oslo.codec._optim import Adam, PlateauSchedule, moving_average
from oslo.io import read_hpxm
from oslo.metrics import decibels
from oslo.ops import PatchSpec, crop_patch, make_patch
from oslo.tensor import ElementwiseOp, Scalar, SphereMap, Tape, backward, elementwise

LOG_CSV_HEADER: Tuple[str, ...] = ("step", "loss", "mse_db", "rate_bpp")


@dataclass
class StepRecord:
    """
    The batch averages of one optimizer step.

    Attributes:
        step (int): The 1-based step number.
        loss (float): The rate-distortion loss.
        mse (float): The distortion.
        rate_bpp (float): The estimated rate in bits per input pixel.
        learning_rate (float): The Adam step size used.
    """

    step: int
    loss: float
    mse: float
    rate_bpp: float
    learning_rate: float

    @property
    def mse_db(self) -> float:
        return decibels(self.mse)

    def to_row(self) -> Tuple[str, ...]:
        return (str(self.step), repr(self.loss), repr(self.mse_db), repr(self.rate_bpp))


@dataclass
class TrainingLog:
    records: List[StepRecord] = field(default_factory=list)

    @property
    def losses(self) -> List[float]:
        return [r.loss for r in self.records]

    def smoothed(self, window: int) -> np.ndarray:
        """The trailing moving average of the loss."""
        return moving_average(self.losses, window)

    def write_csv(self, destination: Union[str, Path, TextIO]) -> None:
        """Writes step, loss, mse_db and rate_bpp, one row per step."""
        rows: List[Tuple[str, ...]] = [LOG_CSV_HEADER] + [
            r.to_row() for r in self.records
        ]
        if isinstance(destination, (str, Path)):
            with open(destination, "w", newline="", encoding="utf-8") as handle:
                csv.writer(handle).writerows(rows)
        else:
            csv.writer(destination).writerows(rows)


def load_dataset(
    paths: Sequence[Union[str, Path]], logger: Logger = logging.getLogger(__name__)
) -> List[SphereMap]:
    """Reads HPXM training maps."""
    maps: List[SphereMap] = [read_hpxm(path, logger=logger) for path in paths]
    logger.info("Loaded %s training maps", len(maps))
    return maps


def draw_batch(
    dataset: Sequence[SphereMap],
    config: CodecConfig,
    rng: np.random.Generator,
    logger: Logger = logging.getLogger(__name__),
) -> List[SphereMap]:
    """
    Draws batch_size maps with replacement, each cut to a random patch when
    patches are configured.
    """
    batch: List[SphereMap] = []
    for _ in range(config.train.batch_size):
        source: SphereMap = dataset[int(rng.integers(0, len(dataset)))]
        if config.train.patch_side is None:
            batch.append(source)
            continue
        patch: PatchSpec = make_patch(
            config.arch.order,
            config.train.patch_side,
            rng_seed=int(rng.integers(0, 2**63 - 1)),
            logger=logger,
        )
        batch.append(crop_patch(source, patch, logger=logger))
    return batch


def _check_training_inputs(
    model: CodecModel,
    dataset: Sequence[SphereMap],
    config: CodecConfig,
    logger: Logger,
) -> None:
    if not dataset:
        msg = "Training needs at least one map"
        logger.error(msg)
        raise ValueError(msg)
    if model.arch.arch_hash() != config.arch.arch_hash():
        msg = "Training config describes another architecture than the model"
        logger.error(msg)
        raise ValueError(msg)
    for x in dataset:
        check_input(model, x, logger=logger)
        if x.patch is not None:
            msg = "Training maps must cover the whole sphere"
            logger.error(msg)
            raise ValueError(msg)


def train(
    model: CodecModel,
    dataset: Sequence[SphereMap],
    config: CodecConfig,
    progress: Optional[Callable[[StepRecord], None]] = None,
    logger: Logger = logging.getLogger(__name__),
) -> TrainingLog:
    """
    Minimizes MSE + lambda * bits per pixel with Adam.

    Every step averages the loss over a batch of random patches, updates all
    parameters, then re-projects the GDN constraints. With a fixed seed the
    log is reproducible bit for bit.

    Args:
        model (CodecModel): The codec, updated in place.
        dataset (Sequence[SphereMap]): Full-sphere maps at the model order.
        config (CodecConfig): Architecture, lambda and optimizer settings.
        progress (Optional[Callable[[StepRecord], None]]): Called after every
            step.
        logger (Logger): The logger to use for logging.

    Returns:
        TrainingLog: One record per step.

    Raises:
        ValueError: If the dataset is empty or does not fit the model.
        FloatingPointError: If the loss becomes NaN or infinite.
    """
    logger.debug(__name__)
    _check_training_inputs(model, dataset, config, logger)
    settings = config.train
    rng: np.random.Generator = np.random.default_rng(settings.seed)
    optimizer = Adam(
        model.parameters(),
        lr=settings.learning_rate,
        beta1=settings.beta1,
        beta2=settings.beta2,
        eps=settings.epsilon,
    )
    schedule: Optional[PlateauSchedule] = (
        None
        if settings.plateau_patience is None
        else PlateauSchedule(
            optimizer,
            factor=settings.plateau_factor,
            patience=settings.plateau_patience,
            threshold=settings.plateau_threshold,
        )
    )
    log = TrainingLog()
    report_every: int = max(1, settings.steps // 20)
    weight: float = 1.0 / settings.batch_size

    for step in range(1, settings.steps + 1):
        optimizer.zero_grad()
        totals: np.ndarray = np.zeros(3)
        for x in draw_batch(dataset, config, rng, logger=logger):
            with Tape() as tape:
                result = encode_forward(model, x, training=True, rng=rng, logger=logger)
                loss: Scalar = rd_loss(result, config.loss.lmbda, logger=logger)
                scaled: Scalar = elementwise(
                    ElementwiseOp.SCALE, loss, weight, logger=logger
                )
            if not math.isfinite(loss.item()):
                msg = f"Loss diverged at step {step}: {loss.item()}"
                logger.error(msg)
                raise FloatingPointError(msg)
            backward(tape, scaled, logger=logger)
            totals += (loss.item(), result.mse.item(), result.bits_per_pixel)
        optimizer.step()
        model.project()

        mean_loss, mean_mse, mean_bpp = (totals * weight).tolist()
        record = StepRecord(step, mean_loss, mean_mse, mean_bpp, optimizer.lr)
        log.records.append(record)
        if progress is not None:
            progress(record)
        if schedule is not None and step % settings.average_window == 0:
            schedule.update(
                float(np.mean(log.losses[-settings.average_window :])), logger=logger
            )
        if step % report_every == 0 or step == settings.steps:
            logger.info(
                "Step %s/%s: loss %.6g, %.2f dB, %.4f bpp",
                step,
                settings.steps,
                mean_loss,
                record.mse_db,
                mean_bpp,
            )
    return log


@dataclass
class CodecEvaluation:
    """Eval-mode averages over a set of maps."""

    rate_bpp: float
    mse: float

    @property
    def psnr(self) -> float:
        return decibels(self.mse)


def evaluate_codec(
    model: CodecModel,
    maps: Sequence[SphereMap],
    logger: Logger = logging.getLogger(__name__),
) -> CodecEvaluation:
    """Runs the rounding forward pass on every map and averages rate and MSE."""
    if not maps:
        msg = "Nothing to evaluate"
        logger.error(msg)
        raise ValueError(msg)
    rates: List[float] = []
    errors: List[float] = []
    for x in maps:
        result = encode_forward(model, x, training=False, logger=logger)
        rates.append(result.bits_per_pixel)
        errors.append(result.mse.item())
    return CodecEvaluation(float(np.mean(rates)), float(np.mean(errors)))
