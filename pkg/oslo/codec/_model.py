"""
A module for the spherical scale-hyperprior autoencoder and its forward pass
"""

import hashlib
import logging
from logging import Logger
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from oslo.codec._config import ArchConfig, Nonlinearity
from oslo.codec._entropy import (
    SCALE_MIN,
    FactorizedPrior,
    gaussian_likelihood,
    lower_bound,
    total_bits,
)
from oslo.codec._layers import ConvLayer, GdnLayer, Layer, ReluLayer, Transform
from oslo.ops import Kernel
from oslo.tensor import (
    ElementwiseOp,
    Parameter,
    ReduceOp,
    Scalar,
    SphereMap,
    elementwise,
    reduce,
)


@dataclass
class CodecModel:
    """
    Represents the four transforms and the hyper-latent prior.

    e maps an image to latents y, e_s maps |y| to hyper-latents, d_s maps the
    quantized hyper-latents to the scales of y, and d maps quantized latents
    back to an image.

    Attributes:
        arch (ArchConfig): The architecture the transforms were built from.
        encoder (Transform): e.
        decoder (Transform): d.
        hyper_encoder (Transform): e_s.
        hyper_decoder (Transform): d_s.
        prior (FactorizedPrior): The density of the hyper-latents.
    """

    arch: ArchConfig
    encoder: Transform
    decoder: Transform
    hyper_encoder: Transform
    hyper_decoder: Transform
    prior: FactorizedPrior

    @staticmethod
    def create(arch: ArchConfig, seed: Optional[int] = None) -> "CodecModel":
        """
        Builds a freshly initialized model; equal seeds give equal weights.

        Example:
            >>> model = CodecModel.create(ArchConfig(order=3, num_stages=1, hyper_stages=1))
            >>> model.arch.hyper_order
            1
        """
        rng: np.random.Generator = np.random.default_rng(seed)
        n, m = arch.channels_n, arch.channels_m
        levels: int = arch.levels_per_stage

        def conv(name: str, c_in: int, c_out: int, **kwargs) -> ConvLayer:
            return ConvLayer.create(
                name, c_in, c_out, mode=arch.aggregation, rng=rng, **kwargs
            )

        def nonlinearity(name: str, channels: int, inverse: bool) -> Layer:
            if arch.nonlinearity == Nonlinearity.GDN:
                return GdnLayer.create(name, channels, inverse=inverse)
            return ReluLayer(name)

        encoder: List[Layer] = []
        decoder: List[Layer] = []
        for stage in range(arch.num_stages):
            last: bool = stage == arch.num_stages - 1
            encoder.append(
                conv(
                    f"e.conv{stage}",
                    arch.image_channels if stage == 0 else n,
                    m if last else n,
                    hops=arch.hops,
                    stride=arch.op_stride,
                )
            )
            decoder.append(
                conv(
                    f"d.conv{stage}",
                    m if stage == 0 else n,
                    arch.image_channels if last else n,
                    hops=arch.hops,
                    upsample=levels,
                )
            )
            if not last:
                encoder.append(nonlinearity(f"e.gdn{stage}", n, inverse=False))
                decoder.append(nonlinearity(f"d.igdn{stage}", n, inverse=True))

        hyper_encoder: List[Layer] = [conv("e_s.conv0", m, n)]
        hyper_decoder: List[Layer] = []
        for stage in range(arch.hyper_stages):
            hyper_encoder.append(ReluLayer(f"e_s.relu{stage}"))
            hyper_encoder.append(
                conv(f"e_s.conv{stage + 1}", n, n, hops=arch.hops, stride=arch.op_stride)
            )
            hyper_decoder.append(
                conv(f"d_s.conv{stage}", n, n, hops=arch.hops, upsample=levels)
            )
            hyper_decoder.append(ReluLayer(f"d_s.relu{stage}"))
        hyper_decoder.append(conv(f"d_s.conv{arch.hyper_stages}", n, m))

        return CodecModel(
            arch=arch,
            encoder=Transform("e", encoder),
            decoder=Transform("d", decoder),
            hyper_encoder=Transform("e_s", hyper_encoder),
            hyper_decoder=Transform("d_s", hyper_decoder),
            prior=FactorizedPrior.create("prior", n, rng=rng),
        )

    def parameters(self) -> List[Parameter]:
        """Every learnable array, in a fixed order."""
        return (
            self.encoder.parameters()
            + self.decoder.parameters()
            + self.hyper_encoder.parameters()
            + self.hyper_decoder.parameters()
            + self.prior.parameters()
        )

    def named_parameters(self) -> Dict[str, Parameter]:
        return {p.name: p for p in self.parameters()}

    def named_kernels(self) -> List[Tuple[str, Kernel]]:
        return (
            self.encoder.named_kernels()
            + self.decoder.named_kernels()
            + self.hyper_encoder.named_kernels()
            + self.hyper_decoder.named_kernels()
        )

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def project(self) -> None:
        """Clamps every GDN layer back into its feasible set."""
        for transform in (self.encoder, self.decoder):
            for layer in transform.gdn_layers():
                layer.params.project()

    def model_hash(self) -> str:
        """A digest of the architecture and every weight."""
        digest = hashlib.sha256(self.arch.arch_hash().encode("utf-8"))
        for param in self.parameters():
            digest.update(param.name.encode("utf-8"))
            digest.update(np.ascontiguousarray(param.values, dtype="<f8").tobytes())
        return digest.hexdigest()[:16]


@dataclass
class ForwardResult:
    """
    The intermediate values of one pass through the codec.

    In training mode y_hat and nu_hat hold noisy values, in eval mode
    integers.
    """

    y: SphereMap
    y_hat: SphereMap
    nu: SphereMap
    nu_hat: SphereMap
    scale: SphereMap
    x_hat: SphereMap
    rate_bits: Scalar
    mse: Scalar

    @property
    def npix(self) -> int:
        """The pixel count of the input."""
        return self.x_hat.npix

    @property
    def bits_per_pixel(self) -> float:
        return self.rate_bits.item() / self.npix


def quantize(
    x: SphereMap,
    training: bool,
    rng: Optional[np.random.Generator] = None,
) -> SphereMap:
    """
    Adds U(-1/2, 1/2) noise in training mode; rounds half to even otherwise.

    Rounding is not differentiable and is not recorded on the tape.
    """
    if not training:
        return SphereMap.from_op(np.rint(x.data), x.order, x.patch)
    rng = rng if rng is not None else np.random.default_rng()
    noise: np.ndarray = rng.uniform(-0.5, 0.5, size=x.data.shape).astype(x.dtype)
    return elementwise(ElementwiseOp.ADD, x, noise)


def check_input(
    model: CodecModel, x: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> None:
    """
    Raises:
        ValueError: If x is at another order or has other channels than the
            model expects.
    """
    if x.order.value != model.arch.order:
        msg = f"Model expects order {model.arch.order}, got order {x.order.value}"
        logger.error(msg)
        raise ValueError(msg)
    if x.channels != model.arch.image_channels:
        msg = (
            f"Model expects {model.arch.image_channels} channels, got {x.channels}"
        )
        logger.error(msg)
        raise ValueError(msg)


def predict_scales(
    model: CodecModel, nu_hat: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """The latent scales decoded from quantized hyper-latents, >= SCALE_MIN."""
    return lower_bound(model.hyper_decoder(nu_hat, logger=logger), SCALE_MIN, logger=logger)


def synthesize(
    model: CodecModel, y_hat: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """The reconstruction of quantized latents."""
    return model.decoder(y_hat, logger=logger)


def encode_forward(
    model: CodecModel,
    x: SphereMap,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
    logger: Logger = logging.getLogger(__name__),
) -> ForwardResult:
    """
    Runs the full codec on one map.

    y = e(x), nu = e_s(|y|), scales = d_s(nu_hat), x_hat = d(y_hat). The rate
    is -sum log2 P(y_hat | scales) - sum log2 P(nu_hat).

    Args:
        model (CodecModel): The codec.
        x (SphereMap): A full-sphere or patch map at the model order.
        training (bool): Noise instead of rounding.
        rng (Optional[np.random.Generator]): The noise source in training.
        logger (Logger): The logger to use for logging.

    Returns:
        ForwardResult: Every intermediate, the rate in bits and the MSE.

    Raises:
        ValueError: On an order or channel mismatch.
    """
    logger.debug(__name__)
    check_input(model, x, logger=logger)
    y: SphereMap = model.encoder(x, logger=logger)
    y_hat: SphereMap = quantize(y, training, rng)
    nu: SphereMap = model.hyper_encoder(
        elementwise(ElementwiseOp.ABS, y, logger=logger), logger=logger
    )
    nu_hat: SphereMap = quantize(nu, training, rng)
    scale: SphereMap = predict_scales(model, nu_hat, logger=logger)
    x_hat: SphereMap = synthesize(model, y_hat, logger=logger)

    rate: Scalar = elementwise(
        ElementwiseOp.ADD,
        total_bits(gaussian_likelihood(y_hat, scale, logger=logger), logger=logger),
        total_bits(model.prior.likelihood(nu_hat, logger=logger), logger=logger),
        logger=logger,
    )
    error: SphereMap = elementwise(ElementwiseOp.SUB, x_hat, x, logger=logger)
    mse: Scalar = reduce(
        ReduceOp.MEAN, elementwise(ElementwiseOp.SQUARE, error, logger=logger)
    )
    return ForwardResult(
        y=y,
        y_hat=y_hat,
        nu=nu,
        nu_hat=nu_hat,
        scale=scale,
        x_hat=x_hat,
        rate_bits=rate,
        mse=mse,
    )


def rd_loss(
    result: ForwardResult, lmbda: float, logger: Logger = logging.getLogger(__name__)
) -> Scalar:
    """MSE + lmbda * rate_bits / npix."""
    if lmbda == 0.0:
        return result.mse
    return elementwise(
        ElementwiseOp.ADD,
        result.mse,
        elementwise(
            ElementwiseOp.SCALE, result.rate_bits, lmbda / result.npix, logger=logger
        ),
        logger=logger,
    )
