"""
A module for the entropy models of the codec: a Gaussian conditional for the
latents and a learned factorized prior for the hyper-latents
"""

import logging
from logging import Logger
from dataclasses import dataclass, field
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from oslo.tensor import (
    ElementwiseOp,
    Parameter,
    ReduceOp,
    Scalar,
    SphereMap,
    elementwise,
    record,
    reduce,
)

SCALE_MIN: float = 0.11
LIKELIHOOD_MIN: float = 1e-9
PRIOR_FILTERS: Tuple[int, ...] = (3, 3, 3)
PRIOR_INIT_SCALE: float = 10.0
_INV_SQRT_2PI: float = 1.0 / math.sqrt(2.0 * math.pi)


def lower_bound(
    x: SphereMap, bound: float, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    Clamps a map from below.

    The gradient passes where x is above the bound, and below it only when it
    would push x up.
    """
    logger.debug("%s - lower bound %s", __name__, bound)
    above: np.ndarray = x.data >= bound
    return record(
        "lower_bound",
        [x],
        x.like(np.maximum(x.data, bound).astype(x.dtype, copy=False)),
        lambda g: (g * (above | (g < 0)),),
    )


def _normal_pdf(z: np.ndarray) -> np.ndarray:
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def gaussian_likelihood(
    y: SphereMap, scale: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> SphereMap:
    """
    The probability mass of the unit bin around y under N(0, scale^2).

    P = Phi((0.5 - |y|) / s) - Phi((-0.5 - |y|) / s), evaluated on the left
    tail for precision. The result is floored at LIKELIHOOD_MIN.

    Args:
        y (SphereMap): Quantized or noisy latents.
        scale (SphereMap): Predicted scales, already bounded below.
        logger (Logger): The logger to use for logging.

    Returns:
        SphereMap: Per-element probabilities in (0, 1].

    Raises:
        ValueError: If the maps differ in shape or a scale is not positive.
    """
    if y.data.shape != scale.data.shape or not y.same_grid(scale):
        msg = (
            f"Latents {y.data.shape} and scales {scale.data.shape} must share "
            + "shape and grid"
        )
        logger.error(msg)
        raise ValueError(msg)
    if (scale.data <= 0).any():
        msg = "Gaussian scales must be positive"
        logger.error(msg)
        raise ValueError(msg)
    magnitude: np.ndarray = np.abs(y.data)
    sign: np.ndarray = np.sign(y.data)
    s: np.ndarray = scale.data
    upper: np.ndarray = (0.5 - magnitude) / s
    lower: np.ndarray = (-0.5 - magnitude) / s
    mass: np.ndarray = special.ndtr(upper) - special.ndtr(lower)

    def vjp(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pdf_upper: np.ndarray = _normal_pdf(upper)
        pdf_lower: np.ndarray = _normal_pdf(lower)
        grad_y: np.ndarray = g * sign * (pdf_lower - pdf_upper) / s
        grad_scale: np.ndarray = g * (lower * pdf_lower - upper * pdf_upper) / s
        return grad_y, grad_scale

    likelihood: SphereMap = record(
        "gaussian_likelihood",
        [y, scale],
        y.like(mass.astype(y.dtype, copy=False)),
        vjp,
    )
    return lower_bound(likelihood, LIKELIHOOD_MIN, logger=logger)


def total_bits(
    likelihood: SphereMap, logger: Logger = logging.getLogger(__name__)
) -> Scalar:
    """-sum(log2 p) over every element."""
    nats: Scalar = reduce(
        ReduceOp.SUM, elementwise(ElementwiseOp.LOG, likelihood, logger=logger)
    )
    return elementwise(ElementwiseOp.SCALE, nats, -1.0 / math.log(2.0), logger=logger)


@dataclass
class PriorLayer:
    """
    One layer of the per-channel cumulative model.

    Attributes:
        matrix (Parameter): (C, out, in) pre-softplus weights.
        bias (Parameter): (C, out, 1) offsets.
        factor (Optional[Parameter]): (C, out, 1) tanh gates, None on the last
            layer.
    """

    matrix: Parameter
    bias: Parameter
    factor: Optional[Parameter] = None

    def parameters(self) -> List[Parameter]:
        params: List[Parameter] = [self.matrix, self.bias]
        if self.factor is not None:
            params.append(self.factor)
        return params


@dataclass
class FactorizedPrior:
    """
    A learned, channel-wise density for the hyper-latents.

    Each channel owns a small monotone network mapping a value to the logit
    of its cumulative distribution; a bin's mass is the difference of the
    sigmoid at its two edges.

    Attributes:
        channels (int): The number of hyper-latent channels.
        layers (List[PriorLayer]): The network, 1 -> 3 -> 3 -> 3 -> 1 wide.
    """

    channels: int
    layers: List[PriorLayer] = field(default_factory=list)

    @staticmethod
    def create(
        name: str,
        channels: int,
        filters: Sequence[int] = PRIOR_FILTERS,
        init_scale: float = PRIOR_INIT_SCALE,
        rng: Optional[np.random.Generator] = None,
    ) -> "FactorizedPrior":
        rng = rng if rng is not None else np.random.default_rng()
        widths: Tuple[int, ...] = (1,) + tuple(filters) + (1,)
        scale: float = init_scale ** (1.0 / (len(widths) - 1))
        layers: List[PriorLayer] = []
        for i in range(len(widths) - 1):
            fan_in, fan_out = widths[i], widths[i + 1]
            init: float = math.log(math.expm1(1.0 / scale / fan_out))
            layers.append(
                PriorLayer(
                    matrix=Parameter(
                        f"{name}.matrix{i}", np.full((channels, fan_out, fan_in), init)
                    ),
                    bias=Parameter(
                        f"{name}.bias{i}",
                        rng.uniform(-0.5, 0.5, size=(channels, fan_out, 1)),
                    ),
                    factor=(
                        Parameter(f"{name}.factor{i}", np.zeros((channels, fan_out, 1)))
                        if i < len(widths) - 2
                        else None
                    ),
                )
            )
        return FactorizedPrior(channels, layers)

    def parameters(self) -> List[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]

    def _logits(self, values: np.ndarray) -> Tuple[np.ndarray, list]:
        """Forward pass on (C, 1, n) values, keeping what backward needs."""
        cache: list = []
        x: np.ndarray = values
        for layer in self.layers:
            weight: np.ndarray = np.logaddexp(0.0, layer.matrix.values)
            z: np.ndarray = weight @ x + layer.bias.values
            if layer.factor is None:
                cache.append((x, weight, None, None))
                x = z
                continue
            gate: np.ndarray = np.tanh(layer.factor.values)
            t: np.ndarray = np.tanh(z)
            cache.append((x, weight, gate, t))
            x = z + gate * t
        return x, cache

    def _logits_vjp(
        self, g: np.ndarray, cache: list
    ) -> Tuple[np.ndarray, List[np.ndarray]]:
        grads: List[np.ndarray] = []
        for layer, (x, weight, gate, t) in zip(reversed(self.layers), reversed(cache)):
            layer_grads: List[np.ndarray] = []
            dz: np.ndarray = g
            if gate is not None:
                dz = g * (1.0 + gate * (1.0 - t * t))
                grad_factor: np.ndarray = np.sum(
                    g * t * (1.0 - gate * gate), axis=2, keepdims=True
                )
            grad_weight: np.ndarray = dz @ x.transpose(0, 2, 1)
            layer_grads.append(grad_weight * special.expit(layer.matrix.values))
            layer_grads.append(dz.sum(axis=2, keepdims=True))
            if gate is not None:
                layer_grads.append(grad_factor)
            grads = layer_grads + grads
            g = weight.transpose(0, 2, 1) @ dz
        return g, grads

    def likelihood(
        self, x: SphereMap, logger: Logger = logging.getLogger(__name__)
    ) -> SphereMap:
        """
        The probability mass of the unit bin around every hyper-latent,
        floored at LIKELIHOOD_MIN.

        Raises:
            ValueError: If the map does not have self.channels channels.
        """
        if x.channels != self.channels:
            msg = f"Prior over {self.channels} channels got a {x.channels}-channel map"
            logger.error(msg)
            raise ValueError(msg)
        values: np.ndarray = x.data[:, None, :].astype(np.float64)
        upper, upper_cache = self._logits(values + 0.5)
        lower, lower_cache = self._logits(values - 0.5)
        sign: np.ndarray = -np.sign(upper + lower)
        sig_upper: np.ndarray = special.expit(sign * upper)
        sig_lower: np.ndarray = special.expit(sign * lower)
        difference: np.ndarray = sig_upper - sig_lower
        mass: np.ndarray = np.abs(difference)[:, 0, :]

        def vjp(g: np.ndarray) -> Tuple[np.ndarray, ...]:
            direction: np.ndarray = np.sign(difference) * sign * g[:, None, :]
            g_upper: np.ndarray = direction * sig_upper * (1.0 - sig_upper)
            g_lower: np.ndarray = -direction * sig_lower * (1.0 - sig_lower)
            in_upper, grads_upper = self._logits_vjp(g_upper, upper_cache)
            in_lower, grads_lower = self._logits_vjp(g_lower, lower_cache)
            return (in_upper + in_lower)[:, 0, :].astype(x.dtype, copy=False), *(
                a + b for a, b in zip(grads_upper, grads_lower)
            )

        likelihood: SphereMap = record(
            "factorized_prior",
            [x, *self.parameters()],
            x.like(mass.astype(x.dtype, copy=False)),
            vjp,
        )
        return lower_bound(likelihood, LIKELIHOOD_MIN, logger=logger)
