"""
A module for the building blocks of the codec transforms: n-hop strided and
sub-pixel convolutions and the nonlinearities between them
"""

import logging
from logging import Logger
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from oslo.ops import (
    AggregationMode,
    GdnParams,
    Kernel,
    conv_nhop,
    gdn,
    spconv,
)
from oslo.tensor import ElementwiseOp, Parameter, SphereMap, elementwise


@dataclass
class ConvLayer:
    """
    Represents an n-hop spherical filter, strided or followed by a pixel
    shuffle.

    Attributes:
        name (str): The layer name, prefixed to its parameter names.
        kernels (List[Kernel]): One kernel per hop, chained.
        mode (AggregationMode): How the hop outputs combine.
        stride (int): The per-axis stride, 1 for none.
        upsample (int): Orders gained by pixel shuffle, 0 for none.
    """

    name: str
    kernels: List[Kernel]
    mode: AggregationMode = AggregationMode.ADDITION
    stride: int = 1
    upsample: int = 0

    def __post_init__(self) -> None:
        if self.stride != 1 and self.upsample:
            msg = f"Layer {self.name} cannot both stride and upsample"
            logging.getLogger(__name__).error(msg)
            raise ValueError(msg)

    @staticmethod
    def create(
        name: str,
        in_channels: int,
        out_channels: int,
        hops: int = 1,
        mode: AggregationMode = AggregationMode.ADDITION,
        stride: int = 1,
        upsample: int = 0,
        rng: Optional[np.random.Generator] = None,
    ) -> "ConvLayer":
        """
        Creates a layer producing out_channels channels after the optional
        shuffle.

        Concatenation splits the pre-shuffle channels evenly across hops.
        """
        mode = AggregationMode(mode)
        produced: int = out_channels << (2 * upsample)
        per_hop: int = (
            produced // hops if mode == AggregationMode.CONCATENATION else produced
        )
        kernels: List[Kernel] = [
            Kernel.create(
                f"{name}.hop{hop}", in_channels if hop == 0 else per_hop, per_hop, rng=rng
            )
            for hop in range(hops)
        ]
        return ConvLayer(name, kernels, mode, stride, upsample)

    def __call__(
        self, x: SphereMap, logger: Logger = logging.getLogger(__name__)
    ) -> SphereMap:
        if self.upsample:
            return spconv(x, self.kernels, self.mode, self.upsample, logger=logger)
        return conv_nhop(x, self.kernels, self.mode, self.stride, logger=logger)

    def parameters(self) -> List[Parameter]:
        params: List[Parameter] = []
        for kernel in self.kernels:
            params.append(kernel.theta)
            if kernel.bias is not None:
                params.append(kernel.bias)
        return params

    def named_kernels(self) -> List[Tuple[str, Kernel]]:
        return [(f"{self.name}.hop{hop}", k) for hop, k in enumerate(self.kernels)]


@dataclass
class GdnLayer:
    name: str
    params: GdnParams
    inverse: bool = False

    @staticmethod
    def create(name: str, channels: int, inverse: bool = False) -> "GdnLayer":
        return GdnLayer(name, GdnParams.create(name, channels), inverse)

    def __call__(
        self, x: SphereMap, logger: Logger = logging.getLogger(__name__)
    ) -> SphereMap:
        return gdn(x, self.params, inverse=self.inverse, logger=logger)

    def parameters(self) -> List[Parameter]:
        return [self.params.beta, self.params.gamma]


@dataclass
class ReluLayer:
    name: str

    def __call__(
        self, x: SphereMap, logger: Logger = logging.getLogger(__name__)
    ) -> SphereMap:
        return elementwise(ElementwiseOp.RELU, x, logger=logger)

    def parameters(self) -> List[Parameter]:
        return []


Layer = Union[ConvLayer, GdnLayer, ReluLayer]


@dataclass
class Transform:
    """
    Represents a stack of layers applied in order.

    Attributes:
        name (str): The transform name (e, d, e_s, d_s).
        layers (List[Layer]): The layers.
    """

    name: str
    layers: List[Layer]

    def __call__(
        self, x: SphereMap, logger: Logger = logging.getLogger(__name__)
    ) -> SphereMap:
        for layer in self.layers:
            x = layer(x, logger=logger)
        return x

    def parameters(self) -> List[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]

    def gdn_layers(self) -> List[GdnLayer]:
        return [layer for layer in self.layers if isinstance(layer, GdnLayer)]

    def named_kernels(self) -> List[Tuple[str, Kernel]]:
        return [
            pair
            for layer in self.layers
            if isinstance(layer, ConvLayer)
            for pair in layer.named_kernels()
        ]
