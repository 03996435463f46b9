from oslo.geometry import (
    MAX_ORDER,
    Direction,
    Order,
    PixelId,
    ang2pix,
    neighbors,
    npix,
    pix2ang,
    rigidity_statistics,
)
from oslo.tensor import Parameter, Scalar, SphereMap, Tape, backward
from oslo.ops import AggregationMode, Kernel, PatchSpec, conv_nhop, spconv
from oslo.io import ErpImage, erp_to_healpix, healpix_to_erp, read_hpxm, write_hpxm
from oslo.metrics import bd_rate, spsnr, wspsnr_erp, wspsnr_healpix
from oslo.codec import CodecConfig, CodecModel, decode_file, encode_file, train

__all__ = [
    "MAX_ORDER",
    "Direction",
    "Order",
    "PixelId",
    "ang2pix",
    "neighbors",
    "npix",
    "pix2ang",
    "rigidity_statistics",
    "Parameter",
    "Scalar",
    "SphereMap",
    "Tape",
    "backward",
    "AggregationMode",
    "Kernel",
    "PatchSpec",
    "conv_nhop",
    "spconv",
    "ErpImage",
    "erp_to_healpix",
    "healpix_to_erp",
    "read_hpxm",
    "write_hpxm",
    "bd_rate",
    "spsnr",
    "wspsnr_erp",
    "wspsnr_healpix",
    "CodecConfig",
    "CodecModel",
    "decode_file",
    "encode_file",
    "train",
]
