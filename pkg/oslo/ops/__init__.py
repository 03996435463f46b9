from oslo.ops._patch import PatchSpec, crop_patch, make_patch
from oslo.ops._kernel import TAPS, Kernel
from oslo.ops._conv import (
    AggregationMode,
    aggregate,
    conv1hop,
    conv_nhop,
    gather_matrix,
    strided_subsample,
)
from oslo.ops._pooling import PoolMode, pool, upsample_nearest
from oslo.ops._shuffle import pixel_shuffle, pixel_unshuffle, spconv
from oslo.ops._gdn import BETA_MIN, GdnParams, gdn
from oslo.ops._visualize import (
    KERNEL_CSV_HEADER,
    kernel_rows,
    tap_positions,
    write_kernel_csv,
)

__all__ = [
    "PatchSpec",
    "crop_patch",
    "make_patch",
    "TAPS",
    "Kernel",
    "AggregationMode",
    "aggregate",
    "conv1hop",
    "conv_nhop",
    "gather_matrix",
    "strided_subsample",
    "PoolMode",
    "pool",
    "upsample_nearest",
    "pixel_shuffle",
    "pixel_unshuffle",
    "spconv",
    "BETA_MIN",
    "GdnParams",
    "gdn",
    "KERNEL_CSV_HEADER",
    "kernel_rows",
    "tap_positions",
    "write_kernel_csv",
]
