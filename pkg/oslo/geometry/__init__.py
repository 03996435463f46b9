from oslo.geometry._pixel import (
    MAX_ORDER,
    Order,
    OrderLike,
    PixelId,
    as_order,
    npix,
    parent,
    children,
    descendant_range,
    descendants,
    stride_log2,
    stride_visiting_indices,
    stride_visiting_set,
)
from oslo.geometry._direction import Direction, DIRECTIONS
from oslo.geometry._pixelization import (
    HALF_PI,
    TWO_PI,
    SphericalPoint,
    nest2xyf,
    xyf2nest,
    pix2ang,
    pix2vec,
    ang2pix,
    pix2ang_array,
    pix2vec_array,
    ang2pix_array,
    vec2pix_array,
    ang2vec,
    vec2ang,
    all_pixels,
)
from oslo.geometry._neighbors import (
    MISSING,
    NeighborRecord,
    neighbors,
    neighbor_indices,
    neighbor_table,
    label_reciprocity,
    missing_neighbor_pixels,
)
from oslo.geometry._rigidity import (
    Grid,
    TangentOffset,
    DirectionStatistics,
    RigidityReport,
    tangent_offsets,
    tangent_offset_arrays,
    rigidity_statistics,
    erp_rigidity_statistics,
)

__all__ = [
    "MAX_ORDER",
    "Order",
    "OrderLike",
    "PixelId",
    "as_order",
    "npix",
    "parent",
    "children",
    "descendant_range",
    "descendants",
    "stride_log2",
    "stride_visiting_indices",
    "stride_visiting_set",
    "Direction",
    "DIRECTIONS",
    "HALF_PI",
    "TWO_PI",
    "SphericalPoint",
    "nest2xyf",
    "xyf2nest",
    "pix2ang",
    "pix2vec",
    "ang2pix",
    "pix2ang_array",
    "pix2vec_array",
    "ang2pix_array",
    "vec2pix_array",
    "ang2vec",
    "vec2ang",
    "all_pixels",
    "MISSING",
    "NeighborRecord",
    "neighbors",
    "neighbor_indices",
    "neighbor_table",
    "label_reciprocity",
    "missing_neighbor_pixels",
    "Grid",
    "TangentOffset",
    "DirectionStatistics",
    "RigidityReport",
    "tangent_offsets",
    "tangent_offset_arrays",
    "rigidity_statistics",
    "erp_rigidity_statistics",
]
