from oslo.tensor._tape import (
    Tape,
    TapeNode,
    active_tape,
    backward,
    check_finite,
    is_debug,
    record,
    set_debug,
)
from oslo.tensor._sphere_map import Dtype, Parameter, Scalar, SphereMap
from oslo.tensor._elementwise import (
    ElementwiseOp,
    ReduceOp,
    channel_split,
    concat_channels,
    elementwise,
    maximum,
    reduce,
)

__all__ = [
    "Tape",
    "TapeNode",
    "active_tape",
    "backward",
    "check_finite",
    "is_debug",
    "record",
    "set_debug",
    "Dtype",
    "Parameter",
    "Scalar",
    "SphereMap",
    "ElementwiseOp",
    "ReduceOp",
    "channel_split",
    "concat_channels",
    "elementwise",
    "maximum",
    "reduce",
]
