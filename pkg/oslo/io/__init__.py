from oslo.io._interpolation import (
    InterpolationMode,
    erp_coordinates,
    sample_erp,
    sample_healpix,
)
from oslo.io._erp import (
    ErpImage,
    downsample_erp,
    erp_angles,
    erp_to_healpix,
    healpix_to_erp,
)
from oslo.io._hpxm import (
    HpxmHeader,
    decode_hpxm,
    encode_hpxm,
    read_hpxm,
    write_hpxm,
)
from oslo.io._images import read_image, write_image
from oslo.io._mollweide import MollweideRaster, mollweide_inverse, mollweide_render

__all__ = [
    "InterpolationMode",
    "erp_coordinates",
    "sample_erp",
    "sample_healpix",
    "ErpImage",
    "downsample_erp",
    "erp_angles",
    "erp_to_healpix",
    "healpix_to_erp",
    "HpxmHeader",
    "decode_hpxm",
    "encode_hpxm",
    "read_hpxm",
    "write_hpxm",
    "read_image",
    "write_image",
    "MollweideRaster",
    "mollweide_inverse",
    "mollweide_render",
]
