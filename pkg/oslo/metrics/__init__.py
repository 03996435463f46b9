from oslo.metrics._icosphere import (
    UNIFORM_LEVEL,
    icosahedron,
    icosphere_points,
    subdivide,
)
from oslo.metrics._psnr import (
    CSV_CAP_DB,
    METRICS_CSV_HEADER,
    Metric,
    QualityReport,
    capped,
    decibels,
    erp_row_weights,
    evaluate,
    psnr,
    sample_signal,
    spsnr,
    write_metrics_csv,
    wspsnr_erp,
    wspsnr_healpix,
)
from oslo.metrics._bd_rate import RdCurve, bd_rate

__all__ = [
    "UNIFORM_LEVEL",
    "icosahedron",
    "icosphere_points",
    "subdivide",
    "CSV_CAP_DB",
    "METRICS_CSV_HEADER",
    "Metric",
    "QualityReport",
    "capped",
    "decibels",
    "erp_row_weights",
    "evaluate",
    "psnr",
    "sample_signal",
    "spsnr",
    "write_metrics_csv",
    "wspsnr_erp",
    "wspsnr_healpix",
    "RdCurve",
    "bd_rate",
]
