from oslo.codec._config import (
    ArchConfig,
    CodecConfig,
    LossConfig,
    Nonlinearity,
    TrainConfig,
)
from oslo.codec._layers import ConvLayer, GdnLayer, ReluLayer, Transform
from oslo.codec._entropy import (
    LIKELIHOOD_MIN,
    SCALE_MIN,
    FactorizedPrior,
    gaussian_likelihood,
    lower_bound,
    total_bits,
)
from oslo.codec._model import (
    CodecModel,
    ForwardResult,
    encode_forward,
    predict_scales,
    quantize,
    rd_loss,
    synthesize,
)
from oslo.codec._optim import Adam, PlateauSchedule, moving_average
from oslo.codec._train import (
    LOG_CSV_HEADER,
    CodecEvaluation,
    StepRecord,
    TrainingLog,
    draw_batch,
    evaluate_codec,
    load_dataset,
    train,
)
from oslo.codec._checkpoint import (
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from oslo.codec._latent import LatentFile, decode_file, encode_file, to_output_range

__all__ = [
    "ArchConfig",
    "CodecConfig",
    "LossConfig",
    "Nonlinearity",
    "TrainConfig",
    "ConvLayer",
    "GdnLayer",
    "ReluLayer",
    "Transform",
    "LIKELIHOOD_MIN",
    "SCALE_MIN",
    "FactorizedPrior",
    "gaussian_likelihood",
    "lower_bound",
    "total_bits",
    "CodecModel",
    "ForwardResult",
    "encode_forward",
    "predict_scales",
    "quantize",
    "rd_loss",
    "synthesize",
    "Adam",
    "PlateauSchedule",
    "moving_average",
    "LOG_CSV_HEADER",
    "CodecEvaluation",
    "StepRecord",
    "TrainingLog",
    "draw_batch",
    "evaluate_codec",
    "load_dataset",
    "train",
    "Checkpoint",
    "decode_checkpoint",
    "encode_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "LatentFile",
    "decode_file",
    "encode_file",
    "to_output_range",
]
