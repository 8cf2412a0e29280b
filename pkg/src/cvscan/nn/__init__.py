"""Neural network package: layers, model, training, kernel backends."""

from .backend import BACKEND_NAME, use_backend
from .layers import (
    conv_backward,
    conv_forward,
    cross_entropy,
    dense_backward,
    dense_forward,
    maxpool_backward,
    maxpool_forward,
    relu,
    relu_backward,
    softmax,
    softmax_xent_backward,
)
from .model import (
    Model,
    ModelConfig,
    WEIGHT_ORDER,
    backward,
    batch_to_array,
    encoded_to_array,
    forward,
    init_model,
    load_model,
    predict,
    save_model,
)
from .train import EpochMetrics, TrainConfig, corpus_tensors, train

__all__ = [
    "BACKEND_NAME",
    "EpochMetrics",
    "Model",
    "ModelConfig",
    "TrainConfig",
    "WEIGHT_ORDER",
    "backward",
    "batch_to_array",
    "conv_backward",
    "conv_forward",
    "corpus_tensors",
    "cross_entropy",
    "dense_backward",
    "dense_forward",
    "encoded_to_array",
    "forward",
    "init_model",
    "load_model",
    "maxpool_backward",
    "maxpool_forward",
    "predict",
    "relu",
    "relu_backward",
    "save_model",
    "softmax",
    "softmax_xent_backward",
    "train",
    "use_backend",
]
