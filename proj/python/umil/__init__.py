# Python surface of the UMIL library; everything lives in the compiled module.

from ._umil import (
    bce,
    binary_entropy,
    cosine_warmup_lr,
    default_config,
    evaluate_checkpoint,
    generate_dataset,
    oracle_bayes_auc,
    roc_auc,
    sigmoid,
    softmax2,
    train,
)

__all__ = [
    "bce",
    "binary_entropy",
    "cosine_warmup_lr",
    "default_config",
    "evaluate_checkpoint",
    "generate_dataset",
    "oracle_bayes_auc",
    "roc_auc",
    "sigmoid",
    "softmax2",
    "train",
]
