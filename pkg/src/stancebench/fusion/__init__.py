from stancebench.fusion.config import ModelConfig, TrainConfig
from stancebench.fusion.lora import LoraAdapter, init_adapters, lora_apply, lora_delta_dense
from stancebench.fusion.model import (
    FusionInput,
    Segment,
    assemble_input,
    base_weights_hash,
    forward,
    init_fusion_params,
    MARKER_BLOCK,
)
from stancebench.fusion.train import TrainExample, TrainState, compute_loss, init_train_state, train_step
from stancebench.fusion.generate import generate
from stancebench.fusion.matching import MatchMethod, Prediction, levenshtein, match_label

__all__ = [
    "FusionInput", "LoraAdapter", "MARKER_BLOCK", "MatchMethod", "ModelConfig",
    "Prediction", "Segment", "TrainConfig", "TrainExample", "TrainState",
    "assemble_input", "base_weights_hash", "compute_loss", "forward", "generate",
    "init_adapters", "init_fusion_params", "init_train_state", "levenshtein",
    "lora_apply", "lora_delta_dense", "match_label", "train_step",
]
