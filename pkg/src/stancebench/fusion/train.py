"""Training loop: masked cross-entropy on the answer span, gradients routed
only to the LoRA factors, the vision projection, and the marker embeddings.

Supervision for an example is the byte tokens of its gold label word followed
by the stop marker; every prompt position is masked out of the loss. The
update rule is a momentum-free per-parameter scaled gradient step (RMSProp
style accumulator)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from stancebench.errors import NoTargetTokens, SequenceTooLong
from stancebench.fusion.config import ModelConfig, TrainConfig
from stancebench.fusion.lora import LoraAdapter, init_adapters
from stancebench.fusion.model import (
    MARKER_BLOCK,
    assemble_input,
    backward,
    forward,
    init_fusion_params,
)
from stancebench.prompt.tokenizer import INST_END

_ACC_DECAY = 0.9
_ACC_EPS = 1e-8


@dataclass
class TrainExample:
    """One training item: prompt pieces plus frozen vision features."""

    p_v_tokens: list[int]
    vision_features: np.ndarray  # (M, D_enc), output of the frozen encoder
    gamma_t_tokens: list[int]
    answer_tokens: list[int]     # byte tokens of the gold label word
    instance_id: str = ""


@dataclass
class TrainState:
    model_params: dict[str, np.ndarray]
    adapters: dict[str, LoraAdapter]
    vision_params: dict[str, np.ndarray]
    config: ModelConfig
    train_config: TrainConfig
    opt_acc: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    loss_history: list[float] = field(default_factory=list)

    def trainable(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {"w_proj": self.vision_params["w_proj"]}
        for key, adapter in self.adapters.items():
            out[f"lora.{key}.a"] = adapter.a
            out[f"lora.{key}.b"] = adapter.b
        out["markers"] = self.model_params["tok_emb"][MARKER_BLOCK]
        return out


def init_train_state(
    config: ModelConfig,
    train_config: TrainConfig,
    vision_params: dict[str, np.ndarray],
    model_params: dict[str, np.ndarray] | None = None,
) -> TrainState:
    state = TrainState(
        model_params=model_params if model_params is not None else init_fusion_params(config),
        adapters=init_adapters(config),
        vision_params=vision_params,
        config=config,
        train_config=train_config,
    )
    for name, arr in state.trainable().items():
        state.opt_acc[name] = np.zeros_like(arr)
    return state


def _build_training_rows(
    example: TrainExample,
    model_params: dict[str, np.ndarray],
    w_proj: np.ndarray,
    config: ModelConfig,
):
    """Assemble prompt + answer rows and the loss-position targets."""
    if not example.answer_tokens:
        raise NoTargetTokens(f"example {example.instance_id!r} has an empty answer span")
    gamma_v = example.vision_features @ w_proj
    fin = assemble_input(
        example.p_v_tokens, gamma_v, example.gamma_t_tokens, model_params, config
    )
    answer = list(example.answer_tokens)
    full_len = fin.total_length + len(answer)
    if full_len > config.max_len:
        raise SequenceTooLong(required=full_len, maximum=config.max_len)
    rows = np.vstack([fin.rows, model_params["tok_emb"][answer]])
    # Position total_length-1 (answer-start) predicts the first answer token;
    # the last answer token predicts the stop marker.
    positions = list(range(fin.total_length - 1, fin.total_length + len(answer)))
    targets = answer + [INST_END]
    return fin, rows, positions, targets


def compute_loss(
    examples: Sequence[TrainExample],
    model_params: dict[str, np.ndarray],
    adapters: dict[str, LoraAdapter],
    vision_params: dict[str, np.ndarray],
    config: ModelConfig,
) -> float:
    """Mean negative log-likelihood over all supervised positions in the batch."""
    total, count = 0.0, 0
    for example in examples:
        _, rows, positions, targets = _build_training_rows(
            example, model_params, vision_params["w_proj"], config
        )
        logits = forward(rows, model_params, adapters, config)
        for pos, target in zip(positions, targets):
            row = logits[pos]
            logz = np.log(np.sum(np.exp(row - row.max()))) + row.max()
            total += logz - row[target]
            count += 1
    return total / count


def train_step(examples: Sequence[TrainExample], state: TrainState) -> float:
    """One optimization step over the batch; returns the mean loss."""
    grad_total: dict[str, np.ndarray] = {
        name: np.zeros_like(arr) for name, arr in state.trainable().items()
    }
    w_proj = state.vision_params["w_proj"]
    position_count = 0
    per_example = []
    for example in examples:
        built = _build_training_rows(example, state.model_params, w_proj, state.config)
        per_example.append(built)
        position_count += len(built[2])
    if position_count == 0:
        raise NoTargetTokens("batch has no supervised positions")

    total_loss = 0.0
    for example, (fin, rows, positions, targets) in zip(examples, per_example):
        logits, cache = forward(rows, state.model_params, state.adapters,
                                state.config, with_cache=True)
        dlogits = np.zeros_like(logits)
        for pos, target in zip(positions, targets):
            row = logits[pos]
            shifted = row - row.max()
            probs = np.exp(shifted) / np.sum(np.exp(shifted))
            total_loss += -np.log(probs[target])
            dlogits[pos] = probs / position_count
            dlogits[pos, target] -= 1.0 / position_count
        grads = backward(dlogits, cache, state.model_params, state.adapters, state.config)

        for key in state.adapters:
            grad_total[f"lora.{key}.a"] += grads[f"lora.{key}.a"]
            grad_total[f"lora.{key}.b"] += grads[f"lora.{key}.b"]
        d_rows = grads["rows"]
        vis_start, vis_end = fin.visual_span
        grad_total["w_proj"] += example.vision_features.T @ d_rows[vis_start:vis_end]
        token_ids = fin.token_ids + list(example.answer_tokens)
        marker_grad = grad_total["markers"]
        for pos, tid in enumerate(token_ids):
            if tid is not None and tid >= MARKER_BLOCK.start:
                marker_grad[tid - MARKER_BLOCK.start] += d_rows[pos]

    lr = state.train_config.lr
    trainable = state.trainable()
    for name, grad in grad_total.items():
        acc = state.opt_acc[name]
        acc *= _ACC_DECAY
        acc += (1.0 - _ACC_DECAY) * grad * grad
        trainable[name] -= lr * grad / (np.sqrt(acc) + _ACC_EPS)

    mean_loss = total_loss / position_count
    state.step += 1
    state.loss_history.append(float(mean_loss))
    return float(mean_loss)
