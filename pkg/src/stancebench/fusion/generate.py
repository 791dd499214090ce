"""Greedy decoding from the answer-start position until the stop marker."""

from __future__ import annotations

import numpy as np

from stancebench.fusion.config import ModelConfig
from stancebench.fusion.lora import LoraAdapter
from stancebench.fusion.model import FusionInput, forward
from stancebench.prompt.tokenizer import INST_END, detokenize


def generate(
    fin: FusionInput,
    params: dict[str, np.ndarray],
    adapters: dict[str, LoraAdapter],
    config: ModelConfig,
    max_new_tokens: int = 16,
) -> str:
    rows = fin.rows
    out_ids: list[int] = []
    for _ in range(max_new_tokens):
        if rows.shape[0] >= config.max_len:
            break
        logits = forward(rows, params, adapters, config)
        next_id = int(np.argmax(logits[-1]))
        if next_id == INST_END:
            break
        out_ids.append(next_id)
        rows = np.vstack([rows, params["tok_emb"][next_id]])
    return detokenize(out_ids)
