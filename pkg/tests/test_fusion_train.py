import numpy as np
import pytest

from stancebench.checkpoint import hash_tensors
from stancebench.errors import NoTargetTokens
from stancebench.fusion.config import ModelConfig, TrainConfig
from stancebench.fusion.generate import generate
from stancebench.fusion.model import MARKER_BLOCK, assemble_input, backward, base_weights_hash, forward
from stancebench.fusion.train import (
    TrainExample,
    _build_training_rows,
    compute_loss,
    init_train_state,
    train_step,
)
from stancebench.prompt.tokenizer import tokenize
from stancebench.vision.encoder import VisionConfig, VisionEncoder


def desk_setup(d_v=16, layers=2, heads=2, lora_rank=2, seed=5, n_patches=4):
    config = ModelConfig(d_v=d_v, layers=layers, heads=heads, max_len=256,
                         lora_rank=lora_rank, seed=seed)
    vis = VisionConfig(resolution=8, patch_size=4, embed_dim=8, layers=1,
                       heads=2, proj_dim=d_v, seed=seed)
    assert vis.num_patches == n_patches
    encoder = VisionEncoder(vis)
    state = init_train_state(config, TrainConfig(lr=1e-2, steps=100, batch=2), encoder.params)
    rng = np.random.default_rng(seed)
    examples = [
        TrainExample(
            p_v_tokens=tokenize("Image:").ids,
            vision_features=encoder.features(rng.random((8, 8, 3))),
            gamma_t_tokens=tokenize(f"conversation {k} text").ids,
            answer_tokens=tokenize(["favor", "against", "none"][k % 3]).ids,
            instance_id=f"ex{k}",
        )
        for k in range(2)
    ]
    return config, state, examples, encoder


def analytic_grads(example, state, config):
    fin, rows, positions, targets = _build_training_rows(
        example, state.model_params, state.vision_params["w_proj"], config)
    logits, cache = forward(rows, state.model_params, state.adapters, config, with_cache=True)
    dlogits = np.zeros_like(logits)
    npos = len(positions)
    for pos, target in zip(positions, targets):
        row = logits[pos]
        probs = np.exp(row - row.max())
        probs /= probs.sum()
        dlogits[pos] = probs / npos
        dlogits[pos, target] -= 1.0 / npos
    grads = backward(dlogits, cache, state.model_params, state.adapters, config)
    vis_s, vis_e = fin.visual_span
    grads["w_proj"] = example.vision_features.T @ grads["rows"][vis_s:vis_e]
    marker = np.zeros_like(state.model_params["tok_emb"][MARKER_BLOCK])
    token_ids = fin.token_ids + list(example.answer_tokens)
    for pos, tid in enumerate(token_ids):
        if tid is not None and tid >= MARKER_BLOCK.start:
            marker[tid - MARKER_BLOCK.start] += grads["rows"][pos]
    grads["markers"] = marker
    return grads


def fd_gradient(arr, indices, loss_fn, eps=1e-5):
    out = []
    for idx in indices:
        orig = arr[idx]
        arr[idx] = orig + eps
        lp = loss_fn()
        arr[idx] = orig - eps
        lm = loss_fn()
        arr[idx] = orig
        out.append((lp - lm) / (2 * eps))
    return np.array(out)


def rel_err(a, b):
    return np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))


def test_gradient_check_all_trainable_groups():
    config, state, examples, _ = desk_setup()
    example = examples[0]
    # a couple of steps so B is nonzero and every group has live gradients
    for _ in range(3):
        train_step(examples, state)

    def loss_fn():
        return compute_loss([example], state.model_params, state.adapters,
                            state.vision_params, config)

    grads = analytic_grads(example, state, config)
    rng = np.random.default_rng(0)

    checks = []
    for layer in range(config.layers):
        for tgt in ("q", "v"):
            adapter = state.adapters[f"{layer}.{tgt}"]
            checks.append((adapter.a, f"lora.{layer}.{tgt}.a"))
            checks.append((adapter.b, f"lora.{layer}.{tgt}.b"))
    checks.append((state.vision_params["w_proj"], "w_proj"))
    checks.append((state.model_params["tok_emb"][MARKER_BLOCK], "markers"))

    for arr, key in checks:
        flat_indices = rng.choice(arr.size, size=min(6, arr.size), replace=False)
        indices = [np.unravel_index(i, arr.shape) for i in flat_indices]
        fd = fd_gradient(arr, indices, loss_fn)
        analytic = np.array([grads[key][idx] for idx in indices])
        diff = np.abs(analytic - fd)
        errs = rel_err(analytic, fd)
        # near-zero gradients fall below FD resolution; hold those to an
        # absolute bound instead
        assert np.all((errs < 1e-4) | (diff < 1e-8)), f"{key}: {errs}"


def test_loss_decreases_on_single_instance():
    config, state, examples, _ = desk_setup()
    example = examples[0]
    initial = compute_loss([example], state.model_params, state.adapters,
                           state.vision_params, config)
    for _ in range(100):
        last = train_step([example], state)
    assert last < initial


def test_empty_answer_rejected():
    config, state, examples, _ = desk_setup()
    bad = TrainExample(
        p_v_tokens=examples[0].p_v_tokens,
        vision_features=examples[0].vision_features,
        gamma_t_tokens=examples[0].gamma_t_tokens,
        answer_tokens=[],
    )
    with pytest.raises(NoTargetTokens):
        train_step([bad], state)


def test_frozen_weights_untouched_by_training():
    config, state, examples, encoder = desk_setup()
    base_before = base_weights_hash(state.model_params)
    vision_before = hash_tensors(
        {k: v for k, v in state.vision_params.items() if k != "w_proj"})
    w_proj_before = state.vision_params["w_proj"].copy()
    markers_before = state.model_params["tok_emb"][MARKER_BLOCK].copy()

    for _ in range(25):
        train_step(examples, state)

    assert base_weights_hash(state.model_params) == base_before
    assert hash_tensors(
        {k: v for k, v in state.vision_params.items() if k != "w_proj"}) == vision_before
    # trainable groups did move
    assert not np.array_equal(state.vision_params["w_proj"], w_proj_before)
    assert not np.array_equal(state.model_params["tok_emb"][MARKER_BLOCK], markers_before)
    assert any(np.any(ad.b != 0.0) for ad in state.adapters.values())


def test_generate_zero_tokens_empty_string():
    config, state, examples, _ = desk_setup()
    ex = examples[0]
    gamma_v = ex.vision_features @ state.vision_params["w_proj"]
    fin = assemble_input(ex.p_v_tokens, gamma_v, ex.gamma_t_tokens,
                         state.model_params, config)
    assert generate(fin, state.model_params, state.adapters, config, max_new_tokens=0) == ""


def test_generate_deterministic():
    config, state, examples, _ = desk_setup()
    ex = examples[0]
    gamma_v = ex.vision_features @ state.vision_params["w_proj"]
    fin = assemble_input(ex.p_v_tokens, gamma_v, ex.gamma_t_tokens,
                         state.model_params, config)
    a = generate(fin, state.model_params, state.adapters, config, max_new_tokens=8)
    b = generate(fin, state.model_params, state.adapters, config, max_new_tokens=8)
    assert a == b


def test_loss_history_and_step_counter():
    config, state, examples, _ = desk_setup()
    train_step(examples, state)
    train_step(examples, state)
    assert state.step == 2
    assert len(state.loss_history) == 2
