"""Small causal decoder with LoRA-routed query/value projections.

The multimodal input layout is fixed:

    [INST]  P^V tokens  <Img>  visual rows  </Img>  text tokens  [/INST]  answer-start

Text tokens pass through the (mostly frozen) embedding table; the projected
visual feature rows are inserted between the image markers as-is. A segment
map records the exact span of every part so the layout round-trips.

The base decoder is a seeded random stand-in trained nowhere: only the LoRA
factors, the vision projection, and the marker embedding rows ever receive
updates. Forward and backward passes are handwritten in float64 so analytic
gradients can be validated against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stancebench.checkpoint import hash_tensors
from stancebench.errors import DimensionError, NumericalError, SequenceTooLong
from stancebench.fusion.config import ModelConfig
from stancebench.fusion.lora import LoraAdapter, lora_apply
from stancebench.prompt.tokenizer import ANSWER_START, IMG_CLOSE, IMG_OPEN, INST, INST_END

# Embedding rows 256..261 (the marker block) are the only trainable rows.
MARKER_BLOCK = slice(256, 262)

_RMS_EPS = 1e-6


# ---------------------------------------------------------------------------
# parameters


def init_fusion_params(config: ModelConfig) -> dict[str, np.ndarray]:
    rng = np.random.default_rng([config.seed, 0xF0])
    d = config.d_v

    def normal(*shape, std=0.02):
        return rng.normal(0.0, std, size=shape)

    params: dict[str, np.ndarray] = {
        "tok_emb": normal(config.vocab_size, d),
        "pos_emb": normal(config.max_len, d),
    }
    for l in range(config.layers):
        params[f"dec.{l}.ln1_g"] = np.ones(d)
        params[f"dec.{l}.wq"] = normal(d, d)
        params[f"dec.{l}.wk"] = normal(d, d)
        params[f"dec.{l}.wv"] = normal(d, d)
        params[f"dec.{l}.wo"] = normal(d, d)
        params[f"dec.{l}.ln2_g"] = np.ones(d)
        params[f"dec.{l}.w1"] = normal(4 * d, d)
        params[f"dec.{l}.w2"] = normal(d, 4 * d)
    params["ln_f_g"] = np.ones(d)
    # Wider readout so greedy decoding separates classes at desk scale.
    params["w_out"] = normal(config.vocab_size, d, std=d ** -0.5)
    return params


def base_weights_hash(params: dict[str, np.ndarray]) -> str:
    """Hash of the frozen decoder weights: everything except the marker rows."""
    frozen = {name: arr for name, arr in params.items() if name != "tok_emb"}
    frozen["tok_emb[:256]"] = params["tok_emb"][:256]
    return hash_tensors(frozen)


# ---------------------------------------------------------------------------
# input assembly


@dataclass(frozen=True)
class Segment:
    name: str
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass
class FusionInput:
    rows: np.ndarray              # (T, d_v) embeddings, positional not yet added
    token_ids: list               # int per text/marker position, None on visual rows
    segments: list[Segment]

    @property
    def total_length(self) -> int:
        return self.rows.shape[0]

    @property
    def instruction_length(self) -> int:
        """Length of the [INST]...[/INST] layout (answer-start excluded)."""
        return self.total_length - 1

    def segment(self, name: str) -> Segment:
        for seg in self.segments:
            if seg.name == name:
                return seg
        raise KeyError(name)

    @property
    def visual_span(self) -> tuple[int, int]:
        seg = self.segment("visual")
        return seg.start, seg.end


SEGMENT_ORDER = (
    "inst_open", "p_v", "img_open", "visual", "img_close", "text",
    "inst_close", "answer_start",
)


def assemble_input(
    p_v_tokens: list[int],
    gamma_v: np.ndarray,
    gamma_t_tokens: list[int],
    params: dict[str, np.ndarray],
    config: ModelConfig,
) -> FusionInput:
    d = config.d_v
    gamma_v = np.asarray(gamma_v, dtype=np.float64)
    if gamma_v.size == 0:
        gamma_v = gamma_v.reshape(0, d)
    if gamma_v.ndim != 2 or gamma_v.shape[1] != d:
        raise DimensionError(f"visual features {gamma_v.shape} must be (M, {d})")

    m = gamma_v.shape[0]
    total = 4 + len(p_v_tokens) + m + len(gamma_t_tokens) + 1
    if total > config.max_len:
        raise SequenceTooLong(required=total, maximum=config.max_len)

    token_ids: list = (
        [INST] + list(p_v_tokens) + [IMG_OPEN] + [None] * m + [IMG_CLOSE]
        + list(gamma_t_tokens) + [INST_END] + [ANSWER_START]
    )
    tok_emb = params["tok_emb"]
    rows = np.empty((total, d))
    cursor = 0
    for tid in token_ids:
        if tid is None:
            break
        rows[cursor] = tok_emb[tid]
        cursor += 1
    vis_start = 1 + len(p_v_tokens) + 1
    rows[vis_start: vis_start + m] = gamma_v
    cursor = vis_start + m
    for tid in token_ids[cursor:]:
        rows[cursor] = tok_emb[tid]
        cursor += 1

    bounds = [1, len(p_v_tokens), 1, m, 1, len(gamma_t_tokens), 1, 1]
    segments = []
    start = 0
    for name, size in zip(SEGMENT_ORDER, bounds):
        segments.append(Segment(name, start, start + size))
        start += size
    return FusionInput(rows=rows, token_ids=token_ids, segments=segments)


# ---------------------------------------------------------------------------
# forward / backward


def _rmsnorm_fwd(x: np.ndarray, gain: np.ndarray):
    inv = 1.0 / np.sqrt(np.mean(x * x, axis=-1, keepdims=True) + _RMS_EPS)
    return x * inv * gain, inv


def _rmsnorm_bwd(dy: np.ndarray, x: np.ndarray, inv: np.ndarray, gain: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    dxhat = dy * gain
    dot = np.sum(dxhat * x, axis=-1, keepdims=True)
    return dxhat * inv - x * (inv ** 3) * dot / d


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _split_heads(x: np.ndarray, heads: int) -> np.ndarray:
    t, d = x.shape
    return x.reshape(t, heads, d // heads).transpose(1, 0, 2)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    h, t, hd = x.shape
    return x.transpose(1, 0, 2).reshape(t, h * hd)


def forward(
    fin_rows: np.ndarray,
    params: dict[str, np.ndarray],
    adapters: dict[str, LoraAdapter],
    config: ModelConfig,
    with_cache: bool = False,
):
    """Causal decoder forward pass; returns (T, vocab) logits.

    With ``with_cache`` the per-layer activations needed by ``backward`` are
    returned alongside.
    """
    if not np.all(np.isfinite(fin_rows)):
        raise NumericalError("non-finite values in fusion input")
    t = fin_rows.shape[0]
    heads = config.heads
    hd = config.d_v // heads
    mask = np.triu(np.full((t, t), -np.inf), k=1)

    x = fin_rows + params["pos_emb"][:t]
    caches = []
    for l in range(config.layers):
        g1 = params[f"dec.{l}.ln1_g"]
        xn, inv1 = _rmsnorm_fwd(x, g1)
        ad_q, ad_v = adapters[f"{l}.q"], adapters[f"{l}.v"]
        uq = xn @ ad_q.a.T
        uv = xn @ ad_v.a.T
        q = xn @ params[f"dec.{l}.wq"].T + ad_q.scale * (uq @ ad_q.b.T)
        k = xn @ params[f"dec.{l}.wk"].T
        v = xn @ params[f"dec.{l}.wv"].T + ad_v.scale * (uv @ ad_v.b.T)
        qh, kh, vh = _split_heads(q, heads), _split_heads(k, heads), _split_heads(v, heads)
        scores = qh @ kh.transpose(0, 2, 1) / np.sqrt(hd) + mask
        shifted = scores - scores.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        probs = e / e.sum(axis=-1, keepdims=True)
        ctx = _merge_heads(probs @ vh)
        x_attn = x + ctx @ params[f"dec.{l}.wo"].T

        g2 = params[f"dec.{l}.ln2_g"]
        yn, inv2 = _rmsnorm_fwd(x_attn, g2)
        h = yn @ params[f"dec.{l}.w1"].T
        sig = _sigmoid(h)
        s = h * sig
        x_out = x_attn + s @ params[f"dec.{l}.w2"].T

        if with_cache:
            caches.append({
                "x": x, "xn": xn, "inv1": inv1, "uq": uq, "uv": uv,
                "qh": qh, "kh": kh, "vh": vh, "probs": probs, "ctx": ctx,
                "x_attn": x_attn, "yn": yn, "inv2": inv2, "h": h, "sig": sig,
            })
        x = x_out

    xfn, invf = _rmsnorm_fwd(x, params["ln_f_g"])
    logits = xfn @ params["w_out"].T
    if not np.all(np.isfinite(logits)):
        raise NumericalError("non-finite logits")
    if with_cache:
        return logits, {"layers": caches, "x_final": x, "invf": invf, "xfn": xfn}
    return logits


def backward(
    dlogits: np.ndarray,
    cache: dict,
    params: dict[str, np.ndarray],
    adapters: dict[str, LoraAdapter],
    config: ModelConfig,
) -> dict[str, np.ndarray]:
    """Gradients of the loss wrt the trainable groups and the input rows.

    Returns adapter factor gradients keyed 'lora.<layer>.<q|v>.<a|b>', plus
    'rows': the gradient wrt the pre-positional input embeddings (callers
    scatter it into the embedding table / visual projection).
    """
    heads = config.heads
    hd = config.d_v // heads
    sqrt_hd = np.sqrt(hd)
    grads: dict[str, np.ndarray] = {}

    dxfn = dlogits @ params["w_out"]
    dx = _rmsnorm_bwd(dxfn, cache["x_final"], cache["invf"], params["ln_f_g"])

    for l in reversed(range(config.layers)):
        c = cache["layers"][l]
        ad_q, ad_v = adapters[f"{l}.q"], adapters[f"{l}.v"]

        # feed-forward block
        ds = dx @ params[f"dec.{l}.w2"]
        h, sig = c["h"], c["sig"]
        dh = ds * (sig * (1.0 + h * (1.0 - sig)))
        dyn = dh @ params[f"dec.{l}.w1"]
        dx_attn = dx + _rmsnorm_bwd(dyn, c["x_attn"], c["inv2"], params[f"dec.{l}.ln2_g"])

        # attention block
        dctx = dx_attn @ params[f"dec.{l}.wo"]
        dctx_h = _split_heads(dctx, heads)
        probs, vh = c["probs"], c["vh"]
        dp = dctx_h @ vh.transpose(0, 2, 1)
        dvh = probs.transpose(0, 2, 1) @ dctx_h
        dscores = probs * (dp - np.sum(dp * probs, axis=-1, keepdims=True))
        dqh = dscores @ c["kh"] / sqrt_hd
        dkh = dscores.transpose(0, 2, 1) @ c["qh"] / sqrt_hd
        dq, dk, dv = _merge_heads(dqh), _merge_heads(dkh), _merge_heads(dvh)

        xn = c["xn"]
        grads[f"lora.{l}.q.b"] = ad_q.scale * dq.T @ c["uq"]
        duq = ad_q.scale * dq @ ad_q.b
        grads[f"lora.{l}.q.a"] = duq.T @ xn
        grads[f"lora.{l}.v.b"] = ad_v.scale * dv.T @ c["uv"]
        duv = ad_v.scale * dv @ ad_v.b
        grads[f"lora.{l}.v.a"] = duv.T @ xn

        dxn = (dq @ params[f"dec.{l}.wq"] + duq @ ad_q.a
               + dk @ params[f"dec.{l}.wk"]
               + dv @ params[f"dec.{l}.wv"] + duv @ ad_v.a)
        dx = dx_attn + _rmsnorm_bwd(dxn, c["x"], c["inv1"], params[f"dec.{l}.ln1_g"])

    grads["rows"] = dx
    return grads
