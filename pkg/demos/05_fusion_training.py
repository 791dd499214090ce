"""
LoRA fusion training on a toy corpus
====================================

Builds an 8-item multimodal toy dataset, assembles the fused input layout
([INST] P^V <Img> visual rows </Img> text tokens [/INST] answer-start),
and trains only the LoRA factors, the vision projection, and the marker
embeddings until the model emits the gold label words. The base decoder and
the vision encoder stay frozen, verified by hashing.

Uses a reduced width so the demo finishes in a few seconds; the acceptance
suite runs the same loop at the full desk configuration.
"""

import tempfile
from pathlib import Path

from stancebench.checkpoint import hash_tensors
from stancebench.corpus.io import read_instances
from stancebench.fusion import (
    ModelConfig,
    TrainConfig,
    TrainExample,
    assemble_input,
    base_weights_hash,
    generate,
    init_train_state,
    match_label,
    train_step,
)
from stancebench.labels import Split
from stancebench.prompt import StubCaptioner, build_prompt_bundle, get_caption, tokenize
from stancebench.synth import make_toy_dataset, toy_template
from stancebench.vision import VisionConfig, VisionEncoder

root = Path(tempfile.mkdtemp())
make_toy_dataset(root, targets=("tesla",), per_target=8, seed=0)
train = [ins for ins in read_instances(root / "instances.jsonl") if ins.split == Split.TRAIN]

template = toy_template()
vision = VisionEncoder(VisionConfig(resolution=8, patch_size=4, embed_dim=16,
                                    layers=1, heads=2, proj_dim=32, seed=0))
config = ModelConfig(d_v=32, layers=2, heads=4, max_len=512, lora_rank=4, seed=0)
state = init_train_state(config, TrainConfig(lr=2e-2, steps=200, batch=8), vision.params)
captioner = StubCaptioner.from_file(root / "captions.jsonl")

p_v = tokenize(template.p_v_text).ids
examples = []
for ins in train:
    ref = ins.image_refs[0]
    bundle = build_prompt_bundle(ins, get_caption(ref, captioner, root).caption, template)
    examples.append(TrainExample(p_v, vision.features_from_file(ref, root),
                                 bundle.gamma_t_tokens.ids,
                                 tokenize(ins.gold.value).ids, ins.instance_id))

fin = assemble_input(p_v, examples[0].vision_features @ state.vision_params["w_proj"],
                     examples[0].gamma_t_tokens, state.model_params, config)
print("fused layout:", " | ".join(f"{s.name}[{s.start}:{s.end}]" for s in fin.segments))

base_hash = base_weights_hash(state.model_params)
frozen_vision = hash_tensors({k: v for k, v in state.vision_params.items() if k != "w_proj"})


def accuracy() -> float:
    hits = 0
    for ins, ex in zip(train, examples):
        gamma_v = ex.vision_features @ state.vision_params["w_proj"]
        f = assemble_input(ex.p_v_tokens, gamma_v, ex.gamma_t_tokens, state.model_params, config)
        text = generate(f, state.model_params, state.adapters, config, max_new_tokens=8)
        hits += match_label(text).matched == ins.gold
    return hits / len(train)


print(f"\n{'step':>5}  {'loss':>7}  {'label accuracy':>14}")
for step in range(1, 201):
    loss = train_step(examples, state)
    if step % 25 == 0:
        acc = accuracy()
        print(f"{step:>5}  {loss:>7.3f}  {acc:>14.2f}")
        if acc == 1.0:
            break

# rebuild with the trained projection before sampling
fin = assemble_input(p_v, examples[0].vision_features @ state.vision_params["w_proj"],
                     examples[0].gamma_t_tokens, state.model_params, config)
sample = generate(fin, state.model_params, state.adapters, config, max_new_tokens=8)
print(f"\ngenerated for item 0: {sample!r} -> {match_label(sample).matched.value} "
      f"(gold: {train[0].gold.value})")
print("base decoder unchanged: ", base_weights_hash(state.model_params) == base_hash)
print("vision encoder unchanged:",
      hash_tensors({k: v for k, v in state.vision_params.items() if k != 'w_proj'}) == frozen_vision)
