"""Experiment protocols: in-target and cross-target runs with ablations.

In-target trains on the destination target's train split and tests on its
test split. Cross-target trains and validates on the source target, then
tests on the destination's full labeled set; source and destination must
differ. Every run embeds a manifest (seed, config hash, corpus hash, prompt
hash) so reports are traceable and reruns are byte-comparable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

import stancebench
from stancebench.corpus.io import instance_to_dict
from stancebench.corpus.models import Instance, POST_TARGET_GROUP, target_group
from stancebench.errors import ProtocolError
from stancebench.evaluation.depth import DepthBucketReport, TargetKind, depth_bucket_report
from stancebench.evaluation.metrics import EvalReport, evaluate
from stancebench.fusion.config import ModelConfig, TrainConfig
from stancebench.fusion.generate import generate
from stancebench.fusion.matching import Prediction, match_label
from stancebench.fusion.model import assemble_input
from stancebench.fusion.train import TrainExample, init_train_state, train_step
from stancebench.labels import Split
from stancebench.prompt.captions import StubCaptioner, get_caption
from stancebench.prompt.templates import PromptTemplateConfig, build_prompt_bundle
from stancebench.prompt.tokenizer import tokenize
from stancebench.vision.encoder import VisionConfig, VisionEncoder

POST_TARGET_NAME = POST_TARGET_GROUP


class ProtocolMode(str, Enum):
    IN_TARGET = "in"
    CROSS_TARGET = "cross"


ABLATION_FLAGS = ("no-caption", "no-cot", "single-sentence")


@dataclass
class ProtocolConfig:
    mode: ProtocolMode
    source: str
    dest: str
    ablations: tuple[str, ...] = ()
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    vision: VisionConfig = field(default_factory=VisionConfig)
    template: PromptTemplateConfig = field(default_factory=PromptTemplateConfig)
    seed: int = 0
    max_new_tokens: int = 12
    # Optional early stop: end training once label-match accuracy on the train
    # split reaches this threshold (checked every early_stop_check_every steps).
    early_stop_train_accuracy: Optional[float] = None
    early_stop_check_every: int = 20

    def __post_init__(self) -> None:
        unknown = [a for a in self.ablations if a not in ABLATION_FLAGS]
        if unknown:
            raise ProtocolError(f"unknown ablation flag(s) {unknown}; known: {ABLATION_FLAGS}")
        if self.mode == ProtocolMode.CROSS_TARGET and self.source == self.dest:
            raise ProtocolError(
                f"cross-target requires distinct source and destination, both are {self.dest!r}"
            )

    def effective_template(self) -> PromptTemplateConfig:
        template = self.template
        if "no-caption" in self.ablations:
            template = template.with_flags(omit_caption=True)
        if "no-cot" in self.ablations:
            template = template.with_flags(omit_case=True)
        if "single-sentence" in self.ablations:
            template = template.with_flags(single_sentence=True)
        return template

    def config_hash(self) -> str:
        payload = {
            "mode": self.mode.value, "source": self.source, "dest": self.dest,
            "ablations": sorted(self.ablations), "model": self.model.to_dict(),
            "train": self.train.to_dict(), "seed": self.seed,
            "vision": {
                "resolution": self.vision.resolution, "patch_size": self.vision.patch_size,
                "embed_dim": self.vision.embed_dim, "layers": self.vision.layers,
                "heads": self.vision.heads, "proj_dim": self.vision.proj_dim,
                "seed": self.vision.seed,
            },
            "template": self.effective_template().to_dict(),
            "max_new_tokens": self.max_new_tokens,
            "early_stop": [self.early_stop_train_accuracy, self.early_stop_check_every],
        }
        return _sha256_json(payload)


def _sha256_json(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


def corpus_hash(instances: Sequence[Instance]) -> str:
    return _sha256_json([instance_to_dict(ins) for ins in
                         sorted(instances, key=lambda i: i.instance_id)])


@dataclass
class ProtocolResult:
    eval_report: EvalReport
    depth_report: DepthBucketReport
    predictions: list[Prediction]
    manifest: dict


def _select_splits(
    instances: Sequence[Instance], config: ProtocolConfig
) -> tuple[list[Instance], list[Instance]]:
    labeled = [ins for ins in instances if ins.gold is not None]
    if config.mode == ProtocolMode.IN_TARGET:
        pool = [ins for ins in labeled if target_group(ins) == config.dest]
        train = [ins for ins in pool if ins.split == Split.TRAIN]
        test = [ins for ins in pool if ins.split == Split.TEST]
    else:
        train = [ins for ins in labeled
                 if target_group(ins) == config.source and ins.split in (Split.TRAIN, Split.VAL)]
        test = [ins for ins in labeled if target_group(ins) == config.dest]
    if not train:
        raise ProtocolError(f"no training instances for {config.source!r}/{config.dest!r}")
    if not test:
        raise ProtocolError(f"no test instances for destination {config.dest!r}")
    return train, test


def _prepare_examples(
    instances: Sequence[Instance],
    encoder: VisionEncoder,
    captioner: StubCaptioner,
    template: PromptTemplateConfig,
    data_root: Path,
    feature_cache: dict,
    p_v_tokens: list[int],
    include_answers: bool,
) -> list[TrainExample]:
    examples = []
    for ins in instances:
        caption = ""
        features = np.zeros((0, encoder.config.embed_dim))
        if ins.image_refs:
            ref = ins.image_refs[0]
            record = get_caption(ref, captioner, data_root)
            caption = record.caption
            if ref not in feature_cache:
                feature_cache[ref] = encoder.features_from_file(ref, data_root)
            features = feature_cache[ref]
        bundle = build_prompt_bundle(ins, caption, template)
        answer = tokenize(ins.gold.value).ids if (include_answers and ins.gold) else []
        examples.append(TrainExample(
            p_v_tokens=p_v_tokens,
            vision_features=features,
            gamma_t_tokens=bundle.gamma_t_tokens.ids,
            answer_tokens=answer,
            instance_id=ins.instance_id,
        ))
    return examples


def run_protocol(
    instances: Sequence[Instance],
    config: ProtocolConfig,
    data_root: str | Path = ".",
) -> ProtocolResult:
    data_root = Path(data_root)
    train_instances, test_instances = _select_splits(instances, config)

    template = config.effective_template()
    captions_file = data_root / "captions.jsonl"
    captioner = StubCaptioner.from_file(captions_file) if captions_file.exists() else StubCaptioner()

    vision_cfg = config.vision
    encoder = VisionEncoder(vision_cfg)
    model_cfg = config.model
    state = init_train_state(model_cfg, config.train, encoder.params)

    p_v_tokens = tokenize(template.p_v_text).ids
    feature_cache: dict = {}
    train_examples = _prepare_examples(
        train_instances, encoder, captioner, template, data_root,
        feature_cache, p_v_tokens, include_answers=True,
    )
    test_examples = _prepare_examples(
        test_instances, encoder, captioner, template, data_root,
        feature_cache, p_v_tokens, include_answers=False,
    )

    def predict(example) -> Prediction:
        gamma_v = example.vision_features @ state.vision_params["w_proj"]
        fin = assemble_input(example.p_v_tokens, gamma_v, example.gamma_t_tokens,
                             state.model_params, model_cfg)
        text = generate(fin, state.model_params, state.adapters, model_cfg,
                        max_new_tokens=config.max_new_tokens)
        return match_label(text, instance_id=example.instance_id)

    def train_accuracy() -> float:
        gold_by_id = {ins.instance_id: ins.gold for ins in train_instances}
        hits = sum(1 for ex in train_examples
                   if predict(ex).matched == gold_by_id[ex.instance_id])
        return hits / len(train_examples)

    rng = np.random.default_rng([config.seed, 0xBA7C])
    batch_size = max(1, min(config.train.batch, len(train_examples)))
    order: list[int] = []
    for step in range(1, config.train.steps + 1):
        if len(order) < batch_size:
            order = list(rng.permutation(len(train_examples)))
        batch = [train_examples[i] for i in order[:batch_size]]
        order = order[batch_size:]
        train_step(batch, state)
        if (config.early_stop_train_accuracy is not None
                and step % config.early_stop_check_every == 0
                and train_accuracy() >= config.early_stop_train_accuracy):
            break

    predictions = [predict(example) for example in test_examples]

    target_kind = TargetKind.POST if config.dest == POST_TARGET_NAME else TargetKind.NAMED
    eval_report = evaluate(predictions, test_instances)
    depth_report = depth_bucket_report(predictions, test_instances, target_kind)

    prompt_hash = _sha256_json(
        [[ex.instance_id, ex.gamma_t_tokens] for ex in train_examples + test_examples]
    )
    manifest = {
        "seed": config.seed,
        "config_hash": config.config_hash(),
        "corpus_hash": corpus_hash(list(instances)),
        "prompt_hash": prompt_hash,
        "mode": config.mode.value,
        "source": config.source,
        "dest": config.dest,
        "ablations": sorted(config.ablations),
        "final_loss": state.loss_history[-1] if state.loss_history else None,
        "steps": state.step,
        "tool_version": stancebench.__version__,
    }
    return ProtocolResult(
        eval_report=eval_report,
        depth_report=depth_report,
        predictions=predictions,
        manifest=manifest,
    )
