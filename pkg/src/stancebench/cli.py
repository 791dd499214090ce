"""Command-line driver for the full pipeline.

Subcommands: ingest, split, stats, annotate-serve, prompts, train, eval,
significance, report. One flat JSON config file supplies model/train/vision/
template/filter settings; individual flags override it. All randomness flows
from --seed. Failures print a single machine-parsable line
``error: <Category>: <detail>`` and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

import stancebench
from stancebench.annotation.service import AnnotationService, serve_annotation
from stancebench.annotation.store import AnnotationStore
from stancebench.checkpoint import save_tensors
from stancebench.corpus.filters import FilterConfig, apply_preprocess_filters
from stancebench.corpus.flatten import flatten_to_instances
from stancebench.corpus.io import read_instances, write_instances
from stancebench.corpus.models import TargetSpec, target_group
from stancebench.corpus.parsing import parse_thread_file
from stancebench.corpus.reference import flag_vision_discrepancies
from stancebench.corpus.split import apply_split, split_corpus
from stancebench.corpus.stats import compute_corpus_stats, stats_to_dict
from stancebench.errors import ConfigInvalid, StancebenchError
from stancebench.evaluation.bootstrap import paired_bootstrap
from stancebench.evaluation.protocol import (
    ProtocolConfig,
    ProtocolMode,
    corpus_hash,
    run_protocol,
)
from stancebench.evaluation.report import render_report_json, render_report_text
from stancebench.fusion.config import ModelConfig, TrainConfig
from stancebench.fusion.matching import MatchMethod, Prediction
from stancebench.fusion.train import init_train_state, train_step, TrainExample
from stancebench.labels import Split, StanceLabel
from stancebench.manifest import RunManifest, hash_file, hash_json, write_manifest
from stancebench.prompt.captions import StubCaptioner, get_caption
from stancebench.prompt.templates import PromptTemplateConfig, build_prompt_bundle
from stancebench.prompt.tokenizer import tokenize
from stancebench.vision.encoder import VisionConfig, VisionEncoder

DATA_DIR_ENV = "STANCEBENCH_DATA_DIR"


# ---------------------------------------------------------------------------
# config plumbing


def load_config(path: str | None):
    raw = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    try:
        return {
            "model": ModelConfig.from_dict(raw.get("model", {})),
            "train": TrainConfig.from_dict(raw.get("train", {})),
            "vision": VisionConfig(**raw.get("vision", {})),
            "template": PromptTemplateConfig.from_dict(raw.get("template", {})),
            "filters": FilterConfig(**{
                k: v for k, v in raw.get("filters", {}).items()
                if k in FilterConfig.__dataclass_fields__
            }),
            "raw": raw,
        }
    except TypeError as exc:
        raise ConfigInvalid(str(exc)) from exc


def _data_root(args) -> Path:
    if getattr(args, "data", None):
        return Path(args.data)
    return Path(os.environ.get(DATA_DIR_ENV, "."))


def _parse_ablations(values) -> tuple[str, ...]:
    flags: list[str] = []
    for value in values or []:
        flags.extend(part.strip() for part in value.split(",") if part.strip())
    return tuple(flags)


def _target_spec(name: str, hint_fallback: bool = True) -> TargetSpec | None:
    if name == "post-t":
        return TargetSpec.post()
    if name == "custom":
        return None  # per-thread target_hint
    return TargetSpec.named(name)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    config = load_config(args.config)
    threads = parse_thread_file(args.infile)
    kept, reason_counts = [], Counter()
    for thread in threads:
        decision = apply_preprocess_filters(thread, config["filters"])
        if decision.keep:
            kept.append(thread)
        else:
            for reason in decision.reasons:
                reason_counts[reason.value] += 1
    instances = []
    for thread in kept:
        spec = _target_spec(args.target) or TargetSpec.named(thread.target_hint)
        instances.extend(flatten_to_instances(thread, spec))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_instances(instances, out / "instances.jsonl")
    write_manifest(out / "manifest.json", RunManifest.create(
        command="ingest",
        config_hash=hash_json(config["raw"]),
        corpus_hash=hash_file(out / "instances.jsonl"),
        seed=args.seed,
    ))
    print(f"threads: {len(threads)} read, {len(kept)} kept, {len(threads) - len(kept)} dropped")
    for reason in sorted(reason_counts):
        print(f"  dropped[{reason}]: {reason_counts[reason]}")
    print(f"instances: {len(instances)} -> {out / 'instances.jsonl'}")
    return 0


def cmd_split(args) -> int:
    instances = read_instances(args.infile)
    assignment = split_corpus(instances, seed=args.seed)
    apply_split(instances, assignment)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_instances(instances, out)
    write_manifest(out.with_suffix(".manifest.json"), RunManifest.create(
        command="split",
        config_hash=hash_json({"ratios": [0.70, 0.15, 0.15]}),
        corpus_hash=hash_file(out),
        seed=args.seed,
    ))
    counts = Counter(ins.split.value for ins in instances)
    print(f"split: {dict(sorted(counts.items()))} -> {out}")
    return 0


def cmd_stats(args) -> int:
    instances = read_instances(args.infile)
    stats = compute_corpus_stats(instances)
    stats.flags = flag_vision_discrepancies(stats)
    payload = stats_to_dict(stats)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        write_manifest(Path(args.out).with_suffix(".manifest.json"), RunManifest.create(
            command="stats",
            config_hash=hash_json({}),
            corpus_hash=hash_file(args.infile),
            seed=args.seed,
        ))
        print(f"stats -> {args.out}")
    else:
        print(text)
    for flag in stats.flags:
        print(f"flag: {flag}", file=sys.stderr)
    return 0


def cmd_annotate_serve(args) -> int:
    instances = read_instances(args.infile)
    captioner = None
    root = _data_root(args)
    captions_file = root / "captions.jsonl"
    if captions_file.exists():
        captioner = StubCaptioner.from_file(captions_file)
    store = AnnotationStore(
        instances,
        log_path=args.log,
        lease_seconds=args.lease_seconds,
        caption_lookup=captioner.lookup if captioner else None,
    )
    threads = {}
    if args.threads:
        for thread in parse_thread_file(args.threads):
            threads[thread.thread_id] = thread
    service = AnnotationService(
        store,
        threads=threads,
        images_dir=args.img_dir or (root / "images" if (root / "images").is_dir() else None),
        ui_dir=args.ui_dir,
    )
    server = serve_annotation(service, port=args.port)
    print(f"annotation service on http://127.0.0.1:{server.server_address[1]} "
          f"({store.instance_count} instances; log: {args.log})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_prompts(args) -> int:
    config = load_config(args.config)
    template = config["template"]
    for flag in _parse_ablations(args.ablation):
        template = template.with_flags(
            omit_caption=True if flag == "no-caption" else None,
            omit_case=True if flag == "no-cot" else None,
            single_sentence=True if flag == "single-sentence" else None,
        )
    instances = read_instances(args.infile)
    root = _data_root(args)
    captions_file = root / "captions.jsonl"
    captioner = StubCaptioner.from_file(captions_file) if captions_file.exists() else StubCaptioner()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for ins in instances:
            caption = ""
            if ins.image_refs:
                caption = get_caption(ins.image_refs[0], captioner, root).caption
            bundle = build_prompt_bundle(ins, caption, template)
            fh.write(json.dumps({
                "instance_id": ins.instance_id,
                "gamma_t": bundle.gamma_t,
                "token_count": len(bundle.gamma_t_tokens),
            }, ensure_ascii=False, sort_keys=True) + "\n")
    write_manifest(out.with_suffix(".manifest.json"), RunManifest.create(
        command="prompts",
        config_hash=hash_json(template.to_dict()),
        corpus_hash=hash_file(args.infile),
        seed=args.seed,
    ))
    print(f"prompts: {len(instances)} -> {out}")
    return 0


def cmd_train(args) -> int:
    config = load_config(args.config)
    model_cfg: ModelConfig = config["model"]
    train_cfg: TrainConfig = config["train"]
    if args.seed is not None:
        model_cfg.seed = args.seed
    if args.steps is not None:
        train_cfg.steps = args.steps
    root = _data_root(args)
    instances = [ins for ins in read_instances(root / "instances.jsonl")
                 if ins.split == Split.TRAIN and ins.gold is not None]
    if args.target:
        instances = [ins for ins in instances if target_group(ins) == args.target]
    if not instances:
        raise ConfigInvalid("no labeled training instances found")

    captions_file = root / "captions.jsonl"
    captioner = StubCaptioner.from_file(captions_file) if captions_file.exists() else StubCaptioner()
    encoder = VisionEncoder(config["vision"])
    state = init_train_state(model_cfg, train_cfg, encoder.params)
    template = config["template"]
    p_v_tokens = tokenize(template.p_v_text).ids

    examples = []
    feature_cache: dict = {}
    for ins in instances:
        caption, features = "", np.zeros((0, encoder.config.embed_dim))
        if ins.image_refs:
            ref = ins.image_refs[0]
            caption = get_caption(ref, captioner, root).caption
            if ref not in feature_cache:
                feature_cache[ref] = encoder.features_from_file(ref, root)
            features = feature_cache[ref]
        bundle = build_prompt_bundle(ins, caption, template)
        examples.append(TrainExample(
            p_v_tokens=p_v_tokens,
            vision_features=features,
            gamma_t_tokens=bundle.gamma_t_tokens.ids,
            answer_tokens=tokenize(ins.gold.value).ids,
            instance_id=ins.instance_id,
        ))

    rng = np.random.default_rng([model_cfg.seed, 0xBA7C])
    batch_size = max(1, min(train_cfg.batch, len(examples)))
    order: list[int] = []
    loss = float("nan")
    for step in range(train_cfg.steps):
        if len(order) < batch_size:
            order = list(rng.permutation(len(examples)))
        batch = [examples[i] for i in order[:batch_size]]
        order = order[batch_size:]
        loss = train_step(batch, state)
        if (step + 1) % max(1, train_cfg.steps // 10) == 0:
            print(f"step {step + 1}/{train_cfg.steps}  loss {loss:.4f}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tensors = dict(state.model_params)
    for key, adapter in state.adapters.items():
        tensors[f"lora.{key}.a"] = adapter.a
        tensors[f"lora.{key}.b"] = adapter.b
    for name, arr in state.vision_params.items():
        tensors[f"vision.{name}"] = arr
    frozen = {name: not (name.startswith("lora.") or name == "vision.w_proj")
              for name in tensors}
    save_tensors(out / "checkpoint.bin", tensors, frozen)
    (out / "loss_history.json").write_text(
        json.dumps(state.loss_history) + "\n", encoding="utf-8")
    write_manifest(out / "manifest.json", RunManifest.create(
        command="train",
        config_hash=hash_json({"model": model_cfg.to_dict(), "train": train_cfg.to_dict()}),
        corpus_hash=corpus_hash(instances),
        seed=model_cfg.seed,
    ))
    print(f"trained {train_cfg.steps} steps, final loss {loss:.4f} -> {out / 'checkpoint.bin'}")
    return 0


def cmd_eval(args) -> int:
    config = load_config(args.config)
    model_cfg: ModelConfig = config["model"]
    if args.seed is not None:
        model_cfg.seed = args.seed
    protocol = ProtocolConfig(
        mode=ProtocolMode(args.mode),
        source=args.source or args.dest,
        dest=args.dest,
        ablations=_parse_ablations(args.ablation),
        model=model_cfg,
        train=config["train"],
        vision=config["vision"],
        template=config["template"],
        seed=args.seed if args.seed is not None else model_cfg.seed,
    )
    root = _data_root(args)
    instances = read_instances(root / "instances.jsonl")
    result = run_protocol(instances, protocol, data_root=root)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        render_report_json(result.eval_report, result.depth_report, result.manifest),
        encoding="utf-8")
    (out / "report.txt").write_text(
        render_report_text(result.eval_report, result.depth_report, result.manifest),
        encoding="utf-8")
    gold_by_id = {ins.instance_id: ins for ins in instances}
    with open(out / "predictions.jsonl", "w", encoding="utf-8") as fh:
        for pred in sorted(result.predictions, key=lambda p: p.instance_id):
            record = pred.to_dict()
            record["gold"] = gold_by_id[pred.instance_id].gold.value
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    write_manifest(out / "manifest.json", RunManifest.create(
        command="eval",
        config_hash=result.manifest["config_hash"],
        corpus_hash=result.manifest["corpus_hash"],
        seed=protocol.seed,
    ))
    print(render_report_text(result.eval_report, result.depth_report))
    print(f"report -> {out / 'report.json'}")
    return 0


def _read_predictions(path: str | Path) -> list[Prediction]:
    preds = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            preds.append(Prediction(
                generated_text=obj.get("generated_text", ""),
                matched=StanceLabel.parse(obj["matched"]),
                match_method=MatchMethod(obj.get("match_method", "fallback")),
                instance_id=obj["instance_id"],
            ))
    return preds


def cmd_significance(args) -> int:
    preds_a = _read_predictions(args.preds_a)
    preds_b = _read_predictions(args.preds_b)
    gold = [ins for ins in read_instances(args.gold) if ins.gold is not None]
    gold_ids = {p.instance_id for p in preds_a}
    gold = [ins for ins in gold if ins.instance_id in gold_ids]
    result = paired_bootstrap(preds_a, preds_b, gold,
                              resamples=args.resamples, seed=args.seed)
    text = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"significance -> {args.out}")
    print(text)
    return 0


def cmd_report(args) -> int:
    payload = json.loads(Path(args.infile).read_text(encoding="utf-8"))
    metrics = payload.get("metrics", {})
    print(json.dumps(metrics, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stancebench",
        description="Multimodal conversational stance detection workbench.")
    parser.add_argument("--version", action="version", version=stancebench.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, data=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None, help="flat JSON config file")
        if data:
            p.add_argument("--data", default=None,
                           help=f"data root (default ${DATA_DIR_ENV} or cwd)")

    p = sub.add_parser("ingest", help="parse a thread dump, filter, flatten to instances")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target", default="custom",
                   choices=["tesla", "bitcoin", "post-t", "custom"])
    add_common(p, data=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="assign train/val/test splits per thread")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    add_common(p, data=False)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="corpus statistics and discrepancy flags")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    add_common(p, data=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("annotate-serve", help="serve the annotation HTTP API and UI")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--log", default="annotations.jsonl")
    p.add_argument("--threads", default=None, help="thread dump for /api/threads")
    p.add_argument("--img-dir", default=None)
    p.add_argument("--ui-dir", default=None)
    p.add_argument("--lease-seconds", type=float, default=1800.0)
    add_common(p)
    p.set_defaults(func=cmd_annotate_serve)

    p = sub.add_parser("prompts", help="render text inputs for every instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ablation", action="append", default=None,
                   help="no-caption,no-cot,single-sentence (repeatable)")
    add_common(p)
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("train", help="train adapters + projection on the train split")
    p.add_argument("--out", required=True)
    p.add_argument("--target", default=None)
    p.add_argument("--steps", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_train)
    p.set_defaults(seed=None)

    p = sub.add_parser("eval", help="run an in-target or cross-target protocol")
    p.add_argument("--mode", choices=["in", "cross"], default="in")
    p.add_argument("--source", default=None)
    p.add_argument("--dest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ablation", action="append", default=None)
    add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("significance", help="paired bootstrap between two prediction sets")
    p.add_argument("--preds-a", required=True)
    p.add_argument("--preds-b", required=True)
    p.add_argument("--gold", required=True, help="instances.jsonl with gold labels")
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--out", default=None)
    add_common(p, data=False)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("report", help="print the metrics block of a report.json")
    p.add_argument("--in", dest="infile", required=True)
    add_common(p, data=False)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StancebenchError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
