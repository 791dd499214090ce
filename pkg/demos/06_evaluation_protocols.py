"""
Evaluation protocols and significance testing
=============================================

Runs an in-target protocol end-to-end on the toy corpus (train on the train
split, test on the test split), renders the report tables, then compares two
prediction sets with the paired bootstrap.
"""

import tempfile
from pathlib import Path

from stancebench.corpus.io import read_instances
from stancebench.evaluation import (
    ProtocolConfig,
    ProtocolMode,
    paired_bootstrap,
    render_report_text,
    run_protocol,
)
from stancebench.fusion import ModelConfig, TrainConfig
from stancebench.fusion.matching import MatchMethod, Prediction
from stancebench.labels import Split
from stancebench.synth import make_toy_dataset, toy_template
from stancebench.vision import VisionConfig

root = Path(tempfile.mkdtemp())
make_toy_dataset(root, targets=("tesla", "bitcoin"), per_target=8, seed=0)
instances = read_instances(root / "instances.jsonl")

config = ProtocolConfig(
    mode=ProtocolMode.IN_TARGET, source="tesla", dest="tesla",
    model=ModelConfig(d_v=32, layers=2, heads=4, max_len=512, lora_rank=4, seed=0),
    train=TrainConfig(lr=2e-2, steps=120, batch=8),
    vision=VisionConfig(resolution=8, patch_size=4, embed_dim=16,
                        layers=1, heads=2, proj_dim=32, seed=0),
    template=toy_template(),
    seed=0,
    early_stop_train_accuracy=1.0,
)
result = run_protocol(instances, config, data_root=root)
print(render_report_text(result.eval_report, result.depth_report))
print("manifest seed/config/corpus hashes travel with every report:")
for key in ("seed", "config_hash", "corpus_hash", "prompt_hash"):
    value = result.manifest[key]
    print(f"  {key}: {str(value)[:16]}{'...' if len(str(value)) > 16 else ''}")

# significance: trained predictions vs an always-none strawman
gold = [ins for ins in instances
        if ins.target == "tesla" and ins.split == Split.TEST]
from stancebench.labels import StanceLabel

strawman = [Prediction(generated_text="none", matched=StanceLabel.NONE,
                       match_method=MatchMethod.EXACT, instance_id=ins.instance_id)
            for ins in gold]
sig = paired_bootstrap(result.predictions, strawman, gold, resamples=1000, seed=0)
print(f"\npaired bootstrap (trained vs always-none): "
      f"delta={sig.observed_delta:.2f}, p={sig.p_value:.3f} over {sig.resamples} resamples")
