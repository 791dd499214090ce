import pytest

from stancebench.errors import DepthOutOfRange
from stancebench.evaluation.depth import TargetKind, depth_bucket_report
from stancebench.evaluation.metrics import evaluate
from stancebench.fusion.matching import MatchMethod, Prediction
from stancebench.labels import LABEL_ORDER, StanceLabel

from conftest import make_instance


def pred(instance_id, label):
    return Prediction(generated_text=label.value, matched=label,
                      match_method=MatchMethod.EXACT, instance_id=instance_id)


def test_single_depth_concentrates_in_one_bucket():
    gold = [make_instance(f"i{k}", gold=LABEL_ORDER[k % 3], depth=3) for k in range(9)]
    preds = [pred(ins.instance_id, ins.gold) for ins in gold]
    report = depth_bucket_report(preds, gold, TargetKind.NAMED)
    assert report.buckets["1"].n == 0
    assert report.buckets["2-4"].n == 9
    assert report.buckets["5-6"].n == 0
    assert report.buckets["2-4"].f1_avg == 100.0


def test_post_target_first_bucket_is_depth_2_only():
    gold = [make_instance(f"i{k}", gold=StanceLabel.FAVOR, depth=2 + (k % 5))
            for k in range(10)]
    preds = [pred(ins.instance_id, ins.gold) for ins in gold]
    report = depth_bucket_report(preds, gold, TargetKind.POST)
    assert set(report.buckets) == {"2", "3-4", "5-6"}
    assert report.buckets["2"].n == sum(1 for ins in gold if ins.depth == 2)


def test_bucket_populations_partition_test_set():
    gold = [make_instance(f"i{k}", gold=LABEL_ORDER[k % 3], depth=1 + (k % 6))
            for k in range(60)]
    preds = [pred(ins.instance_id, LABEL_ORDER[(k + 1) % 3]) for k, ins in enumerate(gold)]
    report = depth_bucket_report(preds, gold, TargetKind.NAMED)
    assert sum(b.n for b in report.buckets.values()) == len(gold)


def test_depth_out_of_range_named():
    gold = [make_instance("i0", gold=StanceLabel.FAVOR, depth=7)]
    preds = [pred("i0", StanceLabel.FAVOR)]
    with pytest.raises(DepthOutOfRange):
        depth_bucket_report(preds, gold, TargetKind.NAMED)


def test_depth_1_invalid_for_post_target():
    gold = [make_instance("i0", gold=StanceLabel.FAVOR, depth=1)]
    preds = [pred("i0", StanceLabel.FAVOR)]
    with pytest.raises(DepthOutOfRange):
        depth_bucket_report(preds, gold, TargetKind.POST)


def test_bucket_f1_consistent_with_filtered_evaluate():
    gold = [make_instance(f"i{k}", gold=LABEL_ORDER[k % 3], depth=1 + (k % 6))
            for k in range(36)]
    preds = [pred(ins.instance_id, LABEL_ORDER[(k * 2) % 3]) for k, ins in enumerate(gold)]
    report = depth_bucket_report(preds, gold, TargetKind.NAMED)

    in_bucket = [ins for ins in gold if 2 <= ins.depth <= 4]
    bucket_preds = [p for p in preds if p.instance_id in {i.instance_id for i in in_bucket}]
    standalone = evaluate(bucket_preds, in_bucket)
    assert report.buckets["2-4"].f1_avg == pytest.approx(standalone.f1_avg, abs=1e-12)
    assert report.buckets["2-4"].n == len(in_bucket)
