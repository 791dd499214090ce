"""Deterministic synthetic fixtures: thread dumps for the corpus pipeline,
a count fixture reproducing the released corpus summary figures, and tiny
multimodal toy datasets for training and protocol runs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image as PILImage

from stancebench.corpus.models import ConversationThread, Instance, Utterance
from stancebench.corpus.io import write_instances, write_threads
from stancebench.corpus.reference import (
    BITCOIN,
    POST_T,
    REFERENCE_DEPTH_COUNTS,
    REFERENCE_DEPTH_MEAN_WORDS,
    REFERENCE_LABEL_COUNTS,
    REFERENCE_TARGET_TOTALS,
    REFERENCE_VISION_COUNTS,
    TESLA,
)
from stancebench.labels import LABEL_ORDER, Split, StanceLabel
from stancebench.prompt.captions import write_captions

_WORDS = (
    "the market keeps moving and people keep arguing about chargers price "
    "range battery panels software demand upgrade delivery news chart "
    "quarter story photo community thread value support growth signal"
).split()


def _sentence(rng: np.random.Generator, n_words: int) -> str:
    return " ".join(_WORDS[i] for i in rng.integers(0, len(_WORDS), size=n_words))


# ---------------------------------------------------------------------------
# synthetic thread dumps


def build_synthetic_threads(
    n_threads: int,
    seed: int = 0,
    target_hint: str = "tesla",
    min_comments: int = 100,
    max_comments: int = 140,
    max_depth: int = 6,
    with_images: bool = True,
) -> list[ConversationThread]:
    """Filter-passing threads with random reply trees, deterministic per seed."""
    rng = np.random.default_rng([seed, n_threads])
    threads = []
    for t in range(n_threads):
        tid = f"{target_hint}-{seed}-{t:04d}"
        post = Utterance(id=f"{tid}/u0", author="op",
                         text=_sentence(rng, int(rng.integers(15, 40))))
        comments: list[Utterance] = []
        candidates = [(post.id, 1)]
        n_comments = int(rng.integers(min_comments, max_comments + 1))
        for c in range(n_comments):
            parent_id, parent_depth = candidates[int(rng.integers(0, len(candidates)))]
            utt = Utterance(
                id=f"{tid}/u{c + 1}",
                author=f"user{int(rng.integers(1, 20))}",
                text=_sentence(rng, int(rng.integers(3, 20))),
                parent_id=parent_id,
            )
            comments.append(utt)
            if parent_depth + 1 < max_depth + 2:
                candidates.append((utt.id, parent_depth + 1))
        threads.append(ConversationThread(
            thread_id=tid,
            target_hint=target_hint,
            post=post,
            comments=comments,
            image_refs=[f"images/{tid}.png"] if with_images else [],
            upvotes=int(rng.integers(10, 5000)),
            reviewer_relevance=(True, True),
        ))
    return threads


# ---------------------------------------------------------------------------
# count fixture reproducing the released summary figures


def _path_of_depth(prefix: str, depth: int, focus_words: int, post_text: str | None = None) -> list[Utterance]:
    path = []
    for level in range(1, depth + 1):
        if level == 1 and post_text is not None:
            text = post_text
        elif level == depth:
            text = " ".join(["w"] * focus_words)
        else:
            text = "filler text"
        path.append(Utterance(
            id=f"{prefix}/u{level}",
            author=f"a{level}",
            text=text,
            parent_id=None if level == 1 else f"{prefix}/u{level - 1}",
            depth=level,
        ))
    return path


def reference_count_fixture() -> list[Instance]:
    """21,340 instances whose per-target label counts, vision counts and
    global depth counts reproduce the released summary figures exactly.

    The release publishes only marginals, so the joint assignment is free:
    depths are dealt greedily (post-target first, from depth 2 up) and label
    / vision flags are assigned in blocks.
    """
    depth_pool = dict(REFERENCE_DEPTH_COUNTS)

    def take_depths(total: int, allowed: Sequence[int]) -> list[int]:
        out = []
        for depth in allowed:
            grab = min(depth_pool[depth], total - len(out))
            out.extend([depth] * grab)
            depth_pool[depth] -= grab
            if len(out) == total:
                break
        if len(out) != total:
            raise AssertionError("depth pools inconsistent with target totals")
        return out

    plan = [
        (POST_T, take_depths(REFERENCE_TARGET_TOTALS[POST_T], [2, 3, 4, 5, 6])),
        (TESLA, take_depths(REFERENCE_TARGET_TOTALS[TESLA], [1, 2, 3, 4, 5, 6])),
        (BITCOIN, take_depths(REFERENCE_TARGET_TOTALS[BITCOIN], [1, 2, 3, 4, 5, 6])),
    ]
    assert all(v == 0 for v in depth_pool.values())

    instances: list[Instance] = []
    for target, depths in plan:
        labels: list[StanceLabel] = []
        for label in LABEL_ORDER:
            labels.extend([label] * REFERENCE_LABEL_COUNTS[target][label])
        vision_cutoff = REFERENCE_VISION_COUNTS[target]
        for i, (depth, label) in enumerate(zip(depths, labels)):
            prefix = f"{target}-{i:05d}"
            focus_words = round(REFERENCE_DEPTH_MEAN_WORDS[depth])
            post_text = f"fixture post {prefix}" if target == POST_T else None
            path = _path_of_depth(prefix, depth, focus_words, post_text)
            instances.append(Instance(
                instance_id=f"{prefix}:{path[-1].id}",
                target=path[0].text if target == POST_T else target,
                path=path,
                image_refs=[],
                gold=label,
                vision_related=i < vision_cutoff,
                depth=depth,
            ))
    return instances


# ---------------------------------------------------------------------------
# toy multimodal datasets


_TOY_SUBJECTS = (
    ("battery", (220, 60, 40)), ("charger", (40, 160, 220)), ("panel", (60, 200, 90)),
    ("wheel", (240, 200, 40)), ("chart", (160, 60, 220)), ("wallet", (240, 120, 30)),
    ("ledger", (30, 220, 200)), ("antenna", (200, 200, 200)),
)

_TOY_OPINIONS = {
    StanceLabel.FAVOR: "this is a great step forward",
    StanceLabel.AGAINST: "this is a terrible idea honestly",
    StanceLabel.NONE: "not sure what to think here",
}


def toy_template():
    """Compact prompt template so toy sequences stay short."""
    from stancebench.prompt.templates import PromptTemplateConfig

    return PromptTemplateConfig(
        task_tag="[stance detection]",
        p_t_template="Stance of {name} on \"{target}\" (favor, against, none)?",
        case_text="Case:\nzed: the demo was neat.\nAnswer: favor.",
        p_v_text="Image:",
    )


def _write_toy_image(path: Path, rgb: tuple[int, int, int], variant: int) -> None:
    arr = np.zeros((8, 8, 3), dtype=np.uint8)
    arr[:, :] = rgb
    arr[variant % 8, :, :] = 255 - arr[variant % 8, :, :]  # one inverted stripe per variant
    PILImage.fromarray(arr).save(path)


def make_toy_dataset(
    root: str | Path,
    targets: Sequence[str] = ("tesla", "bitcoin"),
    per_target: int = 8,
    val_per_target: int = 2,
    seed: int = 0,
) -> list[Instance]:
    """Write a small multimodal dataset under ``root``: images/, captions.jsonl
    and instances.jsonl.

    Per target there are ``per_target`` unique (conversation, image, label)
    items in the train split, plus test/val copies that repeat the same
    content under fresh instance ids, so a model that memorizes the train
    split scores perfectly on test."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    captions: dict[str, str] = {}
    instances: list[Instance] = []

    for target in targets:
        for i in range(per_target):
            subject, rgb = _TOY_SUBJECTS[i % len(_TOY_SUBJECTS)]
            label = LABEL_ORDER[i % len(LABEL_ORDER)]
            ref = f"images/{target}-{i}.png"
            _write_toy_image(root / ref, rgb, i)
            captions[ref] = f"a photo of a {subject}"
            depth = 1 + (i % 3)

            def build(kind: str, split: Split) -> Instance:
                prefix = f"{target}-{kind}{i}"
                path = [Utterance(id=f"{prefix}/u1", author="op",
                                  text=f"new {subject} for {target} just dropped")]
                opinions = [_TOY_OPINIONS[label], "interesting take", "seen worse"]
                for level in range(2, depth + 1):
                    path.append(Utterance(
                        id=f"{prefix}/u{level}",
                        author=f"u{level}",
                        text=opinions[(depth - level) % len(opinions)],
                        parent_id=path[-1].id,
                        depth=level,
                    ))
                return Instance(
                    instance_id=f"{prefix}:{path[-1].id}",
                    target=target,
                    path=path,
                    image_refs=[ref],
                    gold=label,
                    vision_related=(i % 2 == 0),
                    depth=depth,
                    split=split,
                )

            instances.append(build("train", Split.TRAIN))
            instances.append(build("test", Split.TEST))
            if i < val_per_target:
                instances.append(build("val", Split.VAL))

    write_captions(captions, root / "captions.jsonl")
    write_instances(instances, root / "instances.jsonl")
    return instances


def write_synthetic_dump(path: str | Path, n_threads: int = 5, seed: int = 0,
                         target_hint: str = "tesla") -> list[ConversationThread]:
    threads = build_synthetic_threads(n_threads, seed=seed, target_hint=target_hint)
    write_threads(threads, path)
    return threads
