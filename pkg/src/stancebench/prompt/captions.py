"""Image captions: a deterministic stub backed by captions.jsonl, plus the
interface an external vision-language captioner would implement."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol, runtime_checkable

from stancebench.errors import ImageMissing


class CaptionSource(str, Enum):
    STUB = "stub"
    EXTERNAL = "external"


@dataclass
class CaptionRecord:
    image_ref: str
    caption: str
    source: CaptionSource


@runtime_checkable
class Captioner(Protocol):
    def caption(self, image_ref: str, image_bytes: bytes) -> str: ...

    @property
    def source(self) -> CaptionSource: ...


class StubCaptioner:
    """Returns the caption stored in captions.jsonl, else 'image:' + filename."""

    source = CaptionSource.STUB

    def __init__(self, captions: dict[str, str] | None = None):
        self._captions = dict(captions or {})

    @classmethod
    def from_file(cls, path: str | Path) -> "StubCaptioner":
        captions: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                captions[obj["image_ref"]] = obj["caption"]
        return cls(captions)

    def caption(self, image_ref: str, image_bytes: bytes) -> str:
        stored = self._captions.get(image_ref)
        if stored is not None:
            return stored
        return "image:" + Path(image_ref).name

    def lookup(self, image_ref: str) -> str:
        """Caption without touching the file system (task views, reports)."""
        return self._captions.get(image_ref, "image:" + Path(image_ref).name)


def write_captions(captions: dict[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ref in sorted(captions):
            fh.write(json.dumps({"image_ref": ref, "caption": captions[ref]},
                                ensure_ascii=False, sort_keys=True) + "\n")


def get_caption(image_ref: str, captioner: Captioner, data_root: str | Path = ".") -> CaptionRecord:
    path = Path(data_root) / image_ref
    if not path.is_file():
        raise ImageMissing(f"image {image_ref!r} not found under {data_root!r}")
    text = captioner.caption(image_ref, path.read_bytes())
    if captioner.source == CaptionSource.EXTERNAL and not text:
        raise ValueError("external captioner returned an empty caption")
    return CaptionRecord(image_ref=image_ref, caption=text, source=captioner.source)
