"""Run manifests: every artifact-producing command writes one next to its
output. Timestamps live here and only here, so all other outputs stay
byte-identical across reruns."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import stancebench


@dataclass
class RunManifest:
    command: str
    config_hash: str
    corpus_hash: str
    seed: int
    created_at: str
    tool_version: str = stancebench.__version__

    @classmethod
    def create(cls, command: str, config_hash: str, corpus_hash: str, seed: int) -> "RunManifest":
        return cls(
            command=command,
            config_hash=config_hash,
            corpus_hash=corpus_hash,
            seed=seed,
            created_at=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "corpus_hash": self.corpus_hash,
            "seed": self.seed,
            "created_at": self.created_at,
            "tool_version": self.tool_version,
        }


def write_manifest(path: str | Path, manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def hash_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def hash_json(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()
