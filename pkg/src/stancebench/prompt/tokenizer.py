"""Byte-level tokenizer with a small block of special marker ids.

Ids 0..255 are raw UTF-8 bytes; markers occupy 256..261. Deterministic and
dependency-free; round-trips every valid string exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from stancebench.errors import TokenOutOfRange

INST = 256        # [INST]
INST_END = 257    # [/INST] — also the generation stop id
IMG_OPEN = 258    # <Img>
IMG_CLOSE = 259   # </Img>
ANSWER_START = 260
PAD = 261
VOCAB_SIZE = 262

MARKER_TEXT: dict[int, str] = {
    INST: "[INST]",
    INST_END: "[/INST]",
    IMG_OPEN: "<Img>",
    IMG_CLOSE: "</Img>",
    ANSWER_START: "<Answer>",
    PAD: "<Pad>",
}
_MARKER_BY_TEXT = {text: mid for mid, text in MARKER_TEXT.items()}


def marker_id(tag: str) -> int:
    try:
        return _MARKER_BY_TEXT[tag]
    except KeyError:
        raise KeyError(f"unknown marker {tag!r}; known: {sorted(_MARKER_BY_TEXT)}") from None


@dataclass
class TokenSequence:
    ids: list[int]
    vocabulary_size: int = VOCAB_SIZE

    def __post_init__(self) -> None:
        for tid in self.ids:
            if not (0 <= tid < self.vocabulary_size):
                raise TokenOutOfRange(
                    f"id {tid} outside [0, {self.vocabulary_size})"
                )

    def __len__(self) -> int:
        return len(self.ids)


def tokenize(text: str) -> TokenSequence:
    """Encode a string as its UTF-8 byte ids (never emits marker ids)."""
    return TokenSequence(ids=list(text.encode("utf-8")))


def detokenize(seq: TokenSequence | list[int], vocabulary_size: int = VOCAB_SIZE) -> str:
    """Decode ids back to text. Byte runs decode as UTF-8; marker ids render as
    their display tags. Exact inverse of tokenize on tokenize output; byte
    runs that are not valid UTF-8 (possible in generated ids) decode with
    replacement characters rather than failing."""
    ids = seq.ids if isinstance(seq, TokenSequence) else seq
    if isinstance(seq, TokenSequence):
        vocabulary_size = seq.vocabulary_size
    out: list[str] = []
    buf = bytearray()
    for tid in ids:
        if not (0 <= tid < vocabulary_size):
            raise TokenOutOfRange(f"id {tid} outside [0, {vocabulary_size})")
        if tid < 256:
            buf.append(tid)
        else:
            if buf:
                out.append(buf.decode("utf-8", errors="replace"))
                buf.clear()
            out.append(MARKER_TEXT[tid])
    if buf:
        out.append(buf.decode("utf-8", errors="replace"))
    return "".join(out)
