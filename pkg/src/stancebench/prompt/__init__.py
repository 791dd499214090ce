from stancebench.prompt.tokenizer import (
    ANSWER_START,
    IMG_CLOSE,
    IMG_OPEN,
    INST,
    INST_END,
    MARKER_TEXT,
    PAD,
    VOCAB_SIZE,
    TokenSequence,
    detokenize,
    marker_id,
    tokenize,
)
from stancebench.prompt.templates import (
    DEFAULT_CASE,
    DEFAULT_P_V,
    DEFAULT_TASK_PROMPT,
    PromptBundle,
    PromptTemplateConfig,
    build_oneshot,
    build_prompt_bundle,
    build_text_input,
    decompose_text_input,
    render_task_prompt,
)
from stancebench.prompt.captions import Captioner, CaptionRecord, CaptionSource, StubCaptioner, get_caption

__all__ = [
    "ANSWER_START", "IMG_CLOSE", "IMG_OPEN", "INST", "INST_END", "MARKER_TEXT",
    "PAD", "VOCAB_SIZE", "TokenSequence", "detokenize", "marker_id", "tokenize",
    "DEFAULT_CASE", "DEFAULT_P_V", "DEFAULT_TASK_PROMPT", "PromptBundle",
    "PromptTemplateConfig", "build_oneshot", "build_prompt_bundle",
    "build_text_input", "decompose_text_input", "render_task_prompt",
    "Captioner", "CaptionRecord", "CaptionSource", "StubCaptioner", "get_caption",
]
