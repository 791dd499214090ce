"""Textual prompt construction.

The textual-modality input is assembled in three stages:

1. the task prompt, rendered from a template with {name} and {target} slots;
2. the one-shot prompt: task prompt, then the conversation rendered one
   "author: text" line per utterance, then a worked example (the Case);
3. the full text input: task tag, then the image caption, then the one-shot
   prompt, newline-joined.

Ablation flags surgically remove the caption segment, the Case segment, or
reduce the conversation to its focus line, leaving every other byte intact.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from stancebench.corpus.models import Instance, Utterance
from stancebench.errors import EmptyConversation, TemplateInvalid
from stancebench.prompt.tokenizer import TokenSequence, tokenize

logger = logging.getLogger(__name__)

DEFAULT_TASK_PROMPT = (
    "The following is a conversation on social media based on a post. "
    "All comments are responses to the content of the post, and each comment "
    "replies to the previous one. There are three stances [favor, against, none]. "
    "Choose one of the three stances to express {name}'s stance towards \"{target}\"."
)

# A fixed worked example on a neutral product; fully ablatable via omit_case.
DEFAULT_CASE = (
    "Case:\n"
    "mika: Just tried the new SparkKettle and it boils water in under a minute.\n"
    "remy: Does the handle stay cool though? Mine always gets too hot.\n"
    "mika: Completely cool to the touch, honestly the best kitchen buy this year.\n"
    "remy: Sold. Ordering one for my parents too.\n"
    "Answer: remy's stance towards \"SparkKettle\" is favor."
)

DEFAULT_P_V = "The image attached to the post is:"

CAPTION_HEADER = "Caption: "


@dataclass
class PromptTemplateConfig:
    task_tag: str = "[stance detection]"
    p_t_template: str = DEFAULT_TASK_PROMPT
    case_text: str = DEFAULT_CASE
    p_v_text: str = DEFAULT_P_V
    omit_caption: bool = False
    omit_case: bool = False
    single_sentence: bool = False

    def validate(self) -> None:
        for slot in ("{name}", "{target}"):
            count = self.p_t_template.count(slot)
            if count != 1:
                raise TemplateInvalid(
                    f"template must contain {slot} exactly once, found {count}"
                )

    def with_flags(self, omit_caption: Optional[bool] = None,
                   omit_case: Optional[bool] = None,
                   single_sentence: Optional[bool] = None) -> "PromptTemplateConfig":
        return replace(
            self,
            omit_caption=self.omit_caption if omit_caption is None else omit_caption,
            omit_case=self.omit_case if omit_case is None else omit_case,
            single_sentence=self.single_sentence if single_sentence is None else single_sentence,
        )

    def to_dict(self) -> dict:
        return {
            "task_tag": self.task_tag,
            "p_t_template": self.p_t_template,
            "case_text": self.case_text,
            "p_v_text": self.p_v_text,
            "omit_caption": self.omit_caption,
            "omit_case": self.omit_case,
            "single_sentence": self.single_sentence,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PromptTemplateConfig":
        cfg = cls(**{k: obj[k] for k in obj if k in cls.__dataclass_fields__})
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplateConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class PromptBundle:
    p_t: str
    conversation_block: str
    case: str
    delta: str
    caption: str
    gamma_t: str
    gamma_t_tokens: TokenSequence


def render_task_prompt(target: str, focus_author: str, template: PromptTemplateConfig) -> str:
    template.validate()
    return (template.p_t_template
            .replace("{name}", focus_author)
            .replace("{target}", target))


def render_conversation(path: Sequence[Utterance], single_sentence: bool = False) -> str:
    if not path:
        raise EmptyConversation("conversation path is empty")
    shown = [path[-1]] if single_sentence else list(path)
    return "\n".join(f"{u.author}: {u.text}" for u in shown)


def build_oneshot(p_t: str, path: Sequence[Utterance], template: PromptTemplateConfig) -> str:
    """Segment order is always: task prompt, conversation, Case."""
    conversation_block = render_conversation(path, template.single_sentence)
    if template.omit_case:
        return p_t + "\n" + conversation_block
    return p_t + "\n" + conversation_block + "\n" + template.case_text


def build_text_input(caption: str, delta: str, template: PromptTemplateConfig) -> str:
    if template.omit_caption:
        return template.task_tag + "\n" + delta
    if caption == "":
        logger.warning("caption is empty but omit_caption is off; emitting empty caption body")
    return template.task_tag + "\n" + CAPTION_HEADER + caption + "\n" + delta


def build_prompt_bundle(
    instance: Instance,
    caption: str,
    template: PromptTemplateConfig,
) -> PromptBundle:
    p_t = render_task_prompt(instance.target, instance.focus.author, template)
    conversation_block = render_conversation(instance.path, template.single_sentence)
    case = "" if template.omit_case else template.case_text
    delta = build_oneshot(p_t, instance.path, template)
    gamma_t = build_text_input(caption, delta, template)
    return PromptBundle(
        p_t=p_t,
        conversation_block=conversation_block,
        case=case,
        delta=delta,
        caption="" if template.omit_caption else caption,
        gamma_t=gamma_t,
        gamma_t_tokens=tokenize(gamma_t),
    )


def decompose_text_input(gamma_t: str, template: PromptTemplateConfig, p_t: str) -> dict[str, str]:
    """Invert build_text_input/build_oneshot: recover the exact segments.

    Raises ValueError when gamma_t is not a valid composition for the given
    template and rendered task prompt — the decomposition, when it exists,
    is unique because segment order and delimiters are fixed.
    """
    prefix = template.task_tag + "\n"
    if not gamma_t.startswith(prefix):
        raise ValueError("missing task tag")
    rest = gamma_t[len(prefix):]
    caption = ""
    if not template.omit_caption:
        if not rest.startswith(CAPTION_HEADER):
            raise ValueError("missing caption header")
        line_end = rest.index("\n")
        caption = rest[len(CAPTION_HEADER):line_end]
        rest = rest[line_end + 1:]
    if not rest.startswith(p_t + "\n"):
        raise ValueError("task prompt does not match")
    rest = rest[len(p_t) + 1:]
    if template.omit_case:
        conversation = rest
        case = ""
    else:
        suffix = "\n" + template.case_text
        if not rest.endswith(suffix):
            raise ValueError("case segment does not match")
        conversation = rest[: -len(suffix)]
        case = template.case_text
    return {
        "task_tag": template.task_tag,
        "caption": caption,
        "p_t": p_t,
        "conversation_block": conversation,
        "case": case,
    }
