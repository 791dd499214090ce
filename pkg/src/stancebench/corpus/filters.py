"""Thread-level preprocessing filters.

A thread is kept only when it clears every rule; the decision reports all
triggered drop reasons, not just the first one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from stancebench.corpus.models import ConversationThread, word_count


class DropReason(str, Enum):
    RELEVANCE = "Relevance"
    COMMENT_COUNT = "CommentCount"
    LENGTH = "Length"
    LANGUAGE = "Language"
    NO_IMAGE = "NoImage"


def latin_alpha_heuristic(text: str, threshold: float = 0.90) -> bool:
    """English heuristic: at least ``threshold`` of the alphabetic characters
    are basic-Latin letters. A text without alphabetic characters passes
    vacuously. Swap in a real detector via FilterConfig.english_predicate."""
    alpha = [c for c in text if c.isalpha()]
    if not alpha:
        return True
    latin = sum(1 for c in alpha if ("a" <= c <= "z") or ("A" <= c <= "Z"))
    return latin / len(alpha) >= threshold


@dataclass
class FilterConfig:
    min_post_words: int = 15
    max_post_words: int = 150
    min_comments: int = 100
    require_images: bool = True
    require_relevance: bool = True
    english_threshold: float = 0.90
    # Pluggable predicate; defaults to the basic-Latin character heuristic.
    english_predicate: Optional[Callable[[str], bool]] = None

    def is_english(self, text: str) -> bool:
        if self.english_predicate is not None:
            return self.english_predicate(text)
        return latin_alpha_heuristic(text, self.english_threshold)


@dataclass
class FilterDecision:
    keep: bool
    reasons: set[DropReason] = field(default_factory=set)


def apply_preprocess_filters(thread: ConversationThread, rules: FilterConfig) -> FilterDecision:
    reasons: set[DropReason] = set()

    if rules.require_relevance and not (thread.reviewer_relevance[0] and thread.reviewer_relevance[1]):
        reasons.add(DropReason.RELEVANCE)
    if len(thread.comments) < rules.min_comments:
        reasons.add(DropReason.COMMENT_COUNT)
    post_words = word_count(thread.post.text)
    if not (rules.min_post_words <= post_words <= rules.max_post_words):
        reasons.add(DropReason.LENGTH)
    if not rules.is_english(thread.post.text):
        reasons.add(DropReason.LANGUAGE)
    if rules.require_images and not thread.image_refs:
        reasons.add(DropReason.NO_IMAGE)

    return FilterDecision(keep=not reasons, reasons=reasons)
