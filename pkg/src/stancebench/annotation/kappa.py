"""Chance-corrected inter-annotator agreement over the favor/against pairs.

Pairs where either rater chose "none" are excluded before computation; the
chance agreement uses each rater's own marginal label frequencies.
"""

from __future__ import annotations

from typing import Sequence

from stancebench.errors import DegenerateMarginals, NoEligiblePairs
from stancebench.labels import StanceLabel

ELIGIBLE = (StanceLabel.AGAINST, StanceLabel.FAVOR)


def cohen_kappa(pairs: Sequence[tuple[StanceLabel, StanceLabel]]) -> float:
    eligible = [(a, b) for a, b in pairs if a in ELIGIBLE and b in ELIGIBLE]
    if not eligible:
        raise NoEligiblePairs("no favor/against pairs left after exclusion")

    n = len(eligible)
    p_o = sum(1 for a, b in eligible if a == b) / n
    p_e = 0.0
    for label in ELIGIBLE:
        p_a = sum(1 for a, _ in eligible if a == label) / n
        p_b = sum(1 for _, b in eligible if b == label) / n
        p_e += p_a * p_b
    if p_e == 1.0:
        raise DegenerateMarginals("both raters are constant and equal; kappa undefined")
    return (p_o - p_e) / (1.0 - p_e)
