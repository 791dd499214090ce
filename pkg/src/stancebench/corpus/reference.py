"""Summary figures published with the source corpus release.

Used as ground truth for statistics regression tests and to cross-check
recomputed distributions. Note one known inconsistency inside the published
figures themselves: for the tesla and bitcoin targets the released
vision-related percentages (40.56 and 71.89) do not equal their own
count/total ratios (3,308/6,300 = 52.51%, 4,529/8,148 = 55.58%). We always
report count/total and flag the targets where the released percentage
disagrees with it.
"""

from __future__ import annotations

from stancebench.corpus.models import CorpusStats
from stancebench.labels import StanceLabel

TESLA = "tesla"
BITCOIN = "bitcoin"
POST_T = "post-t"

REFERENCE_LABEL_COUNTS: dict[str, dict[StanceLabel, int]] = {
    TESLA: {StanceLabel.AGAINST: 2211, StanceLabel.FAVOR: 2531, StanceLabel.NONE: 1558},
    BITCOIN: {StanceLabel.AGAINST: 1284, StanceLabel.FAVOR: 4550, StanceLabel.NONE: 2314},
    POST_T: {StanceLabel.AGAINST: 2008, StanceLabel.FAVOR: 3255, StanceLabel.NONE: 1629},
}

REFERENCE_LABEL_PERCENTS: dict[str, dict[StanceLabel, float]] = {
    TESLA: {StanceLabel.AGAINST: 35.10, StanceLabel.FAVOR: 40.17, StanceLabel.NONE: 24.73},
    BITCOIN: {StanceLabel.AGAINST: 15.76, StanceLabel.FAVOR: 55.84, StanceLabel.NONE: 28.40},
    POST_T: {StanceLabel.AGAINST: 29.14, StanceLabel.FAVOR: 47.23, StanceLabel.NONE: 23.64},
}

REFERENCE_TARGET_TOTALS: dict[str, int] = {TESLA: 6300, BITCOIN: 8148, POST_T: 6892}

REFERENCE_VISION_COUNTS: dict[str, int] = {TESLA: 3308, BITCOIN: 4529, POST_T: 6246}

# Percentages as released; tesla and bitcoin are inconsistent with the counts.
REFERENCE_VISION_PERCENTS: dict[str, float] = {TESLA: 40.56, BITCOIN: 71.89, POST_T: 90.63}

REFERENCE_TOTAL = 21340

# Depth profile of the release: count per conversational depth 1..6.
REFERENCE_DEPTH_COUNTS: dict[int, int] = {1: 955, 2: 4605, 3: 6076, 4: 4733, 5: 3230, 6: 1741}

# Mean word count per depth as released.
REFERENCE_DEPTH_MEAN_WORDS: dict[int, float] = {
    1: 39.81, 2: 27.18, 3: 29.96, 4: 33.13, 5: 39.23, 6: 47.20,
}


def flag_vision_discrepancies(stats: CorpusStats, tolerance: float = 0.5) -> list[str]:
    """Compare recomputed vision percentages (count/total) against the released
    percentages; return one flag string per disagreeing target."""
    flags = []
    for target, ts in stats.per_target.items():
        released = REFERENCE_VISION_PERCENTS.get(target)
        if released is None:
            continue
        computed = 100.0 * ts.vision_fraction
        if abs(computed - released) > tolerance:
            flags.append(
                f"vision-related percentage for {target!r}: computed {computed:.2f} "
                f"(= {ts.vision_count}/{ts.total}) but release states {released:.2f}"
            )
    return flags
