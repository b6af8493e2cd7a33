"""Render violations as repair feedback at three levels of detail."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .constraints import Phase, Violation

PASS_TEXT = "PASS"
FULL_FOOTER = "Please fix these topology issues and provide the corrected code."
WEAK_FOOTER = "Please fix these issues and provide the corrected code."
NONE_TEXT = "Attempt failed. Please try again."

PHASE_CATEGORY = {
    Phase.SYNTAX_ERC: "Syntax/ERC check failed.",
    Phase.KG_CONSTRAINT: "Constraint verification failed.",
    Phase.TOPOLOGY: "Topology verification failed.",
    Phase.SYSTEM_TOPOLOGY: "System topology verification failed.",
}


class FeedbackLevel(str, Enum):
    FULL = "full"
    WEAK = "weak"
    NONE = "none"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FeedbackMessage:
    level: FeedbackLevel
    text: str
    phase_histogram: Mapping[Phase, int] = field(default_factory=dict)


def phase_counts(violations: Iterable[Violation]) -> dict[Phase, int]:
    counts = Counter(v.phase for v in violations)
    return {p: counts.get(p, 0) for p in Phase}


def render(violations: Sequence[Violation], level: FeedbackLevel | str) -> FeedbackMessage:
    level = FeedbackLevel(level)
    hist = phase_counts(violations)
    if not violations:
        text = PASS_TEXT
    elif level is FeedbackLevel.FULL:
        text = "\n".join([v.message for v in violations] + [FULL_FOOTER])
    elif level is FeedbackLevel.WEAK:
        phases = list(dict.fromkeys(v.phase for v in violations))
        text = "\n".join([PHASE_CATEGORY[p] for p in phases] + [WEAK_FOOTER])
    else:
        text = NONE_TEXT
    return FeedbackMessage(level, text, hist)


def earliest_phase(violations: Iterable[Violation]) -> Phase | None:
    return min((v.phase for v in violations), default=None)


def classify_phases(trials: Iterable[Sequence[Violation]]) -> dict[Phase, int]:
    """Histogram of failed trials by their earliest failing phase.

    Each element of ``trials`` is the violation list of one trial's final
    attempt; passing trials (empty lists) are not counted.
    """
    hist = {p: 0 for p in Phase}
    for violations in trials:
        p = earliest_phase(violations)
        if p is not None:
            hist[p] += 1
    return hist


def report_doc(violations: Sequence[Violation], level: FeedbackLevel | str) -> dict:
    msg = render(violations, level)
    return {
        "ok": not violations,
        "violations": [v.to_doc() for v in violations],
        "feedback": {"level": msg.level.value, "text": msg.text},
    }
