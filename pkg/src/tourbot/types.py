"""Core conversation types: phases, turns, annotations, sight assignment."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .errors import ConfigurationError

EXCLAMATION_MARKS = ("!", "！")


class Phase(str, Enum):
    GREETING = "greeting"
    ICEBREAKER = "icebreaker"
    BRIEF_EXPLANATION = "brief_explanation"
    INTERVIEW = "interview"
    RECOMMENDATION = "recommendation"
    QA = "qa"
    CLOSING = "closing"
    DONE = "done"


# Canonical scenario order; any session's distinct visited phases must be a
# subsequence of this.
PHASE_ORDER = [
    Phase.GREETING,
    Phase.ICEBREAKER,
    Phase.BRIEF_EXPLANATION,
    Phase.INTERVIEW,
    Phase.RECOMMENDATION,
    Phase.QA,
    Phase.CLOSING,
    Phase.DONE,
]

# Phases in which the agent directs attention to the shared monitor.
MONITOR_PHASES = frozenset({Phase.BRIEF_EXPLANATION, Phase.RECOMMENDATION})


@dataclass(frozen=True)
class SightAssignment:
    """The two candidate sights plus the one the engine must push."""

    candidate_a: str
    candidate_b: str
    recommended: str

    def __post_init__(self) -> None:
        if self.recommended not in (self.candidate_a, self.candidate_b):
            raise ConfigurationError(
                f"recommended sight {self.recommended!r} is not one of the "
                f"candidates ({self.candidate_a!r}, {self.candidate_b!r})"
            )

    @property
    def other(self) -> str:
        return self.candidate_b if self.recommended == self.candidate_a else self.candidate_a


@dataclass
class AgentAnnotations:
    expression: str  # "smile" | "surprised"
    nod_cue: bool = False
    look_at_monitor: bool = False
    provenance: str = "fixed"  # "fixed" | "generated" | "retrieved"


@dataclass
class AgentTurn:
    text: str
    phase: Phase
    annotations: AgentAnnotations


@dataclass
class TurnRecord:
    speaker: str  # "agent" | "customer"
    text: str
    phase: Phase
    ts: datetime
    annotations: AgentAnnotations | None = None


def expression_for(text: str) -> str:
    """Surprised exactly when the utterance carries an exclamation mark."""
    return "surprised" if any(m in text for m in EXCLAMATION_MARKS) else "smile"


def make_agent_turn(text: str, phase: Phase, provenance: str = "fixed") -> AgentTurn:
    return AgentTurn(
        text=text,
        phase=phase,
        annotations=AgentAnnotations(
            expression=expression_for(text),
            nod_cue=False,
            look_at_monitor=phase in MONITOR_PHASES,
            provenance=provenance,
        ),
    )


_WS = re.compile(r"\s+")


def normalize_utterance(text: str | None) -> str | None:
    """Collapse a raw transcript into one trimmed line; None/blank stays None."""
    if text is None:
        return None
    flat = _WS.sub(" ", text).strip()
    return flat or None
