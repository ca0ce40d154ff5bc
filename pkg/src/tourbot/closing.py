"""Closing phase: time's-up notice, review-grounded farewell pitch, goodbye."""

from __future__ import annotations

from dataclasses import dataclass

from .gateway import Gateway, PROVENANCE_FIXED, PROVENANCE_GENERATED
from .sightdb import digit_runs

TIME_NOTICE = "Our time together is nearly up, so let me leave you with one last thought."

FAREWELL = (
    "Thank you very much for talking with me today. I hope {name} makes "
    "your trip a wonderful one. Safe travels."
)

MAX_CLOSING_REVIEWS = 3


@dataclass
class ClosingContext:
    recommended_id: str
    recommended_name: str
    summary_one_line: str
    positive_reviews: list[str]  # rating >= 4, at most MAX_CLOSING_REVIEWS


def closing_turn_texts(gateway: Gateway, ctx: ClosingContext) -> list[tuple[str, str]]:
    """The 2-3 closing utterances as (text, provenance) pairs."""
    turns: list[tuple[str, str]] = [(TIME_NOTICE, PROVENANCE_FIXED)]

    # Ground the experiential narration in real visitor voices; with no
    # positive reviews on file, lean on the one-line summary instead.
    review_lines = ctx.positive_reviews[:MAX_CLOSING_REVIEWS] or [ctx.summary_one_line]
    grounding = set().union(*(digit_runs(r) for r in review_lines))
    result = gateway.run(
        "closing_narration",
        {
            "name": ctx.recommended_name,
            "reviews": "\n".join(f"- {r}" for r in review_lines),
        },
        grounding=grounding,
    )
    if not result.fell_back:
        turns.append((result.text, PROVENANCE_GENERATED))

    turns.append((FAREWELL.format(name=ctx.recommended_name), PROVENANCE_FIXED))
    return turns
