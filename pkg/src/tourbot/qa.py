"""Open question answering over both candidate sights.

Context is assembled by searching each sight for the customer's question;
the answer is generated against that context only, digit-checked, and, when
both sights produced hits, finished with a steer toward the recommended one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gateway import Gateway, PROVENANCE_FIXED, PROVENANCE_GENERATED, PROVENANCE_RETRIEVED
from .lexicon import AnswerLexicon
from .recommendation import STEER_CLAUSE
from .sightdb import SearchHit, SightCatalog, digit_runs

NO_INFO_FALLBACK = (
    "I am sorry, I do not have that information at hand, and I would rather "
    "not guess."
)


@dataclass
class QaContext:
    s1: str
    s2: str
    d1: list[SearchHit]
    d2: list[SearchHit]
    name_a: str
    name_b: str
    recommended: str  # sight id
    recommended_name: str
    other_name: str
    question: str


def wants_question(utterance: str | None, lexicon: AnswerLexicon) -> str:
    """yes / no / unknown. A direct question counts as yes (and is the question)."""
    if lexicon.is_direct_question(utterance):
        return "yes"
    return lexicon.classify_yes_no(utterance)


def build_context(
    catalog: SightCatalog,
    sight_a: str,
    sight_b: str,
    recommended: str,
    question: str,
    k: int = 5,
) -> QaContext:
    rec_a = catalog.get(sight_a)
    rec_b = catalog.get(sight_b)
    rec_name = catalog.get(recommended).name
    other_name = rec_b.name if recommended == sight_a else rec_a.name
    return QaContext(
        s1=rec_a.summary_one_line,
        s2=rec_b.summary_one_line,
        d1=catalog.search(question, sight_filter=sight_a, k=k),
        d2=catalog.search(question, sight_filter=sight_b, k=k),
        name_a=rec_a.name,
        name_b=rec_b.name,
        recommended=recommended,
        recommended_name=rec_name,
        other_name=other_name,
        question=question,
    )


def _info_block(summary: str, hits: list[SearchHit]) -> str:
    lines = [f"- Summary: {summary}"] if summary else []
    lines.extend(f"- {h.field.replace('_', ' ').capitalize()}: {h.text}" for h in hits)
    return "\n".join(lines) if lines else "- (no information)"


def answer(gateway: Gateway, ctx: QaContext) -> tuple[str, str]:
    """(text, provenance). Honest no-information fallback over fabrication."""
    if not ctx.d1 and not ctx.d2:
        return NO_INFO_FALLBACK, PROVENANCE_FIXED
    all_hits = ctx.d1 + ctx.d2
    grounding = set().union(*(digit_runs(h.text) for h in all_hits))
    grounding |= digit_runs(ctx.s1) | digit_runs(ctx.s2)
    result = gateway.run(
        "qa_answer",
        {
            "name_a": ctx.name_a,
            "info_a": _info_block(ctx.s1, ctx.d1),
            "name_b": ctx.name_b,
            "info_b": _info_block(ctx.s2, ctx.d2),
            "recommended_name": ctx.recommended_name,
            "question": ctx.question,
        },
        grounding=grounding,
    )
    if result.fell_back:
        top = max(all_hits, key=lambda h: h.score)
        text = f"Here is what I could find: {top.text}"
        provenance = PROVENANCE_RETRIEVED
    else:
        text = result.text
        provenance = PROVENANCE_GENERATED
    # Steer only when both sights actually yielded data for the question.
    if ctx.d1 and ctx.d2:
        steer = STEER_CLAUSE.format(
            other_name=ctx.other_name, recommended_name=ctx.recommended_name
        )
        text = f"{text} {steer}"
    return text, provenance
