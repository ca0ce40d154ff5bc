"""Generation pipeline: render -> complete -> filter -> retry -> fallback.

Every model-backed operation funnels through complete_with_policy. A policy
names its rejection checks, caps backend calls at max_retries, and supplies
the fixed utterance used once every attempt has been rejected. Grounding
checks compare digit sequences in the output against the retrieval context,
so a fabricated figure can never reach the customer.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field

from .errors import BackendError, CorpusError, TemplateError
from .sightdb import SearchHit, digit_runs
from .templates import PromptTemplate, TemplatePack

# Per-session retry accounting. The engine points this at the live session's
# metrics dict for the duration of one advance; parallel sessions on other
# threads see their own value.
_METRICS: ContextVar[dict | None] = ContextVar("tourbot_gen_metrics", default=None)


@contextmanager
def record_metrics(metrics: dict):
    token = _METRICS.set(metrics)
    try:
        yield
    finally:
        _METRICS.reset(token)

QUESTION_MARKS = ("?", "？")

PROVENANCE_FIXED = "fixed"
PROVENANCE_GENERATED = "generated"
PROVENANCE_RETRIEVED = "retrieved"


@dataclass(frozen=True)
class FilterPolicy:
    """Named output checks plus the retry budget and fallback utterance."""

    checks: tuple[str, ...] = ("non_empty",)
    max_retries: int = 2
    fallback: str = ""

    def rejects(
        self,
        text: str,
        max_length: int,
        grounding: set[str] | None = None,
        required_phrases: tuple[str, ...] = (),
        forbidden_phrases: tuple[str, ...] = (),
    ) -> str | None:
        """Name of the first failing check, or None when the text passes."""
        for check in self.checks:
            if check == "non_empty" and not text.strip():
                return check
            if check == "no_question_mark" and any(m in text for m in QUESTION_MARKS):
                return check
            if check == "ends_with_question" and not text.rstrip().endswith(QUESTION_MARKS):
                return check
            if check == "max_length" and len(text) > max_length:
                return check
            if check == "digits_grounded":
                allowed = grounding or set()
                if not digit_runs(text) <= allowed:
                    return check
            if check == "contains_required" and not all(p in text for p in required_phrases):
                return check
            if check == "forbidden_phrase" and any(p and p in text for p in forbidden_phrases):
                return check
        return None


@dataclass
class GenResult:
    text: str
    provenance: str
    backend_calls: int
    rejections: int

    @property
    def fell_back(self) -> bool:
        return self.provenance != PROVENANCE_GENERATED


def complete_with_policy(
    backend,
    template: PromptTemplate,
    bindings: dict[str, str],
    policy: FilterPolicy,
    seed: int = 0,
    grounding: set[str] | None = None,
    required_phrases: tuple[str, ...] = (),
    forbidden_phrases: tuple[str, ...] = (),
    fallback_provenance: str = PROVENANCE_FIXED,
) -> GenResult:
    """Shared engine behind every generation op.

    Each retry re-samples with an incremented seed. A backend transport
    failure counts as a rejection. After max_retries rejected attempts the
    policy fallback is returned, flagged with the fallback provenance.
    """
    prompt = template.render(bindings)
    rejections = 0
    calls = 0
    result: GenResult | None = None
    for attempt in range(policy.max_retries):
        params = template.params(seed=seed + attempt)
        calls += 1
        try:
            text = backend.complete(prompt, params)
        except BackendError:
            rejections += 1
            continue
        failed = policy.rejects(
            text,
            max_length=template.max_length,
            grounding=grounding,
            required_phrases=required_phrases,
            forbidden_phrases=forbidden_phrases,
        )
        if failed is None:
            result = GenResult(text.strip(), PROVENANCE_GENERATED, calls, rejections)
            break
        rejections += 1
    if result is None:
        fallback = policy.fallback.format(**bindings) if policy.fallback else policy.fallback
        result = GenResult(fallback, fallback_provenance, calls, rejections)
    sink = _METRICS.get()
    if sink is not None:
        sink["backend_calls"] += result.backend_calls
        sink["rejections"] += result.rejections
        if result.fell_back:
            sink["fallbacks"] += 1
    return result


# Default policies per template family. Comment-class outputs must never ask
# a question; grounded outputs must never invent a digit sequence.
def default_policies(max_retries: int = 2) -> dict[str, FilterPolicy]:
    return {
        "icebreak_question": FilterPolicy(
            checks=("non_empty", "ends_with_question", "max_length"),
            max_retries=max_retries,
            fallback="I see. What do you enjoy most about your work?",
        ),
        "icebreak_comment": FilterPolicy(
            checks=("non_empty", "no_question_mark", "max_length"),
            max_retries=max_retries,
            fallback="That sounds like meaningful work, thank you for sharing it.",
        ),
        "comment": FilterPolicy(
            checks=("non_empty", "no_question_mark", "max_length"),
            max_retries=max_retries,
            fallback="I see, thank you for telling me.",
        ),
        "summarize": FilterPolicy(
            checks=("non_empty", "max_length"),
            max_retries=max_retries,
        ),
        "generate_questions": FilterPolicy(
            checks=("non_empty",),
            max_retries=max_retries,
        ),
        "kana_normalize": FilterPolicy(
            checks=("non_empty", "max_length"),
            max_retries=max_retries,
        ),
        "extract_info": FilterPolicy(
            checks=("non_empty", "digits_grounded", "max_length"),
            max_retries=max_retries,
        ),
        "recommend_appeal": FilterPolicy(
            checks=("non_empty", "no_question_mark", "max_length"),
            max_retries=max_retries,
        ),
        "recommend_utterance": FilterPolicy(
            checks=("non_empty", "no_question_mark", "digits_grounded", "max_length"),
            max_retries=max_retries,
        ),
        "counter_utterance": FilterPolicy(
            checks=("non_empty", "no_question_mark", "contains_required", "forbidden_phrase", "max_length"),
            max_retries=max_retries,
            fallback=(
                "{other_name} is also lovely, but this time {recommended_name} "
                "is simply the better fit for you."
            ),
        ),
        "qa_answer": FilterPolicy(
            checks=("non_empty", "digits_grounded", "max_length"),
            max_retries=max_retries,
        ),
        "closing_narration": FilterPolicy(
            checks=("non_empty", "no_question_mark", "digits_grounded", "max_length"),
            max_retries=max_retries,
        ),
        "point_translate": FilterPolicy(
            checks=("non_empty", "no_question_mark", "max_length"),
            max_retries=max_retries,
        ),
    }


@dataclass
class Gateway:
    """Template pack + backend + policies, with per-op entry points."""

    pack: TemplatePack
    backend: object
    seed: int = 0
    max_retries: int = 2
    policies: dict[str, FilterPolicy] = field(default_factory=dict)

    def __post_init__(self) -> None:
        merged = default_policies(self.max_retries)
        merged.update(self.policies)
        self.policies = merged

    def run(self, name: str, bindings: dict[str, str], **kwargs) -> GenResult:
        return complete_with_policy(
            self.backend,
            self.pack.get(name),
            bindings,
            self.policies[name],
            seed=self.seed,
            **kwargs,
        )

    # -- icebreaking ---------------------------------------------------------

    def icebreak_question(self, profile_context: str, answer: str) -> GenResult:
        return self.run("icebreak_question", {"answer": answer, "context": profile_context})

    def icebreak_comment(self, answer: str) -> GenResult:
        return self.run("icebreak_comment", {"answer": answer})

    # -- offline corpus enrichment --------------------------------------------

    def summarize(self, summary_long: str) -> str:
        """One-line summary within the template's character budget."""
        if not summary_long.strip():
            raise CorpusError("cannot summarize an empty sight description")
        result = self.run("summarize", {"text": summary_long})
        if result.fell_back:
            raise CorpusError("summarization produced no usable one-line summary")
        line = result.text.splitlines()[0].strip()
        budget = self.pack.get("summarize").max_length
        return line[:budget].rstrip()

    def generate_questions(self, summary_one_line: str, n: int = 10) -> list[str]:
        """Up to n candidate questions, each already format-checked."""
        result = self.run("generate_questions", {"summary": summary_one_line})
        questions: list[str] = []
        for line in result.text.splitlines():
            text = line.strip()
            if text.startswith("- "):
                text = text[2:].strip()
            if self.pack.question_format.match(text):
                questions.append(text)
            if len(questions) >= n:
                break
        return questions

    def translate_point(self, sight_name: str, question: str) -> str:
        result = self.run("point_translate", {"name": sight_name, "question": question})
        if result.fell_back:
            raise CorpusError(f"could not translate question into a point: {question!r}")
        return result.text

    # -- dialog-time ops -------------------------------------------------------

    def comment(self, question: str, answer: str) -> GenResult:
        return self.run("comment", {"question": question, "answer": answer})

    def extract_info(self, hits: list[SearchHit], question: str) -> GenResult:
        """Grounded extraction over retrieved hits; falls back to the top hit."""
        if not hits:
            raise ValueError("extract_info requires at least one hit")
        info = "\n".join(f"{_field_label(h.field)}: {h.text}" for h in hits)
        grounding = set().union(*(digit_runs(h.text) for h in hits))
        result = self.run(
            "extract_info",
            {"info": info, "question": question},
            grounding=grounding,
            fallback_provenance=PROVENANCE_RETRIEVED,
        )
        if result.fell_back:
            result.text = hits[0].text
        return result

    def kana_normalize(self, text: str, readings: dict[str, tuple[str, ...]]) -> str:
        """Replace each configured ambiguous character with a phonetic reading.

        All other characters pass through byte-identical, and text without
        any target character is returned unchanged without a backend call.
        """
        if not any(ch in text for ch in readings):
            return text
        out: list[str] = []
        for i, ch in enumerate(text):
            if ch not in readings:
                out.append(ch)
                continue
            choices = readings[ch]
            context = text[max(0, i - 20): i + 21]
            result = self.run(
                "kana_normalize",
                {"context": context, "target": ch, "choices": ", ".join(choices)},
            )
            reading = result.text.strip()
            if reading not in choices:
                reading = choices[0]
            out.append(reading)
        return "".join(out)


def _field_label(field_name: str) -> str:
    return field_name.replace("_", " ").capitalize()
