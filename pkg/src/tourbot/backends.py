"""Generation backends: the text-in/text-out contract, a deterministic mock,
and a thin HTTP client for a remote model.

The mock continues a rendered prompt the way a cooperative model would: it
looks at the final role tag of the query block and synthesizes a completion
from the bound context lines. Everything is a pure function of
(prompt, params, seed), which is what makes scripted dialogs reproducible.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Protocol

import requests

from .errors import BackendError
from .sightdb import FIELD_VOCAB, STOPWORDS
from .templates import SHOT_SEPARATOR, GenParams

_WORD = re.compile(r"[\w'-]+")

_LABEL_LINE = re.compile(r"^([A-Za-z][A-Za-z ]+):\s*(.+)$")

_LABEL_TO_FIELD = {
    "business hours": "business_hours",
    "location": "location",
    "access": "access",
    "charge": "charge",
    "review": "review",
}


class GenBackend(Protocol):
    """Behavioral contract: complete a prompt under the given parameters.

    Implementations must be safely callable from multiple threads; the mock
    must additionally be deterministic given (prompt, params, seed).
    """

    def complete(self, prompt: str, params: GenParams) -> str: ...


def _apply_stops(text: str, stop: tuple[str, ...]) -> str:
    for marker in stop:
        idx = text.find(marker)
        if idx >= 0:
            text = text[:idx]
    return text


def _query_block(prompt: str) -> str:
    return prompt.split(SHOT_SEPARATOR)[-1]


def _last_tagged(block: str, tag: str) -> str:
    value = ""
    for line in block.splitlines():
        if line.startswith(tag):
            value = line[len(tag):].strip()
    return value


def _content_words(text: str) -> list[str]:
    return [w for w in _WORD.findall(text)]


# Connectives dropped only for phrase mining; the shared search stoplist
# must keep words like "where" that double as retrieval cues.
_PHRASE_STOP = STOPWORDS | frozenset(
    """where when while around near also so such very ready seem seems into
    onto through every one two three who what why which lets let""".split()
)


def _phrase_runs(text: str, max_words: int = 3) -> list[str]:
    """Runs of consecutive content words, each capped at max_words."""
    runs: list[str] = []
    for segment in re.split(r"[,.;:!?]", text):
        current: list[str] = []
        for word in _WORD.findall(segment):
            if word.lower() in _PHRASE_STOP or word.isdigit():
                if current:
                    runs.append(" ".join(current[:max_words]))
                    current = []
            else:
                current.append(word)
        if current:
            runs.append(" ".join(current[:max_words]))
    return runs


def _strip_lead(answer: str) -> str:
    """Drop a leading first-person filler so echoes read naturally."""
    lowered = answer.lower()
    for lead in ("i am a ", "i am an ", "i am ", "i'm a ", "i'm an ", "i'm ",
                 "we are ", "we're ", "they are ", "they're ", "it is ", "it's ",
                 "i work as a ", "i work as an ", "i work as ", "i work in "):
        if lowered.startswith(lead):
            return answer[len(lead):]
    return answer


def _score_line(line_tokens: set[str], query_tokens: set[str], field: str | None) -> float:
    if not query_tokens:
        return 0.0
    score = len(line_tokens & query_tokens) / len(query_tokens)
    if field is not None and query_tokens & FIELD_VOCAB.get(field, frozenset()):
        score += 1.0
    return score


def _question_tokens(question: str) -> set[str]:
    tokens = {t.lower() for t in _content_words(question)}
    stripped = tokens - STOPWORDS
    return stripped or tokens


@dataclass(frozen=True)
class MockBackend:
    """Deterministic stand-in for the hosted foundation model."""

    seed: int = 0

    def complete(self, prompt: str, params: GenParams) -> str:
        block = _query_block(prompt)
        tail = block.rstrip().splitlines()[-1] if block.strip() else ""
        if tail.endswith("Guide(question):"):
            text = self._follow_up_question(block)
        elif tail.endswith("Guide(comment):"):
            text = self._comment(block)
        elif tail.endswith("Summary:"):
            text = self._summary(block)
        elif tail.endswith("[Questions]"):
            text = self._questions(block)
        elif tail.endswith("Answer:"):
            text = self._extract(block)
        elif tail.endswith("This place is appealing because"):
            text = self._appeal(block)
        elif tail.endswith("Guide(recommendation):"):
            text = self._recommendation(block)
        elif tail.endswith("Guide(contrast):"):
            text = self._contrast(block)
        elif tail.endswith("Guide(answer):"):
            text = self._qa(block)
        elif tail.endswith("Narration:"):
            text = self._narration(block)
        elif tail.endswith("Reading:"):
            text = self._reading(block)
        elif tail.endswith("Reason:"):
            text = self._reason(block)
        else:
            text = _last_tagged(block, "Customer:")
        text = _apply_stops(text, params.stop)
        return text[: params.max_length].strip()

    # -- per-task synthesis ------------------------------------------------

    def _follow_up_question(self, block: str) -> str:
        answer = _last_tagged(block, "Customer:")
        if not answer:
            return ""
        topic = _strip_lead(answer).rstrip(".?! ")
        return f"That sounds interesting. What do you enjoy most about being {topic}?"

    def _comment(self, block: str) -> str:
        answer = _last_tagged(block, "Customer:")
        if not answer:
            return ""
        fragment = _strip_lead(answer).rstrip(".?! ")
        if block.splitlines()[0].startswith("Customer:"):
            # Icebreak variant: an upbeat exclamation, never a question.
            return f"{fragment[:1].upper()}{fragment[1:]}, how wonderful!"
        return f"{fragment[:1].upper()}{fragment[1:]}, I see. Thank you for telling me."

    def _summary(self, block: str) -> str:
        text = _last_tagged(block, "Text:")
        sentence = re.split(r"(?<=[.!?])\s+", text)[0] if text else ""
        return sentence

    def _questions(self, block: str) -> str:
        lines = block.splitlines()
        try:
            start = lines.index("[Summary]") + 1
            end = lines.index("[Questions]")
        except ValueError:
            return ""
        summary = " ".join(lines[start:end])
        runs = _phrase_runs(summary)
        if len(runs) > 1:
            runs = runs[1:]  # drop the leading subject run (usually the name)
        seen: set[str] = set()
        questions = []
        for run in runs:
            key = run.lower()
            if key in seen:
                continue
            seen.add(key)
            questions.append(f"- Do you like {run}?")
            if len(questions) >= 10:
                break
        return "\n".join(questions)

    def _info_lines(self, block: str, until: str) -> list[tuple[str | None, str]]:
        lines: list[tuple[str | None, str]] = []
        for line in block.splitlines():
            if line.startswith(until):
                break
            m = _LABEL_LINE.match(line)
            if m:
                field = _LABEL_TO_FIELD.get(m.group(1).strip().lower())
                lines.append((field, m.group(2).strip()))
        return lines

    def _extract(self, block: str) -> str:
        question = _last_tagged(block, "Question:")
        candidates = self._info_lines(block, until="Question:")
        if not candidates:
            return ""
        qtokens = _question_tokens(question)
        best_text, best_score = "", -1.0
        for field_name, text in candidates:  # ties keep the earliest line
            score = _score_line({t.lower() for t in _content_words(text)}, qtokens, field_name)
            if score > best_score:
                best_text, best_score = text, score
        return best_text

    def _appeal(self, block: str) -> str:
        summary = _last_tagged(block, "Summary:")
        if not summary:
            return ""
        return f"of what it offers: {summary.rstrip('.')}."

    def _recommendation(self, block: str) -> str:
        points = _last_tagged(block, "Reasons:")
        details = _last_tagged(block, "Details:")
        first_detail = details.split(" | ")[0] if details else ""
        pieces = []
        if points:
            pieces.append(points)
        if first_detail:
            pieces.append(f"One more note: {first_detail.rstrip('.')}.")
        return " ".join(pieces)

    def _contrast(self, block: str) -> str:
        other = _last_tagged(block, "Other sight:")
        drawbacks = _last_tagged(block, "Drawbacks:")
        recommended = _last_tagged(block, "Recommended sight:")
        return (
            f"{other} is also worth a look, but it {drawbacks}, "
            f"so {recommended} is probably the better choice for you."
        )

    def _qa(self, block: str) -> str:
        question = _last_tagged(block, "Customer:")
        qtokens = _question_tokens(question)
        scored: list[tuple[float, int, str]] = []
        current_name = ""
        index = 0
        for line in block.splitlines():
            header = re.match(r"^\[Information for (.+)\]$", line)
            if header:
                current_name = header.group(1)
                continue
            if line.startswith("- "):
                entry = line[2:].strip()
                field = None
                text = entry
                m = _LABEL_LINE.match(entry)
                if m:
                    field = _LABEL_TO_FIELD.get(m.group(1).strip().lower())
                    text = m.group(2).strip()
                tokens = {t.lower() for t in _content_words(text)}
                tokens |= {t.lower() for t in _content_words(current_name)}
                scored.append((_score_line(tokens, qtokens, field), -index, text))
                index += 1
        if not scored:
            return ""
        best = max(scored)[2]
        return f"Based on our search information, {best.rstrip('.')}."

    def _narration(self, block: str) -> str:
        name = _last_tagged(block, "Sight:")
        first_review = ""
        for line in block.splitlines():
            if line.startswith("- "):
                first_review = line[2:].strip()
                break
        if not first_review:
            return ""
        return (
            f"When we visited {name}, it felt just like one visitor put it: "
            f"{first_review}"
        )

    def _reading(self, block: str) -> str:
        choices = _last_tagged(block, "Choices:")
        first = choices.split(",")[0].strip() if choices else ""
        return first

    def _reason(self, block: str) -> str:
        name = _last_tagged(block, "Sight:")
        question = _last_tagged(block, "Question:")
        interest = question
        if interest.lower().startswith("do you like "):
            interest = interest[len("do you like "):]
        interest = interest.rstrip("?").strip()
        return f"{name} is a great choice if you like {interest}."


class RemoteBackend:
    """HTTP client speaking {prompt, params} -> {completion}.

    The endpoint comes from configuration; the bearer credential is read
    from the named environment variable at call time.
    """

    def __init__(self, endpoint: str, credential_env: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.timeout = timeout

    def complete(self, prompt: str, params: GenParams) -> str:
        headers = {}
        if self.credential_env:
            token = os.environ.get(self.credential_env)
            if not token:
                raise BackendError(f"credential env var {self.credential_env!r} not set")
            headers["Authorization"] = f"Bearer {token}"
        payload = {
            "prompt": prompt,
            "params": {
                "temperature": params.temperature,
                "max_length": params.max_length,
                "stop": list(params.stop),
                "seed": params.seed,
            },
        }
        try:
            response = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
            response.raise_for_status()
            completion = response.json()["completion"]
        except requests.RequestException as exc:
            raise BackendError(f"backend request failed: {exc}") from exc
        except (KeyError, ValueError) as exc:
            raise BackendError(f"malformed backend response: {exc}") from exc
        return _apply_stops(str(completion), params.stop)
