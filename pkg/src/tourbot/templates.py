"""Few-shot prompt templates: loading, rendering, generation parameters.

A template pack is one JSON document per language. Every template has an
instruction header, worked example blocks, and a query block with {slot}
markers. Rendering is byte-deterministic: header, shots joined by a
separator line, then the bound query.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TemplateError

TEMPLATE_NAMES = (
    "icebreak_question",
    "icebreak_comment",
    "summarize",
    "generate_questions",
    "comment",
    "extract_info",
    "recommend_appeal",
    "recommend_utterance",
    "counter_utterance",
    "qa_answer",
    "closing_narration",
    "kana_normalize",
    "point_translate",
)

SHOT_SEPARATOR = "\n###\n"

_SLOT = re.compile(r"\{([a-z_]+)\}")


@dataclass(frozen=True)
class GenParams:
    temperature: float = 0.2
    max_length: int = 300
    stop: tuple[str, ...] = ()
    seed: int = 0


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    header: str
    shots: tuple[str, ...]
    query: str
    slots: tuple[str, ...]
    stop: tuple[str, ...]
    max_length: int
    temperature: float = 0.2

    def render(self, bindings: dict[str, str]) -> str:
        """Header + shots + bound query block; errors name any unbound slot."""
        missing = [s for s in self.slots if s not in bindings]
        if missing:
            raise TemplateError(f"template {self.name!r}: unbound slot {missing[0]!r}")

        def substitute(match: re.Match) -> str:
            slot = match.group(1)
            if slot not in bindings:
                raise TemplateError(f"template {self.name!r}: unbound slot {slot!r}")
            return str(bindings[slot])

        query = _SLOT.sub(substitute, self.query)
        parts = [self.header]
        parts.extend(self.shots)
        parts.append(query)
        return SHOT_SEPARATOR.join(parts)

    def params(self, seed: int) -> GenParams:
        return GenParams(
            temperature=self.temperature,
            max_length=self.max_length,
            stop=self.stop,
            seed=seed,
        )


@dataclass(frozen=True)
class TemplatePack:
    language: str
    question_format: re.Pattern
    templates: dict[str, PromptTemplate] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "TemplatePack":
        path = Path(path)
        if not path.exists():
            raise TemplateError(f"template pack not found: {path}")
        raw = json.loads(path.read_text(encoding="utf-8"))
        templates: dict[str, PromptTemplate] = {}
        for name, entry in raw["templates"].items():
            if name not in TEMPLATE_NAMES:
                raise TemplateError(f"unknown template name {name!r} in {path}")
            shots = tuple(entry.get("shots", []))
            if not shots:
                raise TemplateError(f"template {name!r} ships no shots")
            templates[name] = PromptTemplate(
                name=name,
                header=entry["header"],
                shots=shots,
                query=entry["query"],
                slots=tuple(sorted(set(_SLOT.findall(entry["query"])))),
                stop=tuple(entry.get("stop", [])),
                max_length=int(entry.get("max_length", 300)),
                temperature=float(entry.get("temperature", 0.2)),
            )
        missing = set(TEMPLATE_NAMES) - set(templates)
        if missing:
            raise TemplateError(f"template pack {path} missing: {sorted(missing)}")
        return cls(
            language=raw.get("language", "en"),
            question_format=re.compile(raw["question_format"]),
            templates=templates,
        )

    def get(self, name: str) -> PromptTemplate:
        try:
            return self.templates[name]
        except KeyError:
            raise TemplateError(f"unknown template {name!r}") from None
