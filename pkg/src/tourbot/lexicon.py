"""Pattern lexicon for answer classification and age extraction.

Pattern lists are external data (per language); classification checks
classes in file order and patterns in list order, so negation cues placed
first win over affirmative cues ("not really" -> no).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

_APOSTROPHES = str.maketrans({"’": "'", "ʼ": "'"})


def _prep(text: str) -> str:
    return text.translate(_APOSTROPHES).lower().strip()


@dataclass(frozen=True)
class AnswerLexicon:
    """Compiled per-class pattern tables loaded from a lexicon file."""

    language: str
    yes_no: tuple[tuple[str, tuple[re.Pattern, ...]], ...]
    companion: tuple[tuple[str, tuple[re.Pattern, ...]], ...]
    age_words: dict[str, int]
    age_specials: dict[str, int]
    interrogative: tuple[re.Pattern, ...]

    @classmethod
    def load(cls, path: str | Path) -> "AnswerLexicon":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"lexicon file not found: {path}")
        raw = json.loads(path.read_text(encoding="utf-8"))

        def compile_classes(section):
            return tuple(
                (cls_name, tuple(re.compile(p) for p in patterns))
                for cls_name, patterns in section
            )

        ages = raw.get("ages", {})
        return cls(
            language=raw.get("language", "en"),
            yes_no=compile_classes(raw["yes_no"]),
            companion=compile_classes(raw["companion"]),
            age_words={k.lower(): int(v) for k, v in ages.get("words", {}).items()},
            age_specials={k.lower(): int(v) for k, v in ages.get("specials", {}).items()},
            interrogative=tuple(re.compile(p) for p in raw.get("interrogative", [])),
        )

    def _classify(self, table, utterance: str | None) -> str:
        if not utterance:
            return UNKNOWN
        text = _prep(utterance)
        for cls_name, patterns in table:
            if any(p.search(text) for p in patterns):
                return cls_name
        return UNKNOWN

    def classify_yes_no(self, utterance: str | None) -> str:
        """yes / no / unknown. Negative patterns are checked first."""
        return self._classify(self.yes_no, utterance)

    def classify_companion(self, utterance: str | None) -> str:
        """alone / friend / family / unknown."""
        return self._classify(self.companion, utterance)

    def extract_ages(self, utterance: str | None) -> list[int]:
        """Every age-like mention in utterance order; values outside 0-120 dropped."""
        if not utterance:
            return []
        text = _prep(utterance)
        alternatives = [r"\d{1,3}"]
        alternatives += [re.escape(w) for w in self.age_specials]
        alternatives += [re.escape(w) for w in self.age_words]
        pattern = re.compile(r"\b(" + "|".join(alternatives) + r")\b")
        ages: list[int] = []
        for match in pattern.finditer(text):
            token = match.group(1)
            if token.isdigit():
                value = int(token)
            elif token in self.age_specials:
                value = self.age_specials[token]
            else:
                value = self.age_words[token]
            if 0 <= value <= 120:
                ages.append(value)
        return ages

    def is_direct_question(self, utterance: str | None) -> bool:
        """True when the utterance itself reads as a question."""
        if not utterance:
            return False
        if "?" in utterance or "？" in utterance:
            return True
        text = _prep(utterance)
        return any(p.search(text) for p in self.interrogative)
