"""Offline corpus enrichment: summaries, interest questions, points, appeals.

Question generation, point translation, and summarization are slow on a
real backend, so they run once up front and ship as a versioned bundle.
Dialog time only ever reads this bundle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigurationError, CorpusError
from .gateway import Gateway
from .interview import LocWiseQuestionSet, select_loc_questions
from .recommendation import build_appeal
from .sightdb import FeatureThresholds, SightCatalog, ingest

BUNDLE_VERSION = 1

CATALOG_FILE = "catalog.jsonl"
GENERATION_FILE = "generation.json"
MANIFEST_FILE = "manifest.json"


@dataclass
class ContentBundle:
    catalog: SightCatalog
    question_sets: dict[str, LocWiseQuestionSet]
    appeals: dict[str, str]
    version: int = BUNDLE_VERSION


def build_bundle(catalog: SightCatalog, gateway: Gateway, loc_question_k: int = 3) -> ContentBundle:
    """Enrich every record; raises CorpusError when a sight yields nothing usable."""
    question_sets: dict[str, LocWiseQuestionSet] = {}
    appeals: dict[str, str] = {}
    for sight_id in list(catalog.order):
        record = catalog.get(sight_id)
        one_line = record.summary_one_line or gateway.summarize(record.summary_long)
        if not one_line:
            raise CorpusError(f"{sight_id}: empty one-line summary")
        if record.summary_one_line != one_line:
            catalog.replace_record(replace(record, summary_one_line=one_line))

        candidates = gateway.generate_questions(one_line, n=10)
        questions = select_loc_questions(candidates, k=loc_question_k, question_format=gateway.pack.question_format)
        if not questions:
            raise CorpusError(f"{sight_id}: no well-formed interest questions generated")
        points = [gateway.translate_point(record.name, q) for q in questions]
        question_sets[sight_id] = LocWiseQuestionSet(
            sight_id=sight_id,
            questions=tuple(questions),
            source_points=tuple(points),
        )
        appeals[sight_id] = build_appeal(gateway, one_line)
    return ContentBundle(catalog=catalog, question_sets=question_sets, appeals=appeals)


def save_bundle(bundle: ContentBundle, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / CATALOG_FILE).write_text(bundle.catalog.serialize(), encoding="utf-8")
    generation = {
        sight_id: {
            "questions": list(qs.questions),
            "points": list(qs.source_points),
            "appeal": bundle.appeals[sight_id],
        }
        for sight_id, qs in bundle.question_sets.items()
    }
    (out / GENERATION_FILE).write_text(
        json.dumps(generation, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    (out / MANIFEST_FILE).write_text(
        json.dumps({"version": bundle.version, "sights": len(bundle.catalog)}) + "\n",
        encoding="utf-8",
    )
    return out


def load_bundle(bundle_dir: str | Path, thresholds: FeatureThresholds = FeatureThresholds(),
                bigram_tokens: bool = False) -> ContentBundle:
    path = Path(bundle_dir)
    manifest_path = path / MANIFEST_FILE
    if not manifest_path.exists():
        raise ConfigurationError(f"not a content bundle (no {MANIFEST_FILE}): {path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("version") != BUNDLE_VERSION:
        raise ConfigurationError(f"unsupported bundle version {manifest.get('version')!r}")
    catalog = ingest(path / CATALOG_FILE, thresholds=thresholds, bigram_tokens=bigram_tokens)
    generation = json.loads((path / GENERATION_FILE).read_text(encoding="utf-8"))
    question_sets = {}
    appeals = {}
    for sight_id, entry in generation.items():
        question_sets[sight_id] = LocWiseQuestionSet(
            sight_id=sight_id,
            questions=tuple(entry["questions"]),
            source_points=tuple(entry["points"]),
        )
        appeals[sight_id] = entry["appeal"]
    missing = set(catalog.order) - set(question_sets)
    if missing:
        raise ConfigurationError(f"bundle misses generation data for: {sorted(missing)}")
    return ContentBundle(catalog=catalog, question_sets=question_sets, appeals=appeals)


def is_bundle_dir(path: str | Path) -> bool:
    return (Path(path) / MANIFEST_FILE).exists()
