"""Shared fixtures: engine factory, fake clock, scripted backends."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from tourbot.backends import MockBackend
from tourbot.config import EngineConfig, packaged_data
from tourbot.engine import DialogEngine
from tourbot.errors import BackendError
from tourbot.gateway import Gateway
from tourbot.interview import QuestionGraph
from tourbot.lexicon import AnswerLexicon
from tourbot.sightdb import ingest
from tourbot.templates import TemplatePack

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_PATH = REPO_ROOT / "fixtures" / "odaiba_corpus.jsonl"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


class FakeClock:
    """Manually advanced clock; reads never move it."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 1, 1, 9, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        return self.now

    def tick(self, seconds: float) -> None:
        self.now += timedelta(seconds=seconds)


@dataclass
class ScriptedBackend:
    """Returns canned completions in order; repeats the last one forever."""

    outputs: list[str]
    calls: int = 0
    seeds: list[int] = field(default_factory=list)

    def complete(self, prompt, params):
        self.seeds.append(params.seed)
        idx = min(self.calls, len(self.outputs) - 1)
        self.calls += 1
        return self.outputs[idx]


@dataclass
class FailingBackend:
    calls: int = 0

    def complete(self, prompt, params):
        self.calls += 1
        raise BackendError("backend unreachable")


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return CORPUS_PATH


@pytest.fixture(scope="session")
def base_config(corpus_path) -> EngineConfig:
    return EngineConfig(corpus_path=corpus_path)


@pytest.fixture(scope="session")
def catalog(corpus_path):
    return ingest(corpus_path)


@pytest.fixture(scope="session")
def lexicon() -> AnswerLexicon:
    return AnswerLexicon.load(packaged_data("lexicon_en.json"))


@pytest.fixture(scope="session")
def pack() -> TemplatePack:
    return TemplatePack.load(packaged_data("templates_en.json"))


@pytest.fixture(scope="session")
def graph() -> QuestionGraph:
    return QuestionGraph.load(packaged_data("question_graph.json"))


@pytest.fixture(scope="session")
def gateway(pack) -> Gateway:
    return Gateway(pack=pack, backend=MockBackend(seed=0), seed=0)


@pytest.fixture(scope="session")
def engine(base_config) -> DialogEngine:
    return DialogEngine.from_config(base_config)


@pytest.fixture
def make_engine(corpus_path):
    """Engine factory for tests that need their own clock or budget."""

    def factory(clock=None, time_budget_s: float = 300.0, seed: int = 0) -> DialogEngine:
        config = EngineConfig.from_dict(
            {
                "corpus_path": str(corpus_path),
                "time_budget_s": time_budget_s,
                "backend": {"kind": "mock", "seed": seed},
            }
        )
        return DialogEngine.from_config(config, clock=clock)

    return factory


# Utterance pool covering every answer class plus noise and direct questions.
FUZZ_UTTERANCES = [
    "yes", "no", "with my family", "with friends", "by myself",
    "they are 5 and 2 years old", "not really", "maybe", "mumble mumble",
    "good food", "how much is it?", "where is it", "sure", "nothing",
    "I am a carpenter.", "quiet places", "yes please", "no thanks",
]


def drive_random_session(engine, rng, clock=None, tick_s: float = 12.0, max_advances: int = 60):
    """Run one fuzzed consultation to completion; returns the session."""
    from tourbot.types import Phase, SightAssignment

    ids = list(engine.catalog.order)
    a, b = rng.sample(ids, 2)
    session = engine.create_session(SightAssignment(a, b, rng.choice((a, b))))
    engine.advance(session, None)
    advances = 1
    while session.phase is not Phase.DONE:
        if advances >= max_advances:
            raise AssertionError(f"session did not terminate within {max_advances} advances")
        engine.advance(session, rng.choice(FUZZ_UTTERANCES))
        advances += 1
        if clock is not None:
            clock.tick(tick_s)
    return session
