"""Engine configuration: file locations, backend choice, budgets, thresholds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError
from .sightdb import FeatureThresholds


def packaged_data(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(str(resources.files("tourbot").joinpath("data", name)))


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # "mock" | "remote"
    seed: int | None = 0
    endpoint: str = ""
    credential_env: str = "TOURBOT_BACKEND_TOKEN"

    def validate(self) -> None:
        if self.kind == "mock":
            if self.seed is None:
                raise ConfigurationError("mock backend requires a seed")
        elif self.kind == "remote":
            if not self.endpoint:
                raise ConfigurationError("remote backend requires an endpoint")
        else:
            raise ConfigurationError(f"unknown backend kind {self.kind!r}")


@dataclass(frozen=True)
class EngineConfig:
    corpus_path: Path
    template_pack_path: Path = field(default_factory=lambda: packaged_data("templates_en.json"))
    lexicon_path: Path = field(default_factory=lambda: packaged_data("lexicon_en.json"))
    question_graph_path: Path = field(default_factory=lambda: packaged_data("question_graph.json"))
    backend: BackendConfig = field(default_factory=BackendConfig)
    time_budget_s: float = 300.0
    max_retries: int = 2
    search_k: int = 3
    qa_k: int = 5
    loc_question_k: int = 3
    thresholds: FeatureThresholds = field(default_factory=FeatureThresholds)
    kana_readings: dict = field(default_factory=lambda: {"方": ("ほう", "かた")})
    bigram_tokens: bool = False

    def validate(self) -> None:
        self.backend.validate()
        for label, path in (
            ("corpus", self.corpus_path),
            ("template pack", self.template_pack_path),
            ("lexicon", self.lexicon_path),
            ("question graph", self.question_graph_path),
        ):
            if not Path(path).exists():
                raise ConfigurationError(f"{label} file not found: {path}")
        if self.time_budget_s <= 0:
            raise ConfigurationError("time_budget_s must be positive")
        if self.max_retries < 1:
            raise ConfigurationError("max_retries must be at least 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        raw = json.loads(path.read_text(encoding="utf-8"))
        return cls.from_dict(raw, base_dir=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "EngineConfig":
        def resolve(value: str | None) -> Path | None:
            if value is None:
                return None
            p = Path(value)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            return p

        if "corpus_path" not in raw:
            raise ConfigurationError("config needs corpus_path")
        backend_raw = raw.get("backend", {})
        backend = BackendConfig(
            kind=backend_raw.get("kind", "mock"),
            seed=backend_raw.get("seed", 0),
            endpoint=backend_raw.get("endpoint", ""),
            credential_env=backend_raw.get("credential_env", "TOURBOT_BACKEND_TOKEN"),
        )
        thresholds_raw = raw.get("thresholds", {})
        thresholds = FeatureThresholds(**thresholds_raw) if thresholds_raw else FeatureThresholds()
        kana = raw.get("kana_readings")
        kwargs = dict(
            corpus_path=resolve(raw["corpus_path"]),
            backend=backend,
            time_budget_s=float(raw.get("time_budget_s", 300.0)),
            max_retries=int(raw.get("max_retries", 2)),
            search_k=int(raw.get("search_k", 3)),
            qa_k=int(raw.get("qa_k", 5)),
            loc_question_k=int(raw.get("loc_question_k", 3)),
            thresholds=thresholds,
            bigram_tokens=bool(raw.get("bigram_tokens", False)),
        )
        if raw.get("template_pack_path"):
            kwargs["template_pack_path"] = resolve(raw["template_pack_path"])
        if raw.get("lexicon_path"):
            kwargs["lexicon_path"] = resolve(raw["lexicon_path"])
        if raw.get("question_graph_path"):
            kwargs["question_graph_path"] = resolve(raw["question_graph_path"])
        if kana:
            kwargs["kana_readings"] = {k: tuple(v) for k, v in kana.items()}
        return cls(**kwargs)
