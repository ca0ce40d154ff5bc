"""Travel-consultation dialog engine.

A rule-driven consultation scenario (greeting, icebreak, explanation,
interview, recommendation, QA, closing) over a pluggable text-generation
backend, with retrieval-grounded answers about a local tourist-sight
catalog.
"""

from .config import BackendConfig, EngineConfig
from .engine import DialogEngine, Session
from .errors import (
    BackendError,
    ConfigurationError,
    CorpusError,
    EngineError,
    TemplateError,
    TerminalSessionError,
)
from .types import AgentAnnotations, AgentTurn, Phase, SightAssignment, TurnRecord

__version__ = "0.1.0"

__all__ = [
    "AgentAnnotations",
    "AgentTurn",
    "BackendConfig",
    "BackendError",
    "ConfigurationError",
    "CorpusError",
    "DialogEngine",
    "EngineConfig",
    "EngineError",
    "Phase",
    "Session",
    "SightAssignment",
    "TemplateError",
    "TerminalSessionError",
    "TurnRecord",
    "__version__",
]
