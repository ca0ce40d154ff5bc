"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(EngineError):
    """Bad configuration: missing files, unknown sight ids, invalid assignments."""


class CorpusError(EngineError):
    """Corpus build rejected. Message carries line-numbered diagnostics."""


class TemplateError(EngineError):
    """Prompt template problem (unknown template, unbound slot, bad pack file)."""


class BackendError(EngineError):
    """Generation backend transport or protocol failure."""


class TerminalSessionError(EngineError):
    """Raised when advancing a session that has already finished."""
