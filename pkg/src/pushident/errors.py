"""Exception types shared across the package."""


class InputError(ValueError):
    """Caller supplied an invalid argument (bad dimension, malformed value)."""


class ConfigError(ValueError):
    """Invalid configuration (bad file, inconsistent fields, bad CLI flags)."""


class NumericalError(RuntimeError):
    """A linear-algebra step failed beyond recovery (e.g. Cholesky after max jitter)."""


class SimulationError(RuntimeError):
    """The forward simulation blew up or could not be evaluated."""


class SearchError(RuntimeError):
    """An optimization run could not produce a result (e.g. every candidate failed)."""


class CandidatesExhausted(SearchError):
    """select_next was called with no unevaluated candidate left."""


class DatasetError(ValueError):
    """A dataset file failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
