"""Exception hierarchy. The CLI maps each family to an exit code."""


class LifnetError(Exception):
    """Base class for all library errors."""


class ConfigError(LifnetError, ValueError):
    """Invalid parameters, shapes or configuration values."""


class DomainError(ConfigError):
    """A numeric argument lies outside the function's domain."""


class InputError(LifnetError, ValueError):
    """Unusable input data (empty dataset, missing class, length mismatch)."""


class CsvParseError(InputError):
    """A feature CSV could not be parsed.

    ``kind`` is one of ``missing-file``, ``header``, ``column-count``,
    ``non-numeric``, ``bad-label`` or ``empty``; ``row`` is the 1-based line
    number in the file (the header is line 1), or ``None``.
    """

    def __init__(self, kind, message, row=None):
        self.kind = kind
        self.row = row
        where = f" (line {row})" if row is not None else ""
        super().__init__(f"{kind}: {message}{where}")


class StudyError(LifnetError, RuntimeError):
    """A hyperparameter study produced no usable trial."""
