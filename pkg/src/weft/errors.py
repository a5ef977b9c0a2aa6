"""Exception hierarchy shared across the toolkit."""


class WeftError(Exception):
    """Base class for all toolkit errors."""


class InputError(WeftError):
    """Rejected input: empty payload, inverted range, bad threshold, ..."""


class NotFoundError(WeftError):
    """A referenced record, session or entity does not exist."""


class StoreError(WeftError):
    """Fatal storage failure (IO error, disk full)."""


class IntegrityError(WeftError):
    """Stored payload no longer matches its recorded content hash."""


class EncodingError(WeftError):
    """Bytes could not be decoded with the resolved charset."""

    def __init__(self, charset, message=None):
        self.charset = charset
        super().__init__(message or f"cannot decode input as {charset!r}")


class SchemaError(WeftError):
    """Schema document violates the declarative schema contract."""

    def __init__(self, message, path="$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class MappingError(WeftError):
    """Mapping file or binding operation is inconsistent with the schema."""


class ConfigError(WeftError):
    """Invalid toolkit configuration (cycles, duplicate entities, bad steps)."""


class DictionaryError(WeftError):
    """Rejected dictionary edit (variant collision, parent cycle, unknown id)."""


class PipelineStepError(WeftError):
    """A pipeline step failed for one record."""

    def __init__(self, step, message):
        self.step = step
        super().__init__(f"step {step!r}: {message}")


class ConflictError(WeftError):
    """Optimistic-concurrency conflict: the draft changed under the writer."""
