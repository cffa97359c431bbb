"""Error types for the figure renderer."""


class PlotsError(Exception):
    """Base class for renderer failures."""


class SchemaMismatch(PlotsError):
    """An input CSV is empty or lacks required columns."""
