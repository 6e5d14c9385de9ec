class ValidationError(ValueError):
    """Raised when an input object violates its declared alphabet or schema."""


class ResourceLimitError(RuntimeError):
    """Raised when a construction exceeds the configured state budget."""
