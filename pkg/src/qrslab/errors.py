"""Exception types shared across the package."""


class SizeLimitError(ValueError):
    """Raised when an input exceeds a desk-scale resource guard."""


class DataError(ValueError):
    """Raised when supplied data is inconsistent (bad probabilities, zero-probability samples, ...)."""
