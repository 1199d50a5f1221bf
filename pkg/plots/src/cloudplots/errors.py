"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument or configuration value is invalid."""


class DataError(RuntimeError):
    """An input file is structurally broken or empty."""
