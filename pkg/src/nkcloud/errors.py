"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument or configuration value is invalid."""


class CapacityError(RuntimeError):
    """A requested computation exceeds the exhaustive-enumeration guard."""


class DataError(RuntimeError):
    """Input data is structurally broken or statistically unusable."""


class QuadratureError(ArithmeticError):
    """A numerical integration did not reach the required accuracy."""
