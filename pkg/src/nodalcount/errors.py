class NodalCountError(ValueError):
    """Base class for input validation failures in this package."""


class InvalidDimensionError(NodalCountError):
    pass


class InvalidInputError(NodalCountError):
    pass


class ZeroVarianceError(NodalCountError):
    pass


class DegenerateInputError(NodalCountError):
    pass


class ConfigError(NodalCountError):
    pass
