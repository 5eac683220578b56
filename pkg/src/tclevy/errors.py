"""Exception hierarchy. The CLI maps each class to an exit code."""


class TCLevyError(Exception):
    pass


class ParameterDomainError(TCLevyError, ValueError):
    """A model parameter lies outside its admissible range."""


class DomainError(TCLevyError, ValueError):
    """A function argument lies outside the function's domain."""


class ConfigError(TCLevyError):
    pass


class DataError(TCLevyError):
    pass


class NumericalError(TCLevyError):
    pass
