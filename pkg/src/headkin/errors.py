"""Exception hierarchy for the reconstruction pipeline."""


class HeadkinError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HeadkinError, ValueError):
    pass


class OutOfRangeError(HeadkinError, ValueError):
    pass


class InvalidMountError(HeadkinError, ValueError):
    pass


class NoImpactFoundError(HeadkinError):
    pass


class DegenerateSignalError(HeadkinError):
    """Raised when a signal has no energy at the impact trigger."""


class InvalidCutoffError(HeadkinError, ValueError):
    pass


class UndefinedStatisticError(HeadkinError, ValueError):
    """A statistic is undefined for the given data (zero variance, zero reference)."""


class RecordingParseError(HeadkinError):
    def __init__(self, path, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class SchemaError(HeadkinError):
    pass
