"""Exception hierarchy. Every error raised on bad data or bad models derives
from :class:`It2fnnError`, which the CLI maps to exit code 1."""


class It2fnnError(Exception):
    pass


class ParseError(It2fnnError):
    """Malformed recording row. ``row`` is 1-based."""

    def __init__(self, path, row, message):
        self.path = str(path)
        self.row = row
        super().__init__(f"{self.path}: row {row}: {message}")


class EmptyRecordingError(It2fnnError):
    pass


class EmptyDatasetError(It2fnnError):
    pass


class ValidationError(It2fnnError):
    pass


class TooShortError(It2fnnError):
    pass


class InsufficientGaitError(It2fnnError):
    pass


class DegenerateGaitError(It2fnnError):
    pass


class DegenerateFeatureError(It2fnnError):
    def __init__(self, feature, message=None):
        self.feature = feature
        super().__init__(message or f"feature {feature} is constant over the training set")


class ConfigError(It2fnnError):
    pass


class NumericError(It2fnnError):
    pass


class ModelError(It2fnnError):
    pass


class ContractError(It2fnnError):
    pass
