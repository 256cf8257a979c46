# ramsey_search/exceptions.py


class RamseyError(ValueError):
    """Base class for every error raised by the search and verification code"""


class ParameterError(RamseyError):
    """An operation was called with arguments outside its domain"""


class MatrixParseError(RamseyError):
    """Matrix text could not be turned into a coloring"""

    def __init__(self, message: str, row: int = None, column: int = None):
        self.row = row
        self.column = column
        location = ""
        if row is not None and column is not None:
            location = f"row {row}, column {column}: "
        elif row is not None:
            location = f"row {row}: "
        super().__init__(f"{location}{message}")


class PatternSpecError(RamseyError):
    """Pattern mini-language string or explicit pattern is invalid"""


class CountRangeError(RamseyError, OverflowError):
    """A copy count left the signed 64-bit range"""


class ConfigError(RamseyError):
    """Run configuration is invalid; `key` names the offending entry"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class CheckpointError(RamseyError):
    """Checkpoint file is corrupt; `field` names the first bad field"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"checkpoint field '{field}': {message}")


class TrainingError(RamseyError):
    """Optimizer step produced non-finite weights"""
