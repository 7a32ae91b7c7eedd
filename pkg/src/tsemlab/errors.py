"""Exception hierarchy shared by the library and mapped to CLI exit codes."""


class TsemLabError(Exception):
    """Base class for every error raised deliberately by this package."""

    exit_code = 1


class ConfigError(TsemLabError, ValueError):
    exit_code = 2


class DimensionError(TsemLabError, ValueError):
    """Array extents disagree with what an operation or model expects."""

    exit_code = 3


class DataError(TsemLabError, ValueError):
    exit_code = 3


class ParseError(DataError):
    """A dataset file is malformed. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class CheckpointError(DataError):
    """A checkpoint file is truncated, corrupted or from another format version."""


class NumericError(TsemLabError, ArithmeticError):
    exit_code = 4


class ModelNotTrainedError(TsemLabError, RuntimeError):
    """An evaluation that needs a better-than-chance model was given one that is not."""

    exit_code = 4


class CheckpointVersionError(CheckpointError):
    """The file is not a checkpoint of this format, or uses an unsupported version."""
