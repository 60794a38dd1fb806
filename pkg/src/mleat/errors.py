"""Exception hierarchy for the toolkit."""

from __future__ import annotations


class MleatError(Exception):
    """Base class. ``level`` is set when the error arose inside an ML-EAT level."""

    level: int | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.level is not None:
            return f"[level {self.level}] {msg}"
        return msg


class EmbeddingFormatError(MleatError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DimensionMismatch(EmbeddingFormatError):
    pass


class MalformedFloat(EmbeddingFormatError):
    pass


class DuplicateToken(EmbeddingFormatError):
    def __init__(self, token: str, line_no: int | None = None):
        self.token = token
        super().__init__(f"duplicate token {token!r}", line_no)


class EmptyFile(EmbeddingFormatError):
    pass


class MissingToken(MleatError, KeyError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"token not in embedding space: {token!r}")

    __str__ = MleatError.__str__


class ZeroNormVector(MleatError):
    def __init__(self, items):
        self.items = list(items)
        super().__init__(f"zero-norm vector(s): {', '.join(map(str, self.items))}")


class EmptyGroupAfterResolution(MleatError):
    pass


class UnequalTargetSizes(MleatError):
    pass


class UnequalAttributeSizes(MleatError):
    pass


class DegenerateDistribution(MleatError):
    pass


class PartitionOverflow(MleatError):
    pass


class ConfigError(MleatError):
    pass
