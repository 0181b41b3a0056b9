"""Exception types raised across the package."""
from typing import Optional


class Q2D2Error(Exception):
    """Base class for every error raised by q2d2."""


class InvalidLevelsError(Q2D2Error, ValueError):
    """Used when a level count is not an integer in [2, 255]"""

    def __init__(self, levels, message: Optional[str] = None):
        self.levels = levels
        super().__init__(
            message or f"Level count must be an integer in [2, 255], got {levels}"
        )


class InvalidSpecError(Q2D2Error, ValueError):
    pass


class InvalidDimensionError(Q2D2Error, ValueError):
    def __init__(self, d: int):
        self.d = d
        super().__init__(f"Dimension must be even and at least 2, got {d}")


class ConfigMismatchError(Q2D2Error, ValueError):
    def __init__(self, expected: int, got: int, what: str = "dimension"):
        self.expected = expected
        self.got = got
        super().__init__(f"Expected {what} {expected}, got {got}")


class DomainError(Q2D2Error, ValueError):
    """Used when a latent entry lies outside [-1, 1] or is not finite"""

    def __init__(self, index, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"Latent value {value} at index {index} is outside [-1, 1]"
        )


class InvalidCodeError(Q2D2Error, ValueError):
    def __init__(self, code: int, limit: int, position=None):
        self.code = code
        self.limit = limit
        self.position = position
        where = "" if position is None else f" at {position}"
        super().__init__(f"Code {code}{where} must be in [0, {limit})")


class InvalidStreamError(Q2D2Error, ValueError):
    def __init__(self, frame: int, pair: int, code: int, limit: int):
        self.frame = frame
        self.pair = pair
        super().__init__(
            f"Frame {frame} pair {pair}: code {code} outside [0, {limit})"
        )


class EstimationError(Q2D2Error, ValueError):
    pass


class StreamFormatError(Q2D2Error, ValueError):
    """Used when a token stream is corrupt; offset is the failing byte"""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class IngestionError(Q2D2Error, ValueError):
    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(f"Row {row}: {message}")


class DivergenceError(Q2D2Error, RuntimeError):
    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"Training diverged at step {step} (loss={loss})")
