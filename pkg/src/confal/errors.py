"""Exception hierarchy shared by every confal module."""


class ConfalError(Exception):
    """Base class for all toolkit errors."""


class SignalError(ConfalError, ValueError):
    pass


class OutOfHorizon(SignalError):
    pass


class UnknownChannel(SignalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotGridAligned(SignalError):
    pass


class EmptyInterval(SignalError):
    pass


class ChannelMismatch(SignalError):
    pass


class StepMismatch(SignalError):
    pass


class ChannelCollision(SignalError):
    pass


class FormulaSyntaxError(ConfalError, ValueError):
    """Raised by the formula parser; carries 1-based ``line`` and ``column``."""

    def __init__(self, message, line, column, text=None):
        super().__init__(f"{message} (line {line}, column {column})")
        self.msg = message
        self.line = line
        self.column = column
        self.text = text


class InputOutOfBounds(ConfalError, ValueError):
    pass


class UnknownModel(ConfalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class OutOfBounds(ConfalError, ValueError):
    pass


class DimensionMismatch(ConfalError, ValueError):
    pass


class ConfigError(ConfalError, ValueError):
    pass


class SoundnessViolation(ConfalError, AssertionError):
    """A reported falsification failed independent re-verification. Always a bug."""
