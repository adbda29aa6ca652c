"""Exception types shared across the package."""


class AdvswapError(Exception):
    """Base class for all package errors."""


class ConfigurationError(AdvswapError):
    """A fixture file is missing or malformed, or a setting is invalid."""


class FormatError(AdvswapError):
    """A data file could not be parsed. Carries the offending location."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class TrainingError(AdvswapError):
    """The training corpus cannot produce a usable classifier."""


class EncodingError(AdvswapError):
    """A document could not be encoded into a sentence vector."""


class RemoteError(AdvswapError):
    """Base class for failures of a remote service."""


class TransportError(RemoteError):
    """The remote service was unreachable, returned a bad status, or sent
    a response that could not be decoded."""


class ContractError(RemoteError):
    """The remote service answered, but the payload violates the protocol
    (wrong row count, rows not summing to one, label mismatch)."""
