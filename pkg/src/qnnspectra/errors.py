"""Exception hierarchy shared by all modules."""


class QnnError(Exception):
    """Base class for every error raised by this package."""


class ContractError(QnnError, ValueError):
    """Precondition violated by the caller (bad lengths, unbound slots, bad labels)."""


class CapacityError(ContractError):
    """Requested size exceeds what the dense simulator supports."""


class ArchitectureError(ContractError):
    """Encoding family / shape / ansatz combination is not realizable."""


class AliasingError(ContractError):
    """Sampling grid too coarse for the requested band limit."""


class UnsupportedError(QnnError):
    """Operation has no closed form for the given input."""


class DivergenceError(QnnError, FloatingPointError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch, loss):
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class FormatError(QnnError, ValueError):
    """Malformed input file."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class DegeneracyError(QnnError, ArithmeticError):
    """Numerically singular input that regularization could not repair."""


class ConfigError(QnnError, ValueError):
    """Invalid experiment configuration."""
