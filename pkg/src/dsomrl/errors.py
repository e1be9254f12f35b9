"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration: bad shapes, dimensions, or option values."""


class InputError(ValueError):
    """Invalid runtime input: non-finite values, empty batches, etc."""


class ContractError(RuntimeError):
    """An operation was called in a state its contract forbids."""


class NumericalError(ArithmeticError):
    """Parameters or errors became non-finite during learning."""
