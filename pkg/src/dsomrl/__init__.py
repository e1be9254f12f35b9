"""Online, fully incremental RL with DSOM-masked value networks, plus
replay/target-network and plain-online baselines on Mountain Car."""

from .errors import ConfigError, ContractError, InputError, NumericalError

__all__ = ["ConfigError", "ContractError", "InputError", "NumericalError"]
__version__ = "0.1.0"
