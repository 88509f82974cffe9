"""Exception types shared across the toolkit."""


class LlmcError(Exception):
    """Base class for all toolkit errors."""


class ProviderError(LlmcError):
    """A token provider failed to produce a distribution."""


class ProviderUnavailableError(ProviderError):
    """Remote provider unreachable or returned a server failure."""


class ContextTooLongError(ProviderError):
    """The context string exceeds the provider's window."""


class InsufficientCoverageError(ProviderError):
    """The provider truncated the distribution before alpha could be honored.

    The caller should re-request with a larger `need`.
    """

    def __init__(self, message: str, covered_mass: float, entries: int):
        super().__init__(message)
        self.covered_mass = covered_mass
        self.entries = entries


class PartialDistributionError(LlmcError):
    """Temperature scaling requires the full distribution (covered_mass = 1)."""


class StateBudgetExceededError(LlmcError):
    """DTMC construction surpassed the configured state cap."""


class InvalidDtmcError(LlmcError):
    """An operation requiring a valid DTMC got one with violations."""


class PctlSyntaxError(LlmcError):
    """Malformed query text; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownFeatureError(LlmcError):
    """A query references a feature name that was never declared."""

    def __init__(self, name: str):
        super().__init__(f"unknown feature: {name!r}")
        self.name = name


class UnsupportedConstructError(LlmcError):
    """PRISM import hit a line outside the exported subset."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConfigError(LlmcError):
    """Run configuration file missing, unparsable, or invalid."""
