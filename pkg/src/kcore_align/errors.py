"""Exception types shared across the package."""


class InvariantError(AssertionError):
    """A structural invariant or checked inequality failed."""


class ConfigError(ValueError):
    """An experiment configuration is malformed."""
