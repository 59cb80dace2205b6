"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A model or experiment configuration violates one of its rules."""
