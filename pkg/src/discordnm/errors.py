"""Exception taxonomy. ConfigError maps to CLI exit code 2, the rest to 3."""


class ConfigError(ValueError):
    """A scenario description is malformed or inconsistent."""


class InvalidStateError(ValueError):
    """A state or operator fails its structural checks (shape, hermiticity,
    trace, positivity, norm)."""


class NumericalError(RuntimeError):
    """A runtime invariant was violated (purity loss, unitarity drift,
    monotone breakdown)."""


class TruncationError(NumericalError):
    """A truncated Fock space cannot represent the requested state within
    the configured tail budget."""
