"""Exception hierarchy shared by all wasserlab modules."""


class WasserlabError(Exception):
    """Base class for every error raised by wasserlab."""


class ConfigurationError(WasserlabError):
    """Bad configuration: unknown registry key, custom norm without value, bad YAML."""


class InputError(WasserlabError):
    """Unreadable or malformed input, or mismatched dimensions."""


class DomainError(WasserlabError, ValueError):
    """A mathematical precondition does not hold for the given arguments."""


class MeasureError(DomainError):
    """A DiscreteMeasure invariant is violated (weights, duplicate atoms)."""


class OracleUnavailableError(WasserlabError):
    """The brute-force oracle cannot handle the given measures."""


class SolverError(WasserlabError, RuntimeError):
    """The transport solver stopped without a certified optimal plan."""


class VerificationError(WasserlabError, RuntimeError):
    """An internal cross-check between two computations failed."""
