"""Exception hierarchy shared by the library and the command line."""


class KuramotoRCError(Exception):
    """Base class for all errors raised by this package."""


class InputError(KuramotoRCError, ValueError):
    """Malformed or non-finite data handed to a numerical routine."""


class DomainError(KuramotoRCError, ValueError):
    """Argument outside the domain where a formula is defined."""


class UnsupportedDistributionError(KuramotoRCError, ValueError):
    """Operation is not defined for the given frequency distribution."""


class ConfigError(KuramotoRCError, ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
