"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Bad shapes, non-finite values, out-of-range parameters."""


class ConfigError(ValueError):
    """Invalid solver configuration (step sizes, config-file keys)."""


class DegenerateInputError(ValueError):
    """Input carries no information for the requested estimate."""


class DegenerateKernelError(ValueError):
    """Kernel projection left no positive mass."""


class SolverFailure(RuntimeError):
    """An iterative solver diverged.

    ``diagnostics`` holds whatever state was available when it gave up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ImageIOError(OSError):
    """Unreadable, unwritable or unsupported image/kernel file."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)
        self.reason = reason
