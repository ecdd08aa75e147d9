"""Exception and warning types shared across the package."""


class DimensionError(ValueError):
    """Raised when array shapes do not match the expected (m, d) layout."""


class UnsupportedM(ValueError):
    """Raised when a method is requested for a block count it cannot handle."""


class UnsupportedPair(ValueError):
    """Raised when no closed form (and no fallback) exists for a pair of sets."""


class UnsupportedDim(ValueError):
    """Raised when figure data is requested for an ambient dimension above 3."""


class NonConvergence(RuntimeError):
    """An outer solver exhausted its iteration budget.

    The partially converged result is kept on ``bundle`` so callers can
    inspect or report it.
    """

    def __init__(self, message, bundle=None):
        super().__init__(message)
        self.bundle = bundle


class InnerNonConvergence(UserWarning):
    """Seeger's inner iteration stopped on its budget rather than its tolerance."""


class ApproximationWarning(UserWarning):
    """A result came from an iterative fallback rather than a closed form."""
