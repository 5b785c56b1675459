"""Exception hierarchy.

Every exception carries the CLI exit code it maps to, so the command-line
layer never needs a lookup table of its own.
"""


class GibbsScopeError(Exception):
    exit_code = 1


class InvalidParameterError(GibbsScopeError, ValueError):
    exit_code = 2


class InvalidKernelError(InvalidParameterError):
    pass


class ConvergenceError(GibbsScopeError):
    exit_code = 3


class QuadratureConvergenceError(ConvergenceError):
    pass


class RefinementError(ConvergenceError):
    """A grid supremum changed by more than its tolerance under refinement."""


class BifurcationError(GibbsScopeError):
    exit_code = 4


class BracketError(BifurcationError):
    pass


class DegenerateBifurcationError(BifurcationError):
    """Tracked basins merged (saddle-node) or vanished during continuation."""


class SymmetricCaseError(BifurcationError):
    """Equal depth is forced by an exact symmetry rather than by tuning."""

    def __init__(self, message, epsilon=None, depth_difference=None):
        super().__init__(message)
        self.epsilon = epsilon
        self.depth_difference = depth_difference


class KernelUndefinedError(BifurcationError):
    """The limiting kernel is undefined because the minimizer is not unique."""


class CertificateInapplicableError(GibbsScopeError):
    exit_code = 5


class DivergenceError(CertificateInapplicableError):
    pass
