"""Exception types raised across the package."""


class DiscreteEPError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensions(DiscreteEPError, ValueError):
    pass


class DegreeUnderflow(DiscreteEPError, ValueError):
    pass


class NoDualCell(DiscreteEPError, LookupError):
    """A cell on the rectangle boundary has no complete dual."""


class PairingMismatch(DiscreteEPError, ValueError):
    pass


class DimensionMismatch(DiscreteEPError, ValueError):
    pass


class NotInGroup(DiscreteEPError, ValueError):
    """A matrix failed the SO(n) orthogonality or determinant check."""


class DegenerateNeighborSum(DiscreteEPError, ArithmeticError):
    pass


class BrokenPath(DiscreteEPError, ValueError):
    pass


class NotFlat(DiscreteEPError):
    def __init__(self, message, max_defect=None):
        super().__init__(message)
        self.max_defect = max_defect


class RegionOverflow(DiscreteEPError, IndexError):
    pass


class StencilOverflow(DiscreteEPError, IndexError):
    pass


class BoundaryViolation(DiscreteEPError, ValueError):
    pass


class NoConvergence(DiscreteEPError):
    def __init__(self, message, sweeps=None, residual=None, state=None):
        super().__init__(message)
        self.sweeps = sweeps
        self.residual = residual
        self.state = state


class MalformedFile(DiscreteEPError, ValueError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
