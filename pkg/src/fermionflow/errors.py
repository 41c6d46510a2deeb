"""Exception types shared across the package."""


class FermionflowError(Exception):
    """Base class for all package errors."""


class ValidationError(FermionflowError, ValueError):
    """A parameter or state violates a documented precondition."""


class WindowTooSmallError(FermionflowError):
    """The lattice window cannot contain the light cone for the requested time."""


class NonConvergenceError(FermionflowError):
    """An iterative scheme (bisection, window growth, node doubling) failed to converge."""


class DivergenceError(FermionflowError):
    """The requested quantity diverges in the given parameter regime."""
