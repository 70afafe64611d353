"""Exception hierarchy shared by all modules."""


class EikonalError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EikonalError, ValueError):
    """A point lies outside the validity domain of a field."""


class PoleError(DomainError):
    """A point hits a declared pole (u -> infinity)."""


class ConstraintViolation(EikonalError, ValueError):
    """A solution parameter set breaks a constraint required for exactness."""


class DuplicateWinding(ConstraintViolation):
    """Two components of a multi-string share the same winding n_j."""


class NoRoot(EikonalError, RuntimeError):
    """A bracketed root search could not establish a sign change."""


class PhaseJump(EikonalError, RuntimeError):
    """Consecutive contour samples differ in phase by more than pi/2."""


class ZeroOnContour(EikonalError, RuntimeError):
    """The field vanishes (numerically) on an integration contour."""


class GridTooCoarse(EikonalError, RuntimeError):
    """A degree computation did not land close enough to an integer."""


class BranchCollision(EikonalError, RuntimeError):
    """Two traced string branches converged onto the same zero."""


class NotClosed(EikonalError, RuntimeError):
    """Curve endpoints do not project back onto the starting set."""


class NonCommensurate(EikonalError, RuntimeError):
    """The common strand rotation is not a multiple of 2*pi/strands."""


class ConfigError(EikonalError, ValueError):
    """Malformed job configuration."""
