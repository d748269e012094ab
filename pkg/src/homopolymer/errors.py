"""Exception types raised by the numerical routines."""


class DomainError(ValueError):
    """Argument outside the domain where the quantity is defined."""


class SpectrumError(DomainError):
    """Spectral parameter lies on the spectrum of the operator."""


class CoincidenceError(DomainError):
    """Kernel evaluated on its diagonal, where it is singular."""


class NonConvergenceError(RuntimeError):
    """A refinement sequence failed to converge."""


class PoleOnContourError(ValueError):
    """A declared singularity lies on the integration contour."""


class TableResolutionError(RuntimeError):
    """A tabulated density failed its normalization check."""


class StepSizeError(ValueError):
    """Time step too coarse to resolve the potential well."""
