"""Exception hierarchy shared by the solver stack.

The CLI maps these onto exit codes: bad input (ValueError and parse
failures) -> 2, convergence failures -> 3, unphysical regimes -> 4.
"""


class SletError(Exception):
    """Base class for solver failures."""


class UnsupportedOrderError(SletError, ValueError):
    """A derivative order outside the supported 0..6 range was requested."""


class PotentialParseError(SletError, ValueError):
    """A potential specification string could not be parsed."""


class UnphysicalRegimeError(SletError):
    """The requested configuration lies outside the method's domain."""


class NonMonotonePointError(UnphysicalRegimeError):
    """V'(r) <= 0 at the probed expansion point."""


class NoHarmonicRegimeError(UnphysicalRegimeError):
    """The squared scaled frequency came out negative at the probed point."""


class UnphysicalCouplingError(UnphysicalRegimeError):
    """Coupling too strong for a real closed-form Coulomb solution."""


class SupercriticalCouplingError(UnphysicalRegimeError):
    """Effective inverse-square attraction below the -1/4 stability bound."""


class ConvergenceError(SletError):
    """An iterative stage failed to converge."""


class BracketingError(ConvergenceError):
    """No sign change found while scanning for a root bracket."""


class BasisConvergenceError(ConvergenceError):
    """Perturbation coefficients still drift when the basis is doubled."""


class WindowError(ConvergenceError):
    """The eigenvalue self-consistency scan found no sign change.

    Carries the scanned (energy, residual) pairs in the ``sweep``
    attribute for diagnosis.
    """

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep or []


class LevelIdentificationError(ConvergenceError):
    """Converged eigenvector node count disagrees with the requested level."""


class SequencingError(SletError):
    """Pipeline stages were invoked out of their required order."""


class InternalInconsistencyError(SletError):
    """A quantity violated an identity it satisfies by construction."""


class ParityViolationError(InternalInconsistencyError):
    """Odd-order series coefficients are not numerically zero."""


class MultipleRootsWarning(RuntimeWarning):
    """More than one expansion point satisfied the root equation."""


class ResolutionWarning(RuntimeWarning):
    """Radial grid looks too coarse for the probed energy scale."""
