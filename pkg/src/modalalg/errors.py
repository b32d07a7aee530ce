"""Exception hierarchy shared by every module."""


class ModalAlgError(Exception):
    """Base class for all structural errors raised by this package."""


class DimensionMismatch(ModalAlgError, ValueError):
    pass


class NotSelfAdjoint(ModalAlgError, ValueError):
    pass


class NotAProjection(ModalAlgError, ValueError):
    pass


class NoConvergence(ModalAlgError, RuntimeError):
    """Iterative limit did not settle within ``max_iter``.

    The last iterate is kept on ``last`` so callers can still inspect it.
    """

    def __init__(self, message, last=None, iterations=None, spectral_radius=None):
        super().__init__(message)
        self.last = last
        self.iterations = iterations
        self.spectral_radius = spectral_radius


# lattice
class CapExceeded(ModalAlgError, RuntimeError):
    pass


class ChainNotStrict(ModalAlgError, ValueError):
    pass


class NotALattice(ModalAlgError, ValueError):
    pass


# interpretation rules
class NotDensityOperator(ModalAlgError, ValueError):
    pass


class InvalidXForm(ModalAlgError, ValueError):
    pass


class AllComponentsZero(ModalAlgError, ValueError):
    pass


class NotInD(ModalAlgError, ValueError):
    pass


# valuations
class AtomNotResolved(ModalAlgError, ValueError):
    pass


class TooLarge(ModalAlgError, ValueError):
    pass


class IdealInvalid(ModalAlgError, ValueError):
    pass


class OracleDisagreement(ModalAlgError, AssertionError):
    pass


class NotInExtension(ModalAlgError, ValueError):
    pass


class MultipleOnes(ModalAlgError, RuntimeError):
    pass


class NoOnes(ModalAlgError, RuntimeError):
    pass


class SequenceNotConvergent(ModalAlgError, ValueError):
    pass


class IdealMismatch(ModalAlgError, ValueError):
    pass


class NotCommuting(ModalAlgError, ValueError):
    pass


class NotDisjoint(ModalAlgError, ValueError):
    pass


# demos
class PreconditionViolated(ModalAlgError, ValueError):
    pass


class PairsNotDistinct(ModalAlgError, ValueError):
    pass


# configuration
class ParseError(ModalAlgError, ValueError):
    pass


class ValidationError(ModalAlgError, ValueError):
    """Invalid configuration; ``field`` holds the dotted path of the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
