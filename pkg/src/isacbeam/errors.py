"""Exception types raised across the solver stack."""


class IsacBeamError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(IsacBeamError):
    """Array shapes of the inputs are inconsistent with each other."""


class SingularFIM(IsacBeamError):
    """Fisher information matrix is singular or too ill-conditioned to invert."""


class QuadratureOrderTooSmall(IsacBeamError):
    """Doubling the quadrature order still changes the statistics noticeably."""


class IndefiniteNumerator(IsacBeamError):
    """Combiner numerator matrix is not positive definite.

    Signals a multiplier pair outside the admissible region along the
    direction probed by the current combiner solve.
    """


class ZeroDesiredGain(IsacBeamError):
    """A combiner is orthogonal to its own channel; the power update is undefined."""


class SingularCoupling(IsacBeamError):
    """Downlink coupling system is singular; the spectral radius is at the feasibility boundary."""


class DualityCheckFailed(IsacBeamError):
    """A converged solution failed one of the exactness checks it must satisfy."""


class ZeroChannel(IsacBeamError):
    """Channel vector is identically zero."""


class NoFeasiblePoint(IsacBeamError):
    """Multistart search found no beamformer satisfying the SINR constraints."""


class PerturbationInadmissible(IsacBeamError):
    """A finite-difference probe point fell outside the admissible region."""


class Stalled(IsacBeamError):
    """Step-size backtracking failed to find an admissible point.

    Carries the best report assembled so far in ``report`` when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class Infeasible(IsacBeamError):
    """The SINR constraints cannot be met within the power budget."""


class ParseError(IsacBeamError):
    """Scenario file is not syntactically valid."""


class ValidationError(IsacBeamError):
    """Scenario file parsed but a field is missing or out of range.

    ``field`` holds the dotted path of the offending entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
