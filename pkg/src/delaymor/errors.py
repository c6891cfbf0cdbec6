"""Exception and warning types shared across the package."""


class DelaymorError(Exception):
    """Base class for numerical and data errors raised by this package."""


class EvaluationAtPoleError(DelaymorError):
    """Transfer-function evaluation requested at (or numerically on) a pole."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"evaluation at system pole s = {point}")


class PointNotTabulatedError(DelaymorError):
    """A tabulated-data oracle was queried outside its sample set."""

    def __init__(self, point):
        self.point = point
        super().__init__(f"point not tabulated: s = {point}")


class ExpressionParseError(DelaymorError):
    """Malformed transfer-function expression; carries the offending position."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class LoewnerDataError(DelaymorError):
    """Interpolation data violates the preconditions of a Loewner build."""


class InjectivityError(DelaymorError):
    """The substitution map collides on the given point set."""

    def __init__(self, pair, tau):
        self.pair = pair
        self.tau = tau
        super().__init__(
            f"s*exp({tau}*s) is not injective on the points: "
            f"f({pair[0]}) and f({pair[1]}) coincide"
        )


class RealificationError(DelaymorError):
    """Similarity transform failed to produce real matrices."""


class LambertWConvergenceError(DelaymorError):
    """Halley iteration for the Lambert W function did not converge."""

    def __init__(self, z, k):
        self.z = z
        self.branch = k
        super().__init__(f"lambert_w did not converge for z = {z}, branch {k}")


class PencilError(DelaymorError):
    """Generalized eigenvalue pencil is defective or otherwise unusable."""


class NotInH2Error(DelaymorError):
    """Frequency-axis integrand does not decay: not in H2 or omega_max too small."""


class RankDeficiencyWarning(UserWarning):
    """Loewner pencil is numerically rank deficient (data order below r)."""


class SemisimplicityWarning(UserWarning):
    """Nearly repeated eigenvalues: semi-simplicity assumption at risk."""
