"""Exception taxonomy shared by all foliage modules."""


class FoliageError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FoliageError):
    """An expression was evaluated outside the domain of an elementary function
    (log of a nonpositive number, division by zero, arccosh below 1, ...)."""


class ExprSyntaxError(FoliageError):
    """Expression source text could not be parsed.  Carries the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifier(FoliageError):
    """A variable used in an expression is not bound in the environment."""


class SchemaError(FoliageError):
    """A scenario / chart / map description violates the JSON schema."""


class MetricNotSPD(FoliageError):
    """The metric failed the positive-definiteness probe at a sample point."""

    def __init__(self, point, eigenvalue):
        super().__init__(f"metric not positive definite at {tuple(point)} "
                         f"(smallest eigenvalue {eigenvalue:.3e})")
        self.point = tuple(point)
        self.eigenvalue = eigenvalue


class DependentVerticalFrames(FoliageError):
    """The declared vertical fields are linearly dependent at a sample point."""

    def __init__(self, point):
        super().__init__(f"vertical fields linearly dependent at {tuple(point)}")
        self.point = tuple(point)


class DegenerateFrame(FoliageError):
    """Gram-Schmidt could not produce a full orthonormal frame."""


class DegeneratePlane(FoliageError):
    """Sectional curvature requested for two (nearly) parallel vectors."""


class MissingJ(FoliageError):
    """A complex-structure operation was requested on a chart without J."""


class NotKahler(FoliageError):
    """A Kahler-only computation was requested on a non-Kahler chart."""


class ZeroVector(FoliageError):
    """A direction argument was (numerically) zero."""


class ImageOutOfDomain(FoliageError):
    """A map sent a sample point outside the target chart's domain box."""

    def __init__(self, point, image):
        super().__init__(f"image {tuple(image)} of {tuple(point)} leaves the "
                         f"target domain box")
        self.point = tuple(point)
        self.image = tuple(image)


class MissingDistance(FoliageError):
    """Comparison check requested on a chart without a distance field."""


class EikonalViolation(FoliageError):
    """The distance expression does not satisfy |grad r| = 1 at a sample."""

    def __init__(self, point, gradnorm):
        super().__init__(f"|grad r| = {gradnorm:.6f} != 1 at {tuple(point)}")
        self.point = tuple(point)
        self.gradnorm = gradnorm


class AssumptionViolated(FoliageError):
    """A curvature-sign hypothesis of a bound check fails on the given charts."""


class UnboundedDilatation(FoliageError):
    """The dilatation spectrum is rank deficient: no finite order works."""

    def __init__(self, point, eigenvalues):
        super().__init__(f"dilatation unbounded at {tuple(point)}: "
                         f"eigenvalues {[float(v) for v in eigenvalues]}")
        self.point = tuple(point)
        self.eigenvalues = tuple(float(v) for v in eigenvalues)


class UnknownGallery(FoliageError):
    """Requested built-in scenario does not exist."""
