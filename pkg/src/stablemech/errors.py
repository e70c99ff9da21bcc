"""Exception hierarchy.

Every error raised by the library derives from :class:`StableMechError`;
the CLI reports ``type(err).__name__`` in its JSON error payload.
"""


class StableMechError(Exception):
    """Base class for library errors."""


class NumericalFailure(StableMechError):
    """A numerical procedure did not reach its tolerance."""


class InvalidParameter(StableMechError, ValueError):
    """An argument lies outside the domain of the operation."""


# levy_core
class QuadratureFailure(NumericalFailure):
    pass


class DivergentMoment(InvalidParameter):
    pass


class DimensionMismatch(InvalidParameter):
    pass


class IncompatibleAlpha(InvalidParameter):
    pass


class NonPositiveT(InvalidParameter):
    pass


class InvalidRate(InvalidParameter):
    pass


class NonSymmetricR(InvalidParameter):
    pass


# stable1d
class AlphaOutOfRange(InvalidParameter):
    pass


class AlphaEqualsOne(InvalidParameter):
    pass


AlphaOne = AlphaEqualsOne


class BranchAmbiguity(InvalidParameter):
    pass


# stable_density
class PoleError(InvalidParameter):
    pass


class InversionFailure(NumericalFailure):
    pass


class NotCoprime(InvalidParameter):
    pass


class InadmissibleRho(InvalidParameter):
    pass


# renorm_sampling
class GroupTooLarge(InvalidParameter):
    pass


class LimitNotConverged(NumericalFailure):
    pass


class RootBracketFailure(NumericalFailure):
    pass


class MeanUndefined(InvalidParameter):
    pass


class DegenerateTail(InvalidParameter):
    pass


# operator_stable2d
class UnsupportedShape(InvalidParameter):
    pass


class NormalLaw(InvalidParameter):
    pass


class OneInSpectrum(InvalidParameter):
    pass


class DomainError(InvalidParameter):
    pass


# scaling_theory
class DeltaPole(InvalidParameter):
    pass


class OriginSingularity(InvalidParameter):
    pass


class RegimeOverflow(InvalidParameter):
    pass


class StepUnderflow(NumericalFailure):
    pass


class SigmaNegative(InvalidParameter):
    pass
