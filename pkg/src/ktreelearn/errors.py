"""Exception hierarchy shared by all modules."""


class KTreeLearnError(Exception):
    """Base class for every error raised by this package."""


# distributions and subsets
class DistributionError(KTreeLearnError, ValueError):
    pass


class NegativeProbability(DistributionError):
    pass


class NotNormalized(DistributionError):
    pass


class SizeMismatch(DistributionError):
    pass


class ShapeMismatch(DistributionError):
    pass


class TableTooLarge(DistributionError):
    pass


class InvalidSubset(KTreeLearnError, ValueError):
    pass


class OverlappingSets(KTreeLearnError, ValueError):
    pass


class InvalidSamples(KTreeLearnError, ValueError):
    pass


class InvalidBudget(KTreeLearnError, ValueError):
    pass


# set-function minimization
class GroundTooSmall(KTreeLearnError, ValueError):
    pass


class GroundTooLarge(KTreeLearnError, ValueError):
    pass


# partitions
class EmptyResidual(KTreeLearnError, ValueError):
    pass


class GroundMismatch(KTreeLearnError, ValueError):
    pass


# tree decompositions
class InvalidTD(KTreeLearnError, ValueError):
    pass


class NotATree(InvalidTD):
    pass


class CoverageGap(InvalidTD):
    pass


class RunningIntersectionViolation(InvalidTD):
    pass


class SeparatorTooLarge(KTreeLearnError, ValueError):
    pass


class NoDecomposition(KTreeLearnError):
    """No tree-decomposition of the requested width is compatible with the family."""


# models
class InconsistentModel(KTreeLearnError, ValueError):
    pass


class InvalidSpec(KTreeLearnError, ValueError):
    pass


class TooLarge(KTreeLearnError, ValueError):
    pass


class FormatError(KTreeLearnError, ValueError):
    """A text file does not follow its documented layout."""
