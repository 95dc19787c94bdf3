"""Exception types raised across the pipeline."""


class IrisError(Exception):
    """Base class for every error raised by irisbio."""


# image I/O
class PGMError(IrisError, ValueError):
    pass


class MalformedHeader(PGMError):
    pass


class TruncatedData(PGMError):
    pass


class UnsupportedMaxval(PGMError):
    pass


class IoFailure(IrisError, OSError):
    pass


# parameter validation
class EmptyReference(IrisError, ValueError):
    pass


class BadKernel(IrisError, ValueError):
    pass


class TooSmall(IrisError, ValueError):
    pass


class BadThresholds(IrisError, ValueError):
    pass


# localization
class NoEdges(IrisError):
    pass


class EmptyRadiusRange(IrisError, ValueError):
    pass


class PupilNotFound(IrisError):
    pass


class SearchRangeOutOfImage(IrisError):
    pass


class EmptySearchSpace(IrisError, ValueError):
    pass


class DegenerateMaximum(IrisError):
    """The boundary response is flat, so no circle stands out."""


# normalization / encoding
class DegenerateAnnulus(IrisError, ValueError):
    pass


class AllMasked(IrisError):
    pass


class IndivisibleDims(IrisError, ValueError):
    pass


class BadLength(IrisError, ValueError):
    pass


# matching and template store
class InsufficientOverlap(IrisError):
    pass


class DuplicateId(IrisError):
    pass


class UnknownSubject(IrisError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EmptyStore(IrisError):
    pass


class EmptyInput(IrisError, ValueError):
    pass


class StoreCorrupt(IrisError, ValueError):
    pass


# synthesis and configuration
class SpecInvalid(IrisError, ValueError):
    pass


class ConfigError(IrisError, ValueError):
    pass
