"""Exception types shared across the package."""


class SocliftError(Exception):
    """Base class for all package-specific errors."""


class InputError(SocliftError):
    """Malformed or inconsistent user input (files, flags, matrices)."""


class ZeroMatrix(InputError):
    """A nonzero matrix was required (the zero normal defines the full cone)."""


class NumericalFailure(SocliftError):
    """An iterative routine could not certify a consistent answer.

    Callers may retry with more restarts or looser tolerances.
    """


class SamplingExhausted(SocliftError):
    """The slice sampler found no nonzero point; consistent with S = {0}."""


class NotSingularIndefinite(SocliftError):
    """Inertia of the normal matrix is not (1, 1, 1)."""


class PreconditionViolated(SocliftError):
    """An operation was called outside its documented domain."""


class IndefinitenessLost(SocliftError):
    """A matrix in the orthogonal complement of a slice with interior
    points came out semidefinite; this contradicts the theory and is
    reported rather than silently accepted."""


class RankTooLarge(SocliftError):
    """Face embedding requires a witness of rank at most 2."""


class NotSocr(SocliftError):
    """Lift synthesis was requested for a slice that is not representable."""


class NotInSlice(SocliftError):
    """The matrix does not satisfy the certificate's slice equations."""


class EmptyInterval(SocliftError):
    """The free-parameter interval is empty: the matrix is not PSD within
    the given tolerance."""


class VerificationFailed(SocliftError):
    """A freshly synthesized certificate failed its own verification."""
