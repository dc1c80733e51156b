"""
Domain exceptions for cremona-lines.

Core operations raise these; the controller layer maps them to exit code 1.
"""


class CremonaLinesError(Exception):
    """Base class for every domain error."""


class ConfigParseError(CremonaLinesError):
    """Malformed configuration text or arrangement document."""


class DegenerateInputError(CremonaLinesError):
    """Zero vectors, coincident points or collinear triples where forbidden."""


class CoincidentLinesError(DegenerateInputError):
    def __init__(self, message: str = "coincident lines"):
        super().__init__(message)


class InconsistentTypeError(CremonaLinesError):
    """A multiplicity type that no union of lines can have."""


class PencilCaseError(CremonaLinesError):
    """analyze() called on a pencil (d = m0)."""

    def __init__(self, message: str = "pencil case"):
        super().__init__(message)


class DegreeMismatchError(CremonaLinesError):
    """Forms of unequal degree where a common degree is required."""


class InadmissibleBaseSchemeError(CremonaLinesError):
    """The base points do not define a homaloidal net."""

    def __init__(self, message: str = "inadmissible base scheme"):
        super().__init__(message)


class BirationalityError(CremonaLinesError):
    """forward o inverse is not the identity up to a common factor."""


class RealizationError(CremonaLinesError):
    """Exhausted retries while realizing a family."""


class NoRecipeError(CremonaLinesError):
    def __init__(self, message: str = "no recipe"):
        super().__init__(message)


class CertificateError(CremonaLinesError):
    """A certificate step does not replay to its recorded outcome."""


class WitnessError(CremonaLinesError):
    """A witness member fails its vanishing conditions."""


class AdjointIndexError(CremonaLinesError):
    """ad_{n,m} requested with m < n or n < 1."""


class UsageError(CremonaLinesError):
    """Malformed command-line input (missing file, bad map spec); exit code 2."""
