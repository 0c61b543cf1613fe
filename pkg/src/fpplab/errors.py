"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so the CLI can name
the failed gate on stderr and exit with status 2.
"""


class FppLabError(Exception):
    """Base class; ``code`` is a stable kebab-case identifier."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class UnverifiableLocalBehavior(FppLabError):
    code = "unverifiable-local-behavior"


class OutsideValidityInterval(FppLabError):
    code = "outside-validity-interval"


class LogSingularity(FppLabError):
    code = "log-singularity"


class DegenerateCaps(FppLabError):
    code = "degenerate-caps"


class EnumerationTooLarge(FppLabError):
    code = "enumeration-too-large"


class SeriesDivergence(FppLabError):
    code = "series-divergence"


class NoValidCertificate(FppLabError):
    code = "no-valid-certificate-at-d"


class UnsupportedRegime(FppLabError):
    code = "unsupported-regime"


class UsageError(FppLabError):
    code = "usage-error"
