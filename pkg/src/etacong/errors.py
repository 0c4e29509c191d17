"""Exception hierarchy shared by all modules."""


class EtacongError(Exception):
    """Base class for library errors."""


class InsufficientPrecisionError(EtacongError):
    """A computation needs coefficients beyond a series' truncation."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class FractionalSupportError(EtacongError):
    """An integer-q-power operation met a coefficient at a fractional power."""


class NonIntegralCoefficientError(EtacongError):
    """A coefficient expected to be an integer is not."""

    def __init__(self, exponent: int, value):
        super().__init__(f"non-integral coefficient {value} at x^{exponent}")
        self.exponent = exponent
        self.value = value


class VerificationError(EtacongError):
    """A mathematical check failed; carries a report for diagnostics."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
