"""Exact q-series engine for eta quotients and 3-adic congruences of
6-colored generalized Frobenius partitions."""

__version__ = "0.1.0"

from .errors import (
    EtacongError,
    FractionalSupportError,
    InsufficientPrecisionError,
    NonIntegralCoefficientError,
    VerificationError,
)
from .series import Series, agree_up_to, negate_q, u_operator, val3
from .etaq import EtaExpression, EtaQuotient, expand, named_constant, parse_expression

__all__ = [
    "EtacongError", "FractionalSupportError", "InsufficientPrecisionError", "NonIntegralCoefficientError",
    "VerificationError", "Series", "agree_up_to", "negate_q", "u_operator", "val3", "EtaExpression",
    "EtaQuotient", "expand", "named_constant", "parse_expression",
]
