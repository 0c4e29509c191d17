"""Eta-quotients, q-Pochhammer products and theta series.

An :class:`EtaQuotient` is ``scalar * x^qshift * prod eta(t*tau)^r_t`` where the
``x^(sum t*r_t)`` coming from the ``q^(t/24)`` inside each eta is implicit.  An
:class:`EtaExpression` is a finite formal sum of quotients.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from . import _kernels
from .errors import EtacongError, InsufficientPrecisionError
from .series import GRID, Series, _ceil_div


# ----------------------------------------------------------------------------
# symbolic types
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EtaQuotient:
    """``scalar * x^qshift * prod_t eta(t tau)^(r_t)``.

    ``levels`` is kept as a sorted tuple of ``(t, r_t)`` pairs with nonzero
    exponents; use :meth:`make` or :meth:`level_map` for the dict view.
    """

    levels: tuple[tuple[int, int], ...] = ()
    scalar: Fraction = Fraction(1)
    qshift: int = 0

    def __post_init__(self):
        merged: dict[int, int] = {}
        for t, r in self.levels:
            if t <= 0:
                raise ValueError(f"eta level must be positive, got {t}")
            merged[t] = merged.get(t, 0) + r
        object.__setattr__(self, "levels", tuple(sorted((t, r) for t, r in merged.items() if r)))
        object.__setattr__(self, "scalar", Fraction(self.scalar))

    @classmethod
    def make(cls, levels: Mapping[int, int] | None = None, scalar=1, qshift: int = 0) -> "EtaQuotient":
        return cls(tuple((levels or {}).items()), Fraction(scalar), qshift)

    @classmethod
    def constant(cls, c) -> "EtaQuotient":
        return cls((), Fraction(c), 0)

    def level_map(self) -> dict[int, int]:
        return dict(self.levels)

    @property
    def leading_exponent(self) -> int:
        """Intrinsic lowest exponent in x-units: ``qshift + sum t*r_t``."""
        return self.qshift + sum(t * r for t, r in self.levels)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.levels), 2)

    def same_shape(self, other: "EtaQuotient") -> bool:
        return self.levels == other.levels and self.qshift == other.qshift

    def with_scalar(self, c) -> "EtaQuotient":
        return EtaQuotient(self.levels, Fraction(c), self.qshift)

    def __mul__(self, other):
        if isinstance(other, EtaQuotient):
            return EtaQuotient(self.levels + other.levels, self.scalar * other.scalar, self.qshift + other.qshift)
        if isinstance(other, (int, Fraction)):
            return EtaQuotient(self.levels, self.scalar * other, self.qshift)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "EtaQuotient":
        if k < 0 and self.scalar == 0:
            raise ZeroDivisionError("zero quotient")
        return EtaQuotient(tuple((t, r * k) for t, r in self.levels), self.scalar ** k, self.qshift * k)

    def invert(self) -> "EtaQuotient":
        return self ** -1

    def __str__(self) -> str:
        return format_quotient(self)


@dataclass(frozen=True)
class EtaExpression:
    """Formal sum of eta-quotients; the empty sum is zero."""

    terms: tuple[EtaQuotient, ...] = ()

    @classmethod
    def of(cls, *terms: Union[EtaQuotient, int, Fraction]) -> "EtaExpression":
        return cls(tuple(_as_quotient(t) for t in terms)).collect()

    def collect(self) -> "EtaExpression":
        """Merge terms with identical level data and q-shift; drop zeros."""
        acc: dict[tuple, Fraction] = {}
        order: list[tuple] = []
        for q in self.terms:
            key = (q.levels, q.qshift)
            if key not in acc:
                acc[key] = Fraction(0)
                order.append(key)
            acc[key] += q.scalar
        return EtaExpression(tuple(EtaQuotient(k[0], acc[k], k[1]) for k in order if acc[k]))

    @property
    def order(self) -> int:
        """Smallest intrinsic leading exponent among the terms."""
        if not self.terms:
            raise ValueError("zero expression has no order")
        return min(q.leading_exponent for q in self.terms)

    def __add__(self, other):
        other = as_expression(other)
        return EtaExpression(self.terms + other.terms).collect()

    __radd__ = __add__

    def __neg__(self):
        return EtaExpression(tuple(q * -1 for q in self.terms))

    def __sub__(self, other):
        return self + (-as_expression(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return EtaExpression(tuple(q * other for q in self.terms)).collect()
        other = as_expression(other)
        return EtaExpression(tuple(a * b for a in self.terms for b in other.terms)).collect()

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "EtaExpression":
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only single-term expressions have symbolic inverses")
            return EtaExpression((self.terms[0] ** k,))
        out = EtaExpression.of(1)
        for _ in range(k):
            out = out * self
        return out

    def __str__(self) -> str:
        return format_expression(self)


def _as_quotient(t) -> EtaQuotient:
    if isinstance(t, EtaQuotient):
        return t
    if isinstance(t, (int, Fraction)):
        return EtaQuotient.constant(t)
    raise TypeError(f"cannot use {type(t).__name__} as an eta quotient")


def as_expression(e) -> EtaExpression:
    if isinstance(e, EtaExpression):
        return e
    return EtaExpression((_as_quotient(e),)).collect()


@dataclass(frozen=True)
class ThetaIndex:
    """``theta_{m,a} = sum_n q^((2mn+a)^2/(4m))``."""

    m: int
    a: int

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("theta index m must be positive")


@dataclass(frozen=True)
class PochhammerFactor:
    """``(sign*x^a; x^b)_inf ** exponent`` on the x-grid."""

    sign: int
    a: int
    b: int
    exponent: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Pochhammer exponents a, b must be positive")


# ----------------------------------------------------------------------------
# expansions
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pentagonal(n: int) -> tuple[int, ...]:
    """``(u;u)_inf`` to ``n`` terms via Euler's pentagonal theorem."""
    out = [0] * n
    k = 0
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= n:
            break
        sign = -1 if k % 2 else 1
        out[e1] += sign
        e2 = k * (3 * k + 1) // 2
        if k and e2 < n:
            out[e2] += sign
        k += 1
    return tuple(out)


@lru_cache(maxsize=256)
def _euler_power(k: int, n: int) -> tuple[int, ...]:
    """``(u;u)_inf ** k`` to ``n`` terms, ``k >= 0``."""
    if k == 0:
        return tuple([1] + [0] * (n - 1))
    if k == 1:
        return _pentagonal(n)
    half = _euler_power(k // 2, n)
    sq = _kernels.mul_trunc(half, half, n)
    if k % 2:
        sq = _kernels.mul_trunc(sq, _pentagonal(n), n)
    return tuple(sq)


def _stretch(coeffs, t: int, n: int) -> list[int]:
    out = [0] * n
    out[::t] = coeffs[: _ceil_div(n, t)]
    return out


def _euler_product(levels: Mapping[int, int], n: int) -> list[int]:
    """``prod_c (u^c;u^c)_inf ** k_c`` to ``n`` terms, as an integer list."""
    num = [1] + [0] * (n - 1)
    den = [1] + [0] * (n - 1)
    for c, k in sorted(levels.items()):
        factor = _stretch(_euler_power(abs(k), _ceil_div(n, c)), c, n)
        if k > 0:
            num = _kernels.mul_trunc(num, factor, n)
        elif k < 0:
            den = _kernels.mul_trunc(den, factor, n)
    if any(den[1:]):
        num = _kernels.mul_trunc(num, _kernels.inverse_unit(den, n), n)
    return num


def expand_quotient(e: EtaQuotient, trunc: int) -> Series:
    lead = e.leading_exponent
    if e.scalar == 0 or lead >= trunc:
        return Series.zero(trunc)
    n = _ceil_div(trunc - lead, GRID)
    nums = _euler_product(e.level_map(), n)
    s = e.scalar
    if s.numerator != 1:
        nums = [c * s.numerator for c in nums]
    return Series(lead, nums, trunc, GRID, s.denominator)


def expand(e, trunc: int) -> Series:
    """Expand a quotient, an expression or a constant to a series below ``x^trunc``."""
    if isinstance(e, EtaQuotient):
        return expand_quotient(e, trunc)
    e = as_expression(e)
    out = Series.zero(trunc)
    for q in e.terms:
        out = out + expand_quotient(q, trunc)
    return out


def eta_series(t: int, trunc: int) -> Series:
    """``eta(t tau) = x^t * prod (1 - x^(24 t n))``."""
    if trunc <= t:
        raise InsufficientPrecisionError(f"eta({t}) needs trunc > {t}, got {trunc}", required=t + 1)
    return expand_quotient(EtaQuotient.make({t: 1}), trunc)


def _fast_pochhammer_levels(p: PochhammerFactor) -> dict[int, int] | None:
    """Level data in ``u = x^a`` when the product is an eta-type ratio, else None."""
    if p.b == p.a:
        base = {1: 1} if p.sign == 1 else {2: 1, 1: -1}
    elif p.b == 2 * p.a:
        base = {1: 1, 2: -1} if p.sign == 1 else {2: 2, 1: -1, 4: -1}
    else:
        return None
    return {c: k * p.exponent for c, k in base.items()}


def pochhammer_series(p: PochhammerFactor, trunc: int, *, general: bool = False) -> Series:
    """Truncated ``prod_{n>=0} (1 - sign*x^(a+bn)) ** exponent``.

    Products of the form ``(+-u; u)`` and ``(+-u; u^2)`` are rewritten as
    ratios of Euler products; ``general=True`` forces the factor-by-factor
    route (used to cross-check the rewrite).
    """
    if trunc <= 0:
        raise InsufficientPrecisionError("Pochhammer expansion needs trunc > 0", required=1)
    if p.exponent == 0:
        return Series.one(trunc)
    levels = None if general else _fast_pochhammer_levels(p)
    if levels is not None:
        n = _ceil_div(trunc, p.a)
        return Series(0, _euler_product(levels, n), trunc, p.a)
    g = math.gcd(p.a, p.b)
    a, b = p.a // g, p.b // g
    n = _ceil_div(trunc, g)
    f = [1] + [0] * (n - 1)
    s = p.sign
    m = a
    while m < n:
        for _ in range(abs(p.exponent)):
            if p.exponent > 0:
                for i in range(n - 1, m - 1, -1):
                    f[i] -= s * f[i - m]
            else:
                for i in range(m, n):
                    f[i] += s * f[i - m]
        m += b
    return Series(0, f, trunc, g)


def pochhammer_product(factors: Iterable[PochhammerFactor], trunc: int) -> Series:
    out = Series.one(trunc)
    for p in factors:
        out = out * pochhammer_series(p, trunc)
    return out


def theta_exponent(i: ThetaIndex, n: int) -> int:
    """Exponent of the ``n``-th lattice term of ``theta_{m,a}`` in x-units."""
    num = 6 * (2 * i.m * n + i.a) ** 2
    if num % i.m:
        raise EtacongError(f"theta_({i.m},{i.a}) exponent not on 1/24 grid")
    return num // i.m


def theta_series(i: ThetaIndex, trunc: int) -> Series:
    """Lattice sum ``theta_{m,a}`` below ``x^trunc``.

    Terms satisfy ``6*(2mn+a)^2/m < trunc``, i.e. ``|2mn+a| < sqrt(trunc*m/6)``;
    the range of ``n`` is bounded by that inequality on both sides.
    """
    if (6 * i.a * i.a) % i.m:
        raise EtacongError(f"theta_({i.m},{i.a}) exponent not on 1/24 grid")
    terms: dict[int, int] = {}
    if trunc > 0:
        bound = math.isqrt(max(trunc * i.m // 6, 0)) + 1  # |2mn+a| <= bound
        lo = (-bound - i.a) // (2 * i.m)
        hi = (bound - i.a) // (2 * i.m) + 1
        for n in range(lo, hi + 1):
            e = theta_exponent(i, n)
            if e < trunc:
                terms[e] = terms.get(e, 0) + 1
    return Series.from_terms(terms, trunc)


PHI_FACTORS = (PochhammerFactor(-1, 24, 48, 2), PochhammerFactor(1, 48, 48, 1))
PSI_FACTORS = (PochhammerFactor(-1, 24, 48, 1), PochhammerFactor(1, 96, 96, 1))


def phi_psi_series(kind: str, trunc: int, scale: int = 1) -> Series:
    """Ramanujan's ``phi(q^scale)`` or ``psi(q^scale)`` from their product forms.

    ``phi(q) = (-q;q^2)^2 (q^2;q^2)`` and ``psi(q) = (-q;q^2) (q^4;q^4)``.
    """
    if kind in ("phi", "φ"):
        factors = PHI_FACTORS
    elif kind in ("psi", "ψ"):
        factors = PSI_FACTORS
    else:
        raise ValueError(f"unknown theta species {kind!r}")
    scaled = [PochhammerFactor(p.sign, p.a * scale, p.b * scale, p.exponent) for p in factors]
    return pochhammer_product(scaled, trunc)


# ----------------------------------------------------------------------------
# registry of displayed functions
# ----------------------------------------------------------------------------

def _q(levels, scalar=1, qshift=0) -> EtaQuotient:
    return EtaQuotient.make(levels, scalar, qshift)


_REGISTRY: dict[str, EtaExpression] = {
    "A": as_expression(_q({9: 9, 4: 2, 2: 5, 36: -2, 18: -5, 1: -9})),
    "B": as_expression(_q({9: 1, 2: 2, 18: -2, 1: -1})),
    "t": as_expression(_q({12: 4, 2: 2, 6: -2, 4: -4})),
    "y": as_expression(_q({4: 3, 3: 1, 12: -1, 1: -3})),
    "p0": as_expression(_q({12: 4, 3: 12, 2: 8, 6: -8, 4: -12, 1: -4})),
    "p1": as_expression(_q({12: 2, 3: 6, 2: 4, 6: -4, 4: -6, 1: -2})),
    "L0": EtaExpression((
        _q({12: 5, 3: 1, 2: 8, 24: -2, 8: -2, 6: -4, 4: -3, 1: -3}),
        EtaQuotient.constant(24),
        _q({24: 2, 8: 2, 3: 1, 2: 10, 12: -1, 6: -2, 4: -9, 1: -3}, 4),
    )),
    "Atilde": as_expression(_q({2: 11, 9: 11, 36: 2, 1: -11, 4: -2, 18: -11})),
    "Btilde": as_expression(_q({2: 2, 9: 1, 1: -1, 18: -2})),
    "ttilde": as_expression(_q({1: 4, 4: 4, 6: 10, 2: -10, 3: -4, 12: -4})),
    "ytilde": as_expression(_q({12: 1, 3: 2, 2: 9, 6: -3, 4: -3, 1: -6}, Fraction(-1, 2))),
    "p0tilde": as_expression(_q({6: 4, 4: 12, 3: 8, 1: 8, 12: -4, 2: -28}, 16)),
    "p1tilde": as_expression(_q({6: 2, 4: 6, 3: 4, 1: 4, 12: -2, 2: -14}, 4)),
    # q^(-1/2) * (five-term sum); the shift is stored per term
    "cpsi60": EtaExpression((
        _q({4: 11, 12: 5, 2: -5, 1: -6, 6: -2, 8: -2, 24: -2}, 8, -12),
        _q({2: 9, 8: 2, 12: 5, 1: -10, 4: -3, 6: -2, 24: -2}, 4, -12),
        _q({4: 5, 8: 2, 24: 2, 1: -6, 2: -3, 12: -1}, 32, -12),
        _q({4: 3, 2: 7, 24: 2, 1: -10, 8: -2, 12: -1}, 4, -12),
        _q({2: 11, 6: 2, 1: -11, 4: -2, 3: -1}, 8, -12),
    )),
    "L0tilde_prefactor": as_expression(_q({3: 1, 1: 11, 4: 2, 6: -2, 2: -11}, 2, 12)),
}


def registry_names() -> list[str]:
    return sorted(_REGISTRY)


def named_constant(name: str) -> EtaExpression:
    """Registered eta expression transcribed from the displayed formulas."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown named constant {name!r}; known: {', '.join(registry_names())}") from None


def named_quotient(name: str) -> EtaQuotient:
    e = named_constant(name)
    if len(e.terms) != 1:
        raise ValueError(f"{name!r} is a sum of {len(e.terms)} quotients")
    return e.terms[0]


# ----------------------------------------------------------------------------
# text grammar:  c * q^(p/24) * eta(1)^-6 * eta(4)^11 + ...
# ----------------------------------------------------------------------------

def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_quotient(e: EtaQuotient) -> str:
    parts = []
    if e.scalar != 1 or (not e.levels and not e.qshift):
        parts.append(_fmt_frac(e.scalar))
    if e.qshift:
        parts.append(f"q^({e.qshift}/24)")
    parts.extend(f"eta({t})^{r}" if r != 1 else f"eta({t})" for t, r in e.levels)
    return " * ".join(parts)


def format_expression(e) -> str:
    e = as_expression(e)
    if not e.terms:
        return "0"
    return " + ".join(format_quotient(q) for q in e.terms)


_TOKEN = re.compile(r"\s*(?:(\d+)|(eta|q)|(.))")


class ParseError(EtacongError, ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None:
            break
        if not tok.isspace():
            out.append(tok)
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} at token {self.i} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def integer(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        tok = self.take()
        if not tok.isdigit():
            raise ParseError(f"expected integer, got {tok!r} in {self.text!r}")
        return sign * int(tok)

    def rational(self) -> Fraction:
        if self.peek() == "(":
            self.take("(")
            v = self.rational()
            self.take(")")
            return v
        v = Fraction(self.integer())
        if self.peek() == "/":
            self.take("/")
            v /= self.integer()
        return v

    def exponent(self) -> Fraction:
        if self.peek() == "(":
            return self.rational()
        return Fraction(self.integer())

    def factor(self) -> EtaQuotient:
        tok = self.peek()
        if tok == "eta":
            self.take()
            self.take("(")
            t = self.integer()
            self.take(")")
            r = 1
            if self.peek() == "^":
                self.take()
                ex = self.exponent()
                if ex.denominator != 1:
                    raise ParseError("eta exponents must be integers")
                r = int(ex)
            return EtaQuotient.make({t: r})
        if tok == "q":
            self.take()
            p = Fraction(1)
            if self.peek() == "^":
                self.take()
                p = self.exponent()
            shift = p * GRID
            if shift.denominator != 1:
                raise ParseError(f"q^{p} is not on the 1/24 grid")
            return EtaQuotient.make({}, 1, int(shift))
        return EtaQuotient.constant(self.rational())

    def term(self) -> EtaQuotient:
        out = self.factor()
        while self.peek() == "*":
            self.take()
            out = out * self.factor()
        return out

    def expression(self) -> EtaExpression:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        terms = [self.term() * sign]
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            terms.append(t * (-1 if op == "-" else 1))
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r} in {self.text!r}")
        return EtaExpression(tuple(terms)).collect()


def parse_expression(text: str) -> EtaExpression:
    """Parse the text grammar, or look up a registry name."""
    name = text.strip()
    if name in _REGISTRY:
        return _REGISTRY[name]
    return _Parser(text).expression()
