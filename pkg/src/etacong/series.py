"""Truncated Laurent series with exact rational coefficients.

Every series lives on the grid ``x = q^(1/24)``: an exponent ``e`` stands for
``q^(e/24)``.  A series knows all of its coefficients strictly below ``trunc``
(everything below ``offset`` is zero); nothing at or above ``trunc`` is known.

Internally the nonzero support is stored densely on an arithmetic progression
``offset + step*i`` with a common denominator, so that eta products (which live
on ``q^{t}``-grids) do not pay for the 23 empty slots between integer powers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import gmpy2

from . import _kernels
from .errors import (
    FractionalSupportError,
    InsufficientPrecisionError,
    NonIntegralCoefficientError,
)

GRID = 24
MAGIC = b"QS1"

Exponent24 = int
Number = int | Fraction


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


class Series:
    """Immutable truncated Laurent series in ``x = q^(1/24)``."""

    __slots__ = ("_offset", "_step", "_nums", "_den", "_trunc")
    __hash__ = None  # equality is window-relative, see __eq__

    def __init__(self, offset: int, nums: Sequence[int], trunc: int, step: int = 1, den: int = 1):
        if step < 0:
            raise ValueError("step must be nonnegative")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            den = -den
            nums = [-c for c in nums]
        if trunc <= offset:
            length = 0
        elif step == 0:
            length = 1
        else:
            length = _ceil_div(trunc - offset, step)
        nums = list(nums[:length])
        first = next((i for i, c in enumerate(nums) if c), None)
        if first is None:
            self._offset, self._step, self._nums, self._den, self._trunc = trunc, GRID, (), 1, trunc
            return
        offset += first * step
        if first:
            nums = nums[first:]
        g = 0
        for i, c in enumerate(nums):
            if c and i:
                g = math.gcd(g, i)
                if g == 1:
                    break
        if g > 1:
            nums = nums[::g]
            step *= g
        elif g == 0:
            # a monomial has no grid; step 0 keeps it from refining gcds
            nums = nums[:1]
            step = 0
        if den != 1:
            d = den
            for c in nums:
                d = math.gcd(d, c)
                if d == 1:
                    break
            if d != 1:
                nums = [c // d for c in nums]
                den //= d
        self._offset = offset
        self._step = step
        self._nums = tuple(nums)
        self._den = den
        self._trunc = trunc

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, offset: int, coeffs: Iterable[Number], trunc: int | None = None) -> "Series":
        """Dense construction: ``coeffs[i]`` is the coefficient of ``x^(offset+i)``."""
        fr = [_as_fraction(c) for c in coeffs]
        if trunc is None:
            trunc = offset + len(fr)
        if trunc - offset > len(fr):
            fr.extend([Fraction(0)] * (trunc - offset - len(fr)))
        return cls._from_fractions(offset, fr, trunc, 1)

    @classmethod
    def from_terms(cls, terms: Mapping[int, Number], trunc: int) -> "Series":
        """Sparse construction from ``{exponent: coefficient}``; exponents >= trunc dropped."""
        items = {e: _as_fraction(c) for e, c in terms.items() if e < trunc and c}
        if not items:
            return cls.zero(trunc)
        lo = min(items)
        g = 0
        for e in items:
            g = math.gcd(g, e - lo)
        step = g or 1
        fr = [Fraction(0)] * _ceil_div(trunc - lo, step)
        for e, c in items.items():
            fr[(e - lo) // step] += c
        return cls._from_fractions(lo, fr, trunc, step)

    @classmethod
    def from_q_coeffs(cls, coeffs: Sequence[Number], q_offset: int = 0, q_trunc: int | None = None) -> "Series":
        """Construction on integer q-powers: ``coeffs[i]`` multiplies ``q^(q_offset+i)``."""
        if q_trunc is None:
            q_trunc = q_offset + len(coeffs)
        fr = [_as_fraction(c) for c in coeffs][: q_trunc - q_offset]
        fr.extend([Fraction(0)] * (q_trunc - q_offset - len(fr)))
        return cls._from_fractions(GRID * q_offset, fr, GRID * q_trunc, GRID)

    @classmethod
    def _from_fractions(cls, offset: int, fr: Sequence[Fraction], trunc: int, step: int) -> "Series":
        den = 1
        for c in fr:
            if c.denominator != 1:
                den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        return cls(offset, nums, trunc, step, den)

    @classmethod
    def zero(cls, trunc: int) -> "Series":
        return cls(trunc, (), trunc)

    @classmethod
    def monomial(cls, coeff: Number, exponent: int, trunc: int) -> "Series":
        c = _as_fraction(coeff)
        if exponent >= trunc:
            return cls.zero(trunc)
        return cls(exponent, [c.numerator], trunc, 1, c.denominator)

    @classmethod
    def one(cls, trunc: int) -> "Series":
        return cls.monomial(1, 0, trunc)

    # -- accessors --------------------------------------------------------
    @property
    def offset(self) -> int:
        """Lowest stored exponent (equals ``trunc`` for the zero series)."""
        return self._offset

    @property
    def trunc(self) -> int:
        return self._trunc

    @property
    def step(self) -> int:
        """Grid spacing of the stored support (0 for a monomial)."""
        return self._step

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._nums

    def is_zero(self) -> bool:
        return not self._nums

    @property
    def order(self) -> int | None:
        """Exponent of the leading nonzero term, ``None`` if zero on the window."""
        return None if not self._nums else self._offset

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._nums:
            raise ZeroDivisionError("zero series has no leading coefficient")
        return Fraction(self._nums[0], self._den)

    @property
    def coeffs(self) -> list[Fraction]:
        """Dense coefficient list on the full x-grid from ``offset`` to ``trunc``."""
        out = [Fraction(0)] * (self._trunc - self._offset)
        for i, c in enumerate(self._nums):
            if c:
                out[i * self._step] = Fraction(c, self._den)
        return out

    def items(self) -> Iterable[tuple[int, Fraction]]:
        """Nonzero ``(exponent, coefficient)`` pairs in increasing order."""
        for i, c in enumerate(self._nums):
            if c:
                yield self._offset + i * self._step, Fraction(c, self._den)

    def __getitem__(self, exponent: int) -> Fraction:
        if exponent >= self._trunc:
            raise InsufficientPrecisionError(
                f"coefficient of x^{exponent} requested but series is known only below x^{self._trunc}",
                required=exponent + 1,
            )
        if self._step == 0:
            return Fraction(self._nums[0], self._den) if exponent == self._offset else Fraction(0)
        i, r = divmod(exponent - self._offset, self._step)
        if exponent < self._offset or r:
            return Fraction(0)
        return Fraction(self._nums[i], self._den)

    def q(self, n: int) -> Fraction:
        """Coefficient of ``q^n``."""
        return self[GRID * n]

    def q_coeffs(self, lo: int, hi: int) -> list[Fraction]:
        """Coefficients of ``q^lo, ..., q^(hi-1)``."""
        if GRID * (hi - 1) >= self._trunc:
            raise InsufficientPrecisionError(
                f"q^{hi - 1} requested but series is known only below x^{self._trunc}",
                required=GRID * hi,
            )
        return [self[GRID * n] for n in range(lo, hi)]

    @property
    def q_trunc(self) -> int:
        """Number of integer q-powers ``n`` with ``24n < trunc``."""
        return _ceil_div(self._trunc, GRID)

    def has_integer_support(self) -> bool:
        return not self._nums or (self._offset % GRID == 0 and self._step % GRID == 0)

    def is_integral(self) -> bool:
        return self._den == 1

    # -- grid plumbing ------------------------------------------------------
    def _on_grid(self, base: int, step: int, length: int) -> list[int]:
        """Numerators on the progression ``base + step*i`` (i < length)."""
        out = [0] * length
        if not self._nums:
            return out
        if self._step == 0:
            j, r = divmod(self._offset - base, step)
            if r:
                raise ValueError("target grid does not contain the series support")
            if j < length:
                out[j] = self._nums[0]
            return out
        start, r = divmod(self._offset - base, step)
        ratio, r2 = divmod(self._step, step)
        if r or r2:
            raise ValueError("target grid does not contain the series support")
        for i, c in enumerate(self._nums):
            j = start + i * ratio
            if j >= length:
                break
            out[j] = c
        return out

    def truncate(self, trunc: int) -> "Series":
        """Forget coefficients at exponents >= ``trunc``."""
        if trunc >= self._trunc:
            return self
        return Series(self._offset, self._nums, trunc, self._step, self._den) if self._nums else Series.zero(trunc)

    def shift(self, e: int) -> "Series":
        """Multiply by ``x^e``."""
        if not self._nums:
            return Series.zero(self._trunc + e)
        return Series(self._offset + e, self._nums, self._trunc + e, self._step, self._den)

    def dilate(self, k: int) -> "Series":
        """Substitute ``x -> x^k`` (so ``q -> q^k``)."""
        if k < 1:
            raise ValueError("dilation factor must be positive")
        if not self._nums:
            return Series.zero(self._trunc * k)
        return Series(self._offset * k, self._nums, k * self._trunc, self._step * k, self._den)

    # -- ring operations ----------------------------------------------------
    @staticmethod
    def _coerce(other, trunc_hint: int) -> "Series":
        if isinstance(other, Series):
            return other
        if isinstance(other, (int, Fraction)):
            return Series.monomial(other, 0, max(trunc_hint, 1))
        return NotImplemented

    def __add__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            other = Series.monomial(other, 0, self._trunc)
        if not isinstance(other, Series):
            return NotImplemented
        trunc = min(self._trunc, other._trunc)
        if not other._nums:
            return self.truncate(trunc)
        if not self._nums:
            return other.truncate(trunc)
        base = min(self._offset, other._offset)
        step = math.gcd(self._step, other._step, abs(self._offset - other._offset)) or GRID
        if base >= trunc:
            return Series.zero(trunc)
        length = _ceil_div(trunc - base, step)
        den = self._den * other._den // math.gcd(self._den, other._den)
        a = self._on_grid(base, step, length)
        b = other._on_grid(base, step, length)
        fa, fb = den // self._den, den // other._den
        if fa == 1 and fb == 1:
            nums = [x + y for x, y in zip(a, b)]
        else:
            nums = [x * fa + y * fb for x, y in zip(a, b)]
        return Series(base, nums, trunc, step, den)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        if not self._nums:
            return self
        return Series(self._offset, [-c for c in self._nums], self._trunc, self._step, self._den)

    def __sub__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        if not isinstance(other, Series):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Series":
        return (-self) + other

    def scale(self, c: Number) -> "Series":
        c = _as_fraction(c)
        if c == 0 or not self._nums:
            return Series.zero(self._trunc)
        return Series(self._offset, [x * c.numerator for x in self._nums], self._trunc, self._step,
                      self._den * c.denominator)

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        trunc = min(self._trunc + other._offset, other._trunc + self._offset)
        if not self._nums or not other._nums:
            return Series.zero(trunc)
        base = self._offset + other._offset
        if base >= trunc:
            raise InsufficientPrecisionError(
                f"product window is empty (offset x^{base}, truncation x^{trunc})", required=base + 1
            )
        step = math.gcd(self._step, other._step) or GRID
        length = _ceil_div(trunc - base, step)
        a = self._on_grid(self._offset, step, length)
        b = other._on_grid(other._offset, step, length)
        nums = _kernels.mul_trunc(a, b, length)
        return Series(base, nums, trunc, step, self._den * other._den)

    __rmul__ = __mul__

    def invert(self) -> "Series":
        """Multiplicative inverse on the justified window."""
        if not self._nums:
            raise ZeroDivisionError("cannot invert a series that vanishes on its window")
        rel = self._trunc - self._offset
        if self._step == 0:
            c = Fraction(self._den, self._nums[0])
            return Series(-self._offset, [c.numerator], -self._offset + rel, 0, c.denominator)
        n = _ceil_div(rel, self._step)
        a = list(self._nums) + [0] * (n - len(self._nums))
        a0 = a[0]
        if a0 in (1, -1):
            inv = _kernels.inverse_unit(a, n)
            nums, den = [c * self._den for c in inv], 1
        else:
            # 1/a(x) = c(x/a0)/a0 where c = 1/m and m(x) = a(a0 x)/a0 has unit constant term
            m = [1] + [a[i] * a0 ** (i - 1) for i in range(1, n)]
            c = _kernels.inverse_unit(m, n)
            den = a0 ** n
            nums = [c[i] * a0 ** (n - 1 - i) * self._den for i in range(n)]
        return Series(-self._offset, nums, -self._offset + rel, self._step, den)

    def __truediv__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / other)
        if not isinstance(other, Series):
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other) -> "Series":
        return self.invert().scale(other)

    def __pow__(self, k: int) -> "Series":
        return pow_int(self, k)

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Series.monomial(other, 0, self._trunc)
        if not isinstance(other, Series):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        shown = []
        for e, c in self.items():
            if len(shown) == 6:
                shown.append("...")
                break
            shown.append(f"({c})*x^{e}")
        body = " + ".join(shown) if shown else "0"
        return f"Series({body} + O(x^{self._trunc}))"

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        """Wire form ``{grid, offset, trunc, coeffs}``; coeffs are ``"num/den"`` strings."""
        lo = self._offset if self._nums else self._trunc
        return {
            "grid": GRID,
            "offset": lo,
            "trunc": self._trunc,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs] if self._nums else [],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Series":
        if data.get("grid") != GRID:
            raise ValueError(f"unsupported grid {data.get('grid')!r}")
        return cls.from_coeffs(int(data["offset"]), [Fraction(c) for c in data["coeffs"]], int(data["trunc"]))

    def to_bytes(self) -> bytes:
        return MAGIC + json.dumps(self.to_json(), separators=(",", ":")).encode()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Series":
        if not raw.startswith(MAGIC):
            raise ValueError("missing QS1 header")
        return cls.from_json(json.loads(raw[len(MAGIC):].decode()))


# ----------------------------------------------------------------------------
# free functions
# ----------------------------------------------------------------------------

def invert(f: Series) -> Series:
    return f.invert()


def pow_int(f: Series, k: int) -> Series:
    """``f**k`` by repeated squaring; ``k < 0`` inverts first."""
    if k == 0:
        return Series.one(f.trunc - f.offset if not f.is_zero() else max(f.trunc, 1))
    if k < 0:
        return pow_int(f.invert(), -k)
    result = None
    base = f
    while True:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if not k:
            return result
        base = base * base


def _require_integer_support(f: Series, what: str) -> None:
    if f.has_integer_support():
        return
    for e, c in f.items():
        if e % GRID:
            raise FractionalSupportError(f"{what} undefined on fractional support: nonzero coefficient {c} at x^{e}")


def u_operator(f: Series, m: int) -> Series:
    """Atkin's ``U_m``: the coefficient of ``q^n`` becomes that of ``q^(mn)``."""
    if m < 1:
        raise ValueError("U_m needs m >= 1")
    _require_integer_support(f, f"U_{m}")
    # q^k is known iff 24*m*k < f.trunc
    trunc = GRID * _ceil_div(f.trunc, GRID * m)
    if m == 1:
        return f.truncate(trunc)
    if f.is_zero():
        return Series.zero(trunc)
    if f.step == 0:
        if f.offset % (GRID * m):
            return Series.zero(trunc)
        return Series(f.offset // m, f.numerators, trunc, 0, f.denominator)
    q0, qs = f.offset // GRID, f.step // GRID
    lcm = qs * m // math.gcd(qs, m)
    k0 = next((k for k in range(m) if (q0 + qs * k) % m == 0), None)
    if k0 is None:
        return Series.zero(trunc)
    nums = f.numerators[k0::lcm // qs]
    return Series(GRID * ((q0 + qs * k0) // m), nums, trunc, GRID * (lcm // m), f.denominator)


def negate_q(f: Series) -> Series:
    """Substitute ``q -> -q`` (integer q-support only)."""
    _require_integer_support(f, "q -> -q")
    if f.is_zero():
        return f
    q0, qs = f.offset // GRID, f.step // GRID
    nums = f.numerators
    if qs % 2 == 0:
        new = nums if q0 % 2 == 0 else [-c for c in nums]
    else:
        new = [c if (q0 + i) % 2 == 0 else -c for i, c in enumerate(nums)]
    return Series(f.offset, new, f.trunc, f.step, f.denominator)


def extract_progression(f: Series, m: int, r: int) -> Series:
    """Series whose ``q^n`` coefficient is the ``q^(mn + r)`` coefficient of ``f``."""
    return u_operator(f.shift(-GRID * r), m)


def val3(c: int) -> float | int:
    if c == 0:
        return math.inf
    return int(gmpy2.remove(gmpy2.mpz(c), 3)[1])


def val3_min(f: Series, lo: int, hi: int) -> float | int:
    """Minimum 3-adic valuation of the coefficients at exponents in ``[lo, hi)``."""
    if hi > f.trunc:
        raise InsufficientPrecisionError(
            f"window up to x^{hi} requested but series is known only below x^{f.trunc}", required=hi
        )
    best: float | int = math.inf
    for e, c in f.items():
        if e < lo:
            continue
        if e >= hi:
            break
        if c.denominator != 1:
            raise NonIntegralCoefficientError(e, c)
        v = val3(c.numerator)
        if v < best:
            best = v
    return best


@dataclass(frozen=True)
class Agreement:
    """Outcome of :func:`agree_up_to`; truthy when the series agree."""

    ok: bool
    bound: int
    exponent: int | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"agree below x^{self.bound}"
        return f"first mismatch at x^{self.exponent}: {self.lhs} != {self.rhs}"


def agree_up_to(f: Series, g: Series, bound: int) -> Agreement:
    """Do ``f`` and ``g`` agree at every exponent ``< bound``?"""
    for s, name in ((f, "left"), (g, "right")):
        if s.trunc < bound:
            raise InsufficientPrecisionError(
                f"{name} series known only below x^{s.trunc}; comparison needs truncation x^{bound}",
                required=bound,
            )
    diff = (f - g).truncate(bound)
    if diff.is_zero():
        return Agreement(True, bound)
    e = diff.offset
    return Agreement(False, bound, e, f[e], g[e])
