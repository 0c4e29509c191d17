"""Atkin-Lehner level permutations and the ``q -> -q, W_4, q -> -q`` chain.

Eta multipliers are never computed: every chain output has its scalar and
q-shift fixed by matching a reference expansion, then verified to a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EtacongError, VerificationError
from .etaq import EtaExpression, EtaQuotient, as_expression, eta_series, expand, named_quotient
from .series import GRID, Series, agree_up_to, negate_q

Matrix = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def _mat(a, b, c, d) -> Matrix:
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    return tuple(
        tuple(sum(m[i][k] * n[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def det(m: Matrix) -> Fraction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def exact_divisor(e: int, n: int) -> bool:
    """``e || n``: ``e`` divides ``n`` and is coprime to ``n/e``."""
    return e >= 1 and n % e == 0 and math.gcd(e, n // e) == 1


@dataclass(frozen=True)
class ALInvolution:
    """``W_e = (a e, b; c N, d e)`` with determinant ``e`` on ``Gamma_0(N)``."""

    e: int
    N: int
    a: int = 1
    b: int = 0
    c: int = 0
    d: int = 1

    def __post_init__(self):
        if not exact_divisor(self.e, self.N):
            hint = ""
            if self.N % self.e == 0:
                good = self.N
                while math.gcd(self.e, good // self.e) != 1 and good % self.e == 0:
                    good //= math.gcd(self.e, good // self.e)
                if exact_divisor(self.e, good):
                    hint = f"; try N={good}"
            raise EtacongError(f"e={self.e} is not an exact divisor of N={self.N}{hint}")
        if det(self.matrix) != self.e:
            raise EtacongError(f"det {det(self.matrix)} of {self.matrix_ints} differs from e={self.e}")

    @property
    def matrix(self) -> Matrix:
        return _mat(self.a * self.e, self.b, self.c * self.N, self.d * self.e)

    @property
    def matrix_ints(self) -> tuple[int, int, int, int]:
        return (self.a * self.e, self.b, self.c * self.N, self.d * self.e)

    def level(self, t: int) -> int:
        g = math.gcd(self.e, t)
        return self.e * t // (g * g)


def identity_involution(N: int) -> ALInvolution:
    return ALInvolution(1, N)


def w4() -> ALInvolution:
    """``(28 3; 36 4)`` on ``Gamma_0(36)``: ``a=7, b=3, c=1, d=1``."""
    return ALInvolution(4, 36, 7, 3, 1, 1)


@dataclass(frozen=True)
class GammaElement:
    matrix: Matrix
    level: int

    def __post_init__(self):
        m = self.matrix
        if any(x.denominator != 1 for row in m for x in row):
            raise EtacongError(f"non-integral matrix {m}")
        if det(m) != 1:
            raise EtacongError(f"determinant {det(m)} != 1")
        if m[1][0] % self.level:
            raise EtacongError(f"lower-left {m[1][0]} not divisible by {self.level}")

    def entries(self) -> tuple[int, int, int, int]:
        (a, b), (c, d) = self.matrix
        return (int(a), int(b), int(c), int(d))


def chain_matrix(w: ALInvolution) -> Matrix:
    """``(1 1/2; 0 1) W (1 1/2; 0 1)``: the matrix behind the three-step chain."""
    half = _mat(1, Fraction(1, 2), 0, 1)
    return mat_mul(mat_mul(half, w.matrix), half)


def reduce_to_gamma(m: Matrix, level: int) -> GammaElement:
    """Divide by ``sqrt(det)`` (which must be rational) and check membership in Gamma_0(level)."""
    dm = det(m)
    s = math.isqrt(dm.numerator)
    r = math.isqrt(dm.denominator)
    if s * s != dm.numerator or r * r != dm.denominator:
        raise EtacongError(f"determinant {dm} is not a square")
    k = Fraction(s, r)
    return GammaElement(tuple(tuple(x / k for x in row) for row in m), level)


# ----------------------------------------------------------------------------
# level bookkeeping
# ----------------------------------------------------------------------------

def _merge(pairs) -> dict[int, int]:
    out: dict[int, int] = {}
    for t, r in pairs:
        out[t] = out.get(t, 0) + r
    return {t: r for t, r in out.items() if r}


def w_levels(levels: dict[int, int], w: ALInvolution) -> dict[int, int]:
    """Move ``r_t`` to level ``e t / gcd(e, t)^2``."""
    for t in levels:
        if w.N % t:
            raise EtacongError(f"level {t} does not divide N={w.N}")
    return _merge((w.level(t), r) for t, r in levels.items())


def printed_level(e: int, t: int) -> Fraction:
    """The printed level ``e t / gcd(e, t)``; kept only to document its failure."""
    return Fraction(e * t, math.gcd(e, t))


def qneg_levels(levels: dict[int, int]) -> dict[int, int]:
    """Odd ``t``: ``eta_t -> eta_{2t}^3 / (eta_t eta_{4t})``; even levels stay."""
    pairs = []
    for t, r in levels.items():
        if t % 2:
            pairs += [(2 * t, 3 * r), (t, -r), (4 * t, -r)]
        else:
            pairs.append((t, r))
    return _merge(pairs)


def _shape(q: EtaQuotient, levels: dict[int, int]) -> EtaQuotient:
    """Quotient with new level data; the scalar is kept and the q-shift dropped (both undetermined)."""
    return EtaQuotient.make(levels, q.scalar, 0)


def qneg_rewrite(expr) -> EtaExpression:
    """Level rewrite for ``q -> -q``, term by term; phases deferred to calibration."""
    e = as_expression(expr)
    return EtaExpression(tuple(_shape(q, qneg_levels(q.level_map())) for q in e.terms))


def w_rewrite(expr, w: ALInvolution) -> EtaExpression:
    e = as_expression(expr)
    return EtaExpression(tuple(_shape(q, w_levels(q.level_map(), w)) for q in e.terms))


def chain_transform(expr, w: ALInvolution | None = None) -> EtaExpression:
    """``q -> -q``, then ``W``, then ``q -> -q`` on level data."""
    w = w or w4()
    return qneg_rewrite(w_rewrite(qneg_rewrite(expr), w))


def check_qneg_identity(trunc: int = GRID * 200) -> bool:
    """``(-q; -q)_inf = (q^2;q^2)^3 / ((q;q)(q^4;q^4))`` on the window, from series."""
    def euler(k):
        return eta_series(k, trunc + k).shift(-k)

    lhs = negate_q(euler(1))
    rhs = euler(2) ** 3 * (euler(1) * euler(4)).invert()
    return bool(agree_up_to(lhs, rhs, trunc))


# ----------------------------------------------------------------------------
# calibration
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibratedQuotient:
    quotient: EtaQuotient
    calibrated_scalar: Fraction
    calibrated_qshift: int
    verified_to: int  # x-exponent below which expansions were compared

    def text(self) -> str:
        from .etaq import format_quotient

        return format_quotient(self.quotient)


def _single(e, what: str) -> EtaQuotient:
    e = as_expression(e)
    if len(e.terms) != 1:
        raise EtacongError(f"{what} must be a single eta quotient, got {len(e.terms)} terms")
    return e.terms[0]


def calibrate(candidate, reference, verify_to: int) -> CalibratedQuotient:
    """Fix scalar and q-shift of ``candidate`` from ``reference`` and verify ``verify_to`` q-terms."""
    cand = _single(candidate, "candidate")
    ref = _single(reference, "reference")
    if cand.level_map() != ref.level_map():
        raise VerificationError(
            f"level mismatch: candidate {dict(cand.levels)} vs reference {dict(ref.levels)}",
            report={"candidate": dict(cand.levels), "reference": dict(ref.levels)},
        )
    if cand.scalar == 0:
        raise EtacongError("candidate scalar is zero; leading term unsolvable")
    shift = ref.leading_exponent - cand.leading_exponent
    scalar = ref.scalar / cand.scalar
    fixed = EtaQuotient.make(cand.level_map(), cand.scalar * scalar, cand.qshift + shift)
    bound = ref.leading_exponent + GRID * verify_to
    agr = agree_up_to(expand(fixed, bound), expand(ref, bound), bound)
    if not agr:
        raise VerificationError(f"calibrated series disagrees: {agr.describe()}", report=agr)
    return CalibratedQuotient(fixed, scalar, shift, bound)


# ----------------------------------------------------------------------------
# the full table
# ----------------------------------------------------------------------------

TRANSFORM_TABLE = {
    "A": "Atilde",
    "B": "Btilde",
    "t": "ttilde",
    "y": "ytilde",
    "p0": "p0tilde",
    "p1": "p1tilde",
}


@dataclass
class TransformRow:
    symbol: str
    image: str
    ok: bool
    levels: dict[int, int]
    scalar: Fraction | None = None
    qshift: int | None = None
    verified_to: int | None = None
    qneg_checked: bool = False
    detail: str = ""


@dataclass
class TransformReport:
    rows: list[TransformRow]
    gamma_ok: bool
    chain_matrix: tuple
    gamma: tuple | None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.gamma_ok and all(r.ok for r in self.rows)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "gamma_ok": self.gamma_ok,
            "chain_matrix": [str(x) for x in self.chain_matrix],
            "gamma": list(self.gamma) if self.gamma else None,
            "rows": [
                {
                    "symbol": r.symbol,
                    "image": r.image,
                    "ok": r.ok,
                    "levels": {str(k): v for k, v in sorted(r.levels.items())},
                    "scalar": None if r.scalar is None else str(r.scalar),
                    "qshift": r.qshift,
                    "verified_to": r.verified_to,
                    "qneg_checked": r.qneg_checked,
                    "detail": r.detail,
                }
                for r in self.rows
            ],
            "notes": self.notes,
        }


def _qneg_series_check(q: EtaQuotient, terms: int) -> bool:
    """``negate_q(expand(f))`` is a scalar multiple of ``expand(qneg_rewrite(f))``."""
    img = _single(qneg_rewrite(q), "image")
    if q.leading_exponent % GRID or img.leading_exponent % GRID:
        return False
    bound = q.leading_exponent + GRID * terms
    lhs = negate_q(expand(q, bound))
    rhs = expand(EtaQuotient.make(img.level_map(), 1, q.leading_exponent - img.leading_exponent), bound)
    c = lhs.leading_coefficient / rhs.leading_coefficient
    return bool(agree_up_to(lhs, rhs.scale(c), bound))


def transform_symbol(symbol: str, w: ALInvolution, verify_to: int, reference: str | None = None) -> TransformRow:
    image = reference or TRANSFORM_TABLE.get(symbol)
    src = named_quotient(symbol)
    cand = _single(chain_transform(src, w), "chain image")
    row = TransformRow(symbol, image or "", False, cand.level_map())
    row.qneg_checked = _qneg_series_check(src, verify_to)
    if image is None:
        row.detail = "no printed image to calibrate against"
        return row
    try:
        cal = calibrate(cand, named_quotient(image), verify_to)
    except VerificationError as exc:
        row.detail = str(exc)
        return row
    row.ok = True
    row.scalar, row.qshift, row.verified_to = cal.calibrated_scalar, cal.calibrated_qshift, cal.verified_to
    row.levels = cal.quotient.level_map()
    row.detail = cal.text()
    return row


def verify_transform_table(verify_to: int = 200, w: ALInvolution | None = None) -> TransformReport:
    """Chain + calibrate for A, B, t, y, p0, p1 against the printed images."""
    w = w or w4()
    cm = chain_matrix(w)
    try:
        g = reduce_to_gamma(cm, 18)
        gamma, gamma_ok = g.entries(), cm == _mat(46, 28, 36, 22) and g.entries() == (23, 14, 18, 11)
    except EtacongError:
        gamma, gamma_ok = None, False
    rows = [transform_symbol(s, w, verify_to) for s in TRANSFORM_TABLE]
    notes = [
        f"W_{w.e} taken on Gamma_0({w.N}) with matrix {w.matrix_ints}",
        "level map t -> e t / gcd(e,t)^2; the form e t / gcd(e,t) would send level 4 to "
        f"{printed_level(4, 4)} instead of 1 and does not reproduce the A -> Atilde image",
    ]
    return TransformReport(rows, gamma_ok, tuple(x for row in cm for x in row), gamma, notes)


# ----------------------------------------------------------------------------
# image of L_0 through its t-representation
# ----------------------------------------------------------------------------

def chain_L0(trunc: int, verify_to: int = 200, w: ALInvolution | None = None) -> Series:
    """``t~^-1 + 9 t~^2 + 3 t~ + 27`` with ``t~`` the calibrated chain image of ``t``.

    ``L_0`` itself involves levels 8 and 24, which are not divisors of 36, so its
    image is taken through the identity ``L_0 = t^-1 + 9t^2 + 3t + 27``.
    """
    w = w or w4()
    cal = calibrate(chain_transform(named_quotient("t"), w), named_quotient("ttilde"), verify_to)
    tt = expand(cal.quotient, trunc + GRID)
    return (tt.invert() + tt * tt * 9 + tt * 3 + 27).truncate(trunc)
