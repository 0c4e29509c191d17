"""Finite certificates for identities between eta quotients on Gamma_0(N).

Each side is a sum of eta quotients that are modular functions on
``Gamma_0(N)`` (checked with Ligozat's conditions).  Their difference ``h`` is
holomorphic on the upper half plane, so by the valence formula

    ord_inf(h) = -sum_{s != inf} ord_s(h) <= sum_{s != inf} max(0, -min_i ord_s(u_i)).

Agreement of the expansions below ``q^B`` with ``B`` one more than the right
hand side therefore forces ``h = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import EtacongError, VerificationError
from .etaq import EtaExpression, EtaQuotient, as_expression, eta_series, expand, format_quotient
from .series import GRID, Series, agree_up_to


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@dataclass(frozen=True)
class Cusp:
    """The cusp ``a/c`` of ``Gamma_0(N)``; ``c = N`` is infinity and ``c = 1`` is zero."""

    c: int
    a: int
    width: int
    N: int

    @property
    def is_infinity(self) -> bool:
        return self.c == self.N

    def label(self) -> str:
        return "inf" if self.is_infinity else f"{self.a}/{self.c}"


def cusp_set(N: int) -> list[Cusp]:
    """One representative per class: ``phi(gcd(c, N/c))`` cusps for each ``c | N``."""
    if N < 1:
        raise ValueError("N must be positive")
    out = []
    for c in divisors(N):
        g = math.gcd(c, N // c)
        width = N // math.gcd(c * c, N)
        residues = [r for r in range(1, g + 1) if math.gcd(r, g) == 1]
        for r in residues:
            a = r
            while math.gcd(a, c) != 1:
                a += g
            out.append(Cusp(c, a, width, N))
    return out


def eta_order_at_cusp(delta: int, c: int, N: int) -> Fraction:
    """Ligozat order of ``eta(delta tau)`` at a cusp with denominator ``c``, in the local parameter."""
    if N % delta or N % c:
        raise EtacongError(f"need delta | N and c | N (delta={delta}, c={c}, N={N})")
    g = math.gcd(c, delta)
    return Fraction(N * g * g, 24 * math.gcd(c, N // c) * c * delta)


def quotient_order(q: EtaQuotient, c: int, N: int) -> Fraction:
    if q.qshift:
        raise EtacongError(f"term {format_quotient(q)} carries a bare q-power; not a function on Gamma_0({N})")
    return sum((r * eta_order_at_cusp(t, c, N) for t, r in q.levels), Fraction(0))


@lru_cache(maxsize=64)
def self_test(N: int, terms: int = 8) -> bool:
    """The formula at ``c = N`` must reproduce the expansion order of every ``eta(delta tau)``."""
    for d in divisors(N):
        s = eta_series(d, GRID * terms + d)
        if Fraction(s.order, GRID) != eta_order_at_cusp(d, N, N):
            raise EtacongError(f"Ligozat normalization disagrees with expansion order for eta({d}) on N={N}")
    return True


@dataclass
class InvarianceReport:
    levels_divide: bool
    weight: Fraction
    sum_delta_r: int
    sum_codelta_r: int
    square_product: bool

    @property
    def weight_zero(self) -> bool:
        return self.weight == 0

    @property
    def passed(self) -> bool:
        return (self.levels_divide and self.weight_zero and self.sum_delta_r % 24 == 0
                and self.sum_codelta_r % 24 == 0 and self.square_product)

    def to_json(self) -> dict:
        return {
            "levels_divide": self.levels_divide,
            "weight": str(self.weight),
            "sum_delta_r_mod_24": self.sum_delta_r % 24,
            "sum_N_over_delta_r_mod_24": self.sum_codelta_r % 24,
            "square_product": self.square_product,
            "passed": self.passed,
        }


def _is_square_product(levels) -> bool:
    # prod delta^r is a square iff every prime occurs to an even power
    exps: dict[int, int] = {}
    for t, r in levels:
        n, p = t, 2
        while p * p <= n:
            while n % p == 0:
                exps[p] = exps.get(p, 0) + r
                n //= p
            p += 1
        if n > 1:
            exps[n] = exps.get(n, 0) + r
    return all(e % 2 == 0 for e in exps.values())


def check_invariance(q: EtaQuotient, N: int) -> InvarianceReport:
    """Ligozat's conditions for ``q`` to be a modular function on ``Gamma_0(N)``."""
    levels = q.levels
    divide = all(N % t == 0 for t, _ in levels)
    return InvarianceReport(
        levels_divide=divide and q.qshift == 0,
        weight=q.weight,
        sum_delta_r=sum(t * r for t, r in levels),
        sum_codelta_r=sum((N // t) * r for t, r in levels) if divide else 1,
        square_product=_is_square_product(levels),
    )


@dataclass
class Certificate:
    N: int
    invariance: dict[str, InvarianceReport]
    orders: dict[str, dict[str, Fraction]]
    bound: int  # in q-exponents
    verified: bool
    detail: str = ""
    mismatch: int | None = None  # q-exponent of the first disagreement, in x-units

    def to_json(self) -> dict:
        return {
            "level": self.N,
            "invariance": {k: v.to_json() for k, v in self.invariance.items()},
            "cusp_orders": {k: {c: str(o) for c, o in v.items()} for k, v in self.orders.items()},
            "bound": self.bound,
            "verified": self.verified,
            "mismatch_q_exponent": None if self.mismatch is None else str(Fraction(self.mismatch, GRID)),
            "detail": self.detail,
        }


def sturm_like_bound(terms: list[EtaQuotient], N: int) -> tuple[int, dict[str, dict[str, Fraction]]]:
    """``1 + ceil(sum_{s != inf} max(0, -min_i ord_s(u_i)))`` and the per-term order table."""
    cusps = cusp_set(N)
    table: dict[str, dict[str, Fraction]] = {}
    total = Fraction(0)
    for cusp in cusps:
        orders = [quotient_order(q, cusp.c, N) for q in terms]
        for q, o in zip(terms, orders):
            table.setdefault(format_quotient(q), {})[cusp.label()] = o
        if cusp.c != N:
            total += max(Fraction(0), -min(orders))
    return 1 + math.ceil(total), table


def certify_identity(lhs, rhs, N: int, bound: int | None = None,
                     perturb: dict[int, Fraction] | None = None) -> Certificate:
    """Certify ``lhs = rhs`` on ``Gamma_0(N)``.

    ``bound`` may raise (never lower) the checked range.  ``perturb`` adds
    ``c q^n`` terms to the expanded right side and exists for negative controls.
    Raises :class:`VerificationError` when a term fails the invariance checks.
    """
    lhs, rhs = as_expression(lhs), as_expression(rhs)
    self_test(N)
    terms = list(lhs.terms) + list(rhs.terms)
    if not terms:
        raise EtacongError("both sides are empty")
    inv = {format_quotient(q): check_invariance(q, N) for q in terms}
    bad = [k for k, v in inv.items() if not v.passed]
    if bad:
        cert = Certificate(N, inv, {}, 0, False, f"invariance fails for: {', '.join(bad)}")
        raise VerificationError(cert.detail, report=cert)
    B, table = sturm_like_bound(terms, N)
    if bound is not None:
        B = max(B, bound)
    x = GRID * B
    left = expand(lhs, x)
    right = expand(rhs, x)
    if perturb:
        for n, c in perturb.items():
            right = right + Series.monomial(Fraction(c), GRID * n, x)
    agr = agree_up_to(left, right, x)
    return Certificate(N, inv, table, B, agr.ok, agr.describe(), agr.exponent)


def valence_total(q: EtaQuotient, N: int) -> Fraction:
    """Sum of orders over all cusps; zero for a modular function without zeros or poles inside."""
    return sum((quotient_order(q, cusp.c, N) for cusp in cusp_set(N)), Fraction(0))


# ----------------------------------------------------------------------------
# the identities used elsewhere in the package
# ----------------------------------------------------------------------------

def _eq(levels, scalar=1) -> EtaQuotient:
    return EtaQuotient.make(levels, scalar)


def standard_identities() -> dict[str, tuple[EtaExpression, EtaExpression, int]]:
    """Named identities as ``(lhs, rhs, N)``.

    The three product forms of theta_{1,0}, theta_{1,1}, theta_{2,1} have
    weight 1/2, so they enter through weight-0 consequences: the 2-dissection
    of theta_{1,0}, the relation theta_{1,0}(q)^2 = theta_{1,0}(q^2)^2 +
    theta_{1,1}(q^2)^2, and the 3-dissection of psi, each divided by one side.
    """
    from .etaq import named_constant

    t, tt = named_constant("t"), named_constant("ttilde")
    one = as_expression(EtaQuotient.constant(1))
    ids = {
        "L0": (named_constant("L0"), t ** -1 + t ** 2 * 9 + t * 3 + 27, 24),
        "theta10_dissection": (
            one,
            as_expression(_eq({1: 2, 8: 5, 2: -5, 16: -2})) + _eq({1: 2, 4: 2, 16: 2, 2: -5, 8: -1}, 2),
            16,
        ),
        "theta10_theta11_squares": (
            as_expression(_eq({2: 14, 8: 4, 1: -4, 4: -14})),
            one + _eq({2: 4, 8: 8, 4: -12}, 4),
            8,
        ),
        "theta21_dissection": (
            one,
            as_expression(_eq({1: 1, 6: 1, 9: 2, 2: -2, 3: -1, 18: -1})) + _eq({1: 1, 18: 2, 2: -2, 9: -1}),
            18,
        ),
        "p0": (named_constant("p0"), (one + t) ** 4, 12),
        "p1": (named_constant("p1"), (one + t) ** 2, 12),
        "p0tilde": (named_constant("p0tilde"), (one + tt) ** 4, 12),
        "p1tilde": (named_constant("p1tilde"), (one + tt) ** 2, 12),
        "L0tilde_cpsi60": (
            tt ** -1 + tt ** 2 * 9 + tt * 3 + 27,
            named_constant("L0tilde_prefactor") * named_constant("cpsi60"),
            24,
        ),
    }
    return ids


def certify_named(name: str, bound: int | None = None) -> Certificate:
    ids = standard_identities()
    if name not in ids:
        raise KeyError(f"unknown identity {name!r}; known: {', '.join(sorted(ids))}")
    lhs, rhs, N = ids[name]
    return certify_identity(lhs, rhs, N, bound)
