"""Generating functions of the 6-colored Frobenius partition counts.

Three independent routes:

* :func:`cpsi60_eta` - the five-term eta-quotient formula for ``c psi_{6,0}``;
* :func:`cpsi60_theta` - the ``h_{3,0} / (q^(1/2) eta_1^6)`` theta construction;
* :func:`cphi6_theta` - the product formula in Ramanujan's ``phi`` and ``psi``;

plus :func:`f6_zeta_oracle`, which expands ``F_6(tau, z)`` as a Laurent
polynomial in ``zeta`` and reads off every ``zeta^a`` slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import EtacongError, InsufficientPrecisionError
from .etaq import ThetaIndex, eta_series, expand, named_constant, phi_psi_series, theta_series
from .series import GRID, Series


def _check_trunc(trunc: int) -> None:
    if trunc < GRID:
        raise InsufficientPrecisionError(f"generating functions need trunc >= {GRID}, got {trunc}", required=GRID)


@lru_cache(maxsize=8)
def cpsi60_eta(trunc: int) -> Series:
    """``sum c psi_{6,0}(n) q^n`` from the five-term eta-quotient formula."""
    _check_trunc(trunc)
    return expand(named_constant("cpsi60"), trunc)


def theta(m: int, a: int, trunc: int) -> Series:
    return theta_series(ThetaIndex(m, a), trunc)


def h_series(trunc: int) -> dict[str, Series]:
    """The auxiliary theta combinations ``h_{2,0}, h_{2,1}, h_{2,2}, h_{3,0}``."""
    th = {(m, a): theta(m, a, trunc) for m, a in [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (6, 0), (6, 3), (6, 6)]}
    t10, t11 = th[1, 0], th[1, 1]
    h20 = t11 * t11 * th[2, 0] + t10 * t10 * th[2, 2]
    h21 = t10 * t11 * th[2, 1] * 2
    h22 = t11 * t11 * th[2, 2] + t10 * t10 * th[2, 0]
    h30 = t11 * th[6, 0] * h20 + t10 * th[6, 3] * h21 * 2 + t11 * th[6, 6] * h22
    return {"h20": h20, "h21": h21, "h22": h22, "h30": h30}


@lru_cache(maxsize=8)
def cpsi60_theta(trunc: int) -> Series:
    """``c psi_{6,0}`` generating function from ``h_{3,0} / (q^(1/2) eta_1^6)``."""
    _check_trunc(trunc)
    # eta_1^6 starts at x^6, and q^(1/2) adds x^12: h_{3,0} is needed to trunc + 18
    h30 = h_series(trunc + 18)["h30"]
    denom = eta_series(1, trunc + 24) ** 6
    return (h30 * denom.invert()).shift(-12).truncate(trunc)


@lru_cache(maxsize=8)
def cphi6_theta(trunc: int) -> Series:
    """``sum c phi_6(n) q^n`` from the phi/psi product formula over ``(q;q)^6``."""
    _check_trunc(trunc)
    phi = lambda k: phi_psi_series("phi", trunc, k)
    psi = lambda k: phi_psi_series("psi", trunc, k)
    p1, s1 = phi(1), psi(1)
    body = (
        p1 ** 3 * phi(2) * phi(6)
        + (s1 ** 3 * psi(2) * psi(3)).shift(GRID) * 24
        + (p1 ** 3 * psi(4) * psi(12)).shift(2 * GRID) * 4
    )
    # (q;q)^6 = x^(-6) eta_1^6
    euler6 = (eta_series(1, trunc + 6) ** 6).shift(-6)
    return (body * euler6.invert()).truncate(trunc)


def coefficient(f: Series, n: int) -> Fraction:
    """Coefficient of ``q^n``."""
    return f.q(n)


# ----------------------------------------------------------------------------
# zeta-Laurent oracle
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaLaurentSeries:
    """Finite Laurent polynomial in ``zeta`` with q-series coefficients."""

    terms: dict[int, Series]
    trunc: int
    phase: Fraction = Fraction(1)
    notes: tuple[str, ...] = field(default=())

    def slice(self, a: int) -> Series:
        return self.terms.get(a, Series.zero(self.trunc))


def _zeta_mul(f: dict[int, Series], g: dict[int, Series]) -> dict[int, Series]:
    out: dict[int, Series] = {}
    for a, fa in f.items():
        for b, gb in g.items():
            prod = fa * gb
            out[a + b] = out[a + b] + prod if a + b in out else prod
    return out


def _theta_factor(trunc: int) -> dict[int, Series]:
    """``sum_{nu in Z+1/2} q^(nu^2/2) zeta^nu`` keyed by the doubled exponent ``2 nu``.

    This is ``theta(tau, z + 1/2)`` up to a constant 4th root of unity for the
    convention ``theta(tau,z) = sum (-1)^(nu-1/2) q^(nu^2/2) zeta^nu``.
    """
    out = {}
    k = 1
    while 3 * k * k < trunc:  # q^(nu^2/2) = x^(3 (2nu)^2)
        for s in (k, -k):
            out[s] = Series.monomial(1, 3 * k * k, trunc)
        k += 2
    return out


def f6_zeta_oracle(trunc: int, J: int = 6, calibrate_against: Series | None = None) -> ZetaLaurentSeries:
    """All ``zeta^a`` slices (``|a| <= J``) of ``F_6(tau, z)`` below ``x^trunc``.

    The overall root of unity is fixed by requiring the ``zeta^3`` slice to match
    ``c phi_6`` at ``n = 0, 1``.  A note is attached when the result differs
    from the convention value -1.
    """
    if J < 6:
        raise EtacongError(f"zeta range J={J} too small: F_6 has slices up to |a| = 6 at low order")
    if trunc < 2 * GRID:
        raise InsufficientPrecisionError("oracle needs at least two q-terms", required=2 * GRID)
    # slices are divided by q^(1/2) eta^6 ~ x^18, so numerators are needed to trunc + 18
    work = trunc + 18
    factor = _theta_factor(work)
    sq = _zeta_mul(factor, factor)
    six = _zeta_mul(_zeta_mul(sq, sq), sq)
    inv = (eta_series(1, work + 6) ** 6).invert()

    raw: dict[int, Series] = {}
    for key, s in six.items():
        # key is a sum of six odd integers = 2a
        a = key // 2
        if abs(a) <= J:
            raw[a] = (s * inv).shift(-12).truncate(trunc)

    theoretical = Fraction(-1)  # (-i)^6 from theta(tau, z+1/2) = i * sum q^(nu^2/2) zeta^nu
    ref = calibrate_against if calibrate_against is not None else cphi6_theta(max(trunc, 2 * GRID))
    r0, r1 = raw[3].q(0), raw[3].q(1)
    c0, c1 = ref.q(0), ref.q(1)
    if r0 == 0:
        raise EtacongError("zeta^3 slice vanishes at q^0; cannot calibrate phase")
    phase = c0 / r0
    if phase not in (1, -1) or r1 * phase != c1:
        raise EtacongError(
            f"no 24th root of unity calibrates the zeta^3 slice: raw ({r0}, {r1}) vs target ({c0}, {c1})"
        )
    notes = () if phase == theoretical else (f"calibrated phase {phase} differs from convention value {theoretical}",)
    terms = {a: s.scale(phase) for a, s in raw.items()}
    return ZetaLaurentSeries(terms, trunc, phase, notes)
