"""The U_A / U_B sequences, t-basis decompositions and congruence scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .errors import EtacongError, InsufficientPrecisionError
from .etaq import PochhammerFactor, as_expression, expand, named_constant, pochhammer_product
from .genfun import cphi6_theta, cpsi60_eta
from .series import GRID, Series, agree_up_to, extract_progression, u_operator, val3, val3_min

Side = Literal["plain", "tilde"]

DEFAULT_TERMS = 20
DEFAULT_SLACK = 48

_MULTIPLIERS = {"plain": ("A", "B"), "tilde": ("Atilde", "Btilde")}


def u_step(f: Series, multiplier) -> Series:
    """``U_3(M * f)`` with ``M`` expanded to the relative precision of ``f``."""
    m = as_expression(multiplier)
    mord = m.order
    if f.is_zero():
        return u_operator(Series.zero(f.trunc + mord), 3)
    return u_operator(expand(m, f.trunc - f.offset + mord) * f, 3)


def lambda_alpha(alpha: int) -> int:
    """Least ``lambda >= 0`` with ``2*lambda = -1 (mod 3^alpha)``."""
    if alpha < 1:
        raise ValueError("lambda_alpha needs alpha >= 1")
    return (3 ** alpha - 1) // 2


def required_val3(alpha: int) -> int:
    return alpha // 2 + 2


def _multiplier(side: Side, alpha: int) -> str:
    odd_name, even_name = _MULTIPLIERS[side]
    return odd_name if alpha % 2 else even_name


def initial_q_precision(side: Side, alpha_max: int, terms: int = DEFAULT_TERMS, slack: int = DEFAULT_SLACK) -> int:
    """q-truncation of the starting series guaranteeing ``terms`` q-powers at ``alpha_max``.

    Each step maps a q-truncation ``Q`` to ``ceil((Q + ord M)/3)``; we invert that
    map exactly and never go below ``3^alpha_max * terms + slack``.
    """
    need = terms
    for alpha in range(alpha_max, 0, -1):
        mq = named_constant(_multiplier(side, alpha)).order // GRID
        need = 3 * (need - 1) + 1 - mq
    return max(need, 3 ** alpha_max * terms + slack)


@dataclass
class LEntry:
    alpha: int
    series: Series
    q_precision: int
    verified_val3: float | int


@dataclass
class LSequenceState:
    side: Side
    entries: list[LEntry] = field(default_factory=list)
    stop_reason: str | None = None

    def __getitem__(self, alpha: int) -> Series:
        return self.entries[alpha].series

    @property
    def alpha_reached(self) -> int:
        return len(self.entries) - 1


def plain_L0(trunc: int) -> Series:
    return expand(named_constant("L0"), trunc)


def tilde_L0(trunc: int) -> Series:
    """``2 q^(1/2) eta_3 eta_1^11 eta_4^2 / (eta_6^2 eta_2^11) * CPsi_{6,0}``."""
    pref = named_constant("L0tilde_prefactor")
    return expand(pref, trunc + 24) * cpsi60_eta(trunc)


def _full_window_val3(s: Series) -> float | int:
    lo = s.offset if not s.is_zero() else s.trunc
    return val3_min(s, lo, s.trunc)


def build_L(side: Side, alpha_max: int, trunc: int | None = None, terms: int = DEFAULT_TERMS) -> LSequenceState:
    """``L_0, L_1, ...`` (or the tilde chain) up to ``alpha_max``.

    ``trunc`` is the x-truncation of ``L_0``; by default it is sized so that
    ``L_alpha_max`` keeps ``terms`` q-powers.  If precision runs out the state
    is returned partially with ``stop_reason`` set.
    """
    if side not in _MULTIPLIERS:
        raise ValueError(f"side must be 'plain' or 'tilde', got {side!r}")
    if trunc is None:
        trunc = GRID * initial_q_precision(side, alpha_max, terms)
    cur = plain_L0(trunc) if side == "plain" else tilde_L0(trunc)
    state = LSequenceState(side)
    state.entries.append(LEntry(0, cur, cur.q_trunc, _full_window_val3(cur)))
    for alpha in range(1, alpha_max + 1):
        mult = named_constant(_multiplier(side, alpha))
        try:
            nxt = u_step(cur, mult)
        except InsufficientPrecisionError as exc:
            state.stop_reason = f"precision exhausted at alpha={alpha}: {exc}"
            break
        if nxt.trunc <= 0:
            state.stop_reason = f"precision exhausted at alpha={alpha}: no nonnegative q-powers left"
            break
        state.entries.append(LEntry(alpha, nxt, nxt.q_trunc, _full_window_val3(nxt)))
        cur = nxt
    return state


@dataclass(frozen=True)
class DivisibilityRow:
    alpha: int
    min_val3: float | int
    required: int | None
    passed: bool


def check_divisibility(state: LSequenceState) -> list[DivisibilityRow]:
    """Per-alpha minimal 3-adic valuation against ``floor(alpha/2) + 2``."""
    rows = []
    for e in state.entries:
        v = _full_window_val3(e.series)
        if e.alpha == 0:
            rows.append(DivisibilityRow(0, v, None, True))
        else:
            req = required_val3(e.alpha)
            rows.append(DivisibilityRow(e.alpha, v, req, v >= req))
    return rows


# ----------------------------------------------------------------------------
# t-basis decomposition
# ----------------------------------------------------------------------------

@dataclass
class DecompositionResult:
    n0: int
    d: list[Fraction]
    residual_ok: bool
    method: str = "greedy"
    window: int = 0  # x-truncation on which the reconstruction was checked

    @property
    def degree(self) -> int | None:
        """Largest ``n`` with ``d_n != 0``."""
        nz = [i for i, c in enumerate(self.d) if c]
        return self.n0 + nz[-1] if nz else None

    def coefficient(self, n: int) -> Fraction:
        i = n - self.n0
        return self.d[i] if 0 <= i < len(self.d) else Fraction(0)

    def trimmed(self) -> list[Fraction]:
        """``d`` without trailing zeros."""
        d = list(self.d)
        while d and d[-1] == 0:
            d.pop()
        return d


def _solve_exact(columns: list[list[Fraction]], rhs: list[Fraction]) -> tuple[list[Fraction] | None, bool]:
    """Least-structure exact solve of ``sum_j x_j columns[j] = rhs`` (all rows)."""
    nrows, ncols = len(rhs), len(columns)
    rows = [[columns[j][i] for j in range(ncols)] + [rhs[i]] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    if len(pivots) < ncols:
        return None, False
    consistent = all(row[-1] == 0 for row in rows[r:])
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x, consistent


def t_basis_decompose(f: Series, p: Series, y: Series, ypow: int, t: Series, n0: int,
                      n_max: int | None = None) -> DecompositionResult:
    """Write ``f = p * y^ypow * sum_{n >= n0} d_n t^n`` on the justified window.

    With ``t = +-q + O(q^2)`` the coefficients follow by a triangular (greedy)
    solve.  Otherwise ``n_max`` bounds the degree and the d_n come from an exact
    linear solve over all known coefficients.
    """
    if t.is_zero():
        raise EtacongError("t vanishes on its window")
    greedy = t.order == GRID and t.leading_coefficient in (1, -1)
    if greedy:
        g = f * (p * y ** ypow).invert()
        if not g.is_zero() and g.order < GRID * n0:
            raise EtacongError(f"order violation: f/(p y^{ypow}) has order q^{Fraction(g.order, GRID)} < q^{n0}")
        r = g
        lead = t.leading_coefficient
        tn = t ** n0
        d: list[Fraction] = []
        n = n0
        while GRID * n < r.trunc:
            c = r.q(n) / lead ** n
            d.append(c)
            if c:
                r = r - tn.scale(c)
            tn = tn * t
            n += 1
        residual_ok = r.is_zero()
        return DecompositionResult(n0, d, residual_ok, "greedy", r.trunc)
    if n_max is None:
        raise EtacongError("t does not start at q^1 with unit coefficient; pass n_max for the linear solve")
    base = p * y ** ypow
    cols = [base * t ** n for n in range(n0, n_max + 1)]
    window = min([f.trunc] + [c.trunc for c in cols])
    lo = min([f.offset if not f.is_zero() else window] + [c.offset for c in cols if not c.is_zero()])
    exps = range(lo, window)
    rhs = [f[e] for e in exps]
    mat = [[c[e] for e in exps] for c in cols]
    x, consistent = _solve_exact(mat, rhs)
    if x is None:
        raise EtacongError("t-power columns are linearly dependent on the window; enlarge truncation")
    return DecompositionResult(n0, x, consistent, "linear", window)


def reconstruct(res: DecompositionResult, p: Series, y: Series, ypow: int, t: Series) -> Series:
    base = p * y ** ypow
    out = None
    for i, c in enumerate(res.d):
        if c:
            term = (base * t ** (res.n0 + i)).scale(c)
            out = term if out is None else out + term
    return out if out is not None else Series.zero(base.trunc)


# ----------------------------------------------------------------------------
# progression check on the tilde chain
# ----------------------------------------------------------------------------

def _lemma_prefactor(alpha: int, trunc: int) -> Series:
    if alpha % 2:
        factors = [(1, 1), (3, 11), (12, 2), (2, -2), (6, -11)]
    else:
        factors = [(1, 11), (4, 2), (3, 1), (2, -11), (6, -2)]
    return pochhammer_product([PochhammerFactor(1, GRID * k, GRID * k, e) for k, e in factors], trunc).scale(2)


@dataclass
class Lemma31Report:
    alpha: int
    ok: bool
    terms_compared: int
    detail: str


def verify_lemma31(alpha: int, terms: int, state: LSequenceState | None = None) -> Lemma31Report:
    """Compare the tilde ``L_alpha`` with ``2 * product * sum c psi(3^alpha n + lambda) q^n``."""
    if state is None or state.alpha_reached < alpha:
        state = build_L("tilde", alpha, terms=terms)
    lhs = state[alpha]
    bound = min(lhs.trunc, GRID * terms)
    if bound < GRID * terms:
        raise InsufficientPrecisionError(
            f"tilde L_{alpha} known to q^{lhs.q_trunc}, {terms} terms requested", required=GRID * terms
        )
    m, lam = 3 ** alpha, lambda_alpha(alpha)
    psi = cpsi60_eta(GRID * (m * terms + lam + 1))
    rhs = _lemma_prefactor(alpha, bound) * extract_progression(psi, m, lam)
    agr = agree_up_to(lhs, rhs, bound)
    return Lemma31Report(alpha, agr.ok, bound // GRID, agr.describe())


# ----------------------------------------------------------------------------
# congruence scans
# ----------------------------------------------------------------------------

@dataclass
class CongruenceRow:
    alpha: int
    tested: int
    min_val3: float | int
    required: int

    @property
    def passed(self) -> bool:
        return self.min_val3 >= self.required


@dataclass
class CongruenceReport:
    theorem: str
    n_max: int
    rows: list[CongruenceRow]
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        def enc(v):
            return "inf" if v == math.inf else v

        return {
            "theorem": self.theorem,
            "n_max": self.n_max,
            "rows": [
                {"alpha": r.alpha, "tested": r.tested, "min_val3": enc(r.min_val3), "required": r.required,
                 "pass": r.passed}
                for r in self.rows
            ],
            "violations": self.violations,
        }


def congruence_alpha(theorem: str, n: int) -> int:
    """Largest ``alpha`` with the theorem's congruence condition on ``n`` (0 if none)."""
    if n < 1:
        return 0
    if theorem == "1.1":
        v = val3(4 * n - 1)
    elif theorem == "1.2":
        v = val3(2 * n + 1)
    else:
        raise ValueError(f"unknown theorem {theorem!r}; expected '1.1' or '1.2'")
    return int(v)


def scan_congruence(theorem: str, series: Series, n_max: int) -> CongruenceReport:
    tallies: dict[int, list] = {}
    violations = []
    for n in range(1, n_max + 1):
        alpha = congruence_alpha(theorem, n)
        if alpha == 0:
            continue
        c = series.q(n)
        if c.denominator != 1:
            raise EtacongError(f"non-integral coefficient at q^{n}: {c}")
        v = val3(c.numerator)
        req = required_val3(alpha)
        row = tallies.setdefault(alpha, [0, math.inf])
        row[0] += 1
        row[1] = min(row[1], v)
        if v < req:
            violations.append({"n": n, "alpha": alpha, "val3": v, "required": req})
    rows = [CongruenceRow(a, tallies[a][0], tallies[a][1], required_val3(a)) for a in sorted(tallies)]
    return CongruenceReport(theorem, n_max, rows, violations)


def verify_theorem(which: str, n_max: int) -> CongruenceReport:
    """Scan ``n <= n_max`` for the theorem's congruence family."""
    trunc = GRID * (n_max + 1)
    if which == "1.1":
        series = cphi6_theta(trunc)
    elif which == "1.2":
        series = cpsi60_eta(trunc)
    else:
        raise ValueError(f"unknown theorem {which!r}; expected '1.1' or '1.2'")
    return scan_congruence(which, series, n_max)
