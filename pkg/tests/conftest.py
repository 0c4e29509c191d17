import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_mul(f: dict, g: dict, bound: int) -> dict:
    """Schoolbook product of ``{exponent: coeff}`` maps, dropping exponents >= bound."""
    out: dict[int, Fraction] = {}
    for a, x in f.items():
        for b, y in g.items():
            if a + b < bound:
                out[a + b] = out.get(a + b, Fraction(0)) + Fraction(x) * y
    return {e: c for e, c in out.items() if c}


def partitions(n_max: int) -> list[int]:
    """p(0..n_max) by the coin-change recurrence over part sizes."""
    p = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return p


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
