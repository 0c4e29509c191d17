"""Command-line entry point: ``etacong <command> [options]``.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
3 precision exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .cache import cached_series, resolve_dir
from .errors import EtacongError, InsufficientPrecisionError, VerificationError
from .etaq import ParseError, expand, format_expression, named_constant, parse_expression
from .series import GRID, Series, agree_up_to, val3

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")
_POSITIVE = ("terms", "nmax", "verify_to", "level", "w", "alpha")


class UsageError(EtacongError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    fmt: str = "json"
    cache_dir: str | None = None

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        for k, v in self.params.items():
            if k in _POSITIVE and v < 1:
                raise UsageError(f"--{k.replace('_', '-')} must be positive, got {v}")
            if k == "alpha_max" and v < 0:
                raise UsageError(f"--alpha-max must be nonnegative, got {v}")


@dataclass
class Outcome:
    result: dict
    rows: list[dict] | None = None
    truncation: int | None = None  # x-exponent truncation actually used
    status: int = EXIT_OK


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _v(x):
    return "inf" if x == float("inf") else x


def _gf(cfg: RunConfig, which: str, trunc: int) -> Series:
    from .genfun import cphi6_theta, cpsi60_eta

    fn = {"cpsi60": cpsi60_eta, "cphi6": cphi6_theta}[which]
    return cached_series(resolve_dir(cfg.cache_dir), which, {"trunc": trunc}, lambda: fn(trunc))


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_expand(cfg: RunConfig) -> Outcome:
    try:
        e = parse_expression(cfg.params["expr"])
    except ParseError as exc:
        raise UsageError(f"cannot parse expression: {exc}") from exc
    terms = cfg.params["terms"]
    if terms < 1:
        raise UsageError("--terms must be at least 1")
    trunc = e.order + GRID * terms
    s = expand(e, trunc)
    rows = [{"exponent": _frac(Fraction(x, GRID)), "coefficient": _frac(c)} for x, c in s.items()]
    result = {"expression": format_expression(e), "order": _frac(Fraction(e.order, GRID)),
              "coefficients": [r["coefficient"] for r in rows], "terms": rows}
    return Outcome(result, rows, trunc)


def cmd_coeffs(cfg: RunConfig) -> Outcome:
    n_max = cfg.params["nmax"]
    trunc = GRID * (n_max + 1)
    psi, phi = _gf(cfg, "cpsi60", trunc), _gf(cfg, "cphi6", trunc)
    rows = []
    for n in range(n_max + 1):
        a, b = psi.q(n), phi.q(n)
        rows.append({"n": n, "cpsi60": _frac(a), "cphi6": _frac(b),
                     "val3_cpsi60": _v(val3(a.numerator)), "val3_cphi6": _v(val3(b.numerator))})
    return Outcome({"rows": rows}, rows, trunc)


def cmd_verify_congruence(cfg: RunConfig) -> Outcome:
    from .usequence import scan_congruence

    which, n_max = cfg.params["theorem"], cfg.params["nmax"]
    trunc = GRID * (n_max + 1)
    series = _gf(cfg, "cphi6" if which == "1.1" else "cpsi60", trunc)
    rep = scan_congruence(which, series, n_max)
    data = rep.to_json()
    return Outcome(data, data["rows"], trunc, EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_build_l(cfg: RunConfig) -> Outcome:
    from .usequence import build_L, check_divisibility

    side, alpha_max, terms = cfg.params["side"], cfg.params["alpha_max"], cfg.params["terms"]
    state = build_L(side, alpha_max, terms=terms)
    checks = check_divisibility(state)
    rows = []
    for e, c in zip(state.entries, checks):
        rows.append({"alpha": e.alpha, "q_precision": e.q_precision, "order": _frac(Fraction(e.series.order, GRID))
                     if not e.series.is_zero() else None, "min_val3": _v(c.min_val3), "required": c.required,
                     "pass": c.passed})
    result = {"side": side, "rows": rows, "stop_reason": state.stop_reason,
              "passed": all(c.passed for c in checks) and state.stop_reason is None}
    status = EXIT_OK
    if state.stop_reason:
        status = EXIT_PRECISION
    elif not result["passed"]:
        status = EXIT_FAIL
    return Outcome(result, rows, state.entries[0].series.trunc, status)


def decompose_alpha(alpha: int, terms: int) -> dict:
    """Plain (greedy) and tilde (linear solve) decompositions of ``L_alpha`` and their comparison."""
    from .usequence import build_L, t_basis_decompose

    if alpha not in (1, 2):
        raise UsageError("--alpha must be 1 or 2")
    names = ("p0", "p0tilde") if alpha % 2 else ("p1", "p1tilde")
    ypow = 3 ** (alpha + 1) - 1 if alpha % 2 else 3 ** (alpha + 1) - 3
    n0 = -1 if alpha % 2 else 0
    plain, tilde = build_L("plain", alpha, terms=terms), build_L("tilde", alpha, terms=terms)
    f, ft = plain[alpha], tilde[alpha]
    T = max(f.trunc, ft.trunc) - min(f.offset, ft.offset) + GRID * (ypow + 4)
    E = lambda n: expand(named_constant(n), T)
    r = t_basis_decompose(f, E(names[0]), E("y"), ypow, E("t"), n0)
    if r.degree is None or len(r.d) - (r.degree - n0) - 1 < 1:
        raise InsufficientPrecisionError(
            f"plain window ends before the d_n list terminates; raise --terms (now {terms})"
        )
    rt = t_basis_decompose(ft, E(names[1]), E("ytilde"), ypow, E("ttilde"), n0, n_max=r.degree)
    same = r.trimmed() == rt.trimmed()
    return {
        "alpha": alpha,
        "n0": n0,
        "ypow": ypow,
        "degree": r.degree,
        "d": [_frac(c) for c in r.trimmed()],
        "plain": {"residual_ok": r.residual_ok, "method": r.method, "window_q": r.window // GRID,
                  "trailing_zeros": len(r.d) - len(r.trimmed())},
        "tilde": {"residual_ok": rt.residual_ok, "method": rt.method, "window_q": rt.window // GRID},
        "identical": same,
        "passed": same and r.residual_ok and rt.residual_ok,
    }


def cmd_decompose(cfg: RunConfig) -> Outcome:
    res = decompose_alpha(cfg.params["alpha"], cfg.params["terms"])
    rows = [{"n": res["n0"] + i, "d": c} for i, c in enumerate(res["d"])]
    return Outcome(res, rows, None, EXIT_OK if res["passed"] else EXIT_FAIL)


def cmd_transform(cfg: RunConfig) -> Outcome:
    from .involution import ALInvolution, TRANSFORM_TABLE, transform_symbol, verify_transform_table, w4

    e, level, verify_to = cfg.params["w"], cfg.params["level"], cfg.params["verify_to"]
    if (e, level) == (4, 36):
        w = w4()
    else:
        try:
            w = ALInvolution(e, level)
        except EtacongError as exc:
            raise UsageError(str(exc)) from exc
        if e == 4:
            raise UsageError(f"the chain matrix (28 3; 36 4) lives on level 36, not {level}")
    sym = cfg.params["symbol"]
    if sym == "all":
        rep = verify_transform_table(verify_to, w).to_json()
        rows = rep["rows"]
        return Outcome(rep, rows, None, EXIT_OK if rep["passed"] else EXIT_FAIL)
    if sym not in TRANSFORM_TABLE:
        raise UsageError(f"--symbol must be 'all' or one of {', '.join(TRANSFORM_TABLE)}")
    row = transform_symbol(sym, w, verify_to)
    data = {"symbol": row.symbol, "image": row.image, "ok": row.ok, "quotient": row.detail,
            "scalar": None if row.scalar is None else _frac(row.scalar), "qshift": row.qshift,
            "verified_to": row.verified_to,
            "levels": {str(k): v for k, v in sorted(row.levels.items())}}
    return Outcome(data, [data], row.verified_to, EXIT_OK if row.ok else EXIT_FAIL)


def cmd_certify(cfg: RunConfig) -> Outcome:
    from .certify import certify_identity, standard_identities

    name, lhs, rhs, level = cfg.params.get("name"), cfg.params.get("lhs"), cfg.params.get("rhs"), \
        cfg.params.get("level")
    ids = standard_identities()
    if name:
        if name == "all":
            chosen = sorted(ids)
        elif name in ids:
            chosen = [name]
        else:
            raise UsageError(f"unknown identity {name!r}; known: all, {', '.join(sorted(ids))}")
        items = [(n, *ids[n]) for n in chosen]
    else:
        if not (lhs and rhs and level):
            raise UsageError("certify needs --name, or all of --lhs, --rhs and --level")
        try:
            items = [("custom", parse_expression(lhs), parse_expression(rhs), level)]
        except ParseError as exc:
            raise UsageError(f"cannot parse expression: {exc}") from exc
    certs = {}
    ok = True
    for n, a, b, N in items:
        try:
            c = certify_identity(a, b, N)
            certs[n] = c.to_json()
            ok = ok and c.verified
        except VerificationError as exc:
            certs[n] = exc.report.to_json() if exc.report is not None else {"verified": False, "detail": str(exc)}
            ok = False
    rows = [{"identity": n, "level": c["level"], "bound": c["bound"], "verified": c["verified"], "detail": c["detail"]}
            for n, c in certs.items()]
    return Outcome({"certificates": certs, "passed": ok}, rows, None, EXIT_OK if ok else EXIT_FAIL)


def cmd_oracle(cfg: RunConfig) -> Outcome:
    from .genfun import cphi6_theta, cpsi60_eta, f6_zeta_oracle

    terms = cfg.params["terms"]
    trunc = GRID * terms
    z = f6_zeta_oracle(trunc)
    phi, psi = cphi6_theta(trunc), cpsi60_eta(trunc)
    a3, a0 = agree_up_to(z.slice(3), phi, trunc), agree_up_to(z.slice(0), psi, trunc)
    rows = [{"n": n, **{f"zeta^{a}": _frac(z.slice(a).q(n)) for a in range(0, 7)}} for n in range(min(terms, 10))]
    result = {"phase": _frac(z.phase), "notes": list(z.notes), "zeta3_vs_cphi6": a3.describe(),
              "zeta0_vs_cpsi60": a0.describe(), "passed": a3.ok and a0.ok, "first_rows": rows}
    return Outcome(result, rows, trunc, EXIT_OK if a3.ok and a0.ok else EXIT_FAIL)


COMMANDS = {
    "expand": cmd_expand,
    "coeffs": cmd_coeffs,
    "verify-congruence": cmd_verify_congruence,
    "build-l": cmd_build_l,
    "decompose": cmd_decompose,
    "transform": cmd_transform,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
}


# ----------------------------------------------------------------------------
# emission
# ----------------------------------------------------------------------------

def _report(cfg: RunConfig, out: Outcome) -> dict:
    return {
        "command": cfg.command,
        "config": {"params": cfg.params, "format": cfg.fmt},
        "engine_version": __version__,
        "truncation": out.truncation,
        "status": out.status,
        "result": out.result,
    }


def render(cfg: RunConfig, out: Outcome) -> str:
    rep = _report(cfg, out)
    if cfg.fmt == "json":
        return json.dumps(rep, sort_keys=True, indent=2, default=str)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        rows = out.rows if out.rows is not None else [
            {"key": k, "value": json.dumps(v, sort_keys=True, default=str)} for k, v in sorted(out.result.items())
        ]
        if rows:
            keys = list(rows[0])
            w = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
                            for k, v in r.items()})
        return buf.getvalue().rstrip("\n")
    lines = [f"# {cfg.command}  engine {__version__}  truncation {out.truncation}  status {out.status}",
             f"# config {json.dumps(cfg.params, sort_keys=True)}"]
    if out.rows is not None:
        for r in out.rows:
            lines.append("  ".join(f"{k}={v}" for k, v in r.items()))
    else:
        for k, v in sorted(out.result.items()):
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def run(cfg: RunConfig) -> tuple[int, str, bool]:
    """Exit status, emitted text, and whether the text is an error message."""
    try:
        out = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}", True
    except InsufficientPrecisionError as exc:
        return EXIT_PRECISION, f"precision exhausted: {exc}", True
    except VerificationError as exc:
        return EXIT_FAIL, f"verification failed: {exc}", True
    return out.status, render(cfg, out), False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="etacong", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--cache-dir", default=None, help="cache directory (default: $ETACONG_CACHE_DIR)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("expand", parents=[common], help="expand an eta expression")
    s.add_argument("--expr", required=True)
    s.add_argument("--terms", type=int, default=10, help="q-powers from the leading exponent")

    s = sub.add_parser("coeffs", parents=[common], help="c psi_{6,0}(n), c phi_6(n) and their 3-adic valuations")
    s.add_argument("--nmax", type=int, default=20)

    s = sub.add_parser("verify-congruence", parents=[common], help="scan a congruence family")
    s.add_argument("--theorem", choices=("1.1", "1.2"), required=True)
    s.add_argument("--nmax", type=int, default=2000)

    s = sub.add_parser("build-l", parents=[common], help="build the L or L-tilde sequence")
    s.add_argument("--side", choices=("plain", "tilde"), default="plain")
    s.add_argument("--alpha-max", type=int, default=4)
    s.add_argument("--terms", type=int, default=20)

    s = sub.add_parser("decompose", parents=[common], help="t-basis coefficients d_n of L_alpha on both sides")
    s.add_argument("--alpha", type=int, choices=(1, 2), default=1)
    s.add_argument("--terms", type=int, default=60)

    s = sub.add_parser("transform", parents=[common], help="the q->-q, W_4, q->-q chain with calibration")
    s.add_argument("--symbol", default="all")
    s.add_argument("--w", type=int, default=4)
    s.add_argument("--level", type=int, default=36)
    s.add_argument("--verify-to", type=int, default=200)

    s = sub.add_parser("certify", parents=[common], help="certify an eta-quotient identity")
    s.add_argument("--name", default=None, help="a built-in identity, or 'all'")
    s.add_argument("--lhs", default=None)
    s.add_argument("--rhs", default=None)
    s.add_argument("--level", type=int, default=None)

    s = sub.add_parser("oracle", parents=[common], help="zeta-Laurent oracle against both generating functions")
    s.add_argument("--terms", type=int, default=101)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    params = {k: v for k, v in vars(args).items() if k not in ("command", "format", "cache_dir") and v is not None}
    try:
        cfg = RunConfig(args.command, params, args.format, args.cache_dir)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, text, is_error = run(cfg)
    print(text, file=sys.stderr if is_error else sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())
