import json

import pytest

from etacong import __version__
from etacong.cache import CacheEntry, cache_key, cache_roundtrip, cached_series, load, store
from etacong.cli import RunConfig, UsageError, main, run
from etacong.series import Series


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_partitions(capsys):
    code, out, _ = invoke(capsys, "expand", "--expr", "eta(1)^-1", "--terms", "5")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["coefficients"] == ["1", "1", "2", "3", "5"]
    assert rep["engine_version"] == __version__ and rep["truncation"] is not None
    assert rep["config"]["params"]["expr"] == "eta(1)^-1"


def test_verify_congruence(capsys):
    code, out, _ = invoke(capsys, "verify-congruence", "--theorem", "1.2", "--nmax", "2000")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["violations"] == []
    assert rep["result"]["theorem"] == "1.2" and rep["result"]["n_max"] == 2000


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["expand", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert invoke(capsys, "build-l", "--terms", "0")[0] == 2
    code, _, err = invoke(capsys, "transform", "--level", "72")
    assert code == 2 and "36" in err
    assert invoke(capsys, "certify")[0] == 2
    assert invoke(capsys, "expand", "--expr", "eta(1")[0] == 2
    with pytest.raises(UsageError):
        RunConfig("expand", {}, "yaml")


def test_precision_exit_3(capsys):
    code, _, err = invoke(capsys, "decompose", "--alpha", "2", "--terms", "5")
    assert code == 3 and "precision" in err


def test_verification_failure_exit_1(capsys):
    code, out, _ = invoke(capsys, "certify", "--lhs", "p0", "--rhs", "1 + eta(12)^4 * eta(2)^2 * eta(6)^-2 * eta(4)^-4",
                          "--level", "12")
    assert code == 1 and json.loads(out)["result"]["passed"] is False


def test_deterministic_output(capsys):
    a = invoke(capsys, "certify", "--name", "all")[1]
    b = invoke(capsys, "certify", "--name", "all")[1]
    assert a == b and json.loads(a)["result"]["passed"]


def test_formats(capsys):
    code, out, _ = invoke(capsys, "coeffs", "--nmax", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,cpsi60,cphi6,val3_cpsi60,val3_cphi6" and lines[1].startswith("0,20,1,")
    code, out, _ = invoke(capsys, "build-l", "--alpha-max", "2", "--terms", "5", "--format", "text")
    assert code == 0 and out.startswith("# build-l") and "alpha=2" in out


def test_all_commands_pass(capsys):
    for argv in (["transform"], ["transform", "--symbol", "y", "--format", "text"], ["decompose", "--alpha", "1"],
                 ["oracle", "--terms", "30"], ["build-l", "--side", "tilde", "--alpha-max", "2", "--terms", "10"]):
        code, out, err = invoke(capsys, *argv)
        assert code == 0, (argv, err)


def test_run_direct():
    status, text, is_error = run(RunConfig("expand", {"expr": "eta(2)", "terms": 3}))
    assert status == 0 and not is_error and json.loads(text)["result"]["order"] == "1/12"


# -- cache ------------------------------------------------------------------

def test_cache_roundtrip(tmp_path):
    s = Series.from_q_coeffs(list(range(500)), -3)
    entry = CacheEntry(cache_key("demo", {"n": 500}), s.to_bytes())
    back = cache_roundtrip(tmp_path, entry)
    assert back == entry and Series.from_bytes(back.payload) == s


def test_cache_version_bump_misses(tmp_path):
    entry = CacheEntry("k", b"payload", "0.0.1")
    store(tmp_path, entry)
    assert load(tmp_path, "k", "0.0.1") == entry
    assert load(tmp_path, "k", "0.0.2") is None


def test_cache_corruption_recomputes(tmp_path):
    calls = []

    def compute():
        calls.append(1)
        return Series.from_q_coeffs([1, 2, 3])

    s1 = cached_series(tmp_path, "demo", {"a": 1}, compute)
    s2 = cached_series(tmp_path, "demo", {"a": 1}, compute)
    assert s1 == s2 and len(calls) == 1
    path = next(tmp_path.glob("*.qsc"))
    path.write_bytes(path.read_bytes()[:-3])
    s3 = cached_series(tmp_path, "demo", {"a": 1}, compute)
    assert s3 == s1 and len(calls) == 2


def test_cache_key_canonical():
    assert cache_key("c", {"a": 1, "b": 2}) == cache_key("c", {"b": 2, "a": 1})
    assert cache_key("c", {"a": 1}) != cache_key("d", {"a": 1})


def test_cli_uses_cache_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ETACONG_CACHE_DIR", str(tmp_path))
    a = invoke(capsys, "coeffs", "--nmax", "10")[1]
    assert len(list(tmp_path.glob("*.qsc"))) == 2
    b = invoke(capsys, "coeffs", "--nmax", "10")[1]
    assert a == b
