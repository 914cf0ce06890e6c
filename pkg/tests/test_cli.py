import json

import pytest
from click.testing import CliRunner

from heckecong import __version__
from heckecong import cache as cache_mod
from heckecong.cache import FORMAT_VERSION, ResultCache
from heckecong.cli import main
from heckecong.poly import CharpolyError


@pytest.fixture
def run(monkeypatch):
    monkeypatch.delenv("HECKE_CACHE", raising=False)
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)

    return invoke


def _json(result):
    return json.loads(result.output)


def _csv_lines(result):
    return [line for line in result.output.splitlines() if not line.startswith("#")]


# --- single-level commands ---


def test_bound_719(run):
    res = run("bound", "--level", 719, "--prime", 2)
    assert res.exit_code == 0
    out = _json(res)
    assert (out["r"], out["m"], out["bounds"]["theorem"]) == (31, 5, 5)
    assert out["meta"]["version"] == __version__ and out["meta"]["seed"] == 0
    assert set(out) >= {"N", "p", "hypotheses", "class_group", "r", "m", "bounds", "congruence", "detected"}


def test_bound_table_row(run):
    out = _json(run("bound", "-N", 81899, "-p", 2))
    assert (out["r"], out["m"]) == (101, 50)


def test_bound_refusal_exit_code(run):
    res = run("bound", "--level", 20, "--prime", 2)
    assert res.exit_code == 2
    assert "N_NOT_3_MOD_4" in _json(res)["refusals"]


def test_bound_verify(run, tmp_path):
    out = _json(run("bound", "-N", 719, "--verify", "--cache", tmp_path))
    assert out["congruence"]["checked"] and out["congruence"]["pass"]
    assert out["detected"]["degstar"] >= 5


def test_classgroup(run):
    out = _json(run("classgroup", "-N", 81839))
    assert out["h"] == 377 and out["divisors"] == [377]


def test_charpoly_and_budget(run, tmp_path):
    out = _json(run("charpoly", "-N", 11, "--ell", 2, "--cache", tmp_path))
    assert out["polynomial"] == "X + 2"
    out = _json(run("charpoly", "-N", 719, "--side", "minus", "--factor", "--cache", tmp_path))
    assert [f["degree"] for f in out["factors"]] == [5, 10] and out["certified"]
    res = run("charpoly", "-N", 30011, "--ell", 2)
    assert res.exit_code == 3


def test_internal_inconsistency_exit_code(run, monkeypatch):
    def broken(*a, **k):
        raise CharpolyError("safety prime disagrees")

    monkeypatch.setattr(cache_mod, "hecke_charpolys", broken)
    res = run("charpoly", "-N", 37, "--ell", 3)
    assert res.exit_code == 4


def test_dihedral_and_congruence(run):
    # the default prime avoids p, so it is 3 here rather than 2
    out = _json(run("dihedral", "-N", 719))
    assert out["ell"] == 3 and out["r"] == 31
    assert [f["degree"] for f in out["factors_mod_p"]] == [5, 5, 5]
    out = _json(run("dihedral", "-N", 719, "--ell", 2))
    assert out["charpoly"].startswith("X^15 + X^14 - 14*X^13")
    out = _json(run("congruence", "-N", 719, "--ell", 2))
    assert out["pass"] is True
    res = run("congruence", "-N", 45)
    assert res.exit_code == 2


def test_detect_ystat_maeda_delta(run):
    assert _json(run("detect", "-N", 719, "--ell", 2))["degstar"] == 10
    lines = _csv_lines(run("ystat", "-p", 719, "--ell", 2))
    assert lines == ["p,ell,D,degstar,Y", "719,2,60,20,0.3333333333333333"]
    assert _json(run("maeda", "-p", 11))["bound"] == 1
    lines = _csv_lines(run("delta", "-N", 719))
    assert lines[1] == "719,2,45,15,45,10,0,5,True"
    assert run("ystat", "-p", 13).exit_code == 2


def test_dickman_and_permsim(run):
    assert run("dickman", "--u", 2).output.strip() == "0.306853"
    res = run("permsim", "--n", 1, "--trials", 5, "--seed", 7)
    assert _csv_lines(res) == ["longest", "1", "1", "1", "1", "1"]
    assert "seed=7" in res.output.splitlines()[0]


# --- ranges, cache and reproducibility ---


def test_empty_range_is_header_only(run):
    res = run("scan", "--range", 24, 28, "--mode", "ystat")
    assert res.exit_code == 0
    assert _csv_lines(res) == ["p,ell,D,degstar,Y"]


def test_scan_bounds_contains_table_rows(run):
    lines = _csv_lines(run("scan", "--range", 81790, 81900, "--mode", "bounds"))
    rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
    for N, h, m in [(81799, 127, 7), (81839, 377, 42), (81847, 183, 60), (81883, 35, 12), (81899, 101, 50)]:
        assert rows[str(N)][2] == str(h) and rows[str(N)][5] == str(m)


def test_scan_delta_cache_roundtrip(run, tmp_path):
    first = run("scan", "--range", 100, 300, "--mode", "delta", "--cache", tmp_path)
    lines = _csv_lines(first)
    assert len(lines) == 38 and all(line.endswith("True") for line in lines[1:])
    assert "# histogram=" in first.output
    files = sorted(tmp_path.rglob("*.json"))
    assert len(files) == 2 * 37
    assert files[0].parent.parent.name == f"{int(files[0].parent.name) % 256:02x}"
    second = run("scan", "--range", 100, 300, "--mode", "delta", "--cache", tmp_path)
    assert second.output == first.output


def test_corrupt_cache_is_recomputed(run, tmp_path):
    first = run("charpoly", "-N", 389, "--cache", tmp_path).output
    cache = ResultCache(tmp_path)
    path = cache.path(389, "charpoly_T2")
    record = json.loads(path.read_text())
    assert record["format"] == FORMAT_VERSION
    record["payload"]["plus"][0] += 1
    path.write_text(json.dumps(record))
    assert cache.load(389, "charpoly_T2") is None
    assert run("charpoly", "-N", 389, "--cache", tmp_path).output == first
    assert cache.load(389, "charpoly_T2") is not None
    path.write_text("{not json")
    assert run("charpoly", "-N", 389, "--cache", tmp_path).output == first


def test_env_overrides_cache_dir(run, tmp_path):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    run("charpoly", "-N", 37, "--cache", flag_dir, env={"HECKE_CACHE": str(env_dir)})
    assert list(env_dir.rglob("*.json")) and not flag_dir.exists()


def test_workers_do_not_change_output(run, tmp_path):
    a = run("scan", "--range", 100, 200, "--mode", "ystat", "--workers", 1).output
    b = run("scan", "--range", 100, 200, "--mode", "ystat", "--workers", 2, "--cache", tmp_path).output
    assert a == b


def test_config_hash_tracks_settings(run):
    a = _json(run("classgroup", "-N", 23))["meta"]["config_hash"]
    b = _json(run("classgroup", "-N", 23, "--size-cap", 5000))["meta"]["config_hash"]
    c = _json(run("classgroup", "-N", 23, "--seed", 3))["meta"]
    assert a != b and c["seed"] == 3 and c["config_hash"] != a


def test_ycdf_footer(run):
    res = run("ycdf", "--range", 100, 200, "--ell", 2)
    assert _csv_lines(res)[0] == "y,empirical,predicted"
    assert "# primes=21" in res.output and "# sup_distance=" in res.output
    res = run("ycdf", "--range", 24, 28)
    assert "# sup_distance=undefined" in res.output


def test_scan_congruence(run, tmp_path):
    lines = _csv_lines(run("scan", "--range", 700, 720, "--mode", "congruence", "--cache", tmp_path))
    row = next(line for line in lines if line.startswith("719,"))
    assert row.split(",")[:6] == ["719", "3", "31", "5", "True", "True"]


def test_bad_config_rejected(run):
    res = CliRunner().invoke(main, ["classgroup", "-N", "23", "--size-cap", "0"])
    assert res.exit_code != 0
