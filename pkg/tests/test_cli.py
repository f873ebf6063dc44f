import json

import pytest

from horolab import __version__
from horolab.cli import SCHEMA, build_parser, main, run
from horolab.parallel import pmap, shard_seeds, thread_count


def _run(argv):
    code, text = run(argv)
    return code, json.loads(text)


def test_singular_half_is_singular_consistent():
    code, rep = _run(["singular", "--xi", "1/2", "--lmax", "10000"])
    assert code == 0
    assert rep["results"]["verdict"] == "SINGULAR-CONSISTENT"
    assert rep["schema"] == SCHEMA and rep["version"] == __version__
    assert rep["config"]["seed"] == 0
    assert 0.49 < rep["results"]["c1"] < 0.51


def test_report_is_sorted_and_has_no_wall_time():
    _, text = run(["khintchine", "--psi", "power:1"])
    doc = json.loads(text)
    assert text == json.dumps(doc, sort_keys=True, indent=2) + "\n"
    assert "wall" not in text and "seconds" not in text


def test_out_dir_writes_json_and_csv(tmp_path):
    code, text = run(["mcshell", "--nmax", "5", "--samples", "2000", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "mcshell.json").read_text() == text
    rows = (tmp_path / "mcshell.csv").read_text().splitlines()
    assert rows[0] == "n,mu,tail,bound,count" and len(rows) == 7


def test_partial_geodesic_exit_code_two():
    code, rep = _run(["geodesic", "--xi", "phi", "--lmax", "10000", "--horizon", "40"])
    assert code == 2 and rep["flags"] == ["PARTIAL"]


def test_horoballs_reports_normalisation():
    _, rep = _run(["horoballs", "--lmax", "200"])
    r = rep["results"]
    assert r["lambda"] == 1.0 and len(r["corridor"]) == 2 and r["farey_min_q100"]["value"] == 1


def test_game_reports_certificates():
    code, rep = _run(["game", "--samples", "4", "--depth", "12"])
    assert code == 0 and rep["results"]["failures"] == []


def test_main_usage_errors(capsys):
    assert main(["orbit", "--group", "nope"]) == 1
    assert "usage error" in capsys.readouterr().err
    assert main(["game", "--beta", "x"]) == 1
    assert main(["mcshell", "--k", "0.5"]) == 1
    assert main(["khintchine", "--psi", "wat:3"]) == 1


def test_game_refuses_other_groups():
    assert main(["game", "--group", "picard"]) == 1


def test_parser_lists_all_commands():
    p = build_parser()
    sub = next(a for a in p._actions if a.dest == "command")
    assert set(sub.choices) == {"orbit", "delta", "horoballs", "dirichlet", "singular", "bad", "khintchine",
                                "mcshell", "game", "cantor", "count", "tube", "geodesic", "loglaw"}


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("HOROLAB_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("HOROLAB_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()


def test_pmap_keeps_order():
    assert pmap(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]


def test_shard_seeds_reproducible():
    a = [g.integers(0, 10**9) for g in shard_seeds(7, 5)]
    b = [g.integers(0, 10**9) for g in shard_seeds(7, 5)]
    assert a == b and len(set(a)) == 5
