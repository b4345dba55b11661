import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liedesign.cli import RunConfig, main, p_values, es_values, CSV_COLUMNS
from liedesign.designs import load_design


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_p_ranges():
    vals = p_values("-2..1:0.05")
    assert len(vals) == 60 and vals[0] == -2 and vals[-1] == pytest.approx(0.95)
    assert p_values("-inf") == [-math.inf]
    assert len(p_values("-10..1:0.5")) == 22
    assert es_values("1..55") == list(range(1, 56))


def test_build_and_verify(tmp_path, capsys):
    f = tmp_path / "m.txt"
    code, out, _ = run(capsys, "build", "--manifold", "s3", "--construct", "mimura", "--out", str(f))
    assert code == 0 and "5 points on s3" in out
    assert len(f.read_text().splitlines()) == 5
    code, out, _ = run(capsys, "verify", "--input", str(f), "--manifold", "s3", "--max-level", "2")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "verify", "--input", str(f), "--manifold", "s3", "--max-level", "3")
    assert code == 2 and "FAIL" in out
    code, out, _ = run(capsys, "verify", "--construct", "circle", "--points", "7", "--manifold", "circle", "--max-level", "3")
    assert code == 0 and "PASS" in out


def test_projection_and_product(tmp_path, capsys):
    q, r, s = tmp_path / "q.txt", tmp_path / "r.txt", tmp_path / "s.txt"
    assert run(capsys, "build", "--manifold", "s3", "--construct", "tetrahedral", "--out", str(q))[0] == 0
    code, out, _ = run(capsys, "build", "--manifold", "so3", "--construct", "project", "--input", str(q), "--out", str(r))
    assert code == 0 and "12 points on so3" in out
    run(capsys, "build", "--manifold", "s2", "--construct", "grid", "--counts", "2,7", "--out", str(s))
    code, out, _ = run(capsys, "build", "--manifold", "s2xso3", "--construct", "product", "--a", str(s), "--b", str(r),
                       "--out", str(tmp_path / "p.txt"))
    assert code == 0 and "168 points" in out
    code, out, _ = run(capsys, "round", "--input", str(tmp_path / "p.txt"), "--manifold", "s2xso3", "--n", "2016")
    assert code == 0
    assert {line.split()[-1] for line in out.splitlines()} == {"12"}


def test_criteria_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "criteria", "--manifold", "so3", "--truncation", "1", "--construct", "grid",
                       "--counts", "6,4,6", "--p=-1", "--p=-inf", "--es=1..10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(rows) == 12
    assert rows[1] == {"criterion": "p", "param": "-inf", "value": "0.5625", "reference_value": "1",
                       "efficiency": "0.5625", "feasible": "true"}
    assert rows[0]["efficiency"] == "0.838469256127"
    assert rows[-1]["value"] == "10"


def test_criteria_identity_reference(tmp_path, capsys):
    f = tmp_path / "r.json"
    run(capsys, "build", "--manifold", "s3", "--construct", "tetrahedral", "--out", str(tmp_path / "q.txt"))
    run(capsys, "build", "--manifold", "so3", "--construct", "project", "--input", str(tmp_path / "q.txt"), "--out", str(f))
    code, out, _ = run(capsys, "criteria", "--manifold", "so3", "--truncation", "1", "--input", str(f),
                       "--reference", str(f), "--p=-2..1:0.5", "--es=1..10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["efficiency"]) == pytest.approx(1) for r in rows)
    assert [float(r["value"]) for r in rows if r["criterion"] == "Es"] == pytest.approx(list(range(1, 11)))


def test_infeasible_rows_and_reference(tmp_path, capsys):
    code, out, _ = run(capsys, "criteria", "--manifold", "so3", "--truncation", "1", "--construct", "grid",
                       "--counts", "2,2,3", "--p=0")
    assert code == 0 and out.splitlines()[1].endswith(",0,false")
    ref = tmp_path / "g.json"
    run(capsys, "build", "--manifold", "so3", "--construct", "grid", "--counts", "2,2,3", "--out", str(ref))
    code, _, err = run(capsys, "criteria", "--manifold", "so3", "--truncation", "1", "--construct", "grid",
                       "--counts", "6,4,6", "--reference", str(ref), "--p=0")
    assert code == 2 and "infeasible" in err


def test_round_command(tmp_path, capsys):
    src = tmp_path / "w.json"
    src.write_text(json.dumps({"manifold": "s2", "points": [[0, 0, 1], [0, 1, 0], [1, 0, 0]], "weights": [0.7, 0.2, 0.1]}))
    out_path = tmp_path / "exact.json"
    code, out, _ = run(capsys, "round", "--input", str(src), "--n", "10", "--out", str(out_path))
    assert code == 0 and [line.split()[-1] for line in out.splitlines()] == ["7", "2", "1"]
    assert np.allclose(load_design(out_path).weights, [0.7, 0.2, 0.1])
    code, _, _ = run(capsys, "round", "--input", str(src), "--n", "2")
    assert code == 2


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "build", "--construct", "nothing")[0] == 1
    assert run(capsys, "criteria", "--construct", "mimura")[0] == 1
    assert run(capsys, "verify", "--input", str(tmp_path / "none.txt"), "--manifold", "s3")[0] == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("1 0 0\nfoo\n")
    code, _, err = run(capsys, "verify", "--input", str(bad), "--manifold", "s2", "--max-level", "1")
    assert code == 3 and "line 2" in err
    w = tmp_path / "w.json"
    w.write_text(json.dumps({"manifold": "s2", "points": [[0, 0, 1], [0, 1, 0]], "weights": [0.6, 0.4]}))
    assert run(capsys, "verify", "--input", str(w), "--max-level", "1")[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"manifold": "so3", "truncation": "1", "construct": "grid", "counts": "8,5,8", "p": ["-inf"]}))
    code, out, _ = run(capsys, "criteria", "--config", str(cfg))
    assert code == 0 and "0.6,1,0.6,true" in out
    code, out, _ = run(capsys, "criteria", "--config", str(cfg), "--counts", "6,4,6")
    assert "0.5625" in out
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "criteria", "--config", str(cfg))[0] == 1


text = st.text(alphabet="abcdefghij0123456789_./,", min_size=1, max_size=12)
configs = st.builds(
    RunConfig,
    command=st.sampled_from(["build", "verify", "criteria", "round"]),
    manifold=st.one_of(st.none(), st.sampled_from(["s2", "s3", "so3", "s2xso3", "torus", "circle"])),
    truncation=st.one_of(st.none(), st.sampled_from(["1", "2,1", "3"])),
    construct=st.one_of(st.none(), st.sampled_from(["mimura", "grid", "project"])),
    input=st.one_of(st.none(), text),
    counts=st.one_of(st.none(), st.sampled_from(["6,4,6", "4,6,6,4,6"])),
    p=st.lists(st.sampled_from(["-1", "-inf", "-2..1:0.05", "0.5"]), max_size=3).map(tuple),
    es=st.lists(st.sampled_from(["1..55", "3"]), max_size=2).map(tuple),
    n=st.one_of(st.none(), st.integers(1, 5000)),
    seed=st.integers(0, 10**6),
    beta_convention=st.sampled_from(["endpoints", "midpoint", "leftOpen"]),
)


@given(configs)
def test_run_config_round_trip(cfg):
    argv = cfg.to_argv()
    back = RunConfig.from_argv(argv)
    assert back == cfg
    assert back.to_argv() == argv
