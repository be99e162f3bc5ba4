import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from angular_ur.cli import documents as docs
from angular_ur.cli.main import main
from angular_ur.states import make_state

PI_OVER_SQRT3 = math.pi / math.sqrt(3)


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_circular(capsys):
    code, out, _ = run(["verify", "--suite", "circular"], capsys)
    assert code == 0
    rep = json.loads(out)
    suite = rep["suites"][0]
    for row in suite["rows"]:
        assert row["dLz"] == 0.0
        assert abs(row["dphi"] - PI_OVER_SQRT3) < 1e-10
    statuses = {(v["relation"], v["status"]) for v in suite["verdicts"]}
    assert ("Bound4", "violated") in statuses
    assert ("Schwarz23", "degenerate-equality") in statuses
    assert rep["settings"] == {"hbar": 1.0, "grid": 2048, "tol": 1e-10, "seed": 12345}


def test_analyze_oscillator_ground_state(capsys):
    code, out, _ = run(["analyze", "--state", '{"kind":"oscillator","n":0,"I":1,"omega":1,"hbar":1}'], capsys)
    assert code == 0
    rep = json.loads(out)
    bound = next(v for v in rep["verdicts"] if v["relation"] == "Bound4")
    assert bound["status"] == "holds"
    assert abs(bound["lhs"] - 0.5) < 1e-12
    assert rep["hbar_in_effect"] == 1.0
    for v in rep["verdicts"]:
        assert {"lhs", "rhs", "gap", "status"} <= set(v)


def test_missing_field_named(capsys):
    code, out, err = run(["analyze", "--state", '{"kind":"circular"}'], capsys)
    assert code == 2
    assert out == ""
    assert "'m'" in err


def test_malformed_json_reports_position(capsys):
    code, _, err = run(["analyze", "--state", '{"kind": "circular",\n "m": }'], capsys)
    assert code == 2
    assert "line 2 column" in err


@pytest.mark.parametrize("doc, field", [
    ('{"kind":"spiral"}', "kind"),
    ('{"m": 1}', "kind"),
    ('{"kind":"circular","m":1.5}', "m"),
    ('{"kind":"circular","m":1,"x":2}', "x"),
    ('{"kind":"degenerate","l":1,"c":[]}', "c"),
    ('{"kind":"fourier","a":[[1,0],[0,"x"],[0,0]]}', "a"),
    ('{"kind":"oscillator","n":0,"omega":-1}', None),
])
def test_invalid_documents_exit_2(doc, field, capsys):
    code, _, err = run(["analyze", "--state", doc], capsys)
    assert code == 2
    if field:
        assert f"'{field}'" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "nope"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["analyze", "--state", "{}", "--hbar", "-1"])
    assert e.value.code == 2
    capsys.readouterr()


def test_state_from_stdin_and_file(capsys, monkeypatch, tmp_path):
    doc = '{"kind":"random","K":3,"seed":4}'
    code, out_stdin, _ = run(["analyze", "--state", "-"], capsys, stdin=doc, monkeypatch=monkeypatch)
    assert code == 0
    path = tmp_path / "state.json"
    path.write_text(doc)
    code, out_file, _ = run(["analyze", "--state", str(path)], capsys)
    assert code == 0
    assert out_file == out_stdin


def test_reports_are_byte_stable(capsys):
    argv = ["analyze", "--state", '{"kind":"degenerate","l":2,"c":[[1,0],[0,1],[0.5,0],[0,0],[0.1,0.2]]}']
    first = run(argv, capsys)[1]
    second = run(argv, capsys)[1]
    assert first == second
    assert "time" not in json.loads(first)


def test_csv_projection(capsys):
    code, out, _ = run(["analyze", "--state", '{"kind":"circular","m":1}', "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    names = {r["name"] for r in rows}
    assert {"tool", "hbar", "grid", "tol", "Schwarz23", "Bound4", "Boundary31"} <= names
    bound = next(r for r in rows if r["name"] == "Bound4")
    assert bound["status"] == "violated"


def test_hbar_flag_and_state_precedence(capsys):
    _, out, _ = run(["analyze", "--state", '{"kind":"circular","m":1}', "--hbar", "2"], capsys)
    rep = json.loads(out)
    lz = next(m for m in rep["moments"] if m["operator"] == "Lz")
    assert lz["mean"] == [2.0, 0.0]
    _, out, _ = run(["analyze", "--state", '{"kind":"oscillator","n":1,"hbar":0.5}', "--hbar", "2"], capsys)
    assert json.loads(out)["hbar_in_effect"] == 0.5


def test_search_command(capsys, tmp_path):
    cfg = tmp_path / "search.json"
    cfg.write_text('{"l": 1, "objective": "minimize_product", "restarts": 3}')
    code, out, _ = run(["search", "--config", str(cfg), "--seed", "4"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["seed"] == 4
    assert rep["result"]["product"] < 1e-12
    code, _, err = run(["search", "--config", '{"l": 0}'], capsys)
    assert code == 2


def test_oracle_check_command(capsys):
    code, out, _ = run(["oracle-check"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert {f["family"] for f in rep["families"]} == {"circular", "fock_phase", "oscillator", "degenerate", "random"}
    assert all(f["max_delta"] < 1e-8 for f in rep["families"])


def test_failed_assertion_exits_1(capsys, monkeypatch):
    from angular_ur.cli import suites

    monkeypatch.setattr(suites, "PI_OVER_SQRT3", 1.0)
    code, out, err = run(["verify", "--suite", "fock-phase"], capsys)
    assert code == 1
    rep = json.loads(out)
    assert rep["passed"] is False
    assert any("dphi" in f for f in rep["failed"])
    assert "FAILED" in err


def test_console_module_entry():
    r = subprocess.run([sys.executable, "-m", "angular_ur", "analyze", "--state", '{"kind":"fock_phase","n":2}'],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["input"] == {"kind": "fock_phase", "n": 2}


pairs = st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=9)

documents = st.one_of(
    st.builds(lambda m: {"kind": "circular", "m": m}, st.integers(-6, 6)),
    st.builds(lambda n, k: {"kind": "fock_phase", "n": n, "K": max(n, 1) + k}, st.integers(0, 6), st.integers(0, 3)),
    st.builds(lambda n, i, w: {"kind": "oscillator", "n": n, "I": i, "omega": w, "hbar": 1.0},
              st.integers(0, 10), st.floats(0.1, 5), st.floats(0.1, 5)),
    st.builds(lambda K, s: {"kind": "random", "K": K, "seed": s}, st.integers(1, 8), st.integers(0, 2**31)),
    st.builds(lambda l, c: {"kind": "degenerate", "l": l, "c": [list(p) for p in c[: 2 * l + 1]]},
              st.integers(1, 4), st.lists(st.tuples(st.floats(0.1, 5), st.floats(-5, 5)), min_size=9, max_size=9)),
    st.builds(lambda a: {"kind": "fourier", "a": [[1.0, 0.0]] + [list(p) for p in a] + [[0.5, 0.0]]},
              st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=1)),
)


@given(documents)
@settings(max_examples=80, deadline=None)
def test_document_round_trip(doc):
    spec, _ = docs.parse_state_document(doc)
    text = json.dumps(docs.state_document(spec))
    again, _ = docs.parse_state_document(json.loads(text))
    a, b = make_state(spec), make_state(again)
    assert type(a.basis) is type(b.basis)
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-15


def test_verify_all_passes(capsys):
    code, out, _ = run(["verify", "--suite", "all"], capsys)
    rep = json.loads(out)
    assert code == 0, rep["failed"]
    assert [s["suite"] for s in rep["suites"]] == ["circular", "qtp", "fock-phase", "degenerate", "boundary", "classical"]
