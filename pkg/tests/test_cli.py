import json
import subprocess
import sys

import pytest

from iwafitt import linalg as la
from iwafitt.cli import main
from iwafitt.complexes import two_term
from iwafitt.fpmod import FPModule
from iwafitt.ideals import FracIdeal
from iwafitt.ring import TRUNCATED, RingSpec
from iwafitt.suites import lemma79_scenarios

R0 = RingSpec(3, ())


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_fitt_of_r_mod_9(tmp_path, capsys):
    path = write(tmp_path, "m.json", FPModule.cyclic(R0, [9]).to_json())
    code, rep, _ = run(["fitt", path], capsys)
    assert code == 0 and rep["schema"] == 1
    assert FracIdeal.from_json(rep["ideal"]) == FracIdeal(R0, [R0(9)])
    assert rep["ideal_normal_form"]["p_exponent"] == 2


def test_bad_differential_names_the_degree(tmp_path, capsys):
    one = la.RMatrix(R0, [[R0(1)]]).to_json()
    cx = {"ring": R0.to_json(), "lo": -2, "ranks": [1, 1, 1], "differentials": [one, one]}
    code, rep, err = run(["det", write(tmp_path, "c.json", cx)], capsys)
    assert code == 2 and rep is None and "degree -2" in err


@pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"ring": {"prime": 3}, "presentation": 5}'])
def test_invalid_input_exits_2(tmp_path, capsys, text):
    code, _, err = run(["fitt", write(tmp_path, "bad.json", text)], capsys)
    assert code == 2 and "error" in err


def test_missing_file_exits_2(tmp_path, capsys):
    assert run(["fitt", str(tmp_path / "nope.json")], capsys)[0] == 2


def test_bad_precision_flag(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["fitt", "x.json", "--precision", "4"])
    assert e.value.code == 2


def test_shift_fitt_sf_and_k0(tmp_path, capsys):
    path = write(tmp_path, "m.json", FPModule.cyclic(R0, [9]).to_json())
    inv9 = FracIdeal(R0, [R0.one()], R0(9))
    code, rep, _ = run(["shift-fitt", path, "-n", "1"], capsys)
    assert code == 0 and FracIdeal.from_json(rep["ideal"]) == inv9
    code, rep, _ = run(["sf", path, "-n", "1"], capsys)
    assert code == 0 and FracIdeal.from_json(rep["ideal"]) == inv9
    cx = write(tmp_path, "c.json", two_term(la.RMatrix(R0, [[R0(9)]])).to_json())
    code, rep, _ = run(["k0-reduce", cx], capsys)
    assert code == 0 and rep["verdict"] and [c["sign"] for c in rep["classes"]] == [1]


def test_truncated_reports_carry_precision(tmp_path, capsys):
    S = RingSpec(3, (), 1, TRUNCATED, (4, 6))
    path = write(tmp_path, "m.json", FPModule.cyclic(S, [S.T() + 3]).to_json())
    code, rep, _ = run(["fitt", path], capsys)
    assert code == 0 and rep["effective_precision"] == [4, 4]
    code, rep, _ = run(["fitt", path, "--precision", "6,8"], capsys)
    assert rep["effective_precision"] == [6, 6]


def test_ledger_command(tmp_path, capsys):
    S = RingSpec(3, (), 1, TRUNCATED, (8, 10))
    s = S.gamma()
    d = {"ring": S.to_json(), "base": {"gens": [(S.T() + 3).to_json()]},
         "places": [{"label": "v", "decomposition": [s.to_json()], "frobenius": s.to_json(),
                     "norm": 7}],
         "apply": "eq101"}
    code, rep, _ = run(["ledger", write(tmp_path, "l.json", d)], capsys)
    assert code == 0 and rep["apply"] == "eq101"
    expected = FracIdeal(S, [(S.T() + 3) * (S.one() - s ** -1)])
    assert FracIdeal.from_json(rep["ideal"]) == expected
    d["apply"] = "nonsense"
    assert run(["ledger", write(tmp_path, "l2.json", d)], capsys)[0] == 2


def test_verify_suite_and_scenario(tmp_path, capsys):
    code, rep, _ = run(["verify", "thm104", "--seed", "3", "--cases", "5"], capsys)
    assert code == 0 and rep["report"]["passed"] == 5
    sc = lemma79_scenarios()[0][2].to_json()
    sc["checks"] = ["lemma79.1"]
    path = write(tmp_path, "sc.json", sc)
    code, rep, _ = run(["verify", "lemma79", "--scenario", path], capsys)
    assert code == 0 and rep["verdict"]
    assert run(["verify", "prop88", "--scenario", path], capsys)[0] == 2
    assert run(["verify", "thm104", "--suite", "prop88"], capsys)[0] == 2


def test_out_flag_and_module_entry_point(tmp_path):
    path = write(tmp_path, "m.json", FPModule.cyclic(R0, [3]).to_json())
    out = tmp_path / "r.json"
    res = subprocess.run([sys.executable, "-m", "iwafitt", "fitt", path, "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == ""
    assert json.loads(out.read_text())["ideal_normal_form"]["p_exponent"] == 1
