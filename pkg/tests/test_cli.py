import json
import subprocess
import sys

import pytest

from epiupdate import BAF, ProbabilityFunction, ProbabilityLabelling, parse_constraints, two_stage_ls_update
from epiupdate.cli import main

from conftest import DATA


@pytest.fixture
def files(tmp_path):
    baf = {"arguments": ["A", "B"], "attacks": [["B", "A"]]}
    (tmp_path / "baf.json").write_text(json.dumps(baf))
    (tmp_path / "prior.json").write_text(json.dumps({"worlds": [
        {"members": [], "p": 0.1}, {"members": ["A"], "p": 0.2},
        {"members": ["B"], "p": 0.3}, {"members": ["A", "B"], "p": 0.4}]}))
    (tmp_path / "lab.json").write_text(json.dumps({"A": 0.6, "B": 0.7}))
    (tmp_path / "certain.txt").write_text("p(A) = 1\n")
    (tmp_path / "coh.txt").write_text("# coherence\np(A) + p(B) <= 1\n")
    (tmp_path / "bad.txt").write_text("p(A) >= 0.7\np(A) <= 0.6\n")
    (tmp_path / "typo.txt").write_text("p(A) + <= 1\n")
    return {p.stem: str(p) for p in tmp_path.iterdir()}


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_sat_and_unsat(files, capsys):
    code, out, _ = run(capsys, "sat", files["baf"], files["coh"])
    assert code == 0 and out.startswith("SAT")
    code, out, _ = run(capsys, "sat", files["baf"], files["coh"], files["bad"])
    assert code == 1 and out.strip() == "UNSAT"


def test_update_methods_text(files, capsys):
    code, out, _ = run(capsys, "update", files["baf"], files["prior"], files["certain"], "--method", "2ls")
    assert code == 0 and out == "{A}: 0.3\n{A,B}: 0.7\n"
    code, out, _ = run(capsys, "update", files["baf"], files["prior"], files["certain"], "--method", "kl-world")
    assert out == "{A}: 0.333333\n{A,B}: 0.666667\n"
    code, out, _ = run(capsys, "update", files["baf"], files["lab"], files["coh"])
    assert code == 0 and out == "A: 0.45\nB: 0.55\n"


def test_update_json_round_trip_is_exact(files, capsys):
    code, out, _ = run(capsys, "--format", "json", "update", files["baf"], files["prior"], files["coh"],
                       "--method", "2ls")
    assert code == 0
    baf = BAF.of(["A", "B"], [("B", "A")])
    got = ProbabilityFunction.from_dict(baf, json.loads(out))
    want = two_stage_ls_update(ProbabilityFunction(baf, [0.1, 0.2, 0.3, 0.4]),
                               parse_constraints("p(A) + p(B) <= 1", baf))
    assert got.probs.tobytes() == want.probs.tobytes()


def test_exit_codes(files, capsys):
    assert run(capsys, "update", files["baf"], files["lab"], files["bad"])[:2] == (1, "BOT\n")
    code, _, err = run(capsys, "update", files["baf"], files["lab"], files["typo"])
    assert code == 2 and "line 1" in err
    assert run(capsys, "update", files["baf"], files["lab"], files["certain"], "--method", "2ls")[0] == 2
    assert run(capsys, "update", files["baf"], files["prior"], files["certain"], "--method", "2ls",
               "--world-cap", "1")[0] == 3
    assert run(capsys, "sat", files["baf"], files["baf"] + ".missing")[0] == 2
    assert run(capsys, "update", files["baf"], files["lab"], files["coh"], "--set", "nonsense=1")[0] == 2


def test_support_mismatch_is_reported(files, tmp_path, capsys):
    p = tmp_path / "gap.json"
    p.write_text(json.dumps({"worlds": [{"members": [], "p": 0.5}, {"members": ["B"], "p": 0.5}]}))
    half = tmp_path / "half.txt"
    half.write_text("p(A) = 0.5\n")
    code, out, _ = run(capsys, "update", files["baf"], str(p), str(half), "--method", "kl-world")
    assert code == 1 and out.startswith("INFEASIBLE")


def test_dialogue_command(tmp_path, capsys):
    scenario = str(DATA / "fee_dialogue.json")
    code, out, _ = run(capsys, "dialogue", scenario, "--out", str(tmp_path / "t.jsonl"))
    assert code == 0 and out.splitlines()[0].split() == ["arg", "L0", "L1", "delta"]
    assert json.loads((tmp_path / "t.jsonl").read_text())["labelling"]["A"] == pytest.approx(0.19)
    code, out, _ = run(capsys, "dialogue", scenario, "--verbatim-constraints")
    assert code == 1 and "BOT" in out


def test_oracle_command(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--suite", "postulates", "--operator", "labelling",
                       "--trials", "10", "--seed", "3", "--summary", str(tmp_path / "s.json"))
    assert code == 0 and "violations=0" in out
    assert json.loads((tmp_path / "s.json").read_text())[0]["ok"]
    code, out, _ = run(capsys, "--format", "json", "oracle", "--suite", "grid", "--trials", "5")
    assert code == 0 and json.loads(out)[0]["suite"] == "grid"


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "epiupdate", "sat", files["baf"], files["coh"]],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("SAT")
