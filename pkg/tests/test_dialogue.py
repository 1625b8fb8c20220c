import io
import json

import numpy as np
import pytest

from epiupdate import BAF, DomainError, ProbabilityLabelling, generate_dual_average, parse_constraints
from epiupdate.dialogue import (DialogueScenario, interactive_session, irreducible_conflict,
                                load_scenario, observation, replay)
from epiupdate.solver import feasible

EXPECTED = dict(zip("ABCDEFGHIJKLM",
                    [0.19, 0.81, 0.19, 0.505, 0.975, 0.95, 0.495, 0.05, 0.92, 0.09, 0.95, 0.08, 0.91]))


def test_replay_reaches_the_expected_labelling(fee_files):
    t = replay(load_scenario(fee_files["scenario"]))
    assert len(t.steps) == 1 and not t.ended_in_bot
    for a, v in EXPECTED.items():
        assert t.final[a] == pytest.approx(v, abs=1e-9)
    assert t.steps[0].delta["A"] == pytest.approx(0.19, abs=1e-9)
    assert t.steps[0].applied == ["p(L) = 0.08", "p(M) = 0.91", "p(E) = 0.975", "p(K) = 0.95"]


def test_result_does_not_depend_on_the_starting_labelling(fee_files):
    s = load_scenario(fee_files["scenario"])
    flat = ProbabilityLabelling(s.baf, [0.5] * len(s.baf))
    t = replay(DialogueScenario(s.baf, flat, s.constraints, s.observations))
    assert np.allclose(t.final.values, replay(s).final.values, atol=1e-9)


def test_replay_is_byte_identical(fee_files):
    s = load_scenario(fee_files["scenario"])
    assert replay(s).json_lines() == replay(load_scenario(fee_files["scenario"])).json_lines()
    assert replay(s).table() == replay(s).table()


def test_verbatim_constraints_end_in_bot(fee_files):
    t = replay(load_scenario(fee_files["scenario"], verbatim=True))
    assert t.ended_in_bot and t.steps[0].bot
    assert t.final == t.initial
    conflict = t.steps[0].conflict
    assert conflict and "BOT" in t.table()
    rec = json.loads(t.json_lines())
    assert rec["result"] == "BOT" and rec["conflict"] == conflict


def test_irreducible_conflict_is_minimal():
    baf = BAF.of("ABC")
    cs = parse_constraints("p(A) + p(B) <= 1\np(A) = 0.7\np(B) = 0.6\np(C) = 0.2", baf)
    core = irreducible_conflict(cs)
    assert len(core) == 3 and all(str(c) != "p(C) = 0.2" for c in core)
    assert not feasible(type(cs)(baf, core).polytope())


def test_empty_observations_apply_the_constraints_alone():
    baf = BAF.of("AB", [("B", "A")])
    s = DialogueScenario(baf, ProbabilityLabelling(baf, [1, 1]), generate_dual_average(baf), ())
    t = replay(s)
    assert len(t.steps) == 1 and t.steps[0].applied == []
    assert t.final["A"] + t.final["B"] == pytest.approx(1.0)


def test_observations_must_pin_a_single_argument():
    baf = BAF.of("AB")
    with pytest.raises(DomainError):
        DialogueScenario(baf, ProbabilityLabelling(baf, [0, 0]), generate_dual_average(baf),
                         (parse_constraints("p(A) + p(B) = 1", baf),))
    with pytest.raises(DomainError):
        observation(baf, "A", 1.5)
    with pytest.raises(DomainError):
        observation(baf, "Z", 0.5)


def test_scenario_file_errors(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"baf": {"arguments": ["A"]}}))
    with pytest.raises(DomainError):
        load_scenario(p)
    p.write_text(json.dumps({"baf": {"arguments": ["A"]}, "initial": {"A": 0.2},
                             "constraints": {"generator": "magic"}}))
    with pytest.raises(DomainError):
        load_scenario(p)


def _session(fee_files, script):
    s = load_scenario(fee_files["scenario"])
    out = io.StringIO()
    t = interactive_session(s.baf, s.constraints, s.initial, stdin=io.StringIO(script), stdout=out, prompt="")
    return t, out.getvalue()


def test_interactive_session_reproduces_replay(fee_files):
    t, out = _session(fee_files, "assert p(L) = 0.08\nassert p(M) = 0.91\nassert p(E) = 0.975\n"
                                 "assert p(K) = 0.95\nupdate\nshow\nquit\n")
    assert np.allclose(t.final.values, [EXPECTED[a] for a in "ABCDEFGHIJKLM"], atol=1e-9)
    assert "A: 0.19" in out


def test_interactive_reassert_replaces_and_undo_reverts(fee_files):
    t, out = _session(fee_files, "assert p(L) = 0.5\nassert p(L) = 0.08\nshow\nupdate\nundo\nshow\n")
    assert out.count("p(L) = 0.5") == 1  # only the first "noted" line
    assert not t.steps and "reverted" in out


def test_interactive_bot_keeps_the_state(fee_files):
    t, out = _session(fee_files, "assert p(A) = 1\nassert p(B) = 1\nupdate\nshow\nundo\nundo\nundo\n")
    assert "BOT" in out and not t.steps
    assert "nothing to undo" in out


def test_interactive_rejects_bad_input(fee_files):
    _, out = _session(fee_files, "assert p(A) <= 1\nassert p(Q) = 1\nfrobnicate\nassert p(A =\nhelp\n")
    assert out.count("error:") == 4 and out.count("commands:") == 2
