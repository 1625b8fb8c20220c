import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epiupdate import (BAF, Config, DomainError, ProbabilityFunction, ProbabilityLabelling,
                       ResourceError, atomically_equivalent, canonical_lift, marginal, to_labelling)
from epiupdate.model import World, load_state, mixture


def test_baf_validation():
    with pytest.raises(DomainError):
        BAF.of(["A", "A"])
    with pytest.raises(DomainError):
        BAF.of(["A"], [("A", "Z")])
    with pytest.raises(DomainError):
        BAF.of(["A", "B"], supports=[("Q", "A")])


def test_attackers_follow_argument_order():
    baf = BAF.of(["A", "B", "C", "D"], [("D", "A"), ("B", "A"), ("C", "B")])
    assert baf.attackers("A") == ("B", "D")
    assert baf.attackers("C") == ()
    with pytest.raises(DomainError):
        baf.attackers("Z")


def test_baf_json_round_trip():
    baf = BAF.of(["A", "B", "C"], [("B", "A")], [("C", "A")])
    assert BAF.from_dict(json.loads(json.dumps(baf.to_dict()))) == baf


def test_worlds_are_bitmasks(ab):
    assert World.from_members(ab, ["B"]).mask == 2
    assert World(ab, 3).members == ("A", "B")


def test_distribution_validation(ab):
    with pytest.raises(DomainError):
        ProbabilityFunction(ab, [0.5, 0.5, 0.1, 0.0])
    with pytest.raises(DomainError):
        ProbabilityFunction(ab, [-0.1, 0.6, 0.5, 0.0])
    with pytest.raises(DomainError):
        ProbabilityFunction(ab, [1.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        ProbabilityFunction(ab, [np.nan, 1.0, 0.0, 0.0])


def test_marginals(prior, twin):
    assert marginal(prior, "A") == pytest.approx(0.6)
    assert marginal(prior, "B") == pytest.approx(0.7)
    assert to_labelling(twin).as_dict() == pytest.approx({"A": 0.6, "B": 0.7})
    assert atomically_equivalent(prior, twin)
    assert prior["A", "B"] == pytest.approx(0.4)


def test_labelling_validation(ab):
    with pytest.raises(DomainError):
        ProbabilityLabelling(ab, {"A": 0.5})
    with pytest.raises(DomainError):
        ProbabilityLabelling(ab, {"A": 0.5, "B": 1.2})
    with pytest.raises(DomainError):
        ProbabilityLabelling(ab, {"A": 0.5, "B": 0.5, "C": 0.1})


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_canonical_lift_is_a_right_inverse_of_the_labelling_map(values):
    baf = BAF.of([f"x{i}" for i in range(len(values))])
    L = ProbabilityLabelling(baf, values)
    P = canonical_lift(L)
    assert P.probs.sum() == pytest.approx(1.0)
    assert np.allclose(to_labelling(P).values, L.values, atol=1e-12)


@given(st.floats(0, 1))
def test_mixtures_of_equivalent_distributions_stay_equivalent(alpha):
    baf = BAF.of(["A", "B"])
    P = ProbabilityFunction(baf, [0.1, 0.2, 0.3, 0.4])
    Q = ProbabilityFunction(baf, [0.3, 0.0, 0.1, 0.6])
    assert atomically_equivalent(mixture(P, Q, alpha), P)


def test_world_cap():
    baf = BAF.of([f"x{i}" for i in range(6)])
    cfg = Config(world_cap=5)
    with pytest.raises(ResourceError, match="labelling"):
        ProbabilityFunction(baf, np.full(64, 1 / 64), config=cfg)
    with pytest.raises(ResourceError):
        canonical_lift(ProbabilityLabelling(baf, np.zeros(6)), config=cfg)
    with pytest.raises(ResourceError):
        ProbabilityFunction.from_dict(baf, {"worlds": []}, config=cfg)


def test_state_files_round_trip(tmp_path, prior):
    f = tmp_path / "p.json"
    f.write_text(json.dumps(prior.to_dict()))
    back = load_state(f, prior.baf)
    assert isinstance(back, ProbabilityFunction)
    assert np.array_equal(back.probs, prior.probs)
    L = to_labelling(prior)
    f.write_text(json.dumps(L.to_dict()))
    back = load_state(f, prior.baf)
    assert isinstance(back, ProbabilityLabelling)
    assert np.array_equal(back.values, L.values)


def test_states_are_immutable(prior):
    with pytest.raises(ValueError):
        prior.probs[0] = 1.0
