from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from epiupdate import (BAF, ConstraintSet, DomainError, LinearAtomicConstraint, ParseError,
                       PreconditionError, ProbabilityFunction, ProbabilityLabelling, Relation,
                       canonical_lift, generate_coherence, generate_dual_average, implied_by,
                       normalize, parse_constraints, render, satisfied_by_distribution,
                       satisfied_by_labelling, to_labelling)
from epiupdate.constraints import parse_constraint, pin, scale
from epiupdate.model import load_baf

F = Fraction
ABCD = BAF.of(["A", "B", "C", "D"])


def one(text, baf=ABCD):
    cs = parse_constraints(text, baf)
    assert len(cs) == 1
    return cs[0]


# ---- parsing -----------------------------------------------------------------

def test_parse_sum():
    c = one("p(A) + p(B) <= 1")
    assert dict(c.terms) == {"A": 1, "B": 1}
    assert c.relation is Relation.LE and c.bound == 1


def test_parse_decimal_exactly():
    c = one("p(A) = 0.19")
    assert c.relation is Relation.EQ and c.bound == F(19, 100)


def test_parse_fraction_coefficients_exactly():
    baf = BAF.of(list("CDEF"))
    c = one("p(C) + 1/3*p(D) + 1/3*p(E) + 1/3*p(F) = 1", baf)
    assert dict(c.terms) == {"C": 1, "D": F(1, 3), "E": F(1, 3), "F": F(1, 3)}


def test_parse_signs_comments_and_blank_lines():
    cs = parse_constraints("# header\n\n-p(A) - 0.5*p(B) >= -0.75  # trailing\n p(C)<=1/4\n", ABCD)
    assert dict(cs[0].terms) == {"A": -1, "B": F(-1, 2)}
    assert cs[0].relation is Relation.GE and cs[0].bound == F(-3, 4)
    assert cs[1].bound == F(1, 4)


def test_duplicate_arguments_merge():
    assert dict(one("p(A) + 2*p(B) - p(A) <= 1").terms) == {"B": 2}


@pytest.mark.parametrize("text, line, column", [
    ("p(A) + <= 1", 1, 8),
    ("p(A) + p(B)", 1, 12),
    ("p(A) <= 1\np(A) <= 1 1", 2, 11),
    ("p(A) ! 1", 1, 6),
    ("2 p(A) <= 1", 1, 3),
])
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_constraints(text, ABCD)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(info.value)


def test_unknown_argument_and_empty_constraint():
    with pytest.raises(ParseError, match="unknown argument 'Z'"):
        parse_constraints("p(Z) <= 1", ABCD)
    with pytest.raises(ParseError, match="nonzero"):
        parse_constraints("p(A) - p(A) <= 1", ABCD)
    with pytest.raises(DomainError):
        LinearAtomicConstraint.of({"A": 0}, Relation.LE, 1)


def test_constraint_set_checks_arguments():
    with pytest.raises(DomainError):
        ConstraintSet(ABCD, [pin("Z", 1)])


# ---- normalization -------------------------------------------------------------

def test_normalize_examples():
    ge = LinearAtomicConstraint.of({"A": 1}, Relation.GE, F(1, 2))
    assert normalize(ge) == (LinearAtomicConstraint.of({"A": -1}, Relation.LE, F(-1, 2)),)
    eq = LinearAtomicConstraint.of({"A": 1}, Relation.EQ, 1)
    assert normalize(eq) == (LinearAtomicConstraint.of({"A": 1}, Relation.LE, 1),
                             LinearAtomicConstraint.of({"A": -1}, Relation.LE, -1))
    le = LinearAtomicConstraint.of({"A": 1}, Relation.LE, 1)
    assert normalize(le) == (le,)


# ---- strategies ----------------------------------------------------------------

rationals = st.builds(F, st.integers(-8, 8), st.sampled_from([1, 2, 3, 4, 5, 8, 10, 7]))
nonzero = rationals.filter(lambda q: q != 0)


@st.composite
def constraints(draw, baf=ABCD):
    args = draw(st.lists(st.sampled_from(baf.ids), min_size=1, max_size=len(baf), unique=True))
    terms = tuple((a, draw(nonzero)) for a in args)
    return LinearAtomicConstraint(terms, draw(st.sampled_from(list(Relation))), draw(rationals))


labellings = st.lists(st.floats(0, 1), min_size=4, max_size=4).map(lambda v: ProbabilityLabelling(ABCD, v))


@st.composite
def distributions(draw):
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=16, max_size=16)))
    assume(w.sum() > 1e-3)
    return ProbabilityFunction(ABCD, w / w.sum())


# ---- properties ----------------------------------------------------------------

@given(st.lists(constraints(), max_size=5))
@settings(max_examples=150)
def test_render_parse_round_trip(cs_list):
    cs = ConstraintSet(ABCD, cs_list)
    back = parse_constraints(render(cs), ABCD)
    assert back == cs
    assert [c.terms for c in back] == [c.terms for c in cs]


def _margin(c, values):
    return abs(sum(float(k) * values[a] for a, k in c.terms) - float(c.bound))


@given(constraints(), labellings)
@settings(max_examples=200)
def test_normalize_preserves_satisfaction(c, L):
    assume(_margin(c, L.as_dict()) > 1e-7)
    assert satisfied_by_labelling(c, L) == all(satisfied_by_labelling(d, L) for d in normalize(c))


@given(constraints(), labellings, st.sampled_from([F(1, 3), F(2), F(7, 2), F(100)]))
@settings(max_examples=200)
def test_positive_scaling_preserves_satisfaction(c, L, q):
    assume(_margin(c, L.as_dict()) > 1e-6)
    assert satisfied_by_labelling(c, L) == satisfied_by_labelling(scale(c, q), L)


@given(constraints(), distributions())
@settings(max_examples=200, deadline=None)
def test_world_and_marginal_semantics_agree(c, P):
    L = to_labelling(P)
    assume(_margin(c, L.as_dict()) > 1e-7)
    by_worlds = satisfied_by_distribution(c, P)
    assert by_worlds == satisfied_by_labelling(c, L)
    assert by_worlds == satisfied_by_distribution(c, canonical_lift(L))


# ---- satisfaction examples -------------------------------------------------------

def test_labelling_satisfaction(ab):
    l1 = parse_constraint("p(A) + p(B) <= 1", ab)
    assert satisfied_by_labelling(l1, ProbabilityLabelling(ab, {"A": 0.45, "B": 0.55}))
    assert not satisfied_by_labelling(l1, ProbabilityLabelling(ab, {"A": 0.6, "B": 0.7}))
    eq = parse_constraint("p(A) = 0.5", ab)
    assert satisfied_by_labelling(eq, ProbabilityLabelling(ab, {"A": 0.5 + 1e-10, "B": 0}))
    assert not satisfied_by_labelling(eq, ProbabilityLabelling(ab, {"A": 0.5 + 1e-8, "B": 0}))


def test_distribution_satisfaction(ab, prior):
    a1 = pin("A", 1)
    assert satisfied_by_distribution(a1, ProbabilityFunction(ab, [0, 0.4, 0, 0.6]))
    assert not satisfied_by_distribution(a1, prior)
    l1 = parse_constraint("p(A) + p(B) <= 1", ab)
    assert satisfied_by_distribution(l1, ProbabilityFunction(ab, [0.25, 0.2, 0.3, 0.25]))


def test_mismatched_baf_is_rejected(ab):
    with pytest.raises(DomainError):
        satisfied_by_labelling(pin("C", 1), ProbabilityLabelling(ab, [0, 0]))


# ---- generators -------------------------------------------------------------------

def test_coherence_generator(ab):
    assert list(generate_coherence(ab)) == [parse_constraint("p(A) + p(B) <= 1", ab)]
    assert len(generate_coherence(BAF.of(["A", "B"]))) == 0


def test_coherence_on_fee_graph(fee_files):
    cs = generate_coherence(load_baf(fee_files["baf"]))
    assert len(cs) == 12
    assert all(c.relation is Relation.LE and c.bound == 1 for c in cs)


def test_dual_average_small_graphs(ab):
    assert list(generate_dual_average(ab)) == [parse_constraint("p(A) + p(B) = 1", ab)]
    chain = BAF.of(["A", "B", "C"], [("B", "A"), ("C", "B")])
    assert list(generate_dual_average(chain)) == list(parse_constraints("p(A)+p(B)=1\np(B)+p(C)=1", chain))


FEE_CONSTRAINTS = """
p(A) + p(B) = 1
p(B) + p(C) = 1
p(D) + p(G) = 1
p(F) + p(H) = 1
p(C) + 1/3*p(D) + 1/3*p(E) + 1/3*p(F) = 1
p(G) + 1/2*p(I) + 1/2*p(J) = 1
p(H) + p(K) = 1
p(I) + p(L) = 1
p(J) + p(M) = 1
"""


def test_dual_average_on_fee_graph(fee_files):
    baf = load_baf(fee_files["baf"])
    cs = generate_dual_average(baf)
    assert len(cs) == 9
    assert set(cs) == set(parse_constraints(FEE_CONSTRAINTS, baf))


# ---- implication ------------------------------------------------------------------

def test_implication(ab):
    assert implied_by(parse_constraints("p(A) <= 0.3", ab), parse_constraint("p(A) <= 0.5"))
    assert implied_by(parse_constraints("p(A) + p(B) <= 1", ab), parse_constraint("p(A) <= 1"))
    assert not implied_by(parse_constraints("p(A) <= 0.5", ab), parse_constraint("p(B) <= 0.5"))
    assert implied_by(parse_constraints("p(A) = 0.2\np(B) >= 0.3", ab), parse_constraint("p(A) + p(B) >= 0.5"))
    assert not implied_by(parse_constraints("p(A) = 0.2", ab), parse_constraint("p(A) + p(B) = 0.5"))
    with pytest.raises(PreconditionError):
        implied_by(parse_constraints("p(A) >= 0.6\np(A) <= 0.4", ab), parse_constraint("p(B) <= 1"))


AB = BAF.of(["A", "B"])
GRID = np.stack(np.meshgrid(np.linspace(0, 1, 201), np.linspace(0, 1, 201), indexing="ij"), -1).reshape(-1, 2)


def _holds_on_grid(c):
    lhs = sum(float(k) * GRID[:, AB.index(a)] for a, k in c.terms)
    b = float(c.bound)
    return {Relation.LE: lhs <= b + 1e-9, Relation.GE: lhs >= b - 1e-9,
            Relation.EQ: np.abs(lhs - b) <= 1e-9}[c.relation]


@given(st.lists(constraints(AB), min_size=1, max_size=3), constraints(AB))
@settings(max_examples=100, deadline=None)
def test_implication_agrees_with_dense_sampling(cs_list, c):
    cs = ConstraintSet(AB, cs_list)
    sat = np.logical_and.reduce([_holds_on_grid(d) for d in cs])
    assume(sat.any())
    if (sat & ~_holds_on_grid(c)).any():
        assert not implied_by(cs, c)
