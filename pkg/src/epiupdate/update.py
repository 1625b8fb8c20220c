"""Update operators on epistemic states.

Every operator returns either a new state or :data:`BOT`, the marker for an
unsatisfiable constraint set. Numerical breakdowns raise
:class:`~epiupdate.errors.SolverError` instead, so "no solution exists" and
"the solver gave up" never look alike.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .config import DEFAULT, Config
from .constraints import ConstraintSet
from .errors import DomainError, SolverError, SupportError
from .model import (ProbabilityFunction, ProbabilityLabelling, check_world_cap,
                    to_labelling)
from .solver import (PolytopeSpec, Status, bound_slack, bregman_project, feasible,
                     maximal_support, project_least_squares, project_world)
from .solver.world import dense_rows


class _Bot:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Bot, ())


BOT = _Bot()
"""Result of updating with an unsatisfiable constraint set."""

State = Union[ProbabilityFunction, ProbabilityLabelling]


def is_bot(result) -> bool:
    return result is BOT


def _values(state: State) -> np.ndarray:
    if isinstance(state, ProbabilityFunction):
        return kernels.world_marginals(state.probs, len(state.baf))
    return np.asarray(state.values)


def als_distance(a: State, b: State) -> float:
    """Sum over arguments of the squared difference in belief."""
    if type(a) is not type(b):
        raise DomainError("als_distance compares two distributions or two labellings, not a mix")
    if a.baf != b.baf:
        raise DomainError("operands are defined over different BAFs")
    d = _values(a) - _values(b)
    return float(d @ d)


@dataclass(frozen=True)
class AtomicUpdateOutcome:
    """The set of ALS-closest distributions, encoded by its common labelling."""

    labelling: ProbabilityLabelling
    distance: float
    representative: ProbabilityFunction | None = None


def _check_same(state, cs: ConstraintSet):
    if state.baf != cs.baf:
        raise DomainError("constraint set and state are defined over different BAFs")


def _raise_unless_optimal(report, what):
    if report.status is not Status.OPTIMAL:
        raise SolverError(f"{what}: {report.status.name.lower()} ({report.message})", report)


def _stage_one(values: np.ndarray, cs: ConstraintSet, config: Config):
    """Closest point of the constraint polytope to ``values``; None if empty."""
    if not len(cs):
        return values.copy()
    report = project_least_squares(values, cs.polytope(), config=config)
    if report.status is Status.INFEASIBLE:
        return None
    _raise_unless_optimal(report, "labelling projection")
    return np.clip(report.point, 0.0, 1.0)


_ROUNDOFF = 1e-14


def _distribution(baf, x, config) -> ProbabilityFunction:
    x = np.asarray(x, dtype=np.float64)
    x = np.where(x > _ROUNDOFF, x, 0.0)
    return ProbabilityFunction(baf, x / x.sum(), config=config)


def labelling_update(L: ProbabilityLabelling, cs: ConstraintSet, *, config: Config = DEFAULT):
    """Closest labelling (squared Euclidean) satisfying ``cs``, or BOT.

    Works on ``n`` variables only, so there is no world cap.
    """
    _check_same(L, cs)
    star = _stage_one(np.asarray(L.values), cs, config)
    if star is None:
        return BOT
    return ProbabilityLabelling(L.baf, star)


def _pin_marginals(P: ProbabilityFunction, star: np.ndarray, config: Config) -> ProbabilityFunction:
    n = len(P.baf)
    rows = np.zeros((n + 1, n + 1))
    rows[0, 0] = 1.0
    rows[1:, 1:] = np.eye(n)
    rhs = np.concatenate([[1.0], star])
    report = project_world(P.probs, n, rows, rhs, config=config)
    _raise_unless_optimal(report, "marginal-pinned world projection")
    return _distribution(P.baf, report.point, config)


def naive_ls_update(state: State, cs: ConstraintSet, *, config: Config = DEFAULT):
    """All states at minimal ALS distance satisfying ``cs``, or BOT.

    The minimizers share one labelling, returned together with the distance
    and (for a distribution prior) the two-stage representative.
    """
    _check_same(state, cs)
    values = _values(state)
    star = _stage_one(values, cs, config)
    if star is None:
        return BOT
    rep = None
    if isinstance(state, ProbabilityFunction):
        rep = _pin_marginals(state, star, config)
    d = star - values
    return AtomicUpdateOutcome(ProbabilityLabelling(state.baf, star), float(d @ d), rep)


def two_stage_ls_update(P: ProbabilityFunction, cs: ConstraintSet, *, config: Config = DEFAULT):
    """Among the ALS-closest distributions, the one closest to ``P`` world by world."""
    _check_same(P, cs)
    check_world_cap(P.baf, config)
    star = _stage_one(_values(P), cs, config)
    if star is None:
        return BOT
    return _pin_marginals(P, star, config)


def _world_rows(cs: ConstraintSet):
    n = len(cs.baf)
    E, e, I, g = cs.rows()
    norm = np.zeros((1, n + 1))
    norm[0, 0] = 1.0
    return np.vstack([norm, E]), np.concatenate([[1.0], e]), I, g


def _satisfiable(cs: ConstraintSet, config: Config) -> bool:
    return not len(cs) or bool(feasible(cs.polytope(), config=config))


def worldwise_ls_update(P: ProbabilityFunction, cs: ConstraintSet, *, config: Config = DEFAULT):
    """Closest distribution (squared Euclidean over worlds) satisfying ``cs``."""
    _check_same(P, cs)
    check_world_cap(P.baf, config)
    if not _satisfiable(cs, config):
        return BOT
    E, e, I, g = _world_rows(cs)
    report = project_world(P.probs, len(P.baf), E, e, I, g, config=config)
    _raise_unless_optimal(report, "world projection")
    return _distribution(P.baf, report.point, config)


def _forced_bits(cs: ConstraintSet) -> dict[int, int]:
    """Arguments whose belief every satisfying labelling fixes at 0 or 1."""
    above_zero, below_one = bound_slack(cs.polytope())
    forced = {int(i): 0 for i in np.flatnonzero(~above_zero)}
    forced.update({int(i): 1 for i in np.flatnonzero(~below_one)})
    return forced


def _support_mask(forced: dict, n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    keep = np.ones(1 << n, dtype=bool)
    for i, bit in forced.items():
        keep &= ((masks >> i) & 1) == bit
    return keep


def worldwise_kl_update(P: ProbabilityFunction, cs: ConstraintSet, *, config: Config = DEFAULT):
    """Distribution satisfying ``cs`` with least relative entropy to ``P``.

    Minimizes ``sum_w P'(w) log(P'(w) / P(w))``. Raises SupportError when
    ``cs`` is satisfiable but only by distributions that charge worlds ``P``
    rules out.
    """
    _check_same(P, cs)
    check_world_cap(P.baf, config)
    if not _satisfiable(cs, config):
        return BOT
    n = len(P.baf)
    E, e, I, g = _world_rows(cs)
    E, I = dense_rows(E, n), dense_rows(I, n)
    prior_support = P.probs > 0
    if prior_support.all():
        # a relative-interior labelling lifts to every world agreeing with the forced bits
        support = _support_mask(_forced_bits(cs) if len(cs) else {}, n)
    else:
        spec = PolytopeSpec.build(1 << n, I, g, E, e, lower=0.0)
        support = maximal_support(spec, allowed=prior_support)
        if not support.any():
            raise SupportError("every distribution satisfying the constraints charges a world "
                               "the prior gives probability 0")
    report = bregman_project(P.probs, E, e, I, g, support=support, config=config)
    _raise_unless_optimal(report, "KL projection")
    return _distribution(P.baf, report.point, config)


METHODS = {
    "labelling": labelling_update,
    "2ls": two_stage_ls_update,
    "ls-world": worldwise_ls_update,
    "kl-world": worldwise_kl_update,
}


def update(state: State, cs: ConstraintSet, method: str, *, config: Config = DEFAULT):
    try:
        op = METHODS[method]
    except KeyError:
        raise DomainError(f"unknown update method {method!r}; choose from {', '.join(METHODS)}") from None
    if method == "labelling":
        if not isinstance(state, ProbabilityLabelling):
            raise DomainError("method 'labelling' needs a labelling; the prior is a distribution")
    elif not isinstance(state, ProbabilityFunction):
        raise DomainError(f"method {method!r} needs a distribution; the prior is a labelling")
    return op(state, cs, config=config)
