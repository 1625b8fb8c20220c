"""Brute-force verifiers and randomized property suites.

Nothing here calls the active-set or Bregman solvers directly: grid search,
simplex enumeration and explicit null-space sampling stand on their own, so
agreement with the fast paths means something.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from .constraints import (ConstraintSet, LinearAtomicConstraint, Relation, combine, negate,
                          pin, satisfies, scale)
from .errors import DomainError
from .model import (BAF, ProbabilityFunction, ProbabilityLabelling, atomically_equivalent,
                    canonical_lift, to_labelling)
from .solver import feasible
from .update import (BOT, METHODS, als_distance, labelling_update, naive_ls_update,
                     two_stage_ls_update, worldwise_ls_update)

TOL = 1e-6


# ---- grid search ------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    dimension: int
    step: float | None = None
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        if self.step is None:
            object.__setattr__(self, "step", 1e-3 if self.dimension <= 2 else 1e-2)
        if not self.step > 0:
            raise DomainError("grid step must be positive")
        if self.upper < self.lower:
            raise DomainError("grid bounds are reversed")

    def axis(self) -> np.ndarray:
        k = int(round((self.upper - self.lower) / self.step))
        return self.lower + np.arange(k + 1) * self.step

    def points(self) -> np.ndarray:
        """All grid points, rows in lexicographic order."""
        axes = [self.axis()] * self.dimension
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _lhs_rows(cs: ConstraintSet):
    E, e, I, g = cs.rows()
    return E[:, 1:], e, I[:, 1:], g


def _feasible_mask(X: np.ndarray, cs: ConstraintSet, tol: float) -> np.ndarray:
    E, e, I, g = _lhs_rows(cs)
    ok = np.ones(X.shape[0], dtype=bool)
    for row, rhs in zip(I, g):
        ok &= X @ row <= rhs + tol
    for row, rhs in zip(E, e):
        ok &= np.abs(X @ row - rhs) <= tol
    return ok


def grid_project(target, cs: ConstraintSet, grid: GridSpec | None = None, *, tol: float = 1e-9):
    """Feasible grid point nearest to ``target`` (lexicographically first on ties), or BOT."""
    t = np.asarray(target.values if isinstance(target, ProbabilityLabelling) else target, dtype=float)
    grid = grid or GridSpec(t.size)
    if t.size != grid.dimension or grid.dimension > 3:
        raise DomainError("grid search supports dimension <= 3 matching the target")
    X = grid.points()
    ok = _feasible_mask(X, cs, tol)
    if not ok.any():
        return BOT
    d = ((X - t) ** 2).sum(axis=1)
    d[~ok] = np.inf
    return X[int(np.argmin(d))]


def simplex_grid(worlds: int, step: float) -> np.ndarray:
    """All distributions over ``worlds`` outcomes with entries on the grid."""
    k = int(round(1 / step))
    if worlds == 1:
        return np.ones((1, 1))
    rest = simplex_grid_counts(worlds, k)
    return rest / k


def simplex_grid_counts(worlds: int, k: int) -> np.ndarray:
    if worlds == 1:
        return np.array([[k]])
    parts = []
    for first in range(k + 1):
        tail = simplex_grid_counts(worlds - 1, k - first)
        parts.append(np.hstack([np.full((tail.shape[0], 1), first), tail]))
    return np.vstack(parts)


def _world_feasible(Q: np.ndarray, cs: ConstraintSet, n: int, tol: float) -> np.ndarray:
    M = np.stack([kernels.world_affine(np.eye(n)[i], 0.0, n) for i in range(n)], axis=1)
    return _feasible_mask(Q @ M, cs, tol)


def brute_force_world_ls(P: ProbabilityFunction, cs: ConstraintSet, step: float = 5e-3, *, tol: float = 1e-9):
    """Worldwise least squares by enumerating a simplex grid (n <= 2)."""
    n = len(P.baf)
    if n > 2:
        raise DomainError("simplex enumeration is limited to two arguments")
    Q = simplex_grid(1 << n, step)
    ok = _world_feasible(Q, cs, n, tol)
    if not ok.any():
        return BOT
    d = ((Q - P.probs) ** 2).sum(axis=1)
    d[~ok] = np.inf
    return Q[int(np.argmin(d))]


def brute_force_two_stage(P: ProbabilityFunction, cs: ConstraintSet, step: float = 1e-3,
                          fine: int = 100001):
    """Lexicographic two-stage objective by enumeration (n <= 2).

    Labellings come from :func:`grid_project`; the distributions with those
    marginals form a segment, scanned at ``fine`` points.
    """
    n = len(P.baf)
    if n > 2:
        raise DomainError("two-stage enumeration is limited to two arguments")
    star = grid_project(to_labelling(P).values, cs, GridSpec(n, step))
    if star is BOT:
        return BOT
    if n == 1:
        return np.array([1 - star[0], star[0]])
    a, b = star
    x = np.linspace(max(0.0, a + b - 1), min(a, b), fine)
    Q = np.stack([1 - a - b + x, a - x, b - x, x], axis=1)
    d = ((Q - P.probs) ** 2).sum(axis=1)
    return Q[int(np.argmin(d))]


# ---- equivalence classes ----------------------------------------------------

def marginal_matrix(n: int) -> np.ndarray:
    """Rows: normalization, then one marginal per argument (over world masks)."""
    rows = [np.ones(1 << n)] + [kernels.world_affine(np.eye(n)[i], 0.0, n) for i in range(n)]
    return np.vstack(rows)


def enumerate_equivalence_witnesses(L: ProbabilityLabelling, k: int, seed: int = 0,
                                    ) -> list[ProbabilityFunction]:
    """Up to ``k`` distinct distributions whose marginals are exactly ``L``.

    Starts from the independent lift and takes random steps inside the null
    space of the marginal map, each as long as nonnegativity allows.
    Deterministic labellings admit only the point mass.
    """
    n = len(L.baf)
    if n > 4:
        raise DomainError("witness enumeration is limited to four arguments")
    rng = np.random.default_rng(seed)
    M = marginal_matrix(n)
    _, sv, vt = np.linalg.svd(M)
    rank = int((sv > 1e-12).sum())
    null = vt[rank:]
    base = canonical_lift(L).probs
    found = [base]
    x = base.copy()
    for _ in range(50 * k):
        if len(found) >= k or null.shape[0] == 0:
            break
        d = null.T @ rng.standard_normal(null.shape[0])
        neg, pos = d < -1e-15, d > 1e-15
        t_hi = np.min(-x[neg] / d[neg]) if neg.any() else 0.0
        t_lo = np.max(-x[pos] / d[pos]) if pos.any() else 0.0
        if t_hi - t_lo <= 1e-12:
            continue
        cand = np.maximum(x + rng.uniform(t_lo, t_hi) * d, 0.0)
        cand /= cand.sum()
        if np.abs(M[1:] @ cand - L.values).max() > 1e-12:
            continue
        if all(np.abs(cand - f).max() > 1e-9 for f in found):
            found.append(cand)
            x = cand
    return [ProbabilityFunction(L.baf, f) for f in found]


# ---- random instances -------------------------------------------------------

COEFFICIENTS = (Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1))
_RELATIONS = (Relation.LE, Relation.GE, Relation.EQ)


def random_baf(rng: np.random.Generator, n: int) -> BAF:
    ids = [chr(ord("A") + i) for i in range(n)]
    attacks = [(a, b) for a in ids for b in ids if a != b and rng.random() < 0.3]
    return BAF.of(ids, attacks)


def random_distribution(rng: np.random.Generator, baf: BAF) -> ProbabilityFunction:
    """Strictly positive distribution."""
    p = rng.dirichlet(np.ones(1 << len(baf)))
    p = np.maximum(p, 1e-6)
    return ProbabilityFunction(baf, p / p.sum())


def random_labelling(rng: np.random.Generator, baf: BAF) -> ProbabilityLabelling:
    return ProbabilityLabelling(baf, rng.random(len(baf)))


def _anchor(rng, n, den):
    """A labelling on the ``1/den`` grid, sometimes at 0 or 1."""
    out = []
    for _ in range(n):
        u = rng.random()
        if u < 0.1:
            out.append(Fraction(0))
        elif u < 0.2:
            out.append(Fraction(1))
        else:
            out.append(Fraction(int(rng.integers(0, den + 1)), den))
    return out


def random_constraints(rng: np.random.Generator, baf: BAF, *, max_equalities: int = 3,
                       satisfiable_rate: float = 0.8, denominator: int = 1000) -> ConstraintSet:
    """1 to 3 constraints with coefficients in {-1, -1/2, 1/2, 1} and bounds on a ``1/denominator`` grid.

    With probability ``satisfiable_rate`` every bound is placed so that one
    hidden grid labelling satisfies the whole set; otherwise bounds are
    drawn freely, which often but not always yields an unsatisfiable set.
    """
    n = len(baf)
    anchored = rng.random() < satisfiable_rate
    anchor = _anchor(rng, n, denominator)
    out, eqs = [], 0
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, min(n, 3) + 1))
        idx = sorted(int(i) for i in rng.choice(n, size=size, replace=False))
        terms = tuple((baf.ids[i], COEFFICIENTS[int(rng.integers(4))]) for i in idx)
        rel = _RELATIONS[int(rng.choice(3, p=[0.4, 0.4, 0.2]))]
        if rel is Relation.EQ and eqs >= max_equalities:
            rel = Relation.LE
        eqs += rel is Relation.EQ
        if anchored:
            lhs = sum(c * anchor[baf.index(a)] for a, c in terms)
            slack = Fraction(int(rng.integers(0, 3 * denominator // 10)), denominator)
            bound = {Relation.LE: lhs + slack, Relation.GE: lhs - slack, Relation.EQ: lhs}[rel]
        else:
            lo = sum(min(c, 0) for _, c in terms)
            hi = sum(max(c, 0) for _, c in terms)
            d = denominator
            bound = Fraction(int(rng.integers(int(lo * d) - d // 2, int(hi * d) + d // 2 + 1)), d)
        out.append(LinearAtomicConstraint(terms, rel, bound))
    return ConstraintSet(baf, out)


# ---- reports -----------------------------------------------------------------

@dataclass
class Finding:
    trial: int
    check: str
    detail: str
    seed: list

    def line(self, tag: str) -> str:
        return f"{tag} trial={self.trial} seed={self.seed} {self.check}: {self.detail}"


@dataclass
class SuiteReport:
    suite: str
    operator: str
    seed: int
    trials: int
    checks: int = 0
    violations: list[Finding] = field(default_factory=list)
    expected: list[Finding] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def _sorted(self):
        self.violations.sort(key=lambda f: (f.trial, f.check))
        self.expected.sort(key=lambda f: (f.trial, f.check))

    def lines(self) -> list[str]:
        head = (f"{self.suite} operator={self.operator} seed={self.seed} trials={self.trials} "
                f"checks={self.checks} violations={len(self.violations)}")
        if self.expected:
            head += f" expected_failures={len(self.expected)}"
        out = [head]
        if self.counts:
            out.append("  " + " ".join(f"{k}={v}" for k, v in sorted(self.counts.items())))
        out += ["  " + f.line("VIOLATION") for f in self.violations]
        out += ["  " + f.line("EXPECTED") for f in self.expected]
        return out

    def summary(self) -> dict:
        return {
            "suite": self.suite, "operator": self.operator, "seed": self.seed,
            "trials": self.trials, "checks": self.checks, "ok": self.ok,
            "counts": dict(sorted(self.counts.items())),
            "violations": [vars(f) for f in self.violations],
            "expected_failures": [vars(f) for f in self.expected],
        }


def write_summary(reports: list[SuiteReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.summary() for r in reports], fh, indent=1, sort_keys=True)
        fh.write("\n")


class _Recorder:
    def __init__(self, report: SuiteReport, trial: int, seed: list):
        self.report, self.trial, self.seed = report, trial, seed

    def check(self, name: str, ok: bool, detail: str = "", expected: bool = False):
        self.report.checks += 1
        if not ok:
            bucket = self.report.expected if expected else self.report.violations
            bucket.append(Finding(self.trial, name, detail, self.seed))

    def count(self, key: str):
        self.report.counts[key] = self.report.counts.get(key, 0) + 1


def _state_values(s) -> np.ndarray:
    return np.asarray(s.probs if isinstance(s, ProbabilityFunction) else s.values)


def _gap(a, b) -> float:
    """Max-norm distance between two results; inf if exactly one is BOT."""
    if a is BOT or b is BOT:
        return 0.0 if a is b else np.inf
    return float(np.abs(_state_values(a) - _state_values(b)).max())


def _marginal_gap(a, b) -> float:
    if a is BOT or b is BOT:
        return 0.0 if a is b else np.inf
    return float(np.abs(to_labelling(a).values - to_labelling(b).values).max())


# ---- postulates --------------------------------------------------------------

def representation_variants(rng: np.random.Generator, cs: ConstraintSet) -> dict[str, ConstraintSet]:
    """Constraint sets with the same satisfying states as ``cs``."""
    items = list(cs)
    factors = (Fraction(1, 3), Fraction(2), Fraction(5, 2), Fraction(7))
    scaled = [scale(c, factors[int(rng.integers(len(factors)))]) for c in items]
    order = rng.permutation(len(items))
    dup = items + [items[int(rng.integers(len(items)))]]
    pool = []
    for c in items:
        pool.append(c)
        if c.relation is Relation.EQ:
            pool.append(negate(c))
    pick = rng.choice(len(pool), size=min(2, len(pool)), replace=False)
    weights = [Fraction(int(rng.integers(1, 5)), 2) for _ in pick]
    try:
        extra = combine([pool[i] for i in pick], weights)
    except DomainError:  # the picked rows cancelled out
        extra = combine([pool[pick[0]]], weights[:1])
    combined = items + [extra]
    return {
        "scaled": ConstraintSet(cs.baf, scaled),
        "reordered": ConstraintSet(cs.baf, [items[i] for i in order]),
        "duplicated": ConstraintSet(cs.baf, dup),
        "combined": ConstraintSet(cs.baf, combined),
    }


# equivalence compatibility is a theorem only for the ALS-based operators
EQUIVALENCE_COMPATIBLE = {"2ls": True, "ls-world": False, "kl-world": False}


def _pinned_pair():
    """Two distributions with marginals (0.6, 0.7) that world-space LS separates."""
    baf = BAF.of(["A", "B"], [("B", "A")])
    P = ProbabilityFunction(baf, [0.1, 0.2, 0.3, 0.4])
    Q = ProbabilityFunction(baf, [0.3, 0.0, 0.1, 0.6])
    return P, Q, ConstraintSet(baf, [pin("A", Fraction(1, 2))])


def check_postulates(method: str, trials: int = 200, seed: int = 0, *,
                     max_arguments: int = 4) -> SuiteReport:
    """Success, Failure, Representation Invariance and Idempotence on random instances.

    Distribution operators also get an equivalence-compatibility check on
    random equivalent prior pairs plus one fixed pair; for operators where
    compatibility is not expected the findings are listed separately.
    """
    op: Callable = METHODS[method]
    report = SuiteReport("postulates", method, seed, trials)
    started = time.perf_counter()
    on_labellings = method == "labelling"
    for trial in range(trials):
        rec = _Recorder(report, trial, [seed, trial])
        rng = np.random.default_rng([seed, trial])
        baf = random_baf(rng, int(rng.integers(1, max_arguments + 1)))
        prior = random_labelling(rng, baf) if on_labellings else random_distribution(rng, baf)
        cs = random_constraints(rng, baf)
        sat = bool(feasible(cs.polytope()))
        rec.count("satisfiable" if sat else "unsatisfiable")
        result = op(prior, cs)
        rec.check("failure", (result is BOT) == (not sat),
                  f"result {'BOT' if result is BOT else 'state'} but feasibility check says {sat}")
        if result is not BOT:
            rec.check("success", satisfies(result, cs, TOL), f"result violates {cs!r}")
        for name, variant in representation_variants(rng, cs).items():
            g = _gap(result, op(prior, variant))
            rec.check(f"representation:{name}", g <= TOL, f"results differ by {g:.3g}")
        if result is not BOT:
            g = _gap(result, op(result, cs))
            rec.check("idempotence", g <= TOL, f"re-update moved the state by {g:.3g}")
        if not on_labellings:
            L = to_labelling(prior)
            pair = enumerate_equivalence_witnesses(L, 2, seed=int(rng.integers(2 ** 31)))
            if len(pair) == 2:
                g = _marginal_gap(op(pair[0], cs), op(pair[1], cs))
                rec.check("equivalence", g <= TOL, f"equivalent priors give marginals {g:.3g} apart",
                          expected=not EQUIVALENCE_COMPATIBLE[method])
    if not on_labellings:
        rec = _Recorder(report, trials, ["pinned equivalent pair"])
        P, Q, cs = _pinned_pair()
        g = _marginal_gap(op(P, cs), op(Q, cs))
        rec.check("equivalence", g <= TOL, f"equivalent priors give marginals {g:.3g} apart",
                  expected=not EQUIVALENCE_COMPATIBLE[method])
    report._sorted()
    report.elapsed = time.perf_counter() - started
    return report


# ---- equivalence compatibility ----------------------------------------------

def equivalence_suite(trials: int = 100, seed: int = 0, *, max_arguments: int = 4,
                      tol: float = TOL) -> list[SuiteReport]:
    """Atomic-equivalence properties of the ALS operators, and the world-space contrast.

    Checks on random pairs of equivalent priors: equal ALS distance to any
    third state; equal optimal labelling from the atomic update; every
    optimal representative carries that labelling and every member of its
    class is equally close; the two-stage results are equivalent. The same
    last check is run for world-space least squares, where it may fail.
    """
    als = SuiteReport("equivalence", "2ls", seed, trials)
    world = SuiteReport("equivalence", "ls-world", seed, trials)
    started = time.perf_counter()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rec = _Recorder(als, trial, [seed, trial])
        wrec = _Recorder(world, trial, [seed, trial])
        baf = random_baf(rng, int(rng.integers(2, max_arguments + 1)))  # one argument: singleton classes
        L = random_labelling(rng, baf)
        pair = enumerate_equivalence_witnesses(L, 2, seed=int(rng.integers(2 ** 31)))
        if len(pair) < 2:
            rec.count("degenerate")
            continue
        P1, P2 = pair
        Q = random_distribution(rng, baf)
        cs = random_constraints(rng, baf)

        d1, d2 = als_distance(P1, Q), als_distance(P2, Q)
        rec.check("als-distance", abs(d1 - d2) <= 1e-12, f"{d1!r} vs {d2!r}")

        o1, o2 = naive_ls_update(P1, cs), naive_ls_update(P2, cs)
        if o1 is BOT or o2 is BOT:
            rec.check("atomic-update", o1 is o2, "only one prior gave BOT")
            rec.count("unsatisfiable")
            continue
        rec.count("satisfiable")
        g = float(np.abs(o1.labelling.values - o2.labelling.values).max())
        rec.check("atomic-update", g <= min(tol, 1e-8), f"optimal labellings differ by {g:.3g}")
        for o, P in ((o1, P1), (o2, P2)):
            rep_gap = float(np.abs(to_labelling(o.representative).values - o.labelling.values).max())
            rec.check("representative", rep_gap <= 1e-8, f"representative off by {rep_gap:.3g}")
            others = enumerate_equivalence_witnesses(o.labelling, 3, seed=int(rng.integers(2 ** 31)))
            spread = max(abs(als_distance(P, W) - o.distance) for W in others)
            rec.check("optimal-class", spread <= tol, f"class members differ in distance by {spread:.3g}")
        g = _marginal_gap(two_stage_ls_update(P1, cs), two_stage_ls_update(P2, cs))
        rec.check("two-stage", g <= tol, f"marginals {g:.3g} apart")
        g = _marginal_gap(worldwise_ls_update(P1, cs), worldwise_ls_update(P2, cs))
        wrec.check("world-ls", g <= tol, f"marginals {g:.3g} apart", expected=True)
    P, Q, cs = _pinned_pair()
    wrec = _Recorder(world, trials, ["pinned equivalent pair"])
    g = _marginal_gap(worldwise_ls_update(P, cs), worldwise_ls_update(Q, cs))
    wrec.check("world-ls", g <= tol, f"marginals {g:.3g} apart", expected=True)
    rec = _Recorder(als, trials, ["pinned equivalent pair"])
    g = _marginal_gap(two_stage_ls_update(P, cs), two_stage_ls_update(Q, cs))
    rec.check("two-stage", g <= tol, f"marginals {g:.3g} apart")
    for r in (als, world):
        r._sorted()
        r.elapsed = time.perf_counter() - started
    return [als, world]


# ---- bridge -----------------------------------------------------------------

def bridge_suite(trials: int = 100, seed: int = 0, *, max_arguments: int = 4,
                 witnesses: int = 3, tol: float = TOL) -> SuiteReport:
    """Two-stage update of any class member lands on the labelling update."""
    report = SuiteReport("bridge", "2ls/labelling", seed, trials)
    started = time.perf_counter()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rec = _Recorder(report, trial, [seed, trial])
        baf = random_baf(rng, int(rng.integers(1, max_arguments + 1)))
        P = random_distribution(rng, baf)
        cs = random_constraints(rng, baf)
        L = to_labelling(P)
        target = labelling_update(L, cs)
        rec.count("unsatisfiable" if target is BOT else "satisfiable")
        members = [P] + enumerate_equivalence_witnesses(L, witnesses, seed=int(rng.integers(2 ** 31)))
        results = [two_stage_ls_update(W, cs) for W in members]
        for k, res in enumerate(results):
            if target is BOT or res is BOT:
                rec.check("bridge", target is res, f"member {k}: BOT on one side only")
                continue
            g = float(np.abs(to_labelling(res).values - target.values).max())
            rec.check("bridge", g <= tol, f"member {k}: labellings differ by {g:.3g}")
        for k, res in enumerate(results[1:], start=1):
            if res is not BOT:
                rec.check("equivalent-results", atomically_equivalent(results[0], res, tol),
                          f"member {k} not equivalent to member 0")
    report._sorted()
    report.elapsed = time.perf_counter() - started
    return report


# ---- grid agreement -----------------------------------------------------------

def grid_suite(trials: int = 100, seed: int = 0, *, max_arguments: int = 2,
               step: float | None = None) -> SuiteReport:
    """Labelling update against exhaustive grid search, within two grid steps.

    At most one equality per instance: two independent equalities meet at a
    point that generally lies off the grid.
    """
    report = SuiteReport("grid", "labelling", seed, trials)
    started = time.perf_counter()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rec = _Recorder(report, trial, [seed, trial])
        n = int(rng.integers(1, max_arguments + 1))
        baf = random_baf(rng, n)
        grid = GridSpec(n, step)
        L = random_labelling(rng, baf)
        cs = random_constraints(rng, baf, max_equalities=1, denominator=round(1 / grid.step))
        fast = labelling_update(L, cs)
        slow = grid_project(L.values, cs, grid)
        rec.count("unsatisfiable" if fast is BOT else "satisfiable")
        if fast is BOT or slow is BOT:
            rec.check("grid", fast is slow, f"fast={'BOT' if fast is BOT else 'point'} "
                                            f"grid={'BOT' if slow is BOT else 'point'}")
            continue
        g = float(np.abs(fast.values - slow).max())
        rec.check("grid", g <= 2 * grid.step, f"coordinates differ by {g:.3g} (step {grid.step})")
    report._sorted()
    report.elapsed = time.perf_counter() - started
    return report


# ---- scale --------------------------------------------------------------------

def synthetic_instance(n_arguments: int = 1000, n_constraints: int = 2000, seed: int = 0,
                       *, max_terms: int = 6, equality_rate: float = 0.05):
    """Large random BAF, satisfiable constraint set and a prior labelling.

    Each argument is attacked by about two random others. Every constraint
    has 2 to ``max_terms`` terms and is satisfied by a hidden labelling on
    the 1e-3 grid, so the set is satisfiable by construction; the prior is
    drawn independently, so many constraints end up active.
    """
    rng = np.random.default_rng(seed)
    ids = [f"a{i}" for i in range(n_arguments)]
    pairs = set()
    while len(pairs) < 2 * n_arguments:
        a, b = (int(v) for v in rng.integers(0, n_arguments, size=2))
        if a != b:
            pairs.add((ids[a], ids[b]))
    baf = BAF.of(ids, sorted(pairs))
    hidden = rng.integers(0, 1001, size=n_arguments)
    out = []
    for _ in range(n_constraints):
        k = int(rng.integers(2, max_terms + 1))
        idx = rng.choice(n_arguments, size=k, replace=False)
        coefs = [COEFFICIENTS[int(rng.integers(4))] for _ in idx]
        lhs = sum(c * Fraction(int(hidden[i]), 1000) for c, i in zip(coefs, idx))
        u = rng.random()
        if u < equality_rate:
            rel, bound = Relation.EQ, lhs
        else:
            slack = Fraction(int(rng.integers(0, 200)), 1000)
            rel = Relation.LE if u < (1 + equality_rate) / 2 else Relation.GE
            bound = lhs + slack if rel is Relation.LE else lhs - slack
        out.append(LinearAtomicConstraint(tuple((ids[int(i)], c) for i, c in zip(idx, coefs)), rel, bound))
    prior = ProbabilityLabelling(baf, rng.random(n_arguments))
    return baf, ConstraintSet(baf, out), prior
