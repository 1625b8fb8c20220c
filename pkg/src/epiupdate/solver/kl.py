"""KL I-projection of a distribution onto linear constraints.

Minimizes ``sum_w x[w] * log(x[w] / prior[w])`` by cyclic Bregman
projections: each constraint in turn tilts the current iterate by
``exp(-delta * c(w))``, with ``delta`` chosen so the constraint binds.
Inequalities keep a running multiplier that may never become negative
(Hildreth's correction), so a satisfied constraint with zero multiplier
leaves the iterate alone.

Worlds that every feasible distribution must leave empty are removed
before the sweeps; without that the multipliers would drift to infinity.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from ..config import DEFAULT, Config
from ..errors import SupportError
from .polytope import PolytopeSpec, SolveReport, Status

_EXTREME_TOL = 1e-12


def _log(x):
    out = np.full(x.shape, -np.inf)
    on = x > 0
    out[on] = np.log(x[on])
    return out


def _tilt(logx, c, delta):
    w = logx - delta * c
    w -= w.max()
    x = np.exp(w)
    return x / x.sum()


def _bind(x, c, target):
    """Tilt parameter ``delta`` with ``E_{x exp(-delta c)}[c] = target``.

    Returns ``+inf``/``-inf`` when the target sits at the smallest/largest
    value of ``c`` on the support; the caller then restricts the support.
    """
    on = x > 0
    cmin, cmax = c[on].min(), c[on].max()
    if target <= cmin + _EXTREME_TOL * max(1.0, abs(cmin)):
        return math.inf
    if target >= cmax - _EXTREME_TOL * max(1.0, abs(cmax)):
        return -math.inf
    logx = _log(x)
    delta, lo, hi = 0.0, -math.inf, math.inf
    for _ in range(200):
        xt = _tilt(logx, c, delta)
        mean = float(xt @ c)
        f = mean - target
        if abs(f) <= 1e-15 * max(1.0, abs(target)):
            break
        if f > 0:
            lo = delta
        else:
            hi = delta
        var = float(xt @ (c - mean) ** 2)
        step = f / var if var > 0 else math.nan
        cand = delta + step
        if not math.isfinite(cand) or cand <= lo or cand >= hi:
            if math.isfinite(lo) and math.isfinite(hi):
                cand = 0.5 * (lo + hi)
            elif math.isfinite(lo):
                cand = lo + max(1.0, 2 * abs(lo))
            else:
                cand = hi - max(1.0, 2 * abs(hi))
        if abs(cand - delta) <= 1e-15 * max(1.0, abs(delta)):
            break
        delta = cand
    return delta


def _restrict(x, c, to_min):
    on = x > 0
    ext = c[on].min() if to_min else c[on].max()
    keep = on & (np.abs(c - ext) <= _EXTREME_TOL * max(1.0, abs(ext)))
    y = np.where(keep, x, 0.0)
    return y / y.sum()


def bregman_project(prior, eq_rows, eq_rhs, le_rows, le_rhs, *, support=None,
                    config: Config = DEFAULT) -> SolveReport:
    """Cyclic Bregman projections with dense world rows (``x . row <= rhs`` or ``=``)."""
    p = np.asarray(prior, dtype=np.float64)
    E = np.asarray(eq_rows, dtype=np.float64).reshape(-1, p.size)
    I = np.asarray(le_rows, dtype=np.float64).reshape(-1, p.size)
    e = np.asarray(eq_rhs, dtype=np.float64).reshape(-1)
    g = np.asarray(le_rhs, dtype=np.float64).reshape(-1)
    x = p.copy()
    if support is not None:
        x = np.where(support, x, 0.0)
    if x.sum() <= 0:
        raise SupportError("the prior puts no mass on worlds compatible with the constraints")
    x /= x.sum()
    mu = np.zeros(I.shape[0])
    sweeps = 0
    converged = False
    moved = 0.0

    def infeasible(what):
        raise SupportError(f"{what} cannot be met by any distribution supported on the prior's worlds")

    def step(x_new):
        nonlocal x, moved
        moved = max(moved, float(np.abs(x_new - x).max()))
        x = x_new

    for sweeps in range(1, config.bregman_max_sweeps + 1):
        # largest single-projection move; a sweep can return to its start while multipliers still drain
        moved = 0.0
        for j in range(E.shape[0]):
            c = E[j]
            on = x > 0
            if e[j] < c[on].min() - 1e-9 or e[j] > c[on].max() + 1e-9:
                infeasible(f"equality row {j}")
            delta = _bind(x, c, e[j])
            if math.isinf(delta):
                step(_restrict(x, c, to_min=delta > 0))
            elif delta != 0.0:
                step(_tilt(_log(x), c, delta))
        for j in range(I.shape[0]):
            c = I[j]
            on = x > 0
            if g[j] < c[on].min() - 1e-9:
                infeasible(f"inequality row {j}")
            if float(x @ c) <= g[j] and mu[j] == 0.0:
                continue
            delta = _bind(x, c, g[j])
            if math.isinf(delta) and delta > 0:
                step(_restrict(x, c, to_min=True))
                mu[j] = math.inf
                continue
            delta = max(delta, -mu[j])
            if delta != 0.0 and math.isfinite(delta):
                mu[j] += delta
                step(_tilt(_log(x), c, delta))
        if moved < config.bregman_tol:
            converged = True
            break
    resid = max(
        np.abs(E @ x - e).max(initial=0.0),
        (I @ x - g).max(initial=0.0),
    )
    on = x > 0
    obj = float(np.sum(x[on] * (np.log(x[on]) - np.log(p[on])))) if np.all(p[on] > 0) else math.inf
    status = Status.OPTIMAL if converged and resid <= config.solver_tol else Status.ITERATION_LIMIT
    return SolveReport(x, obj, float(resid), sweeps, status,
                       "" if status is Status.OPTIMAL else "Bregman sweeps did not converge")


def maximal_support(spec: PolytopeSpec, allowed=None) -> np.ndarray:
    """Worlds that some feasible distribution charges (one homogenized LP).

    ``allowed`` optionally masks out worlds that must stay empty.

    Maximizes ``sum(t)`` over ``0 <= t <= 1, t <= x`` with ``x`` ranging over
    the cone generated by the feasible set; any optimum has ``t = 1``
    exactly on the maximal support.
    """
    N = spec.dimension
    G = spec.G.toarray()
    A = spec.A.toarray()
    # variables: x (N), t (N), tau (1)
    c = np.concatenate([np.zeros(N), -np.ones(N), [0.0]])
    A_ub = [np.hstack([G, np.zeros((G.shape[0], N)), -spec.h[:, None]]),
            np.hstack([-np.eye(N), np.eye(N), np.zeros((N, 1))])]
    b_ub = np.zeros(G.shape[0] + N)
    A_eq = np.hstack([A, np.zeros((A.shape[0], N)), -spec.b[:, None]])
    b_eq = np.zeros(A.shape[0])
    if allowed is None:
        allowed = np.ones(N, dtype=bool)
    bounds = ([(0, None) if a else (0, 0) for a in allowed]
              + [(0, 1) if a else (0, 0) for a in allowed] + [(0, None)])
    res = linprog(c, A_ub=np.vstack(A_ub), b_ub=b_ub, A_eq=A_eq if A.shape[0] else None,
                  b_eq=b_eq if A.shape[0] else None, bounds=bounds, method="highs")
    if res.status != 0:
        return np.zeros(N, dtype=bool)
    return res.x[N:2 * N] > 0.5


def project_kl(prior, spec: PolytopeSpec, *, config: Config = DEFAULT) -> SolveReport:
    """I-projection of ``prior`` onto a polytope lying in the probability simplex.

    ``spec`` must contain the normalization row and nonnegativity bounds.
    Returns an INFEASIBLE report when no distribution satisfies ``spec`` or
    when every feasible distribution needs a world the prior excludes.
    """
    p = np.asarray(prior, dtype=np.float64)
    supp = maximal_support(spec, allowed=p > 0)
    if not supp.any():
        if not maximal_support(spec).any():
            return SolveReport(None, math.inf, math.inf, 0, Status.INFEASIBLE, "constraints are inconsistent")
        return SolveReport(None, math.inf, math.inf, 0, Status.INFEASIBLE,
                           "support mismatch: every feasible distribution charges a world the prior excludes")
    try:
        return bregman_project(p, spec.A.toarray(), spec.b, spec.G.toarray(), spec.h,
                               support=supp, config=config)
    except SupportError as exc:
        return SolveReport(None, math.inf, math.inf, 0, Status.INFEASIBLE, f"support mismatch: {exc}")
