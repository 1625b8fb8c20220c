"""Linear maximization over a polytope (HiGHS through scipy)."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..errors import PreconditionError, SolverError
from .polytope import PolytopeSpec, SolveReport, Status


def maximize_linear(objective, spec: PolytopeSpec) -> SolveReport:
    c = np.asarray(objective, dtype=np.float64).reshape(-1)
    if c.shape != (spec.dimension,):
        raise ValueError("objective row must have the polytope dimension")
    bounds = [(None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
              for lo, hi in zip(spec.lower, spec.upper)]
    res = linprog(
        -c,
        A_ub=spec.G if spec.G.shape[0] else None, b_ub=spec.h if spec.G.shape[0] else None,
        A_eq=spec.A if spec.A.shape[0] else None, b_eq=spec.b if spec.A.shape[0] else None,
        bounds=bounds, method="highs",
    )
    if res.status == 2:
        raise PreconditionError("maximize_linear called on an infeasible polytope")
    if res.status == 3:
        raise SolverError("linear objective is unbounded over the polytope")
    if res.status != 0:
        return SolveReport(None, float("nan"), float("nan"), int(res.nit), Status.ITERATION_LIMIT, res.message)
    x = res.x
    return SolveReport(x, float(c @ x), spec.violation(x), int(res.nit), Status.OPTIMAL)


def bound_slack(spec: PolytopeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Which coordinates can leave their lower / upper bound inside the polytope.

    Solved as one LP over the homogenized cone ``{(x, tau)}``: maximize
    ``sum(t) + sum(s)`` with ``t_i <= x_i - lo_i*tau`` and
    ``s_i <= hi_i*tau - x_i``, all in ``[0, 1]``. The cone is closed under
    addition, so one optimum attains every attainable ``t_i = 1`` and
    ``s_i = 1`` at once. Infinite bounds always count as slack. An empty
    polytope yields all-False masks.
    """
    n = spec.dimension
    lo, hi = spec.lower, spec.upper
    flo, fhi = np.isfinite(lo), np.isfinite(hi)
    lo0, hi0 = np.where(flo, lo, 0.0), np.where(fhi, hi, 0.0)
    I = sp.identity(n, format="csr")
    Z = sp.csr_matrix((n, n))
    # variables: x (n), tau, t (n), s (n)
    blocks = [
        sp.hstack([spec.G, sp.csr_matrix(-spec.h[:, None]), sp.csr_matrix((spec.G.shape[0], 2 * n))]),
        sp.hstack([-I[flo], sp.csr_matrix(lo0[flo][:, None]), sp.csr_matrix((int(flo.sum()), 2 * n))]),
        sp.hstack([I[fhi], sp.csr_matrix(-hi0[fhi][:, None]), sp.csr_matrix((int(fhi.sum()), 2 * n))]),
        sp.hstack([-I[flo], sp.csr_matrix(lo0[flo][:, None]), I[flo], Z[flo]]),
        sp.hstack([I[fhi], sp.csr_matrix(-hi0[fhi][:, None]), Z[fhi], I[fhi]]),
    ]
    A_ub = sp.vstack(blocks, format="csr")
    A_eq = sp.hstack([spec.A, sp.csr_matrix(-spec.b[:, None]), sp.csr_matrix((spec.A.shape[0], 2 * n))])
    c = np.concatenate([np.zeros(n + 1), -flo.astype(float), -fhi.astype(float)])
    bounds = ([(None, None)] * n + [(0, None)]
              + [(0, 1) if f else (0, 0) for f in flo] + [(0, 1) if f else (0, 0) for f in fhi])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(A_ub.shape[0]),
                  A_eq=A_eq if spec.A.shape[0] else None,
                  b_eq=np.zeros(spec.A.shape[0]) if spec.A.shape[0] else None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"bound-slack LP failed: {res.message}")
    t, s = res.x[n + 1:2 * n + 1], res.x[2 * n + 1:]
    return (t > 0.5) | ~flo, (s > 0.5) | ~fhi
