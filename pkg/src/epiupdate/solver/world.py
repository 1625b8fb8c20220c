"""Least-squares projection in world space.

Constraint rows over worlds are affine in the membership bits, so each row
is stored compactly as ``(a0, a_1, ..., a_n)`` meaning
``h(w) = a0 + sum(a_i for i in w)``; the constraint reads
``sum_w x[w] * h(w) <= rhs`` (or ``=``). Nonnegativity of ``x`` is implicit.

Small problems go to the dense active-set solver. Larger ones are solved
through the dual: ``x(y) = max(p - K^T y, 0)`` and the concave dual is
maximized by a projected semismooth Newton method in the (few) row
multipliers, followed by an exact solve on the identified support.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..config import DEFAULT, Config
from ..errors import SolverError
from .polytope import PolytopeSpec, SolveReport, Status
from .qp import project_least_squares


def dense_rows(rows, n):
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.size == 0:
        return np.zeros((0, 1 << n))
    return np.vstack([kernels.world_affine(r[1:], r[0], n) for r in rows])


def _stack(eq_rows, le_rows, n):
    E = np.asarray(eq_rows, dtype=np.float64).reshape(-1, n + 1)
    I = np.asarray(le_rows, dtype=np.float64).reshape(-1, n + 1)
    return E, I


def project_world(prior, n, eq_rows, eq_rhs, le_rows=(), le_rhs=(), *,
                  config: Config = DEFAULT, method: str | None = None) -> SolveReport:
    p = np.asarray(prior, dtype=np.float64)
    E, I = _stack(eq_rows, le_rows, n)
    e = np.asarray(eq_rhs, dtype=np.float64).reshape(-1)
    g = np.asarray(le_rhs, dtype=np.float64).reshape(-1)
    if method is None:
        method = "dense" if (1 << n) <= config.dense_world_limit else "dual"
    if method == "dense":
        spec = PolytopeSpec.build(1 << n, dense_rows(I, n), g, dense_rows(E, n), e, lower=0.0)
        return project_least_squares(p, spec, config=config)
    if method == "dual":
        return _dual_newton(p, n, E, e, I, g, config)
    raise ValueError(f"unknown method {method!r}")


class _Dual:
    def __init__(self, p, n, C, b, n_eq):
        self.p, self.n, self.C, self.b, self.n_eq = p, n, C, b, n_eq

    def shift(self, y):
        v = self.C.T @ y
        return kernels.world_affine(v[1:], v[0], self.n)

    def moments(self, x):
        return np.concatenate([[x.sum()], kernels.world_marginals(x, self.n)])

    def evaluate(self, y):
        v = self.p - self.shift(y)
        x = np.maximum(v, 0.0)
        phi = 0.5 * float(x @ x) + float(self.b @ y)
        grad = self.b - self.C @ self.moments(x)
        return phi, grad, x, v

    def hessian(self, support):
        return self.C @ kernels.world_gram(support.astype(np.float64), self.n) @ self.C.T


def _dual_newton(p, n, E, e, I, g, config: Config) -> SolveReport:
    C = np.vstack([E, I])
    b = np.concatenate([e, g])
    k, n_eq = C.shape[0], E.shape[0]
    dual = _Dual(p, n, C, b, n_eq)
    ineq = np.arange(k) >= n_eq
    y = np.zeros(k)
    phi, grad, x, v = dual.evaluate(y)
    tol = 1e-13 * max(1.0, float(np.abs(b).max(initial=0.0)))
    it = 0
    for it in range(1, 501):
        pg = grad.copy()
        pg[ineq] = y[ineq] - np.maximum(y[ineq] - grad[ineq], 0.0)
        pg_norm = np.abs(pg).max(initial=0.0)
        if pg_norm <= tol:
            break
        # multipliers within eps of zero and pushed down stay at zero this step
        eps = min(1e-3, pg_norm)
        fixed = ineq & (y <= eps) & (grad > 0)
        free = ~fixed
        H = dual.hessian(v > 0)
        newton = -grad.copy()
        if free.any():
            Hf = H[np.ix_(free, free)]
            reg = 1e-12 * (1.0 + np.trace(Hf) / Hf.shape[0])
            newton[free] = np.linalg.lstsq(Hf + reg * np.eye(Hf.shape[0]), -grad[free], rcond=None)[0]
        step = None
        for d in (newton, -grad):
            step = _line_search(dual, y, phi, grad, d, ineq)
            if step is not None:
                break
        if step is None:
            break
        y, phi, grad, x, v = step
    x_best = _polish(dual, y, v, ineq, config)
    if x_best is None:
        x_best = x
    resid = _residual(dual, x_best, ineq)
    status = Status.OPTIMAL if resid <= 1e-9 else Status.ITERATION_LIMIT
    return SolveReport(
        point=x_best,
        objective=float(np.sum((x_best - p) ** 2)),
        violation=resid,
        iterations=it,
        status=status,
        message="" if status is Status.OPTIMAL else "dual Newton did not reach the feasibility tolerance",
    )


def _line_search(dual, y, phi, grad, d, ineq):
    """Armijo backtracking along the projected arc; None if no decrease is found."""
    alpha = 1.0
    while alpha >= 1e-12:
        y_new = y + alpha * d
        y_new[ineq] = np.maximum(y_new[ineq], 0.0)
        phi_new, grad_new, x_new, v_new = dual.evaluate(y_new)
        if phi_new <= phi + 1e-4 * float(grad @ (y_new - y)) + 1e-15 * abs(phi):
            return y_new, phi_new, grad_new, x_new, v_new
        alpha *= 0.5
    return None


def _residual(dual, x, ineq):
    r = dual.C @ dual.moments(x) - dual.b
    return max(np.abs(r[~ineq]).max(initial=0.0), r[ineq].max(initial=0.0), float(-x.min(initial=0.0)))


def _polish(dual, y, v, ineq, config):
    """Exact solve with the support and active rows read off the dual iterate."""
    support = v > 1e-12
    rows = ~ineq | (y > 1e-12)
    Ca = dual.C[rows]
    if Ca.shape[0] == 0:
        x = np.maximum(dual.p, 0.0)
        return x if _residual(dual, x, ineq) <= 1e-12 else None
    gram = kernels.world_gram(support.astype(np.float64), dual.n)
    M = Ca @ gram @ Ca.T
    rhs = Ca @ dual.moments(np.where(support, dual.p, 0.0)) - dual.b[rows]
    lam = np.linalg.lstsq(M, rhs, rcond=None)[0]
    full = np.zeros(dual.C.shape[0])
    full[rows] = lam
    shifted = dual.p - dual.shift(full)
    x = np.where(support, shifted, 0.0)
    tol = 1e-10
    if x.min(initial=0.0) < -tol:
        return None
    if (full[ineq] < -tol).any():
        return None
    if (shifted[~support] > tol).any():
        return None
    x = np.maximum(x, 0.0)
    if _residual(dual, x, ineq) > 1e-11:
        return None
    return x
