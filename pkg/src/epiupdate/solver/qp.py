"""Least-squares projection onto polytopes with a dual active-set method.

The solver follows Goldfarb and Idnani: start from the unconstrained
minimizer (the target itself), repeatedly pick a violated constraint and
move along primal/dual step directions until it becomes active, dropping
blocking constraints whose multipliers would turn negative. The active
normals are kept as a QR factorization ``N_A = J[:, :q] @ R`` that is
updated by one Householder reflection per addition and a Givens sweep per
deletion. The objective Hessian is the identity (diagonal weights are
handled by rescaling coordinates), so ``J`` starts as the identity matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular

from .. import kernels
from ..config import DEFAULT, Config
from .polytope import PolytopeSpec, SolveReport, Status

_DEP_EPS = 1e-24  # squared relative norm below which a new normal counts as dependent
_R_EPS = 1e-14


def _assemble(spec: PolytopeSpec):
    """All constraints as rows ``n_i . x >= b_i`` (equalities first)."""
    n = spec.dimension
    eye = sp.identity(n, format="csr")
    lo_idx = np.flatnonzero(np.isfinite(spec.lower))
    hi_idx = np.flatnonzero(np.isfinite(spec.upper))
    N = sp.vstack([spec.A, -spec.G, eye[lo_idx], -eye[hi_idx]], format="csr")
    bvec = np.concatenate([spec.b, -spec.h, spec.lower[lo_idx], -spec.upper[hi_idx]])
    return N, bvec, lo_idx, hi_idx


@dataclass
class _Outcome:
    status: Status
    x: np.ndarray
    mult: np.ndarray  # multiplier per assembled row (>= form, sign-adjusted for equalities)
    iterations: int
    message: str = ""


class _DualActiveSet:
    def __init__(self, target, N, bvec, n_eq, max_iter, tol):
        self.t = np.asarray(target, dtype=np.float64)
        self.n = n = self.t.size
        self.N = N
        self.b = bvec.astype(np.float64).copy()
        self.n_eq = n_eq
        self.max_iter = max_iter
        self.tol = tol
        self.m = N.shape[0]
        self.sign = np.ones(self.m)
        self.norms = np.sqrt(np.asarray(N.multiply(N).sum(axis=1)).ravel())
        self.J = np.eye(n)
        self.R = np.zeros((n, n))
        self.q = 0
        self.act: list[int] = []
        self.u = np.zeros(n + 1)
        self.is_active = np.zeros(self.m, dtype=bool)
        self.x = self.t.copy()
        self.iters = 0

    # -- helpers ------------------------------------------------------------
    def row(self, i):
        lo, hi = self.N.indptr[i], self.N.indptr[i + 1]
        return self.N.indices[lo:hi], self.N.data[lo:hi] * self.sign[i]

    def slack(self, i):
        idx, vals = self.row(i)
        return float(vals @ self.x[idx]) - self.b[i]

    def _d(self, idx, vals):
        return self.J[idx].T @ vals

    def add(self, i, d, mult):
        q = self.q
        v = d[q:].copy()
        nv = np.linalg.norm(v)
        alpha = -nv if v[0] > 0 else nv
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn > 0.0:
            v /= vn
            Jq = self.J[:, q:]
            Jq -= 2.0 * np.outer(Jq @ v, v)
        self.R[:q, q] = d[:q]
        self.R[q, q] = alpha
        self.u[q] = mult
        self.q = q + 1
        self.act.append(i)
        self.is_active[i] = True

    def drop(self, pos):
        q = self.q
        kernels.qr_drop(self.R, self.J, pos, q)
        self.is_active[self.act.pop(pos)] = False
        self.u[pos:q - 1] = self.u[pos + 1:q]
        self.u[q - 1] = 0.0
        self.q = q - 1

    # -- main step ------------------------------------------------------------
    def push(self, p):
        """Make constraint ``p`` active; returns a Status or None on success."""
        idx, vals = self.row(p)
        norm2 = max(self.norms[p] ** 2, 1e-300)
        up = 0.0
        while True:
            self.iters += 1
            if self.iters > self.max_iter:
                return Status.ITERATION_LIMIT
            q = self.q
            d = self._d(idx, vals)
            d2 = d[q:]
            zz = float(d2 @ d2)
            r = solve_triangular(self.R[:q, :q], d[:q]) if q else np.empty(0)
            t1, k = math.inf, -1
            if q:
                cand = np.flatnonzero((r > _R_EPS) & (np.asarray(self.act) >= self.n_eq))
                if cand.size:
                    ratios = self.u[cand] / r[cand]
                    best = ratios.min()
                    ties = cand[ratios <= best]
                    k = int(min(ties, key=lambda pos: self.act[pos]))
                    t1 = float(self.u[k] / r[k])
            s = float(vals @ self.x[idx]) - self.b[p]
            t2 = -s / zz if zz > _DEP_EPS * norm2 else math.inf
            t = min(t1, t2)
            if not math.isfinite(t):
                return Status.INFEASIBLE
            if not math.isfinite(t2):
                self.u[:q] -= t * r
                up += t
                self.drop(k)
                continue
            self.x += t * (self.J[:, q:] @ d2)
            self.u[:q] -= t * r
            up += t
            if t2 <= t1:
                self.add(p, d, up)
                return None
            self.drop(k)

    def add_equalities(self):
        for p in range(self.n_eq):
            s = self.slack(p)
            if s > 0:
                self.sign[p] = -1.0
                self.b[p] = -self.b[p]
                s = -s
            idx, vals = self.row(p)
            d = self._d(idx, vals)
            if float(d[self.q:] @ d[self.q:]) <= _DEP_EPS * max(self.norms[p] ** 2, 1e-300):
                if abs(s) <= self.tol * max(1.0, self.norms[p]):
                    continue
                return Status.INFEASIBLE
            status = self.push(p)
            if status is not None:
                return status
        return None

    def warm_start(self, rows):
        """Seed the active set with ``rows`` and drop those with negative multipliers."""
        for p in rows:
            if p < self.n_eq or self.is_active[p]:
                continue
            idx, vals = self.row(p)
            d = self._d(idx, vals)
            if float(d[self.q:] @ d[self.q:]) > _DEP_EPS * max(self.norms[p] ** 2, 1e-300):
                self.add(p, d, 0.0)
        while True:
            x, u = self.solve_active()
            neg = [pos for pos in range(self.q) if self.act[pos] >= self.n_eq and u[pos] < 0]
            if not neg:
                self.x, self.u[:self.q] = x, u
                return
            self.drop(min(neg, key=lambda pos: u[pos]))

    def solve_active(self):
        """Exact minimizer on the affine hull of the active set, plus multipliers."""
        q = self.q
        if q == 0:
            return self.t.copy(), np.empty(0)
        NA = self.J[:, :q] @ self.R[:q, :q]
        w = self.b[self.act] - NA.T @ self.t
        y = solve_triangular(self.R[:q, :q], w, trans="T")
        u = solve_triangular(self.R[:q, :q], y)
        return self.t + NA @ u, u

    def run(self, warm_rows=()):
        status = self.add_equalities()
        if status is None and len(warm_rows):
            self.warm_start(warm_rows)
        N_in = self.N[self.n_eq:]
        b_in = self.b[self.n_eq:]
        scale = np.maximum(1.0, self.norms[self.n_eq:])
        while status is None:
            s = (N_in @ self.x - b_in) / scale
            s[self.is_active[self.n_eq:]] = np.inf
            viol = np.flatnonzero(s < -self.tol)
            if viol.size == 0:
                break
            p = self.n_eq + int(viol[np.argmin(s[viol])])
            status = self.push(p)
        if status is None:
            status = Status.OPTIMAL
            x_ref, u_ref = self.solve_active()
            if self._max_viol(x_ref) <= max(self._max_viol(self.x), self.tol):
                self.x = x_ref
                self.u[:self.q] = u_ref
        mult = np.zeros(self.m)
        for pos, i in enumerate(self.act):
            mult[i] = self.u[pos] * self.sign[i]
        return _Outcome(status, self.x, mult, self.iters)

    def _max_viol(self, x):
        s = self.N @ x - self.sign * self.b
        eq = np.abs(s[:self.n_eq]).max(initial=0.0)
        ineq = (-s[self.n_eq:]).max(initial=0.0)
        return max(eq, ineq)


def _solve(target, spec: PolytopeSpec, config: Config, weights=None, start=None) -> SolveReport:
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    n = spec.dimension
    if target.shape != (n,):
        raise ValueError(f"target has {target.size} coordinates, polytope has {n}")
    N, bvec, lo_idx, hi_idx = _assemble(spec)
    scale = None
    if weights is not None:
        scale = np.sqrt(np.asarray(weights, dtype=np.float64))
        N = sp.csr_matrix(N @ sp.diags(1.0 / scale))
        target_s = target * scale
    else:
        target_s = target
    n_eq = spec.A.shape[0]
    max_iter = config.pivot_factor * (n + N.shape[0])
    solver = _DualActiveSet(target_s, N, bvec, n_eq, max_iter, config.active_set_tol)
    warm = ()
    if start is not None:
        start = np.asarray(start, dtype=np.float64)
        start_s = start if scale is None else start * scale
        s = N @ start_s - bvec
        warm = [i for i in range(n_eq, N.shape[0]) if abs(s[i]) <= 1e-9 * max(1.0, solver.norms[i])]
    out = solver.run(warm)
    x = out.x if scale is None else out.x / scale
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    mG, mA = spec.G.shape[0], n_eq
    mult = out.mult
    dual_eq = -mult[:mA]
    dual_ineq = mult[mA:mA + mG]
    dual_lower = np.zeros(n)
    dual_upper = np.zeros(n)
    dual_lower[lo_idx] = mult[mA + mG:mA + mG + lo_idx.size]
    dual_upper[hi_idx] = mult[mA + mG + lo_idx.size:]
    point = x if out.status is not Status.INFEASIBLE else None
    messages = {
        Status.OPTIMAL: "",
        Status.INFEASIBLE: "constraints are inconsistent",
        Status.ITERATION_LIMIT: f"active-set pivot limit {max_iter} reached",
    }
    return SolveReport(
        point=point,
        objective=float(np.sum(w * (x - target) ** 2)),
        violation=spec.violation(x),
        iterations=out.iterations,
        status=out.status,
        message=messages[out.status],
        dual_ineq=dual_ineq, dual_eq=dual_eq, dual_lower=dual_lower, dual_upper=dual_upper,
    )


def project_least_squares(target, spec: PolytopeSpec, *, config: Config = DEFAULT, start=None) -> SolveReport:
    """Closest point of ``spec`` to ``target`` in the Euclidean norm.

    ``start`` is an optional feasible point whose tight constraints seed the
    active set; it changes the path, never the answer.
    """
    return _solve(target, spec, config, start=start)


def project_weighted(target, spec: PolytopeSpec, weights, *, config: Config = DEFAULT) -> SolveReport:
    """Minimize ``sum(weights * (x - target)**2)`` over ``spec``; weights must be positive."""
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    return _solve(target, spec, config, weights=weights)


@dataclass
class Feasibility:
    feasible: bool
    witness: np.ndarray | None
    min_violation: float  # phase-1 optimum: sum of squared row violations
    status: Status

    def __bool__(self):
        return self.feasible


def _reference_point(spec):
    lo, hi = spec.lower, spec.upper
    mid = np.where(np.isfinite(lo) & np.isfinite(hi), 0.5 * (lo + hi), 0.0)
    return np.clip(mid, lo, hi)


def feasible(spec: PolytopeSpec, *, config: Config = DEFAULT) -> Feasibility:
    """Phase-1 test: minimize the sum of squared row violations over the box.

    Slack variables make the phase-1 problem always solvable; a tiny
    proximal term on the original coordinates keeps it strictly convex.
    Feasible sets are confirmed by projecting the phase-1 point, which also
    yields the returned witness.
    """
    n = spec.dimension
    mG, mA = spec.G.shape[0], spec.A.shape[0]
    G1 = sp.hstack([spec.G, -sp.identity(mG), sp.csr_matrix((mG, mA))], format="csr")
    A1 = sp.hstack([spec.A, sp.csr_matrix((mA, mG)), -sp.identity(mA)], format="csr")
    lower = np.concatenate([spec.lower, np.zeros(mG), np.full(mA, -np.inf)])
    upper = np.concatenate([spec.upper, np.full(mG + mA, np.inf)])
    aug = PolytopeSpec.build(n + mG + mA, G1, spec.h, A1, spec.b, lower, upper)
    x0 = _reference_point(spec)
    target = np.concatenate([x0, np.zeros(mG + mA)])
    weights = np.concatenate([np.full(n, config.phase1_reg), np.ones(mG + mA)])
    rep = _solve(target, aug, config, weights=weights)
    if rep.status is Status.ITERATION_LIMIT:
        return Feasibility(False, None, math.nan, Status.ITERATION_LIMIT)
    x = np.clip(rep.point[:n], spec.lower, spec.upper)
    sq = float(np.sum(np.maximum(spec.G @ x - spec.h, 0.0) ** 2) + np.sum((spec.A @ x - spec.b) ** 2))
    if sq > config.phase1_tol:
        return Feasibility(False, None, sq, Status.INFEASIBLE)
    polished = _solve(x, spec, config)
    if polished.status is Status.OPTIMAL and polished.violation <= 1e-8:
        return Feasibility(True, polished.point, sq, Status.OPTIMAL)
    if polished.status is Status.ITERATION_LIMIT:
        return Feasibility(False, None, sq, Status.ITERATION_LIMIT)
    return Feasibility(False, None, sq, Status.INFEASIBLE)
