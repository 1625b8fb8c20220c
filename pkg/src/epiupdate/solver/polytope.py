from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


def _as_csr(mat, n):
    if mat is None:
        return sp.csr_matrix((0, n))
    if sp.issparse(mat):
        out = sp.csr_matrix(mat, dtype=np.float64)
    else:
        arr = np.atleast_2d(np.asarray(mat, dtype=np.float64))
        if arr.size == 0:
            arr = arr.reshape(0, n)
        out = sp.csr_matrix(arr)
    out.sum_duplicates()
    out.eliminate_zeros()
    return out


def _as_vec(v, m):
    if v is None:
        return np.zeros(m)
    return np.asarray(v, dtype=np.float64).reshape(-1)


@dataclass(frozen=True)
class PolytopeSpec:
    """``{x : G x <= h, A x = b, lower <= x <= upper}`` in ``dimension`` coordinates.

    Rows are stored as CSR matrices; ``lower``/``upper`` may hold infinities.
    """

    dimension: int
    G: sp.csr_matrix
    h: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def build(cls, dimension, G=None, h=None, A=None, b=None, lower=None, upper=None) -> "PolytopeSpec":
        n = int(dimension)
        Gm, Am = _as_csr(G, n), _as_csr(A, n)
        hv, bv = _as_vec(h, Gm.shape[0]), _as_vec(b, Am.shape[0])
        lo = np.full(n, -np.inf) if lower is None else np.broadcast_to(np.asarray(lower, float), (n,)).copy()
        hi = np.full(n, np.inf) if upper is None else np.broadcast_to(np.asarray(upper, float), (n,)).copy()
        return cls(n, Gm, hv, Am, bv, lo, hi)

    def __post_init__(self):
        n = self.dimension
        if self.G.shape[1] != n or self.A.shape[1] != n:
            raise ValueError("constraint rows must have the polytope dimension")
        if self.h.shape != (self.G.shape[0],) or self.b.shape != (self.A.shape[0],):
            raise ValueError("right-hand sides do not match the number of rows")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise ValueError("box bounds must have the polytope dimension")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n_rows(self) -> int:
        return self.G.shape[0] + self.A.shape[0]

    def violation(self, x) -> float:
        """Largest violation over all rows and bounds (0 for feasible points)."""
        x = np.asarray(x, dtype=np.float64)
        parts = [0.0]
        if self.G.shape[0]:
            parts.append(float(np.max(self.G @ x - self.h)))
        if self.A.shape[0]:
            parts.append(float(np.max(np.abs(self.A @ x - self.b))))
        with np.errstate(invalid="ignore"):
            parts.append(float(np.max(self.lower - x)))
            parts.append(float(np.max(x - self.upper)))
        return max(parts)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class SolveReport:
    point: np.ndarray | None
    objective: float
    violation: float
    iterations: int
    status: Status
    message: str = ""
    # multipliers in the Lagrangian  f + dual_ineq.(Gx-h) + dual_eq.(Ax-b) + dual_lower.(lo-x) + dual_upper.(x-hi)
    # with f = sum(w * (x - target)**2) / 2; `objective` itself is reported without the 1/2
    dual_ineq: np.ndarray | None = field(default=None, repr=False)
    dual_eq: np.ndarray | None = field(default=None, repr=False)
    dual_lower: np.ndarray | None = field(default=None, repr=False)
    dual_upper: np.ndarray | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL
