"""Two-phase revised simplex with Bland's rule.

Bland's rule (lowest eligible index enters; among minimum-ratio rows the
lowest basic variable index leaves) guarantees termination under degeneracy,
and makes every solve a deterministic function of the input data.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import Infeasible, Unbounded
from .problem import FEAS_TOL, Basis, StandardLp, basic_solution


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolveResult:
    x_hat: np.ndarray
    basis: Basis
    objective: float
    dual: np.ndarray
    slack: np.ndarray
    status: LpStatus = LpStatus.OPTIMAL

    def __post_init__(self):
        for name in ("x_hat", "dual", "slack"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _bland(A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: np.ndarray):
    """Run Bland-rule pivots from ``basis`` until optimal or unbounded.

    ``b`` must be nonnegative and ``basis`` must index a feasible square
    block.  The factorization is redone each pivot; instances are small.
    """
    k, n = A.shape
    enter_tol = 1e-9 * (1.0 + np.abs(c).max(initial=0.0))
    pivot_tol = 1e-10 * (1.0 + np.abs(A).max(initial=0.0))
    max_pivots = 2000 + 40 * (n + k)
    basis = basis.copy()
    for _ in range(max_pivots):
        lu_piv = lu_factor(A[:, basis], check_finite=False)
        x_b = lu_solve(lu_piv, b, check_finite=False)
        y = lu_solve(lu_piv, c[basis], trans=1, check_finite=False)
        reduced = c - A.T @ y
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -enter_tol)
        if candidates.size == 0:
            return basis, x_b
        entering = int(candidates[0])
        direction = lu_solve(lu_piv, A[:, entering], check_finite=False)
        rows = np.flatnonzero(direction > pivot_tol)
        if rows.size == 0:
            raise Unbounded(f"column {entering} has no blocking row")
        ratios = np.maximum(x_b[rows], 0.0) / direction[rows]
        best = ratios.min()
        ties = rows[np.flatnonzero(ratios <= best + 1e-12 * (1.0 + best))]
        leaving_row = int(ties[np.argmin(basis[ties])])
        basis[leaving_row] = entering
    raise RuntimeError("pivot budget exhausted; the instance may be ill-conditioned")


def solve(lp: StandardLp, *, feas_tol: float = FEAS_TOL) -> SolveResult:
    """Optimal vertex, basis, and dual certificate for a standard-form LP.

    Raises ``Infeasible`` when phase one cannot clear the artificial
    variables and ``Unbounded`` when phase two detects a descent ray.
    """
    k, m = lp.k, lp.m
    flip = np.where(lp.b < 0, -1.0, 1.0)
    A1 = lp.A * flip[:, None]
    b1 = lp.b * flip

    # phase one: minimize the total artificial mass
    A_art = np.hstack([A1, np.eye(k)])
    c_art = np.concatenate([np.zeros(m), np.ones(k)])
    basis = np.arange(m, m + k)
    basis, x_b = _bland(A_art, b1, c_art, basis)
    if float(x_b[basis >= m].sum(initial=0.0)) > feas_tol:
        raise Infeasible("phase one terminated with positive artificial mass")
    basis = _evict_artificials(A_art, basis, m)

    basis, _ = _bland(A1, b1, lp.c, basis)
    final = Basis(tuple(int(i) for i in sorted(basis)))
    point = basic_solution(lp, final, feas_tol=feas_tol)
    dual = np.linalg.solve(lp.A[:, final.indices].T, lp.c[list(final.indices)])
    slack = lp.c - lp.A.T @ dual
    return SolveResult(
        x_hat=point.x,
        basis=final,
        objective=float(lp.c @ point.x),
        dual=dual,
        slack=slack,
    )


def _evict_artificials(A_art: np.ndarray, basis: np.ndarray, m: int) -> np.ndarray:
    """Swap zero-valued artificial columns out of the basis.

    After a successful phase one every artificial in the basis sits at value
    zero; full row rank of the real columns guarantees a replacement pivot.
    """
    basis = basis.copy()
    pivot_tol = 1e-10 * (1.0 + np.abs(A_art).max(initial=0.0))
    for row in range(len(basis)):
        if basis[row] < m:
            continue
        lu_piv = lu_factor(A_art[:, basis], check_finite=False)
        for j in range(m):
            if j in basis:
                continue
            column = lu_solve(lu_piv, A_art[:, j], check_finite=False)
            if abs(column[row]) > pivot_tol:
                basis[row] = j
                break
        else:
            raise RuntimeError("could not replace a basic artificial variable")
    return basis


def verify_kkt(lp: StandardLp, result: SolveResult, *, feas_tol: float = FEAS_TOL) -> bool:
    """Check stationarity, primal/dual feasibility, and complementary slackness."""
    kkt_tol = 1e-7 * (1.0 + np.abs(lp.c).max(initial=0.0) + np.abs(lp.b).max(initial=0.0))
    x, lam, s = result.x_hat, result.dual, result.slack
    if np.abs(lp.A.T @ lam + s - lp.c).max() > kkt_tol:
        return False
    if np.abs(lp.A @ x - lp.b).max() > kkt_tol:
        return False
    if x.min(initial=0.0) < -feas_tol:
        return False
    if s.min(initial=0.0) < -feas_tol:
        return False
    return bool(abs(float(x @ s)) <= kkt_tol)
