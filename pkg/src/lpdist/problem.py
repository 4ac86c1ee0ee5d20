"""Standard-form linear programs and exhaustive basis enumeration.

A program is ``min <c, x>  subject to  A x = b, x >= 0`` with ``A`` of full
row rank.  Everything here is deliberately desk-scale: bases are enumerated
outright, which is what makes the enumeration usable as an oracle against
iterative solvers.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import Infeasible, InstanceTooLarge, SingularBasis


def quiet_lu(block: np.ndarray):
    """LU-factor without the singular-matrix warning (callers test the diagonal)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        return lu_factor(block, check_finite=False)

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-8
ENUM_CAP = 10**6

__all__ = [
    "FEAS_TOL",
    "DEDUP_TOL",
    "ENUM_CAP",
    "StandardLp",
    "Basis",
    "BasicSolution",
    "Polytope",
    "basic_solution",
    "support",
    "enumerate_feasible_bases",
    "optimal_vertices",
    "load_lp",
    "lp_to_dict",
]


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class StandardLp:
    """Immutable standard-form program with validated shape and rank."""

    def __init__(self, A, b, c, *, drop_redundant_rows: bool = False):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        c = np.asarray(c, dtype=float).ravel()
        if A.ndim != 2:
            raise ValueError("A must be a 2-d array")
        k, m = A.shape
        if b.shape != (k,):
            raise ValueError(f"b has length {b.size}, expected {k}")
        if c.shape != (m,):
            raise ValueError(f"c has length {c.size}, expected {m}")
        if drop_redundant_rows:
            A, b = _independent_rows(A, b)
            k = A.shape[0]
        if k > m:
            raise ValueError(f"more rows ({k}) than columns ({m})")
        self.rank_tol = 1e-10 * (np.abs(A).max() if A.size else 0.0)
        if _matrix_rank(A, self.rank_tol) < k:
            raise ValueError("A does not have full row rank")
        self.A = _frozen(A)
        self.b = _frozen(b)
        self.c = _frozen(c)
        self.k = k
        self.m = m

    def with_rhs(self, b) -> "StandardLp":
        """Same constraint matrix and objective, different right-hand side."""
        return StandardLp(self.A, b, self.c)

    def __repr__(self):
        return f"StandardLp(k={self.k}, m={self.m})"


def _matrix_rank(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > max(tol, sv[0] * np.finfo(float).eps * max(A.shape))))


def _independent_rows(A: np.ndarray, b: np.ndarray):
    """Keep a maximal independent row subset; reject inconsistent duplicates."""
    tol = 1e-10 * max(1.0, np.abs(A).max() if A.size else 0.0)
    keep: list[int] = []
    for i in range(A.shape[0]):
        trial = A[keep + [i]]
        if _matrix_rank(trial, tol) == len(keep) + 1:
            keep.append(i)
    dropped = [i for i in range(A.shape[0]) if i not in keep]
    if dropped:
        # each dropped row is a combination of the kept ones; its rhs must match
        coeff, *_ = np.linalg.lstsq(A[keep].T, A[dropped].T, rcond=None)
        implied = coeff.T @ b[keep]
        if not np.allclose(implied, b[dropped], atol=1e-8 * (1 + np.abs(b).max())):
            raise Infeasible("redundant rows have inconsistent right-hand sides")
    return A[keep], b[keep]


@dataclass(frozen=True, order=True)
class Basis:
    """A sorted tuple of column indices selecting an invertible square block."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if list(idx) != sorted(set(idx)):
            raise ValueError("basis indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class BasicSolution:
    basis: Basis
    x: np.ndarray
    feasible: bool
    degenerate: bool


class Polytope:
    """A finite vertex set; duplicates within ``dedup_tol`` are merged."""

    def __init__(self, vertices, *, dedup_tol: float = DEDUP_TOL):
        arr = np.asarray(vertices, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, arr.shape[-1] if arr.ndim == 2 else 0)
        if arr.ndim != 2:
            raise ValueError("vertices must form a 2-d array")
        kept: list[np.ndarray] = []
        for v in arr:
            if not any(np.max(np.abs(v - u)) <= dedup_tol for u in kept):
                kept.append(v)
        if kept:
            order = np.lexsort(np.array(kept).T[::-1])
            arr = np.array(kept)[order]
        else:
            arr = np.zeros((0, arr.shape[1]))
        self.vertices = _frozen(arr)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return self.vertices.shape[0]

    def __repr__(self):
        return f"Polytope({len(self)} vertices, dim={self.dim})"


def factor_columns(lp: StandardLp, indices) -> tuple:
    """LU-factor ``A`` restricted to ``indices``; raise if not invertible."""
    sub = lp.A[:, list(indices)]
    if sub.shape[0] != sub.shape[1]:
        raise SingularBasis(f"column set {tuple(indices)} is not square")
    lu, piv = quiet_lu(sub)
    if np.abs(np.diag(lu)).min() <= lp.rank_tol:
        raise SingularBasis(f"columns {tuple(indices)} are singular")
    return lu, piv


def basic_solution(lp: StandardLp, basis: Basis, *, feas_tol: float = FEAS_TOL) -> BasicSolution:
    """Solve for the basic point of ``basis``: x_B = A_B^{-1} b, zero elsewhere."""
    if len(basis) != lp.k:
        raise SingularBasis(f"basis size {len(basis)} != row count {lp.k}")
    lu_piv = factor_columns(lp, basis.indices)
    x_b = lu_solve(lu_piv, lp.b, check_finite=False)
    x = np.zeros(lp.m)
    x[list(basis.indices)] = x_b
    feasible = bool(x_b.min(initial=0.0) >= -feas_tol)
    degenerate = feasible and bool(np.any(np.abs(x_b) <= feas_tol))
    return BasicSolution(basis=basis, x=x, feasible=feasible, degenerate=degenerate)


def support(x, tol: float = FEAS_TOL) -> frozenset:
    """Indices whose magnitude exceeds ``tol``."""
    x = np.asarray(x, dtype=float)
    return frozenset(int(i) for i in np.flatnonzero(np.abs(x) > tol))


def _check_enum_size(n: int, k: int, enum_cap: int):
    total = math.comb(n, k)
    if total > enum_cap:
        raise InstanceTooLarge(f"{total} candidate bases exceed the cap of {enum_cap}")
    return total


def enumerate_feasible_bases(
    lp: StandardLp, *, feas_tol: float = FEAS_TOL, enum_cap: int = ENUM_CAP
) -> list[Basis]:
    """All bases whose basic point is nonnegative, in lexicographic order."""
    _check_enum_size(lp.m, lp.k, enum_cap)
    out = []
    for combo in itertools.combinations(range(lp.m), lp.k):
        try:
            lu_piv = factor_columns(lp, combo)
        except SingularBasis:
            continue
        x_b = lu_solve(lu_piv, lp.b, check_finite=False)
        if x_b.min(initial=0.0) >= -feas_tol:
            out.append(Basis(combo))
    return out


def optimal_vertices(
    lp: StandardLp,
    *,
    feas_tol: float = FEAS_TOL,
    dedup_tol: float = DEDUP_TOL,
    enum_cap: int = ENUM_CAP,
) -> tuple[Polytope, list[Basis]]:
    """The optimal vertex set and every basis attaining the optimal value.

    Bases are kept when their objective is within ``1e-8 * (1 + |f|)`` of the
    minimum ``f`` over feasible bases.  Raises ``Infeasible`` when no feasible
    basis exists.
    """
    bases = enumerate_feasible_bases(lp, feas_tol=feas_tol, enum_cap=enum_cap)
    if not bases:
        raise Infeasible("no feasible basis")
    points = [basic_solution(lp, basis, feas_tol=feas_tol).x for basis in bases]
    objectives = [float(lp.c @ x) for x in points]
    f = min(objectives)
    obj_tol = 1e-8 * (1 + abs(f))
    chosen = [i for i, val in enumerate(objectives) if val - f <= obj_tol]
    poly = Polytope([points[i] for i in chosen], dedup_tol=dedup_tol)
    return poly, [bases[i] for i in chosen]


def lp_to_dict(lp: StandardLp) -> dict:
    return {"A": lp.A.tolist(), "b": lp.b.tolist(), "c": lp.c.tolist()}


def load_lp(source) -> StandardLp:
    """Build a program from a dict, a JSON string, or a path to a JSON file."""
    if isinstance(source, StandardLp):
        return source
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    missing = {"A", "b", "c"} - set(data)
    if missing:
        raise ValueError(f"problem JSON is missing keys: {sorted(missing)}")
    return StandardLp(data["A"], data["b"], data["c"])
