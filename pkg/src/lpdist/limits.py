"""Auxiliary LPs describing how optimal solutions respond to rhs noise.

The central objects are small linear programs that share the constraint
matrix of a base LP but relax nonnegativity on the support of a chosen
optimal vertex.  Their optimal sets are the limiting objects for scaled
perturbations of the right-hand side, so we provide exact vertex
enumeration, samplers for noise laws, and difference-quotient checks.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lu_solve

from .errors import Infeasible, InstanceTooLarge, NotUnique, Unbounded
from .geometry import (
    TIE_TOL,
    SphereGrid,
    argmax_vertex,
    min_norm_point,
    support_function,
)
from .problem import (
    ENUM_CAP,
    FEAS_TOL,
    Polytope,
    StandardLp,
    optimal_vertices,
    support,
    quiet_lu,
)
from .simplex import solve as simplex_solve


@dataclass(frozen=True)
class MixedSignLp:
    """Equality-constrained LP where some coordinates may take either sign."""

    a: np.ndarray
    rhs: np.ndarray
    c: np.ndarray
    free_indices: frozenset

    def __post_init__(self):
        object.__setattr__(self, "a", np.array(self.a, dtype=float))
        object.__setattr__(self, "rhs", np.array(self.rhs, dtype=float))
        object.__setattr__(self, "c", np.array(self.c, dtype=float))
        object.__setattr__(self, "free_indices", frozenset(int(i) for i in self.free_indices))
        k, m = self.a.shape
        if self.rhs.shape != (k,) or self.c.shape != (m,):
            raise ValueError("rhs/cost dimensions do not match the matrix")
        if any(i < 0 or i >= m for i in self.free_indices):
            raise ValueError("free index out of range")


@dataclass(frozen=True)
class LimitSample:
    g: np.ndarray
    optimal_set: Polytope
    objective: float


class NoiseSampler:
    """Deterministic per-index noise draws for the rhs perturbation law.

    Each draw uses a counter-based generator keyed by (seed, index), so a
    draw depends only on its index and results are independent of order or
    parallelism.
    """

    def __init__(self, kind, seed, *, sigma=None, probabilities=None,
                 pad_to=None, vectors=None, support_indices=None, dim=None):
        if kind not in ("gaussian", "multinomial_clt", "empirical"):
            raise ValueError(f"unknown sampler kind {kind!r}")
        self.kind = kind
        self.seed = int(seed)
        self._chol = None
        self.sigma = None
        self.probabilities = None
        self.pad_to = None
        self.vectors = None
        self.support_indices = None
        self.dim = None
        if kind == "gaussian":
            self.sigma = np.array(sigma, dtype=float)
            self._chol = np.linalg.cholesky(self.sigma)
            self.dim = int(dim) if dim is not None else self.sigma.shape[0]
            if support_indices is not None:
                self.support_indices = tuple(int(i) for i in support_indices)
                if len(self.support_indices) != self.sigma.shape[0]:
                    raise ValueError("support size must match the covariance")
            elif self.dim != self.sigma.shape[0]:
                raise ValueError("dim without support_indices must match the covariance")
        elif kind == "multinomial_clt":
            self.probabilities = np.array(probabilities, dtype=float)
            if self.probabilities.min() < 0 or abs(self.probabilities.sum() - 1.0) > 1e-12:
                raise ValueError("probabilities must be nonnegative and sum to one")
            self.pad_to = int(pad_to) if pad_to is not None else len(self.probabilities)
            if self.pad_to < len(self.probabilities):
                raise ValueError("pad_to is smaller than the probability vector")
        else:
            self.vectors = np.array(vectors, dtype=float)
            if self.vectors.ndim != 2 or not len(self.vectors):
                raise ValueError("empirical sampler needs a nonempty 2-d array")

    @classmethod
    def gaussian(cls, sigma, seed, support_indices=None, dim=None):
        return cls("gaussian", seed, sigma=sigma, support_indices=support_indices, dim=dim)

    @classmethod
    def multinomial_clt(cls, probabilities, seed, pad_to=None):
        return cls("multinomial_clt", seed, probabilities=probabilities, pad_to=pad_to)

    @classmethod
    def empirical(cls, vectors, seed):
        return cls("empirical", seed, vectors=vectors)

    def _rng(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed, counter=[0, 0, 0, index]))

    def draw(self, index: int) -> np.ndarray:
        rng = self._rng(index)
        if self.kind == "gaussian":
            core = self._chol @ rng.standard_normal(self._chol.shape[0])
            if self.support_indices is None:
                return core
            out = np.zeros(self.dim)
            out[list(self.support_indices)] = core
            return out
        if self.kind == "multinomial_clt":
            # limit of sqrt(n) * (empirical frequencies - p): a centered
            # Gaussian with covariance diag(p) - p p^T, realized from iid
            # normals without forming the covariance matrix
            p = self.probabilities
            z = rng.standard_normal(len(p))
            root = np.sqrt(p)
            w = root * z - p * float(root @ z)
            out = np.zeros(self.pad_to)
            out[: len(p)] = w
            return out
        pick = int(rng.integers(len(self.vectors)))
        return self.vectors[pick].copy()

    def draws(self, n: int) -> list:
        return [self.draw(i) for i in range(n)]


def aux_lp_unique(lp: StandardLp, x_star: np.ndarray, g: np.ndarray, *,
                  verify_unique: bool = False) -> MixedSignLp:
    """Response LP at a unique optimum: A p = g, p >= 0 off the support.

    With ``verify_unique`` the optimal set of ``lp`` is enumerated and a
    ``NotUnique`` error is raised unless it is the single vertex ``x_star``.
    """
    x_star = np.asarray(x_star, dtype=float)
    if verify_unique:
        polytope, _ = optimal_vertices(lp)
        if len(polytope) != 1:
            raise NotUnique(f"optimal set has {len(polytope)} vertices")
        if np.abs(polytope.vertices[0] - x_star).max() > 1e-7 * (1.0 + np.abs(x_star).max()):
            raise NotUnique("x_star is not the optimal vertex of the LP")
    return MixedSignLp(lp.A, g, lp.c, support(x_star))


def aux_lp_directional(lp: StandardLp, v: np.ndarray, g: np.ndarray) -> MixedSignLp:
    """Response LP at an optimal vertex v: nonnegativity is relaxed on S(v)."""
    return MixedSignLp(lp.A, g, lp.c, support(np.asarray(v, dtype=float)))


def split_free(mixed: MixedSignLp) -> tuple:
    """Rewrite with sign-free coordinates split into positive differences.

    Returns ``(lp, free_order)`` where column ``m + j`` of ``lp`` is the
    negated copy of the ``j``-th free column in ``free_order``.
    """
    free = sorted(mixed.free_indices)
    a_ext = np.hstack([mixed.a, -mixed.a[:, free]]) if free else mixed.a.copy()
    c_ext = np.concatenate([mixed.c, -mixed.c[free]]) if free else mixed.c.copy()
    return StandardLp(a_ext, mixed.rhs, c_ext), free


def solve_mixed(mixed: MixedSignLp) -> tuple:
    """One optimal point of the mixed-sign LP and its objective value."""
    lp, free = split_free(mixed)
    result = simplex_solve(lp)
    m = mixed.a.shape[1]
    point = result.x_hat[:m].copy()
    if free:
        point[free] -= result.x_hat[m:]
    return point, float(mixed.c @ point)


class AuxVertexEnumerator:
    """Exact optimal-vertex sets of a mixed-sign LP, reusable across rhs.

    Vertices are basic solutions at column sets J of size k that contain
    every free index; the factorizations depend only on the matrix, so one
    instance serves many right-hand sides cheaply.
    """

    def __init__(self, a: np.ndarray, c: np.ndarray, free_indices, *,
                 feas_tol: float = FEAS_TOL):
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.free = sorted(int(i) for i in free_indices)
        self.feas_tol = feas_tol
        k, m = self.a.shape
        if len(self.free) > k:
            raise ValueError("free set is larger than the number of rows")
        others = [j for j in range(m) if j not in set(self.free)]
        if math.comb(len(others), k - len(self.free)) > ENUM_CAP:
            raise InstanceTooLarge("candidate basis count exceeds the enumeration cap")
        rank_tol = 1e-10 * max(np.abs(self.a).max(initial=0.0), 1e-30)
        self._candidates = []
        for extra in itertools.combinations(others, k - len(self.free)):
            cols = sorted(self.free + list(extra))
            try:
                lu_piv = quiet_lu(self.a[:, cols])
            except Exception:
                continue
            if np.abs(np.diagonal(lu_piv[0])).min() <= rank_tol:
                continue
            sign_checked = np.array([j not in set(self.free) for j in cols])
            self._candidates.append((cols, lu_piv, sign_checked, self.c[cols]))
        if not self._candidates:
            raise Infeasible("no invertible column set contains the free indices")

    def optimal_set(self, rhs: np.ndarray) -> tuple:
        """(Polytope of optimal vertices, optimal value) for this rhs."""
        k, m = self.a.shape
        best = math.inf
        hits = []
        for cols, lu_piv, sign_checked, c_cols in self._candidates:
            x_cols = lu_solve(lu_piv, rhs, check_finite=False)
            checked = x_cols[sign_checked]
            if checked.size and checked.min() < -self.feas_tol:
                continue
            value = float(c_cols @ x_cols)
            hits.append((value, cols, x_cols))
            best = min(best, value)
        if not hits:
            raise Infeasible("mixed-sign LP has no basic feasible point")
        cutoff = 1e-8 * (1.0 + abs(best))
        points = []
        for value, cols, x_cols in hits:
            if value - best <= cutoff:
                p = np.zeros(m)
                p[cols] = x_cols
                points.append(p)
        return Polytope(points), best


def optimal_mixed_vertices(mixed: MixedSignLp, *, feas_tol: float = FEAS_TOL) -> tuple:
    enum = AuxVertexEnumerator(mixed.a, mixed.c, mixed.free_indices, feas_tol=feas_tol)
    return enum.optimal_set(mixed.rhs)


def has_recession_ray(mixed: MixedSignLp) -> bool:
    """Whether the optimal set of the mixed-sign LP recedes to infinity.

    A nonzero recession direction of the optimal set solves A d = 0,
    <c,d> = 0 with the usual sign pattern, and some signed coordinate
    positive; we detect it by maximizing the signed mass, which is
    unbounded exactly when a ray exists.
    """
    stacked = np.vstack([mixed.a, mixed.c[None, :]])
    rhs = np.zeros(stacked.shape[0])
    homogeneous = StandardLp(stacked, rhs, np.zeros(stacked.shape[1]),
                             drop_redundant_rows=True)
    m = mixed.a.shape[1]
    objective = np.zeros(m)
    signed = [i for i in range(m) if i not in mixed.free_indices]
    objective[signed] = -1.0
    probe = MixedSignLp(homogeneous.A, homogeneous.b, objective, mixed.free_indices)
    try:
        solve_mixed(probe)
    except Unbounded:
        return True
    return False


def sample_unique_limit(lp: StandardLp, x_star: np.ndarray, sampler: NoiseSampler,
                        n_draws: int, *, vertex_only: bool = False,
                        verify_unique: bool = False) -> list:
    """Draw rhs noise and collect the optimal sets of the response LP.

    ``vertex_only`` swaps exact vertex enumeration for a single simplex
    solve per draw, for instances too large to enumerate.
    """
    x_star = np.asarray(x_star, dtype=float)
    if verify_unique:
        aux_lp_unique(lp, x_star, np.zeros(lp.k), verify_unique=True)
    free = support(x_star)
    samples = []
    if vertex_only:
        for i in range(n_draws):
            g = sampler.draw(i)
            point, value = solve_mixed(MixedSignLp(lp.A, g, lp.c, free))
            samples.append(LimitSample(g=g, optimal_set=Polytope([point]), objective=value))
        return samples
    enum = AuxVertexEnumerator(lp.A, lp.c, free)
    for i in range(n_draws):
        g = sampler.draw(i)
        polytope, value = enum.optimal_set(g)
        samples.append(LimitSample(g=g, optimal_set=polytope, objective=value))
    return samples


def distance_statistic(sample: LimitSample) -> float:
    """Euclidean distance from the origin to the sampled optimal set."""
    verts = sample.optimal_set.vertices
    if len(verts) == 1:
        return float(np.linalg.norm(verts[0]))
    origin = np.zeros(verts.shape[1])
    _, dist = min_norm_point(sample.optimal_set, origin)
    return dist


def limit_support_function(lp: StandardLp, g: np.ndarray, grid: SphereGrid, *,
                           tie_tol: float = TIE_TOL) -> tuple:
    """Support values of the directional response sets over a sphere grid.

    Directions where the base LP's maximizing vertex is tied (within
    ``tie_tol``) are excluded and returned separately; elsewhere the value
    is the support function of the optimal set of the response LP at the
    tie-free vertex.
    """
    polytope, _ = optimal_vertices(lp)
    g = np.asarray(g, dtype=float)
    enumerators = {}
    pairs = []
    excluded = []
    for direction in grid.directions:
        vertex, unique = argmax_vertex(polytope, direction, tie_tol=tie_tol)
        if not unique:
            excluded.append(direction)
            continue
        key = support(vertex)
        if key not in enumerators:
            enumerators[key] = AuxVertexEnumerator(lp.A, lp.c, key)
        response, _ = enumerators[key].optimal_set(g)
        pairs.append((direction, support_function(response, direction)))
    return pairs, excluded


def hadamard_quotient_check(lp: StandardLp, xi: np.ndarray, t_list: Sequence[float],
                            grid: SphereGrid) -> float:
    """Max gap between difference quotients and the directional limit values.

    For each step ``t`` the optimal-set support function of the LP with rhs
    ``b + t*xi`` is compared against the first-order prediction; the
    reported number is the gap at the smallest step, which should vanish
    once ``t`` is inside the stability radius.
    """
    xi = np.asarray(xi, dtype=float)
    if not len(t_list):
        raise ValueError("need at least one step size")
    base_set, _ = optimal_vertices(lp)
    pairs, _ = limit_support_function(lp, xi, grid)
    errors = {}
    for t in t_list:
        shifted, _ = optimal_vertices(lp.with_rhs(lp.b + t * xi))
        worst = 0.0
        for direction, limit_value in pairs:
            quotient = (support_function(shifted, direction)
                        - support_function(base_set, direction)) / t
            worst = max(worst, abs(quotient - limit_value))
        errors[t] = worst
    return errors[min(t_list)]
