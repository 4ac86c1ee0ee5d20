"""Monte Carlo studies: confidence-set coverage and limit-law comparison.

Two ready-made experiments reproduce classic small instances — a 2x2
transport problem with multinomial marginals and a 5-node min-cost flow
network with Gaussian supply noise — and a generic harness runs any
configuration.  All randomness flows through counter-based per-replicate
streams, so reports are reproducible and independent of execution order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from scipy.linalg import lu_solve

from .confidence import (
    ConfidenceSet,
    EllipsoidRegion,
    SegmentFamilyRegion,
    confidence_set,
    contains,
    coordinate_interval,
    map_region,
)
from .errors import InstanceMismatch, LpError, SingularBasis
from .geometry import hausdorff, min_norm_point
from .limits import NoiseSampler, distance_statistic, sample_unique_limit
from .problem import (
    Basis,
    Polytope,
    StandardLp,
    basic_solution,
    optimal_vertices,
    quiet_lu,
    support,
)
from .simplex import solve

DEFAULT_SEED = 0x5EED


class MultinomialMarginalSampler:
    """Finite-n rhs: empirical frequencies of a multinomial, fixed tail.

    The sampled coordinates are counts/n for one margin of the transport
    problem; the remaining rhs coordinates stay at their known values.
    """

    kind = "multinomial_marginal"

    def __init__(self, probabilities, tail=()):
        self.probabilities = np.array(probabilities, dtype=float)
        self.tail = np.array(tail, dtype=float)

    def sample(self, truth_b, n, rate, rng) -> np.ndarray:
        counts = rng.multinomial(int(n), self.probabilities)
        return np.concatenate([counts / float(n), self.tail])

    def limit_noise(self, seed, dim) -> NoiseSampler:
        return NoiseSampler.multinomial_clt(self.probabilities, seed, pad_to=dim)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "probabilities": self.probabilities.tolist(),
                "tail": self.tail.tolist()}


class GaussianRhsSampler:
    """Finite-n rhs: truth plus Gaussian noise over selected coordinates,
    shrunk by the rate — the finite-sample law matches the limit law exactly."""

    kind = "gaussian"

    def __init__(self, sigma, support_indices=None):
        self.sigma = np.array(sigma, dtype=float)
        self._chol = np.linalg.cholesky(self.sigma)
        self.support_indices = (tuple(int(i) for i in support_indices)
                                if support_indices is not None else None)

    def sample(self, truth_b, n, rate, rng) -> np.ndarray:
        core = self._chol @ rng.standard_normal(self._chol.shape[0])
        shift = np.zeros(len(truth_b))
        idx = (list(self.support_indices) if self.support_indices is not None
               else list(range(self._chol.shape[0])))
        shift[idx] = core
        return np.asarray(truth_b, dtype=float) + shift / rate

    def limit_noise(self, seed, dim) -> NoiseSampler:
        return NoiseSampler.gaussian(self.sigma, seed,
                                     support_indices=self.support_indices, dim=dim)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sigma": self.sigma.tolist(),
                "support_indices": (list(self.support_indices)
                                    if self.support_indices is not None else None)}


@dataclass
class ExperimentConfig:
    lp: StandardLp
    truth_b: np.ndarray
    b_sampler: object
    region: object
    targets: Polytope
    rate_exponent: float = 0.5
    n_values: Sequence[int] = (1, 10, 100, 10000)
    replicates: int = 1000
    seed: int = DEFAULT_SEED
    name: str = "custom"


@dataclass(frozen=True)
class CoverageRow:
    n: int
    replicates: int
    covered: int
    coverage: float
    std_error: float


@dataclass(frozen=True)
class ReplicateRecord:
    n: int
    replicate: int
    covered: bool
    covered_targets: tuple
    basis: tuple
    error: Optional[str] = None


@dataclass
class CoverageReport:
    rows: list
    log: list = field(default_factory=list)


def selection_basis(lp: StandardLp, x: np.ndarray, *, tol: float = None) -> Basis:
    """Deterministic reporting basis: the support of ``x`` completed by the
    smallest-index columns that keep the block invertible.

    Any completion is an optimal basis when ``x`` is an optimal basic
    solution, and for a nondegenerate solution this is the only basis; the
    greedy completion pins down which one is used on degenerate replicates.
    """
    sup = sorted(support(x, tol) if tol is not None else support(x))
    chosen = list(sup)
    rank = _column_rank(lp.A[:, chosen]) if chosen else 0
    if rank < len(chosen):
        raise SingularBasis("support columns are linearly dependent")
    for j in range(lp.m):
        if rank == lp.k:
            break
        if j in chosen:
            continue
        trial = sorted(chosen + [j])
        if _column_rank(lp.A[:, trial]) > rank:
            chosen = trial
            rank += 1
    if rank < lp.k:
        raise SingularBasis("could not complete the support to a basis")
    return Basis(tuple(chosen))


def _column_rank(block: np.ndarray) -> int:
    if block.size == 0:
        return 0
    sv = np.linalg.svd(block, compute_uv=False)
    return int(np.sum(sv > sv[0] * max(block.shape) * np.finfo(float).eps))


def build_ot_2x2() -> ExperimentConfig:
    """2x2 transport plan with multinomial row marginals.

    Costs penalize the off-diagonal cells, so the optimum at the balanced
    truth is the diagonal plan; the rhs noise concentrates on the line
    (1,-1,0) and the 95% region is the corresponding segment family.
    """
    A = [
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 0.0],
    ]
    truth_b = np.array([0.5, 0.5, 0.5])
    c = np.array([0.0, 1.0, 1.0, 0.0])
    lp = StandardLp(A, truth_b, c)
    targets, _ = optimal_vertices(lp)
    from .quantiles import two_sided_normal_quantile

    half_width = two_sided_normal_quantile(0.05) / 2.0
    region = SegmentFamilyRegion((1.0, -1.0, 0.0), half_width, coverage_target=0.95)
    sampler = MultinomialMarginalSampler((0.5, 0.5), tail=(0.5,))
    return ExperimentConfig(lp=lp, truth_b=truth_b, b_sampler=sampler, region=region,
                            targets=targets, n_values=(1, 10, 100, 10000),
                            name="ot2x2")


MCF_ARCS = ((1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5), (5, 3))
MCF_CAPACITIES = (15.0, 8.0, 20.0, 4.0, 10.0, 15.0, 4.0, 20.0, 5.0)
MCF_COSTS = (4.0, 4.0, 2.0, 2.0, 6.0, 1.0, 3.0, 2.0, 3.0)
MCF_SUPPLIES = {1: 20.0, 2: 0.0, 4: -5.0, 5: -15.0}
MCF_SOLUTION_1 = (12.0, 8.0, 8.0, 4.0, 0.0, 15.0, 1.0, 14.0, 0.0)
MCF_SOLUTION_2 = (12.0, 8.0, 8.0, 4.0, 0.0, 12.0, 4.0, 11.0, 0.0)


def build_min_cost_flow() -> ExperimentConfig:
    """Capacitated 5-node min-cost flow with Gaussian supply noise.

    Arc flows get one column each, capacities one slack column each, and
    one balance row is dropped (flow conservation makes it redundant).  The
    construction is gated: the two known optimal flows must both be optimal
    vertices of the encoded program, otherwise ``InstanceMismatch``.
    """
    arcs = MCF_ARCS
    n_arcs = len(arcs)
    balance_nodes = sorted(MCF_SUPPLIES)
    k = len(balance_nodes) + n_arcs
    m = 2 * n_arcs
    A = np.zeros((k, m))
    b = np.zeros(k)
    for row, node in enumerate(balance_nodes):
        for j, (u, v) in enumerate(arcs):
            if u == node:
                A[row, j] += 1.0
            if v == node:
                A[row, j] -= 1.0
        b[row] = MCF_SUPPLIES[node]
    for j in range(n_arcs):
        row = len(balance_nodes) + j
        A[row, j] = 1.0
        A[row, n_arcs + j] = 1.0
        b[row] = MCF_CAPACITIES[j]
    c = np.concatenate([np.array(MCF_COSTS), np.zeros(n_arcs)])
    lp = StandardLp(A, b, c)

    def with_slacks(flow):
        flow = np.array(flow, dtype=float)
        return np.concatenate([flow, np.array(MCF_CAPACITIES) - flow])

    targets, _ = optimal_vertices(lp)
    expected = [with_slacks(MCF_SOLUTION_1), with_slacks(MCF_SOLUTION_2)]
    for point in expected:
        gaps = np.abs(targets.vertices - point).max(axis=1) if len(targets) else [np.inf]
        if min(gaps) > 1e-7:
            raise InstanceMismatch("a known optimal flow is not optimal for the encoding")
    sigma = np.diag([4.0, 1.0, 1.0, 3.0])
    region = EllipsoidRegion(sigma, level=0.95, support_indices=(0, 1, 2, 3))
    sampler = GaussianRhsSampler(sigma, support_indices=(0, 1, 2, 3))
    return ExperimentConfig(lp=lp, truth_b=b, b_sampler=sampler, region=region,
                            targets=targets, n_values=(50, 500), name="mcf")


def _replicate_stream(seed: int, n_index: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, n_index, replicate]))


def optimal_face_vertices(lp: StandardLp, result) -> list:
    """The solved vertex plus its optimal neighbors, as (x, objective-equal) pairs.

    When the dual is degenerate (a reduced cost vanishes off the basis),
    pivoting that column in moves along the optimal face to an adjacent
    optimal basic solution.  Returns ``[(basis_indices, x), ...]`` with the
    solved vertex first; a single entry means the solution is unique against
    one-pivot moves.
    """
    out = [(result.basis.indices, result.x_hat)]
    cols = list(result.basis.indices)
    zero_tol = 1e-9 * (1.0 + np.abs(lp.c).max(initial=0.0))
    loose = [j for j in range(lp.m)
             if j not in result.basis.indices and abs(result.slack[j]) <= zero_tol]
    if not loose:
        return out
    lu_piv = quiet_lu(lp.A[:, cols])
    x_b = lu_solve(lu_piv, lp.b, check_finite=False)
    pivot_tol = 1e-10 * (1.0 + np.abs(lp.A).max(initial=0.0))
    for j in loose:
        direction = lu_solve(lu_piv, lp.A[:, j], check_finite=False)
        rows = np.flatnonzero(direction > pivot_tol)
        if rows.size == 0:
            continue
        ratios = np.maximum(x_b[rows], 0.0) / direction[rows]
        best = ratios.min()
        ties = rows[np.flatnonzero(ratios <= best + 1e-12 * (1.0 + best))]
        leaving_row = int(ties[np.argmin(np.asarray(cols)[ties])])
        new_cols = sorted(cols[:leaving_row] + cols[leaving_row + 1:] + [j])
        point = basic_solution(lp, Basis(tuple(new_cols)))
        if point.feasible:
            out.append((tuple(new_cols), point.x))
    seen = set()
    unique = []
    for basis_indices, x in out:
        if basis_indices not in seen:
            seen.add(basis_indices)
            unique.append((basis_indices, x))
    return unique


def _run_one(config: ExperimentConfig, n: int, n_index: int, replicate: int) -> ReplicateRecord:
    rng = _replicate_stream(config.seed, n_index, replicate)
    rate = float(n) ** config.rate_exponent
    b_n = config.b_sampler.sample(config.truth_b, n, rate, rng)
    try:
        lp_n = config.lp.with_rhs(b_n)
        result = solve(lp_n)
        # practical solvers select arbitrarily among multiply-optimal
        # vertices; model that selection by drawing uniformly over the
        # face candidates from the replicate's own stream
        candidates = optimal_face_vertices(lp_n, result)
        _, x_hat = candidates[int(rng.integers(len(candidates)))]
        basis = selection_basis(config.lp, x_hat)
        mapped = map_region(config.lp, basis, config.region)
        cs = ConfidenceSet(center=np.array(x_hat, dtype=float), rate=rate, mapped=mapped)
        anchor = basic_solution(config.lp, basis).x
        projection, _ = min_norm_point(config.targets, anchor)
        covered_targets = tuple(
            i for i, v in enumerate(config.targets.vertices) if contains(cs, v)
        )
        covered = bool(covered_targets) or contains(cs, projection)
        return ReplicateRecord(n=n, replicate=replicate, covered=covered,
                               covered_targets=covered_targets,
                               basis=basis.indices)
    except LpError as exc:
        return ReplicateRecord(n=n, replicate=replicate, covered=False,
                               covered_targets=(), basis=(), error=str(exc))


def run_coverage(config: ExperimentConfig, *, n_values=None, replicates=None,
                 keep_log: bool = False, threads: int = 1) -> CoverageReport:
    """Coverage of the target optimal set across replicates, per sample size.

    A replicate counts as covered when the confidence set contains any
    enumerated target vertex or the projection of its reported basic
    solution onto the target set.  Solver failures are logged and counted
    as non-covered.
    """
    n_values = list(config.n_values if n_values is None else n_values)
    replicates = int(config.replicates if replicates is None else replicates)
    rows = []
    log = []
    for n_index, n in enumerate(n_values):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(
                    lambda rep: _run_one(config, n, n_index, rep), range(replicates)))
        else:
            records = [_run_one(config, n, n_index, rep) for rep in range(replicates)]
        covered = sum(1 for rec in records if rec.covered)
        coverage = covered / replicates
        rows.append(CoverageRow(
            n=int(n), replicates=replicates, covered=covered, coverage=coverage,
            std_error=math.sqrt(max(coverage * (1.0 - coverage), 0.0) / replicates),
        ))
        if keep_log:
            log.extend(records)
    return CoverageReport(rows=rows, log=log)


def kolmogorov_smirnov(sample_a, sample_b) -> float:
    """Two-sample KS distance: sup over thresholds of the ECDF gap."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.abs(cdf_a - cdf_b).max())


def run_limit_comparison(config: ExperimentConfig, n: int, draws: int, *,
                         statistic: str = "distance", seed: Optional[int] = None) -> dict:
    """KS distance between the finite-sample statistic and its limit law.

    ``statistic`` is the scaled distance from the solved point to the target
    set ("distance") or the scaled Hausdorff distance between optimal sets
    ("hausdorff").  Returns the KS distance along with both sample means.
    """
    if statistic not in ("distance", "hausdorff"):
        raise ValueError("statistic must be 'distance' or 'hausdorff'")
    if len(config.targets) != 1:
        raise InstanceMismatch("limit comparison needs a unique target optimum")
    seed = config.seed if seed is None else int(seed)
    rate = float(n) ** config.rate_exponent
    finite = np.empty(draws)
    for i in range(draws):
        rng = np.random.Generator(np.random.Philox(key=seed, counter=[1, 0, 0, i]))
        b_n = config.b_sampler.sample(config.truth_b, n, rate, rng)
        if statistic == "distance":
            result = solve(config.lp.with_rhs(b_n))
            _, dist = min_norm_point(config.targets, result.x_hat)
            finite[i] = rate * dist
        else:
            shifted, _ = optimal_vertices(config.lp.with_rhs(b_n))
            finite[i] = rate * hausdorff(shifted, config.targets)
    x_star = config.targets.vertices[0]
    noise = config.b_sampler.limit_noise(seed, config.lp.k)
    samples = sample_unique_limit(config.lp, x_star, noise, draws)
    if statistic == "distance":
        limit = np.array([distance_statistic(s) for s in samples])
    else:
        origin = Polytope([np.zeros(config.lp.m)])
        limit = np.array([hausdorff(s.optimal_set, origin) for s in samples])
    return {
        "n": int(n),
        "draws": int(draws),
        "statistic": statistic,
        "ks_distance": kolmogorov_smirnov(finite, limit),
        "finite_mean": float(finite.mean()),
        "limit_mean": float(limit.mean()),
    }


def singleton_coordinates(cs) -> list:
    """Coordinates whose confidence interval collapses to a point."""
    out = []
    for i in range(len(cs.center)):
        lo, hi = coordinate_interval(cs, i)
        if hi - lo == 0.0:
            out.append(i)
    return out


def config_from_dict(data: dict) -> ExperimentConfig:
    """Assemble a custom experiment from a JSON-shaped description."""
    from .problem import load_lp

    lp = load_lp(data["lp"])
    truth_b = np.array(data.get("truth_b", lp.b), dtype=float)
    lp = lp.with_rhs(truth_b)
    sampler_spec = dict(data["b_sampler"])
    kind = sampler_spec.pop("kind")
    if kind == "multinomial_marginal":
        sampler = MultinomialMarginalSampler(**sampler_spec)
    elif kind == "gaussian":
        sampler = GaussianRhsSampler(**sampler_spec)
    else:
        raise ValueError(f"unknown b_sampler kind {kind!r}")
    from .confidence import region_from_dict

    region = region_from_dict(data["region"])
    targets, _ = optimal_vertices(lp)
    return ExperimentConfig(
        lp=lp, truth_b=truth_b, b_sampler=sampler, region=region, targets=targets,
        rate_exponent=float(data.get("rate_exponent", 0.5)),
        n_values=tuple(int(v) for v in data.get("n_values", (100,))),
        replicates=int(data.get("replicates", 1000)),
        seed=int(data.get("seed", DEFAULT_SEED)),
        name=str(data.get("name", "custom")),
    )
