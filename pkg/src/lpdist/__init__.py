"""Distributional analysis of linear programs with random right-hand sides.

Solve standard-form programs with basis and dual certificates, compute
perturbation-stability constants, sample the limiting optimal-set laws of
rhs noise, and build data-driven confidence sets with Monte Carlo coverage
harnesses.
"""
from .confidence import (
    BoxRegion,
    ConfidenceSet,
    EllipsoidRegion,
    MappedSet,
    SegmentFamilyRegion,
    confidence_set,
    contains,
    coordinate_interval,
    map_region,
    project_to_optimal,
    region_from_dict,
)
from .errors import (
    DegenerateDenominator,
    EmptyPolytope,
    Infeasible,
    InstanceMismatch,
    InstanceTooLarge,
    LpError,
    NoConvergence,
    NotSlater,
    NotUnique,
    SingularBasis,
    SingularCovariance,
    Unbounded,
)
from .experiments import (
    DEFAULT_SEED,
    CoverageReport,
    CoverageRow,
    ExperimentConfig,
    GaussianRhsSampler,
    MultinomialMarginalSampler,
    build_min_cost_flow,
    build_ot_2x2,
    config_from_dict,
    kolmogorov_smirnov,
    run_coverage,
    run_limit_comparison,
    selection_basis,
)
from .geometry import (
    Direction,
    SphereGrid,
    argmax_vertex,
    hausdorff,
    min_norm_point,
    support_function,
)
from .limits import (
    AuxVertexEnumerator,
    LimitSample,
    MixedSignLp,
    NoiseSampler,
    aux_lp_directional,
    aux_lp_unique,
    distance_statistic,
    hadamard_quotient_check,
    has_recession_ray,
    limit_support_function,
    optimal_mixed_vertices,
    sample_unique_limit,
    solve_mixed,
)
from .problem import (
    Basis,
    BasicSolution,
    Polytope,
    StandardLp,
    basic_solution,
    enumerate_feasible_bases,
    load_lp,
    lp_to_dict,
    optimal_vertices,
    support,
)
from .quantiles import chi_square_cdf, chi_square_quantile, two_sided_normal_quantile
from .simplex import LpStatus, SolveResult, solve, verify_kkt
from .stability import (
    StabilityReport,
    check_basis_inclusion,
    check_hausdorff_lipschitz,
    stability_report,
)

__version__ = "0.1.0"
