import numpy as np
import pytest

from lpdist import Basis, StandardLp, solve
from lpdist.confidence import (
    BoxRegion,
    ConfidenceSet,
    EllipsoidRegion,
    SegmentFamilyRegion,
    confidence_set,
    contains,
    coordinate_interval,
    map_region,
    project_to_optimal,
    region_from_dict,
)
from lpdist.errors import SingularBasis, SingularCovariance
from lpdist.quantiles import chi_square_quantile, two_sided_normal_quantile

# frozen interval endpoints for the reported 2x2 run (n=20, marginals 0.55/0.45)
REPORTED_LO_1 = -0.1691306351441454
REPORTED_HI_1 = 0.26913063514414537
REPORTED_LO_3 = 0.23086936485585463
REPORTED_HI_3 = 0.6691306351441454


def reported_run(ot_lp):
    lp_n = ot_lp.with_rhs([0.55, 0.45, 0.5])
    result = solve(lp_n)
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], two_sided_normal_quantile(0.05) / 2.0)
    mapped = map_region(ot_lp, result.basis, region)
    return confidence_set(result, np.sqrt(20.0), mapped)


# ------------------------------------------------------------------ regions

def test_ellipsoid_region_defaults():
    region = EllipsoidRegion(np.eye(2), 0.95)
    assert abs(region.q - chi_square_quantile(0.95, 2)) < 1e-12
    assert region.coverage_target == 0.95
    override = EllipsoidRegion(np.eye(2), 0.95, q=3.0)
    assert override.q == 3.0
    with pytest.raises(ValueError):
        EllipsoidRegion(np.eye(2), 1.5)
    with pytest.raises(ValueError):
        EllipsoidRegion(np.ones((2, 3)), 0.95)
    with pytest.raises(ValueError):
        EllipsoidRegion(np.eye(2), 0.95, support_indices=(0,))


def test_box_region_must_contain_origin():
    BoxRegion([-1.0, -0.5], [1.0, 2.0])
    with pytest.raises(ValueError):
        BoxRegion([0.5, -1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        BoxRegion([-1.0], [1.0, 1.0])


def test_segment_region_validation():
    SegmentFamilyRegion([1.0, -1.0], 0.5)
    with pytest.raises(ValueError):
        SegmentFamilyRegion([0.0, 0.0], 0.5)
    with pytest.raises(ValueError):
        SegmentFamilyRegion([1.0, 0.0], -0.1)


def test_region_round_trip_from_dict():
    seg = region_from_dict({"kind": "segment", "direction": [1.0, -1.0, 0.0],
                            "half_width": 0.5})
    assert isinstance(seg, SegmentFamilyRegion)
    ell = region_from_dict({"kind": "ellipsoid", "sigma": [[1.0, 0.0], [0.0, 2.0]],
                            "level": 0.9})
    assert isinstance(ell, EllipsoidRegion)
    box = region_from_dict({"kind": "box", "lower": [-1.0], "upper": [1.0]})
    assert isinstance(box, BoxRegion)
    with pytest.raises(ValueError):
        region_from_dict({"kind": "banana"})


# ----------------------------------------------------------- the reported run

def test_reported_run_intervals(ot_lp):
    cs = reported_run(ot_lp)
    lo0, hi0 = coordinate_interval(cs, 0)
    assert lo0 == hi0 == 0.5  # basis coordinate with zero response
    lo2, hi2 = coordinate_interval(cs, 2)
    assert lo2 == hi2 == 0.0  # pinned off-basis coordinate
    lo1, hi1 = coordinate_interval(cs, 1)
    assert abs(lo1 - REPORTED_LO_1) < 1e-12
    assert abs(hi1 - REPORTED_HI_1) < 1e-12
    lo3, hi3 = coordinate_interval(cs, 3)
    assert abs(lo3 - REPORTED_LO_3) < 1e-12
    assert abs(hi3 - REPORTED_HI_3) < 1e-12


def test_reported_run_membership(ot_lp):
    cs = reported_run(ot_lp)
    assert contains(cs, cs.center)
    assert contains(cs, np.array([0.5, 0.0, 0.0, 0.5]))  # the true plan
    # endpoint of the segment family, still inside (closed set)
    t = cs.mapped.half_width / cs.rate
    assert contains(cs, cs.center + t * np.array([0.0, -1.0, 0.0, 1.0]))
    assert not contains(cs, cs.center + 1.01 * t * np.array([0.0, -1.0, 0.0, 1.0]))
    # any movement of the pinned coordinate leaves the set
    assert not contains(cs, np.array([0.5, 0.0, 0.01, 0.49]))
    # movement off the segment direction leaves the set
    assert not contains(cs, np.array([0.45, 0.05, 0.0, 0.5]))


def test_membership_implies_interval_containment(ot_lp):
    cs = reported_run(ot_lp)
    rng = np.random.Generator(np.random.Philox(key=6, counter=[0, 0, 0, 0]))
    hits = 0
    for _ in range(200):
        x = cs.center + rng.uniform(-0.3, 0.3) * np.array([0.0, -1.0, 0.0, 1.0])
        if contains(cs, x):
            hits += 1
            for i in range(4):
                lo, hi = coordinate_interval(cs, i)
                assert lo - 1e-9 <= x[i] <= hi + 1e-9
    assert 0 < hits < 200


def test_segment_generator_matches_linear_solve(ot_lp):
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], 0.5)
    mapped = map_region(ot_lp, Basis((0, 1, 3)), region)
    oracle = np.linalg.solve(ot_lp.A[:, [0, 1, 3]], np.array([1.0, -1.0, 0.0]))
    assert np.allclose(mapped.v_seg, oracle, atol=1e-12)
    assert np.allclose(oracle, [0.0, 1.0, -1.0], atol=1e-12)
    other = map_region(ot_lp, Basis((0, 2, 3)), region)
    assert np.allclose(other.v_seg, [1.0, -1.0, 0.0], atol=1e-12)


def test_zero_width_segment_collapses(ot_lp):
    result = solve(ot_lp.with_rhs([0.55, 0.45, 0.5]))
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], 0.0)
    cs = confidence_set(result, np.sqrt(20.0), map_region(ot_lp, result.basis, region))
    for i in range(4):
        lo, hi = coordinate_interval(cs, i)
        assert lo == hi
    assert contains(cs, cs.center)


# ------------------------------------------------------------- ellipsoid maps

def test_ellipsoid_membership_full_rank():
    lp = StandardLp(np.eye(2), [1.0, 2.0], [1.0, 1.0])
    region = EllipsoidRegion(np.eye(2), 0.95)
    result = solve(lp)
    cs = confidence_set(result, 2.0, map_region(lp, result.basis, region))
    q = region.q
    # identity basis: membership reduces to |rate*(center-x)|^2 <= q
    inside = cs.center - np.sqrt(q) * 0.99 / 2.0 * np.array([1.0, 0.0])
    outside = cs.center - np.sqrt(q) * 1.01 / 2.0 * np.array([1.0, 0.0])
    assert contains(cs, inside)
    assert not contains(cs, outside)
    lo, hi = coordinate_interval(cs, 0)
    assert abs((hi - lo) - np.sqrt(q)) < 1e-12  # half-width sqrt(q)/rate with rate 2


def test_ellipsoid_interval_is_tight(ot_lp):
    region = EllipsoidRegion(np.diag([0.25, 0.25, 0.1]), 0.9)
    result = solve(ot_lp.with_rhs([0.55, 0.45, 0.5]))
    cs = confidence_set(result, 3.0, map_region(ot_lp, result.basis, region))
    rng = np.random.Generator(np.random.Philox(key=8, counter=[0, 0, 0, 0]))
    chol = np.linalg.cholesky(region.sigma)
    sup = np.zeros(4)
    for _ in range(3000):
        z = rng.standard_normal(3)
        z /= np.linalg.norm(z)
        g = chol @ z * np.sqrt(region.q)  # boundary point of the region
        y = np.zeros(4)
        y[[0, 1, 3]] = np.linalg.solve(ot_lp.A[:, [0, 1, 3]], g)
        x = cs.center - y / cs.rate
        assert contains(cs, x)
        sup = np.maximum(sup, np.abs(x - cs.center))
    for i in range(4):
        lo, hi = coordinate_interval(cs, i)
        half = (hi - lo) / 2.0
        assert sup[i] <= half + 1e-9
        assert half <= sup[i] + 0.05 * (1.0 + half)  # dense sampling approaches it


def test_ellipsoid_support_subspace(ot_lp):
    # noise only on the first two constraint rows
    region = EllipsoidRegion(np.eye(2), 0.95, support_indices=(0, 1))
    result = solve(ot_lp.with_rhs([0.55, 0.45, 0.5]))
    mapped = map_region(ot_lp, result.basis, region)
    assert mapped.quadratic is None  # rank-deficient: no full quadratic form
    cs = confidence_set(result, 1.0, mapped)
    assert contains(cs, cs.center)
    # displacement consistent with g = (0.1, -0.2, 0) stays inside
    g = np.array([0.1, -0.2, 0.0])
    y = np.zeros(4)
    y[[0, 1, 3]] = np.linalg.solve(ot_lp.A[:, [0, 1, 3]], g)
    assert contains(cs, cs.center - y)
    # g with a third-row component is outside the support subspace
    g_bad = np.array([0.0, 0.0, 0.25])
    y_bad = np.zeros(4)
    y_bad[[0, 1, 3]] = np.linalg.solve(ot_lp.A[:, [0, 1, 3]], g_bad)
    assert not contains(cs, cs.center - y_bad)


def test_singular_covariance_rejected(ot_lp):
    region = EllipsoidRegion(np.zeros((3, 3)) + 1e-30, 0.95)
    with pytest.raises(SingularCovariance):
        map_region(ot_lp, Basis((0, 1, 3)), region)


def test_full_support_shape_mismatch(ot_lp):
    with pytest.raises(ValueError):
        map_region(ot_lp, Basis((0, 1, 3)), EllipsoidRegion(np.eye(2), 0.95))


def test_map_region_rejects_singular_basis(ot_lp):
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], 0.5)
    with pytest.raises(SingularBasis):
        map_region(ot_lp, Basis((0, 1, 2, 3)), region)


# ------------------------------------------------------------------ box maps

def test_box_intervals_sign_split():
    lp = StandardLp(np.eye(2), [1.0, 2.0], [1.0, 1.0])
    region = BoxRegion([-0.5, -1.0], [1.5, 2.0])
    result = solve(lp)
    cs = confidence_set(result, 1.0, map_region(lp, result.basis, region))
    lo0, hi0 = coordinate_interval(cs, 0)
    # identity map: interval is center - [lower, upper] reversed
    assert abs(lo0 - (1.0 - 1.5)) < 1e-12
    assert abs(hi0 - (1.0 + 0.5)) < 1e-12
    assert contains(cs, np.array([1.0, 1.5]))
    assert not contains(cs, np.array([1.0, 3.5]))


def test_box_bounds_dimension_check(ot_lp):
    with pytest.raises(ValueError):
        map_region(ot_lp, Basis((0, 1, 3)), BoxRegion([-1.0], [1.0]))


# ----------------------------------------------------------- rate equivariance

def test_rate_scaling_halves_interval(ot_lp):
    result = solve(ot_lp.with_rhs([0.55, 0.45, 0.5]))
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], 0.98)
    mapped = map_region(ot_lp, result.basis, region)
    slow = confidence_set(result, 1.0, mapped)
    fast = confidence_set(result, 2.0, mapped)
    for i in range(4):
        lo_s, hi_s = coordinate_interval(slow, i)
        lo_f, hi_f = coordinate_interval(fast, i)
        assert abs((hi_f - lo_f) - (hi_s - lo_s) / 2.0) < 1e-12


def test_confidence_set_requires_positive_rate(ot_lp):
    result = solve(ot_lp)
    region = SegmentFamilyRegion([1.0, -1.0, 0.0], 0.5)
    mapped = map_region(ot_lp, result.basis, region)
    with pytest.raises(ValueError):
        confidence_set(result, 0.0, mapped)


# ------------------------------------------------------------------ projection

def test_project_to_optimal_cases(ot_lp):
    target = np.array([0.5, 0.0, 0.0, 0.5])
    assert np.allclose(project_to_optimal(ot_lp, Basis((0, 1, 3))), target, atol=1e-9)
    assert np.allclose(project_to_optimal(ot_lp, Basis((0, 2, 3))), target, atol=1e-9)
    # a non-optimal basis projects onto the (unique) optimal plan as well
    assert np.allclose(project_to_optimal(ot_lp, Basis((0, 1, 2))), target, atol=1e-9)
