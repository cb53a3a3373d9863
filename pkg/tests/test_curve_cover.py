import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planklab.curve_cover import (Covering2, ModelCurve, assign_theta,
                                  base_point_layout, build_curve_cover,
                                  canonical_tangential_length,
                                  multiplicity_counts, rect_contains,
                                  verify_neighborhood_cover)


def test_layout_spans_unit_interval():
    for k in (2, 3, 4, 5):
        pts = base_point_layout(k, 2.0**-10)
        bases = [b for b, _ in pts]
        assert bases == sorted(bases)
        assert min(bases) < 0 < max(bases)
        assert max(bases) <= 1.0 and min(bases) >= -1.0


def test_canonical_length_regimes():
    k, d = 4, 2.0**-12
    origin = canonical_tangential_length(k, d, 0.0)
    assert origin == pytest.approx(d ** (1.0 / k))
    away = canonical_tangential_length(k, d, 0.5)
    assert away == pytest.approx(math.sqrt(d) / 0.5 ** ((k - 2) / 2.0))


def test_build_rejects_bad_delta():
    with pytest.raises(ValueError):
        build_curve_cover(3, 0.5)
    with pytest.raises(ValueError):
        build_curve_cover(1, 2.0**-8)


def test_curve_points_on_rect_centers():
    d = 2.0**-8
    cov = build_curve_cover(3, d)
    curve = ModelCurve(k=3)
    for r in cov.rects:
        x = r.center[0]
        assert abs(r.center[1] - float(curve.h(x))) <= r.half_normal + d


@settings(deadline=None, max_examples=25)
@given(st.sampled_from([2, 3, 4, 5]),
       st.floats(min_value=-1.0, max_value=1.0))
def test_curve_point_is_covered(k, xi):
    cov = build_curve_cover(k, 2.0**-8)
    counts = multiplicity_counts(cov, np.array([xi]), np.array([xi**k]))
    assert counts[0] >= 1


def test_dilation_monotone():
    cov = build_curve_cover(3, 2.0**-8)
    r = cov.rects[len(cov.rects) // 3]
    p = (r.center[0] + 1.5 * r.half_tangential * r.tangent_dir[0],
         r.center[1] + 1.5 * r.half_tangential * r.tangent_dir[1])
    assert not rect_contains(r, p, 1.0)
    assert rect_contains(r, p, 2.0)


def test_assign_theta_matches_membership():
    cov = build_curve_cover(4, 2.0**-10)
    xs = np.linspace(-1.0, 1.0, 301)
    th = assign_theta(cov, xs)
    bases = np.array([r.base_xi1 for r in cov.rects])
    for x, t in zip(xs, th):
        assert abs(bases[int(t)] - x) == pytest.approx(np.min(np.abs(bases - x)))


def test_covering_json_round_trip(tmp_path):
    cov = build_curve_cover(2, 2.0**-8)
    text = cov.to_json()
    cov2 = Covering2.from_json(text)
    assert cov2.k == cov.k and cov2.delta == cov.delta
    assert len(cov2.rects) == len(cov.rects)
    assert cov2.to_json() == text


def test_verification_report_is_seed_stable():
    cov = build_curve_cover(3, 2.0**-8)
    a = verify_neighborhood_cover(cov, 2000, 7)
    b = verify_neighborhood_cover(cov, 2000, 7)
    assert a == b
    assert a.covered_fraction == 1.0
