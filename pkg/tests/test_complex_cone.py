import numpy as np
import pytest

from planklab.complex_cone import (alternating_ends_check, build_complex_cover,
                                   complex_omega_membership,
                                   complex_overlap_count,
                                   complex_shell_memberships,
                                   count_containing_local,
                                   sample_admissible_ends,
                                   sample_complex_difference_points,
                                   solve_plane_coeffs, tangent_combination,
                                   tangent_image, verify_complex_cover)
from planklab.cone_cover import sigma_scales


def test_cover_verifies():
    cover = build_complex_cover(64)
    rep = verify_complex_cover(cover, 20000, 7)
    assert rep["covered_fraction"] == 1.0


def test_cover_range_guard():
    with pytest.raises(ValueError):
        build_complex_cover(8)


def test_assign_returns_nearest_base():
    cover = build_complex_cover(64)
    for z in (0.1 + 0.2j, -0.73 + 0.12j, 0.99 - 0.99j):
        i = cover.assign(z)
        p = cover.planks[i]
        d0 = abs(complex(p.base_s, p.base_t) - z)
        dmin = min(abs(complex(q.base_s, q.base_t) - z) for q in cover.planks)
        assert d0 == pytest.approx(dmin, abs=1e-12)


def test_local_counts_match_family():
    cover = build_complex_cover(64)
    pts, _ = sample_complex_difference_points(cover, 300, 7)
    pts[4] = np.abs(pts[4]) * 0.5 + 0.5          # push into the height window
    local = count_containing_local(cover, pts)
    full = cover.family.count_containing(pts)
    assert np.array_equal(local, full)


def test_shells_partition():
    r = 8.0
    cover = build_complex_cover(64)
    pts, _ = sample_complex_difference_points(cover, 400, 7)
    for j in range(0, pts.shape[1], 29):
        assert len(complex_shell_memberships(pts[:, j], r)) == 1


def test_omega_membership_exclusive():
    r = 8.0
    cover = build_complex_cover(64)
    pts, _ = sample_complex_difference_points(cover, 50, 7)
    flags = [complex_omega_membership(pts[:, 0], r, s)["in_omega"]
             for s in sigma_scales(r)]
    assert sum(flags) == 1


def test_overlap_count_positive_on_omega_points():
    r = 8.0
    cover = build_complex_cover(64)
    pts, _ = sample_complex_difference_points(cover, 100, 7)
    oc = None
    for s in sigma_scales(r):
        oc = complex_overlap_count(pts[:, 0], r, s)
        if oc.in_omega:
            break
    assert oc is not None and oc.count >= 1


def test_tangent_plane_identity():
    rng = np.random.default_rng(0)
    for _ in range(32):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        co = complex(rng.standard_normal(), rng.standard_normal())
        assert np.max(np.abs(tangent_image(co, z)
                             - tangent_combination(co, z))) < 1e-12


def test_plane_coeffs_reproduce_end_heights():
    z, zp = 0.25 + 0.25j, 0.5 + 0.125j
    h, r = 2.0**-8, 16.0
    c1, c2 = solve_plane_coeffs(z, h, r, zp, zp)
    assert np.isfinite(c1) and np.isfinite(c2)


def test_alternating_check_rejects_close_pairs():
    with pytest.raises(ValueError):
        alternating_ends_check(0.0j, 1e-6 + 0.0j, 2.0**-10, 2.0**7, 0.5)


def test_admissible_sampler_is_deterministic():
    a = sample_admissible_ends(20, 7)
    b = sample_admissible_ends(20, 7)
    assert len(a) == len(b) == 20
    for (ca, ra), (cb, rb) in zip(a, b):
        assert ca == cb and ra == rb


def test_admissible_samples_alternate():
    for _, rep in sample_admissible_ends(30, 7):
        assert rep.passed and not rep.vacuous
