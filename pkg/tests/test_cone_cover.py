import math

import numpy as np
import pytest

from planklab.cone_cover import (Box3, HighLow3, build_centered_planks,
                                 build_cone_cover, c_max, cp_prime, ends,
                                 extents_along, lorentz_rescale,
                                 mapped_subplank_report, omega_membership,
                                 omega_overlap_count, plank_slice,
                                 sample_difference_points, shell_memberships,
                                 sigma0_cutoff, sigma_scales, subsector_params,
                                 subsector_plank, verify_cone_cover,
                                 wave_envelope)


def test_cover_verifies_at_small_scale():
    cover = build_cone_cover(3, 2.0**-8)
    rep = verify_cone_cover(cover, 20000, 7)
    assert rep["covered_fraction"] == 1.0
    assert rep["max_multiplicity"] <= 8


def test_sigma_scales_are_dyadic_ladder():
    assert sigma_scales(8.0) == [0.125, 0.25, 0.5, 1.0]


def test_centered_plank_heights():
    fam = build_centered_planks(3, 8.0, 0.25)
    assert np.all(fam.a_mid == 0.0)
    assert np.all(fam.a_half == 0.25**2)


def test_sigma_rejects_non_dyadic():
    with pytest.raises(ValueError):
        build_centered_planks(3, 8.0, 0.3)


def test_shells_partition_difference_points():
    k, r = 3, 8.0
    cover = build_cone_cover(k, r**-2)
    pts, _ = sample_difference_points(cover, 2000, 7)
    for j in range(0, pts.shape[1], 97):
        shells = shell_memberships(tuple(pts[:, j]), k, r)
        assert len(shells) == 1


def test_omega_membership_is_exclusive():
    k, r = 3, 8.0
    hl = HighLow3(k=k, r=r)
    cover = build_cone_cover(k, r**-2)
    pts, _ = sample_difference_points(cover, 500, 7)
    point = tuple(pts[:, 0])
    flags = [omega_membership(point, k, r, s, hl)["in_omega"]
             for s in sigma_scales(r)]
    assert sum(flags) == 1


def test_same_K_subfamily_partitions_family():
    fam = build_centered_planks(4, 16.0, 0.5)
    Ks = sorted(set(p.block_K for p in fam.planks))
    total = sum(len(cp_prime(fam, K).planks) for K in Ks)
    assert total == len(fam.planks)


def test_sigma0_cutoff_monotone_content():
    s = sigma0_cutoff(3, 32.0, 0.5)
    assert s is not None
    fam = build_centered_planks(3, 32.0, s)
    assert sum(1 for p in fam.planks if p.block_K == 0.5) >= 4


def test_overlap_count_includes_containing_plank():
    k, r = 3, 8.0
    hl = HighLow3(k=k, r=r)
    cover = build_cone_cover(k, r**-2)
    pts, _ = sample_difference_points(cover, 200, 7)
    found = 0
    for j in range(pts.shape[1]):
        for s in sigma_scales(r):
            oc = omega_overlap_count(tuple(pts[:, j]), k, r, s, 4.0, hl)
            if oc.in_omega:
                assert oc.count_total >= 1
                assert oc.count_same_K <= oc.count_total
                found += 1
                break
    assert found == pts.shape[1]


def test_ends_lie_in_slice():
    fam = build_centered_planks(3, 8.0, 0.5)
    p = fam.planks[len(fam.planks) // 2]
    h = 0.5**2 / 32.0
    le, re = ends(p, h)
    sl = plank_slice(p, h)
    for seg in (le, re):
        assert sl.l_lo - 1e-12 <= seg.l_lo <= seg.l_hi <= sl.l_hi + 1e-12
    assert le.l_hi < re.l_lo


def test_wave_envelope_contains_all_duals():
    cover = build_cone_cover(3, 2.0**-6)
    box = wave_envelope(cover.planks[0], 8.0, cover.planks[:3])
    assert isinstance(box, Box3)
    assert all(h > 0 for h in box.halves)


def test_extents_along_identity_axes():
    gens = np.diag([1.0, 2.0, 3.0])
    ext = extents_along(np.eye(3), gens)
    assert np.allclose(ext, [1.0, 2.0, 3.0])


def test_lorentz_curvature_interval():
    for k in (2, 3, 4):
        lm = lorentz_rescale(k, 0.5, min(0.1, 0.9 * c_max(k)))
        lo, hi = lm.f2pp_interval()
        assert 1.5 <= lo <= hi <= 2.5
        xs = np.linspace(-1.0, 1.0, 41)
        vals = lm.f2pp(xs)
        assert np.all(vals >= lo - 1e-9) and np.all(vals <= hi + 1e-9)


def test_lorentz_map_is_invertible():
    lm = lorentz_rescale(3, 0.5, 0.05)
    m = np.asarray(lm.matrix)
    assert abs(np.linalg.det(m)) > 0


def test_subsector_params_keep_sector_in_domain():
    for k in (2, 3, 4, 5):
        for M in (0.5, 0.25, 0.125, 0.0625):
            nu, c = subsector_params(k, M)
            assert 0 < c < c_max(k)
            assert nu - M < 1.0


def test_mapped_subplank_ratios_within_factor_four():
    nu, c = subsector_params(3, 0.25)
    rep = mapped_subplank_report(3, 2.0**-8 * 0.25**3, nu, c, nu)
    assert 0.25 <= rep["tangential_ratio"] <= 4.0
    assert rep["axis_ratio"] <= 4.0 and rep["normal_ratio"] <= 4.0


def test_subsector_plank_base_inside_sector():
    nu, c = subsector_params(3, 0.25)
    p = subsector_plank(3, 2.0**-10, nu, 0.25, nu)
    assert p is not None
