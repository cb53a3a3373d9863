import math

import numpy as np
import pytest

from planklab import fourier_lab as F
from planklab.cone_cover import build_cone_cover, lorentz_rescale
from planklab.curve_cover import build_curve_cover


def small_setup(k=2, delta=2.0**-4, n=128):
    cov = build_curve_cover(k, delta)
    grid = F.grid_for_cover(cov, n)
    return cov, grid, F.build_partition(cov, grid)


def test_grid_parseval_and_round_trip():
    grid = F.Grid(dims=2, n=64, omega_max=1.5)
    rng = np.random.default_rng(0)
    spec = np.zeros((64, 64), dtype=complex)
    spec[:4, :4] = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    fld = F.GridField(grid=grid, spectrum=spec)
    assert F.round_trip_error(fld) < 1e-12
    assert F.lp_norm(fld, 2) == pytest.approx(F.l2_spectrum(fld), rel=1e-10)


def test_grid_guards():
    with pytest.raises(ValueError):
        F.Grid(dims=2, n=48, omega_max=1.0)          # not a power of two
    g = F.Grid(dims=2, n=8, omega_max=1.0)
    with pytest.raises(ValueError):
        g.check_resolution(1e-6)


def test_partition_sums_to_one():
    _, _, w = small_setup()
    assert F.partition_sum_error(w) < 1e-13


def test_partition_core_cells_are_exclusive():
    _, grid, w = small_setup()
    owner = np.full(grid.n**2, -1)
    for b in range(w.n_blocks):
        assert np.all(owner[w.core[b]] == -1)
        owner[w.core[b]] = b


def test_single_block_ratio_is_one():
    _, grid, w = small_setup()
    fld = F.single_block_field(grid, w, w.n_blocks // 2, 7)
    out = F.square_function_ratio(fld, w)
    assert out["ratio"] == pytest.approx(1.0, abs=1e-9)


def test_two_wave_closed_form():
    # one unit wave in each of two block cores: ||f||_4^4 / box = 6 while the
    # square function gives 4, so the ratio is (3/2)^(1/4) exactly
    _, grid, w = small_setup()
    nonempty = [b for b in range(w.n_blocks) if len(w.core[b])]
    spec = np.zeros((grid.n, grid.n), dtype=complex)
    spec.flat[w.core[nonempty[0]][0]] = 1.0
    spec.flat[w.core[nonempty[-1]][0]] = 1.0
    out = F.square_function_ratio(F.GridField(grid=grid, spectrum=spec), w)
    assert out["ratio"] == pytest.approx(1.5**0.25, abs=1e-12)


def test_ratio_invariant_under_lattice_translation():
    cov, grid, w = small_setup()
    fld = F.sample_field(cov, grid, 7, 0.5, weights=w)
    base = F.square_function_ratio(fld, w)["ratio"]
    mesh = grid.freq_mesh()
    shift = 5 * grid.cell * mesh[0] + 11 * grid.cell * mesh[1]
    moved = F.GridField(grid=grid, spectrum=fld.spectrum * np.exp(-1j * shift))
    assert F.square_function_ratio(moved, w)["ratio"] == pytest.approx(base,
                                                                       abs=1e-12)


def test_ratio_invariant_under_global_phase():
    cov, grid, w = small_setup()
    fld = F.sample_field(cov, grid, 7, 0.5, weights=w)
    base = F.square_function_ratio(fld, w)["ratio"]
    moved = F.GridField(grid=grid, spectrum=fld.spectrum * np.exp(0.7j))
    assert F.square_function_ratio(moved, w)["ratio"] == pytest.approx(base,
                                                                       abs=1e-12)


def test_zero_field_rejected():
    _, grid, w = small_setup()
    with pytest.raises(ValueError):
        F.square_function_ratio(F.GridField(grid=grid,
                                            spectrum=np.zeros((grid.n, grid.n),
                                                              dtype=complex)), w)


def test_sample_field_is_trial_dependent():
    cov, grid, w = small_setup()
    a = F.sample_field(cov, grid, 7, 0.5, weights=w, trial=0)
    b = F.sample_field(cov, grid, 7, 0.5, weights=w, trial=1)
    assert not np.array_equal(a.spectrum, b.spectrum)


def test_cone_assignment_cells_belong_to_their_plank():
    cover = build_cone_cover(3, 4.0**-2)
    grid = F.grid_for_cone(cover, 64)
    assign = F.build_cone_assignment(cover, grid)
    assert sum(len(c) for c in assign.cells) > 0
    seen = np.concatenate([c for c in assign.cells if len(c)])
    assert len(seen) == len(set(seen.tolist()))


def test_kakeya_functional_small():
    cover = build_cone_cover(3, 4.0**-2)
    grid = F.grid_for_cone(cover, 64)
    assign = F.build_cone_assignment(cover, grid)
    fld = F.sample_cone_field(cover, grid, assign, 7, 0.5)
    rep = F.kakeya_functional(fld, cover, assign, 4.0)
    assert rep.plancherel_error < 1e-9
    assert rep.lhs > 0 and rep.rhs > 0
    assert rep.log_ratio == pytest.approx(rep.lhs / (rep.rhs * math.log(4.0)))


def test_sector_pigeonhole_bound():
    cover = build_cone_cover(3, 4.0**-2)
    grid = F.grid_for_cone(cover, 64)
    assign = F.build_cone_assignment(cover, grid)
    fld = F.sample_cone_field(cover, grid, assign, 7, 0.8)
    out = F.sector_pigeonhole(fld, cover, assign)
    assert out["passed"]


def test_rescaled_norm_matches_prediction():
    cover = build_cone_cover(3, 4.0**-2)
    grid = F.grid_for_cone(cover, 32)
    assign = F.build_cone_assignment(cover, grid)
    fld = F.sample_cone_field(cover, grid, assign, 7, 0.3)
    lmap = lorentz_rescale(3, 0.5, 0.05)
    out = F.rescaled_norm_check(fld, lmap, 7, n_side=48)
    assert out["rel_error"] < 1e-2


def test_complex_grid_modes():
    cg = F.ComplexGrid()
    a = cg.a_modes()
    assert len(a) == cg.n5
    assert np.all((a > 0.5) & (a < 1.0))
    assert cg.period5 == pytest.approx(2.0 * math.pi / cg.da)


def test_loglog_slope_recovers_power_law():
    xs = [2.0**-e for e in range(4, 9)]
    ys = [x**0.37 for x in xs]
    assert F.loglog_slope(xs, ys) == pytest.approx(0.37, abs=1e-10)
