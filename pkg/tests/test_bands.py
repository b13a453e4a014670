import numpy as np
import pytest

from zlab import (
    DyadicLadder,
    bony_split,
    make_grid,
    plane_wave,
    project_angular,
    project_dyadic,
    project_low,
)
from zlab.bands import AngularPartition, band_profile, smooth_step
from zlab.ensembles import EnsembleSpec, SupportSpec, sample_field
from zlab.grid import Field


def test_smooth_step_plateaus_and_range():
    r = np.linspace(0, 2, 2001)
    psi = smooth_step(r)
    assert np.all(psi[r <= 1.0] == 1.0)
    assert np.all(psi[r >= 9 / 8] == 0.0)
    assert np.all((0.0 <= psi) & (psi <= 1.0))
    bridge = psi[(r > 1.0) & (r < 9 / 8)]
    assert np.all(np.diff(bridge) <= 1e-12)  # monotone nonincreasing


def test_telescoping_identity(grid64, ladder64):
    mag = grid64.xi_mag
    total = smooth_step(mag)
    for lam in ladder64.bands:
        total = total + band_profile(mag / lam)
    inside = mag <= ladder64.max_band
    assert np.max(np.abs(total[inside] - 1.0)) <= 1e-12


def test_project_dyadic_pointwise_oracle(grid64, ladder64):
    pw = plane_wave(grid64, (4, 0))
    # phi evaluated by hand at |xi|/lam
    for lam, expect in [(2, band_profile(np.array([2.0]))[0]), (8, band_profile(np.array([0.5]))[0])]:
        out = project_dyadic(pw, lam, ladder64)
        assert abs(out.l2() - abs(expect) * pw.l2()) < 1e-12
    assert band_profile(np.array([2.0]))[0] == 1.0
    assert band_profile(np.array([0.5]))[0] == 0.0


def test_project_dyadic_zero_field(grid64, ladder64):
    z = Field(grid64, np.zeros(grid64.shape, dtype=complex), "physical")
    assert project_dyadic(z, 4, ladder64).l2() == 0.0


def test_project_dyadic_band_checks(grid64, ladder64):
    pw = plane_wave(grid64, (2, 0))
    with pytest.raises(ValueError, match="max_band"):
        project_dyadic(pw, 2 * ladder64.max_band, ladder64)
    with pytest.raises(ValueError, match="dyadic"):
        project_dyadic(pw, 3, ladder64)


def test_project_low_pointwise_oracle(grid64, ladder64):
    pw3 = plane_wave(grid64, (3, 0))
    out = project_low(pw3, 4, ladder64)
    assert (out - pw3).l2() < 1e-12  # psi(3/4) = 1
    pw8 = plane_wave(grid64, (8, 0))
    assert project_low(pw8, 2, ladder64).l2() < 1e-12  # psi(4) = 0


def test_reconstruction_on_band_limited_fields(grid64, ladder64):
    u = sample_field(
        grid64, EnsembleSpec(1, 11, SupportSpec("ball", ladder64.max_band, exclude_zero=False)), 0
    )
    total = project_low(u, 1, ladder64)
    for lam in ladder64.bands:
        total = total + project_dyadic(u, lam, ladder64)
    assert (u - total).l2() <= 1e-12 * u.l2()


def test_disjoint_bands_compose_to_zero(grid64, ladder64):
    u = sample_field(grid64, EnsembleSpec(1, 12, SupportSpec("ball", 16.0)), 0)
    twice = project_dyadic(project_dyadic(u, 2, ladder64), 8, ladder64)
    assert twice.l2() <= 1e-14 * u.l2()


def test_partition_axes_membership():
    for dim in (2, 3):
        part = AngularPartition.build(dim, 2.0)
        dirs = part.directions
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = 1.0
            dots = np.abs(dirs @ e)
            assert np.isclose(np.max(dots), 1.0, atol=1e-12)
        assert part.axis_patch(0) is not None


def test_partition_of_unity_on_lattice(grid64, partition2):
    total = sum(
        partition2.patch_symbol(grid64, i) for i in range(partition2.patch_count)
    )
    nz = grid64.xi_mag > 0
    assert np.max(np.abs(total[nz] - 1.0)) <= 1e-12
    zero = (0,) * grid64.dim
    assert total[zero] == 0.0


def test_patch_support_satisfies_cone_condition(grid64, partition2):
    kappa = partition2.cone_constant
    for i in range(partition2.patch_count):
        sym = partition2.patch_symbol(grid64, i)
        support = sym > 0
        omega = partition2.directions[i]
        along = np.abs(omega[0] * grid64.xi[0] + omega[1] * grid64.xi[1])
        full_sq = grid64.xi[0] ** 2 + grid64.xi[1] ** 2
        trans = np.sqrt(np.maximum(full_sq - along**2, 0.0))
        ok = along >= kappa * trans - 1e-9
        assert np.all(ok[support])


def test_angular_projection_pointwise_oracle(grid64, ladder64, partition2):
    pw = plane_wave(grid64, (4, 0))
    i = partition2.axis_patch(0)
    out = project_angular(pw, 2, i, partition2, ladder64)
    q = partition2.patch_symbol(grid64, i)[4, 0]
    phi = band_profile(np.array([4.0 / 2.0]))[0]
    assert abs(out.l2() - q * phi * pw.l2()) < 1e-12


def test_angular_projection_kills_transverse_wave(grid64, ladder64, partition2):
    pw = plane_wave(grid64, (0, 4))
    i = partition2.axis_patch(0)  # cone along e1; (0, 4) fails |xi.e1| >= kappa |xi'|
    out = project_angular(pw, 2, i, partition2, ladder64)
    assert out.l2() <= 1e-14 * pw.l2()


def test_angular_sum_reconstructs_band(grid64, ladder64, partition2):
    u = sample_field(grid64, EnsembleSpec(1, 13, SupportSpec("ball", 8.0)), 0)
    band = project_dyadic(u, 4, ladder64)
    total = None
    for i in range(partition2.patch_count):
        piece = project_angular(u, 4, i, partition2, ladder64)
        total = piece if total is None else total + piece
    assert (band - total).l2() <= 1e-12 * max(band.l2(), 1e-300)


def test_angular_index_out_of_range(grid64, ladder64, partition2):
    pw = plane_wave(grid64, (4, 0))
    with pytest.raises(ValueError, match="out of range"):
        project_angular(pw, 2, partition2.patch_count, partition2, ladder64)


def test_kappa_100_partition_matches_paper_count():
    part = AngularPartition.build(2, 100.0)
    assert 150 <= part.patch_count <= 700
    # axis directions still members
    assert part.axis_patch(0) >= 0 and part.axis_patch(1) >= 0


def test_bony_single_mode_routes_to_balanced():
    grid = make_grid(2, 2 * np.pi, 256)
    ladder = DyadicLadder.for_grid(grid)
    u = plane_wave(grid, (2, 0))
    hl, lh, hh = bony_split(u, u, 2, ladder)
    prod = Field(grid, u.physical_values() ** 2, "physical")
    target = project_dyadic(prod, 2, ladder)
    assert hl.l2() <= 1e-13 * target.l2()
    assert lh.l2() <= 1e-13 * target.l2()
    assert (hh - target).l2() <= 1e-12 * target.l2()


def test_bony_zero_factor_gives_zero(grid64, ladder64):
    u = plane_wave(grid64, (2, 0))
    z = Field(grid64, np.zeros(grid64.shape, dtype=complex), "physical")
    for piece in bony_split(u, z, 2, ladder64):
        assert piece.l2() == 0.0


def test_bony_pieces_sum_to_band_projection():
    grid = make_grid(2, 2 * np.pi, 64)
    ladder = DyadicLadder.for_grid(grid)
    u = sample_field(grid, EnsembleSpec(1, 6, SupportSpec("ball", ladder.max_band / 4)), 0)
    v = sample_field(grid, EnsembleSpec(1, 6, SupportSpec("ball", ladder.max_band / 4)), 1)
    prod = Field(grid, u.physical_values() * v.physical_values(), "physical")
    for sig in (1, 2):
        pieces = bony_split(u, v, sig, ladder)
        target = project_dyadic(prod, sig, ladder)
        total = pieces[0] + pieces[1] + pieces[2]
        assert (total - target).l2() <= 1e-10 * max(target.l2(), u.l2() * v.l2())


def test_bony_separated_bands_route_high_low():
    grid = make_grid(2, 2 * np.pi, 256)
    ladder = DyadicLadder.for_grid(grid)
    u = sample_field(grid, EnsembleSpec(1, 8, SupportSpec("annulus", 8.0)), 0)
    v = sample_field(grid, EnsembleSpec(1, 8, SupportSpec("ball", 1.0)), 1)
    hl, lh, hh = bony_split(u, v, 8, ladder)
    assert hl.l2() > 0
    assert lh.l2() <= 1e-12 * hl.l2()
    assert hh.l2() <= 1e-12 * hl.l2()


def test_bony_aliasing_guard(grid64, ladder64):
    wide = sample_field(grid64, EnsembleSpec(1, 9, SupportSpec("ball", ladder64.max_band)), 0)
    with pytest.raises(ValueError, match="aliasing"):
        bony_split(wide, wide, 2, ladder64)


def test_bernstein_ratio_bounded_across_grids():
    # sup over lam^{d/2} L2 stays below a grid-independent constant
    worst = {}
    for n in (64, 128):
        grid = make_grid(2, 2 * np.pi, n)
        ladder = DyadicLadder.for_grid(grid)
        best = 0.0
        for lam in [b for b in ladder.bands if 2 <= b <= ladder.max_band / 4]:
            for i in range(16):
                f = sample_field(grid, EnsembleSpec(16, 21, SupportSpec("annulus", float(lam))), i)
                ratio = np.max(np.abs(f.physical_values())) / (lam * f.l2())
                best = max(best, ratio)
        worst[n] = best
    assert worst[64] <= 1.0 and worst[128] <= 1.0
    assert 0.3 <= worst[64] / worst[128] <= 3.0
