import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zlab import (
    AngularPartition,
    DyadicLadder,
    IterationNormFamily,
    NormSpec,
    Trajectory,
    free_trajectory,
    make_grid,
    mixed_norm,
    n1_norm,
    n2_norm,
    plane_wave,
    s1_norm,
    s2_norm,
    sobolev_norm,
    sobolev_norm_dyadic,
    x_norm,
)
from zlab.ensembles import EnsembleSpec, SupportSpec, sample_field
from zlab.grid import Field, field_from_values
from zlab.norms import INF, axis_spec, dyadic_blocks, spatial_mixed_norm


def family_for(grid, s=0.0, l=-0.5, **kw):
    return IterationNormFamily(
        dim=grid.dim, s=s, l=l,
        ladder=DyadicLadder.for_grid(grid),
        partition=AngularPartition.build(grid.dim, 2.0),
        **kw,
    )


def constant_traj(grid, c, T, M):
    f = field_from_values(grid, np.full(grid.shape, c))
    times = np.linspace(0, T, M + 1)
    return Trajectory(grid, times, [f] * (M + 1), "schrodinger")


def test_mixed_norm_constant_field(grid64):
    c = 1.7 - 0.4j
    T = 0.9
    traj = constant_traj(grid64, c, T, 8)
    spec = axis_spec(2, 2, 2, 0, 2)
    expected = abs(c) * math.sqrt(grid64.extent**2 * T)
    assert abs(mixed_norm(traj, spec) - expected) <= 1e-10 * expected


def test_mixed_norm_single_snapshot_sup_time(grid64):
    f = plane_wave(grid64, (3, 1))
    traj = Trajectory(grid64, np.array([0.0]), [f], "schrodinger")
    spec = axis_spec(INF, 2, INF, 0, 2)
    assert abs(mixed_norm(traj, spec) - spatial_mixed_norm(f, spec)) < 1e-14


def test_mixed_norm_matches_direct_summation(grid64):
    E0 = sample_field(grid64, EnsembleSpec(1, 5, SupportSpec("ball", 6.0)), 0)
    traj = free_trajectory("schrodinger", E0, 1.0, 16)
    spec = axis_spec(2, 2, 2, 0, 2)
    # direct oracle: flat L2 over (t, x) by trapezoid + Riemann sums
    per_node = []
    for s in traj.snapshots:
        vals = s.physical_values()
        per_node.append(np.sum(np.abs(vals) ** 2) * grid64.cell_volume)
    direct = math.sqrt(np.trapezoid(per_node, traj.times))
    assert abs(mixed_norm(traj, spec) - direct) <= 1e-10 * direct


def test_mixed_norm_rejects_non_axis_direction(grid64):
    with pytest.raises(ValueError, match="axis-aligned"):
        NormSpec(2, 2, 2, (np.sqrt(0.5), np.sqrt(0.5))).axis(2)


def test_oversampled_sup_matches_plane_wave(grid64):
    # |e^{i k x}| has sup exactly 1; padding must preserve amplitudes
    pw = plane_wave(grid64, (3, 2))
    spec = axis_spec(INF, INF, INF, 0, 2, sup_accurate=True)
    val = spatial_mixed_norm(pw, spec)
    assert abs(val - 1.0) < 1e-12


def test_sobolev_norm_s0_is_l2(grid64):
    f = sample_field(grid64, EnsembleSpec(1, 6, SupportSpec("ball", 8.0)), 0)
    assert abs(sobolev_norm(f, 0.0) - f.l2()) <= 1e-12 * f.l2()


def test_sobolev_norm_single_mode(grid64):
    pw = plane_wave(grid64, (3, 0))
    expected = math.sqrt(10.0) * pw.l2()
    assert abs(sobolev_norm(pw, 1.0) - expected) <= 1e-12 * expected


def test_sobolev_dyadic_equivalence(grid64, ladder64):
    f = sample_field(grid64, EnsembleSpec(1, 7, SupportSpec("ball", 16.0)), 0)
    direct = sobolev_norm(f, -0.5)
    dyadic = sobolev_norm_dyadic(f, -0.5, ladder64)
    assert 0.25 <= direct / dyadic <= 4.0


def test_dyadic_blocks_cover_all_frequencies(grid64, ladder64):
    total = np.zeros(grid64.shape)
    for _, sym in dyadic_blocks(grid64, ladder64):
        total += np.asarray(sym) ** 2
    assert np.all(total > 0.2)


def test_s1_zero_trajectory(grid64):
    fam = family_for(grid64)
    z = Field(grid64, np.zeros(grid64.shape, dtype=complex), "fourier")
    traj = Trajectory(grid64, np.linspace(0, 1, 9), [z] * 9, "schrodinger")
    assert s1_norm(traj, fam) == 0.0
    assert n1_norm(traj, fam) == 0.0
    assert s2_norm(traj, fam) == 0.0
    assert n2_norm(traj, fam) == 0.0
    assert x_norm(traj, fam) == 0.0


def test_s1_single_mode_symbol_oracle(grid64):
    # one Fourier mode: every patch contributes Q_i(u)^2 phi^2 times the
    # mode's mixed norm, so s1^2 is computable pointwise
    fam = family_for(grid64)
    pw = plane_wave(grid64, (4, 0))
    T, M = 0.5, 8
    traj = Trajectory(grid64, np.linspace(0, T, M + 1), [pw] * (M + 1), "schrodinger")
    got = s1_norm(traj, fam)
    q, p, r = fam.s1_exponents()
    expect_sq = 0.0
    for lam, block in dyadic_blocks(grid64, fam.ladder):
        for i in range(fam.partition.patch_count):
            w = (block * fam.partition.patch_symbol(grid64, i))[4, 0]
            if w == 0:
                continue
            axis = fam.partition.axis_of(i)
            spec = axis_spec(q, p, r, axis, 2)
            base = mixed_norm(
                Trajectory(grid64, traj.times, [pw * w] * (M + 1), "schrodinger"), spec
            )
            expect_sq += base**2
    assert abs(got - math.sqrt(expect_sq)) <= 1e-10 * got


def test_s1_free_flow_bounded_by_data(grid64):
    # band-uniform constants for the free flow (fixed horizon)
    fam = family_for(grid64)
    T = grid64.extent / (4 * 4.5 * 8)
    ratios = []
    for lam in (2, 4, 8):
        vals = []
        for i in range(4):
            E0 = sample_field(grid64, EnsembleSpec(4, 31, SupportSpec("annulus", float(lam))), i)
            traj = free_trajectory("schrodinger", E0, T, 12)
            vals.append(s1_norm(traj, fam) / E0.l2())
        ratios.append(max(vals))
    assert max(ratios) / min(ratios) <= 2.0


def test_n1_3d_band_weight_is_exact(grid16_3d):
    fam0 = family_for(grid16_3d, s=0.0, l=-0.5)
    fam = family_for(grid16_3d, s=0.1, l=-0.4)
    E0 = sample_field(grid16_3d, EnsembleSpec(1, 8, SupportSpec("annulus", 2.0)), 0)
    traj = free_trajectory("schrodinger", E0, 0.2, 8)
    # data sits in the lam = 2 block only, so the weight is exactly 2^{4s} in n1^2
    ratio = n1_norm(traj, fam) / n1_norm(traj, fam0)
    assert abs(ratio - 2.0 ** (2 * 0.1)) < 1e-9


def test_n1_matches_bruteforce_reference(grid64):
    fam = family_for(grid64)
    E0 = sample_field(grid64, EnsembleSpec(1, 9, SupportSpec("ball", 6.0)), 0)
    v0 = sample_field(grid64, EnsembleSpec(1, 9, SupportSpec("ball", 6.0)), 1)
    T, M = 0.4, 8
    times = np.linspace(0, T, M + 1)
    snaps = []
    mag = grid64.xi_mag
    for t in times:
        e = np.fft.ifftn(np.exp(-1j * t * mag**2) * E0.fourier_values(), norm="ortho")
        v = np.fft.ifftn(np.exp(-1j * t * mag) * v0.fourier_values(), norm="ortho")
        snaps.append(field_from_values(grid64, v.real * e))
    traj = Trajectory(grid64, times, snaps, "schrodinger")
    got = n1_norm(traj, fam)

    # brute force: explicit loops over blocks and frames, physical sums
    h = grid64.spacing
    total = 0.0
    counts = {}
    for i in range(fam.partition.patch_count):
        ax = fam.partition.axis_of(i)
        counts[ax] = counts.get(ax, 0) + 1
    for lam, sym in dyadic_blocks(grid64, fam.ladder):
        for ax, count in counts.items():
            per_node = []
            for s in snaps:
                vals = np.fft.ifftn(np.asarray(sym) * s.fourier_values(), norm="ortho")
                trans_ax = 1 - ax
                l1 = np.abs(vals).sum(axis=trans_ax) * h
                l2 = (np.sum(l1**2) * h) ** 0.5
                per_node.append(l2)
            tnorm = np.trapezoid(np.array(per_node) ** (4 / 3), times) ** (3 / 4)
            total += count * tnorm**2
    assert abs(got - math.sqrt(total)) <= 1e-10 * got


def test_s2_n2_time_independent_field(grid64):
    fam = family_for(grid64)
    f = sample_field(grid64, EnsembleSpec(1, 10, SupportSpec("ball", 6.0)), 0)
    T, M = 0.8, 16
    traj = Trajectory(grid64, np.linspace(0, T, M + 1), [f] * (M + 1), "half_wave")
    hl = sobolev_norm(f, fam.l)
    assert abs(s2_norm(traj, fam) - hl) <= 1e-12 * hl
    assert abs(n2_norm(traj, fam) - T * hl) <= 1e-10 * T * hl


def test_s2_free_half_wave_is_isometric(grid64):
    fam = family_for(grid64)
    v0 = sample_field(grid64, EnsembleSpec(1, 11, SupportSpec("ball", 6.0)), 0)
    traj = free_trajectory("half_wave", v0, 1.0, 16)
    expected = sobolev_norm(v0, fam.l)
    assert abs(s2_norm(traj, fam) - expected) <= 1e-10 * expected


@given(scale=st.floats(0.01, 100.0), seed=st.integers(0, 10**6))
@settings(max_examples=8, deadline=None)
def test_norm_homogeneity(scale, seed):
    grid = make_grid(2, 2 * np.pi, 16)
    fam = family_for(grid)
    E0 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 3.0)), 0)
    traj = free_trajectory("schrodinger", E0, 0.3, 8)
    scaled = Trajectory(grid, traj.times, [s * scale for s in traj.snapshots], "schrodinger")
    for norm in (s1_norm, n1_norm, s2_norm, n2_norm, x_norm):
        a, b = norm(traj, fam), norm(scaled, fam)
        assert abs(b - scale * a) <= 1e-9 * max(1.0, b)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=8, deadline=None)
def test_norm_triangle_inequality(seed):
    grid = make_grid(2, 2 * np.pi, 16)
    fam = family_for(grid)
    u = sample_field(grid, EnsembleSpec(2, seed, SupportSpec("ball", 3.0)), 0)
    v = sample_field(grid, EnsembleSpec(2, seed, SupportSpec("ball", 3.0)), 1)
    times = np.linspace(0, 0.3, 9)
    tu = Trajectory(grid, times, [u] * 9, "schrodinger")
    tv = Trajectory(grid, times, [v] * 9, "schrodinger")
    tsum = Trajectory(grid, times, [u + v] * 9, "schrodinger")
    for norm in (s1_norm, n1_norm, s2_norm, x_norm):
        assert norm(tsum, fam) <= norm(tu, fam) + norm(tv, fam) + 1e-10


def test_time_monotonicity(grid64):
    fam = family_for(grid64)
    E0 = sample_field(grid64, EnsembleSpec(1, 13, SupportSpec("ball", 4.0)), 0)
    long_traj = free_trajectory("schrodinger", E0, 1.0, 32)
    short = Trajectory(
        grid64, long_traj.times[:17], long_traj.snapshots[:17], "schrodinger"
    )
    assert n1_norm(short, fam) <= n1_norm(long_traj, fam) + 1e-12
    assert n2_norm(short, fam) <= n2_norm(long_traj, fam) + 1e-12
    assert s1_norm(short, fam) <= s1_norm(long_traj, fam) + 1e-12


def test_holder_pairing(grid64):
    # |uv|_{L1 L1 L1} <= |u|_{L2 L2 Linf} |v|_{L2 L2 L1}
    rng_specs = EnsembleSpec(2, 14, SupportSpec("ball", 6.0))
    u = sample_field(grid64, rng_specs, 0)
    v = sample_field(grid64, rng_specs, 1)
    times = np.linspace(0, 0.7, 9)
    tu = free_trajectory("schrodinger", u, 0.7, 8)
    tv = free_trajectory("half_wave", v, 0.7, 8)
    prod_snaps = [
        field_from_values(grid64, a.physical_values() * b.physical_values())
        for a, b in zip(tu.snapshots, tv.snapshots)
    ]
    tprod = Trajectory(grid64, times, prod_snaps, "schrodinger")
    lhs = mixed_norm(tprod, axis_spec(1, 1, 1, 0, 2))
    rhs = mixed_norm(tu, axis_spec(2, 2, INF, 0, 2)) * mixed_norm(tv, axis_spec(2, 2, 1, 0, 2))
    assert lhs <= rhs + 1e-10


def test_s1_3d_modes_match_frame_counts(grid16_3d):
    # as-written 3d S1: each patch repeats its frame's band norm
    fam = family_for(grid16_3d, s=0.1, l=-0.4)
    E0 = sample_field(grid16_3d, EnsembleSpec(1, 15, SupportSpec("annulus", 2.0)), 0)
    traj = free_trajectory("schrodinger", E0, 0.2, 8)
    val = s1_norm(traj, fam)
    assert val > 0
    fam_angular = family_for(grid16_3d, s=0.1, l=-0.4, angular_s1_3d=True)
    val_angular = s1_norm(traj, fam_angular)
    assert 0 < val_angular <= val + 1e-12


def test_off_regime_tag(grid64):
    assert family_for(grid64, s=0.0, l=-0.5).regime_tag == "paper"
    assert family_for(grid64, s=0.3, l=-0.5).regime_tag == "off-regime"
