import numpy as np
import pytest

from zlab import (
    SourceTerm,
    Trajectory,
    dispersive_kernel,
    duhamel,
    free_trajectory,
    half_wave_flow,
    make_grid,
    plane_wave,
    schrodinger_flow,
    wave_energy,
    wave_flow,
)
from zlab.ensembles import EnsembleSpec, SupportSpec, sample_field
from zlab.grid import Field, field_from_values
from zlab.propagators import kernel_cutoff, kernel_wrap_time


def test_schrodinger_flow_identity_and_eigenfunction(grid64):
    pw = plane_wave(grid64, (2, 0))
    assert (schrodinger_flow(pw, 0.0) - pw).l2() < 1e-14
    out = schrodinger_flow(pw, 0.5)
    assert (out - np.exp(-2j) * pw).l2() < 1e-12  # |xi|^2 = 4, e^{-i 0.5 * 4}


def test_half_wave_flow_eigenfunction(grid64):
    pw = plane_wave(grid64, (3, 0))
    out = half_wave_flow(pw, 1.0)
    assert (out - np.exp(-3j) * pw).l2() < 1e-12


def test_semigroup_composition(grid64):
    f = sample_field(grid64, EnsembleSpec(1, 3, SupportSpec("ball", 8.0)), 0)
    for flow in (schrodinger_flow, half_wave_flow):
        a = flow(flow(f, 0.3), 0.45)
        b = flow(f, 0.75)
        assert (a - b).l2() <= 1e-12 * f.l2()
        assert abs(flow(f, 1.234).l2() - f.l2()) <= 1e-12 * f.l2()


def test_wave_flow_initial_data(grid64):
    n0 = sample_field(grid64, EnsembleSpec(1, 4, SupportSpec("ball", 6.0), real=True), 0)
    n1 = sample_field(grid64, EnsembleSpec(1, 4, SupportSpec("ball", 6.0), real=True), 1)
    nt, dtnt = wave_flow(n0, n1, 0.0)
    assert (nt - n0).l2() < 1e-13
    assert (dtnt - n1).l2() < 1e-13


def test_wave_flow_standing_wave(grid64):
    n0 = plane_wave(grid64, (2, 0)) + plane_wave(grid64, (-2, 0))
    n1 = 0.0 * n0
    for t in (0.3, 1.1):
        nt, _ = wave_flow(n0, n1, t)
        assert (nt - np.cos(2 * t) * n0).l2() <= 1e-12 * n0.l2()


def test_wave_energy_conserved_and_matches_quadrature_oracle(grid64):
    n0 = sample_field(grid64, EnsembleSpec(1, 4, SupportSpec("ball", 6.0), real=True), 2)
    n1 = sample_field(grid64, EnsembleSpec(1, 4, SupportSpec("ball", 6.0), real=True), 3)
    e0 = wave_energy(*wave_flow(n0, n1, 0.0))

    # independent oracle: physical Riemann sum of the energy density
    def energy_oracle(n, dtn):
        g = grid64
        nh = n.fourier_values()
        grads = [
            np.fft.ifftn(1j * x * nh, norm="ortho").real for x in g.xi
        ]
        density = 0.5 * (dtn.physical_values().real ** 2 + sum(gr**2 for gr in grads))
        return float(np.sum(density) * g.cell_volume)

    for t in np.linspace(0.0, 4.0, 32):
        nt, dtnt = wave_flow(n0, n1, t)
        e = wave_energy(nt, dtnt)
        assert abs(e / e0 - 1.0) <= 1e-10
        assert abs(e - energy_oracle(nt, dtnt)) <= 1e-10 * e0


def test_wave_flow_rejects_bad_data(grid64):
    complex_field = plane_wave(grid64, (1, 0))
    real_field = complex_field + plane_wave(grid64, (-1, 0))
    with pytest.raises(ValueError, match="real"):
        wave_flow(complex_field, real_field, 0.1)
    ones = field_from_values(grid64, np.ones(grid64.shape))
    with pytest.raises(ValueError, match="zero mean"):
        wave_flow(real_field, ones, 0.1)


def test_duhamel_zero_source_is_free_flow(grid64):
    E0 = sample_field(grid64, EnsembleSpec(1, 5, SupportSpec("ball", 4.0)), 0)
    times = np.linspace(0, 1.0, 17)
    zero = Field(grid64, np.zeros(grid64.shape, dtype=complex), "fourier")
    src = SourceTerm([zero] * 17, "nothing")
    traj = duhamel("schrodinger", E0, src, 1.0, 16)
    free = free_trajectory("schrodinger", E0, 1.0, 16)
    for a, b in zip(traj.snapshots, free.snapshots):
        assert (a - b).l2() == 0.0
    np.testing.assert_allclose(traj.times, times)


def test_duhamel_constant_source_closed_form(grid64):
    # i d_t E + Laplacian E = c e^{i 2 x_1}: exact antiderivative oracle
    c = 0.7 - 0.2j
    T, M = 0.9, 64
    pw = plane_wave(grid64, (2, 0))
    times = np.linspace(0, T, M + 1)
    src = SourceTerm([pw * c] * (M + 1), "constant")
    zero = 0.0 * pw
    traj = duhamel("schrodinger", zero, src, T, M)
    om = 4.0
    exact = -1j * c * np.exp(-1j * om * T) * (np.exp(1j * om * T) - 1.0) / (1j * om)
    got = traj.snapshots[-1].fourier_values()[2, 0] / pw.fourier_values()[2, 0]
    assert abs(got - exact) / abs(exact) < 2.0 * (om * T / M) ** 2


def test_duhamel_richardson_order(grid64):
    E0 = sample_field(grid64, EnsembleSpec(1, 6, SupportSpec("ball", 4.0)), 0)
    F0 = sample_field(grid64, EnsembleSpec(1, 6, SupportSpec("ball", 4.0)), 1)
    T = 0.8

    def run(M):
        times = np.linspace(0, T, M + 1)
        src = SourceTerm([F0 * float(np.sin(2.5 * t)) for t in times], "smooth")
        return duhamel("schrodinger", E0, src, T, M).snapshots[-1]

    ref = run(1024)
    e1 = (run(32) - ref).l2()
    e2 = (run(64) - ref).l2()
    assert 3.3 <= e1 / e2 <= 4.7


def test_duhamel_node_mismatch(grid64):
    E0 = plane_wave(grid64, (1, 0))
    src = SourceTerm([E0] * 10, "wrong length")
    with pytest.raises(ValueError, match="sample count"):
        duhamel("schrodinger", E0, src, 1.0, 16)
    with pytest.raises(ValueError, match="at least 8"):
        duhamel("schrodinger", E0, SourceTerm([E0] * 5, "x"), 1.0, 4)


def test_duhamel_pde_residual_refines(grid64):
    # centered d_t of the trajectory satisfies i d_t E + Lap E - F = O(M^-2)
    E0 = sample_field(grid64, EnsembleSpec(1, 8, SupportSpec("ball", 3.0)), 0)
    F0 = sample_field(grid64, EnsembleSpec(1, 8, SupportSpec("ball", 3.0)), 1)
    T = 0.6

    def residual(M):
        times = np.linspace(0, T, M + 1)
        src = SourceTerm([F0 * float(np.cos(2.0 * t)) for t in times], "smooth")
        traj = duhamel("schrodinger", E0, src, T, M)
        dt = T / M
        worst = 0.0
        lap = -grid64.xi_mag**2
        for m in range(1, M):
            dE = (traj.snapshots[m + 1].fourier_values() - traj.snapshots[m - 1].fourier_values()) / (2 * dt)
            res = 1j * dE + lap * traj.snapshots[m].fourier_values() - src.samples[m].fourier_values()
            worst = max(worst, np.sqrt(grid64.cell_volume * np.sum(np.abs(res) ** 2)))
        return worst

    r1, r2 = residual(32), residual(64)
    assert 3.0 <= r1 / r2 <= 5.0


def test_trajectory_validation(grid64):
    pw = plane_wave(grid64, (1, 0))
    with pytest.raises(ValueError, match="uniform"):
        Trajectory(grid64, np.array([0.0, 0.1, 0.35]), [pw, pw, pw], "schrodinger")
    with pytest.raises(ValueError, match="snapshot count"):
        Trajectory(grid64, np.array([0.0, 0.1]), [pw], "schrodinger")


def test_dispersive_kernel_parseval_oracle():
    grid = make_grid(2, 16 * np.pi, 128)
    k = dispersive_kernel(1.0, 0.0, grid)
    lattice_sum = np.sqrt(
        np.sum(kernel_cutoff(grid.xi_mag) ** 2) / grid.extent**grid.dim
    )
    assert abs(k.l2() - lattice_sum) <= 1e-12 * lattice_sum


def test_dispersive_kernel_even_symmetry():
    grid = make_grid(2, 16 * np.pi, 128)
    k = dispersive_kernel(1.0, 0.3, grid).values
    rev = tuple((-np.arange(n)) % n for n in k.shape)
    np.testing.assert_allclose(k, k[np.ix_(*rev)], atol=1e-13 * np.abs(k).max())


def test_dispersive_kernel_wrap_guard():
    grid = make_grid(2, 16 * np.pi, 128)
    tmax = kernel_wrap_time(grid, 1.0)
    with pytest.raises(ValueError, match="wrap-around"):
        dispersive_kernel(1.0, 2 * tmax, grid)


def test_dispersive_kernel_envelope_shape():
    # the fitted envelope constant at t = 4 stays moderate
    grid = make_grid(2, 96 * np.pi, 512)
    k = dispersive_kernel(1.0, 4.0, grid)
    sup = np.abs(k.values).max(axis=1)
    x = np.arange(grid.points_per_axis) * grid.spacing
    x1 = np.where(x <= grid.extent / 2, x, x - grid.extent)
    env = sup * (1.0 + 2.0 + np.abs(x1)) ** 2
    assert env.max() < 100.0
