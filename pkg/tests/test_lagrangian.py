import numpy as np
import pytest

from alphaeuler import (
    AlphaParam,
    Grid,
    ParticleSet,
    SolverConfig,
    SpectralField,
    VelocityHistory,
    advect_particles,
    flow_distance,
    lagrangian_vorticity,
    measure_preservation_defect,
    run,
    sample,
    seed_particles,
    smooth_random,
    torus_distance,
)
from alphaeuler.lagrangian import bicubic_sample, export_particles_csv, steady_history


def constant_history(u1, u2, grid, t0=0.0, t1=10.0):
    field = np.stack([np.full((grid.n, grid.n), u1), np.full((grid.n, grid.n), u2)])
    return steady_history(field, grid, t0, t1)


def shear_history(grid, t0=0.0, t1=10.0):
    x1, _ = grid.mesh
    field = np.stack([np.zeros_like(x1), np.sin(x1)])
    return steady_history(field, grid, t0, t1)


class TestBicubic:
    def test_exact_at_nodes(self):
        g = Grid(16)
        f = sample(g, lambda x1, x2: np.cos(x1) * np.sin(2 * x2))
        pts = seed_particles(g).positions
        vals = bicubic_sample(f.values, pts, g.dx)
        assert np.abs(vals - f.values.ravel()).max() < 1e-14

    def test_accuracy_off_nodes(self):
        g = Grid(64)
        f = sample(g, lambda x1, x2: np.sin(x1 + 2 * x2))
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 2 * np.pi, size=(500, 2))
        vals = bicubic_sample(f.values, pts, g.dx)
        exact = np.sin(pts[:, 0] + 2 * pts[:, 1])
        # third-order kernel: error ~ h^3 |f'''| ~ 2.5e-4 at this resolution
        assert np.abs(vals - exact).max() < 2.5e-4


class TestAdvection:
    def test_zero_velocity(self):
        g = Grid(16)
        p0 = seed_particles(g)
        hist = constant_history(0.0, 0.0, g)
        p1 = advect_particles(p0, hist, 3.0)
        assert np.abs(p1.positions - p0.positions).max() == 0.0

    def test_constant_velocity_exact_shift(self):
        g = Grid(16)
        p0 = seed_particles(g)
        hist = constant_history(1.0, 0.0, g)
        p1 = advect_particles(p0, hist, np.pi)
        expected = np.mod(p0.positions + [np.pi, 0.0], 2 * np.pi)
        assert torus_distance(p1.positions, expected).max() < 1e-10

    def test_shear_single_particle(self):
        g = Grid(64)
        hist = shear_history(g)
        p0 = ParticleSet(np.array([[np.pi / 2, 0.0]]), 0.0)
        p1 = advect_particles(p0, hist, 1.0)
        # x1 frozen, x2' = sin(pi/2) = 1
        assert p1.positions[0, 0] == pytest.approx(np.pi / 2, abs=1e-12)
        assert p1.positions[0, 1] == pytest.approx(1.0, abs=1e-10)

    def test_backward_forward_composition(self):
        g = Grid(64)
        from alphaeuler.solver import velocity

        q = SpectralField(g, smooth_random(11, 2.0, 5, g).coeffs * 8.0)
        hist = steady_history(velocity(q, AlphaParam(0.1)).physical(), g, 0.0, 1.0)
        p0 = seed_particles(g)
        fwd = advect_particles(p0, hist, 1.0, substeps=8)
        back = advect_particles(fwd, hist, 0.0, substeps=8)
        assert torus_distance(back.positions, p0.positions).mean() < 1e-6

    def test_outside_history_rejected(self):
        g = Grid(16)
        hist = constant_history(1.0, 0.0, g, t0=0.0, t1=1.0)
        with pytest.raises(ValueError):
            advect_particles(seed_particles(g), hist, 2.0)


class TestMeasurePreservation:
    def test_identity_flow(self):
        g = Grid(32)
        p0 = seed_particles(g)
        f = sample(g, lambda x1, x2: np.cos(x1) + np.sin(x2))
        assert measure_preservation_defect(p0, p0, f) < 1e-15

    def test_rigid_translation(self):
        g = Grid(32)
        p0 = seed_particles(g)
        shifted = ParticleSet(p0.positions + [0.3, 1.1], 1.0)
        f = sample(g, lambda x1, x2: np.cos(x1) + np.cos(3 * x2 + 1.0))
        assert measure_preservation_defect(p0, shifted, f) < 1e-10

    def test_steady_shear_defect(self):
        g = Grid(64)
        hist = shear_history(g)
        p0 = seed_particles(g)
        p1 = advect_particles(p0, hist, 1.0, substeps=8)
        f = sample(g, lambda x1, x2: np.cos(x2))
        assert measure_preservation_defect(p0, p1, f) < 1e-4


class TestLagrangianVorticity:
    def test_identity(self):
        g = Grid(32)
        q0 = sample(g, lambda x1, x2: np.cos(x1) * np.cos(x2))
        feet = seed_particles(g)
        recon = lagrangian_vorticity(q0, feet)
        assert np.abs(recon.values - q0.values).max() < 1e-13

    def test_translation_by_pi(self):
        g = Grid(32)
        q0 = sample(g, lambda x1, x2: np.cos(x1))
        feet = ParticleSet(seed_particles(g).positions + [np.pi, 0.0], 0.0)
        recon = lagrangian_vorticity(q0, feet)
        assert np.abs(recon.values + q0.values).max() < 1e-12

    def test_shear_preserves_cos_x1(self):
        g = Grid(64)
        hist = shear_history(g)
        pT = seed_particles(g, t=1.0)
        feet = advect_particles(pT, hist, 0.0, substeps=8)
        q0 = sample(g, lambda x1, x2: np.cos(x1))
        recon = lagrangian_vorticity(q0, feet)
        assert np.abs(recon.values - q0.values).max() < 1e-9

    def test_nearest_mode(self):
        g = Grid(32)
        q0 = sample(g, lambda x1, x2: np.cos(x1))
        feet = seed_particles(g)
        recon = lagrangian_vorticity(q0, feet, method="nearest")
        assert np.array_equal(recon.values, q0.values)

    def test_count_mismatch_rejected(self):
        g = Grid(32)
        q0 = sample(g, lambda x1, x2: np.cos(x1))
        with pytest.raises(ValueError):
            lagrangian_vorticity(q0, seed_particles(g, stride=2))


class TestFlowDistance:
    def test_identical_sets(self):
        g = Grid(16)
        p = seed_particles(g)
        comp = flow_distance(p, p, delta=0.01)
        assert comp.mean_distance == 0.0
        assert comp.g_delta == 0.0

    def test_log_bound_example(self):
        g = Grid(16)
        p = seed_particles(g)
        comp = flow_distance(p, p, delta=np.exp(-10.0), c_cal=1.0)
        assert comp.log_bound == pytest.approx(0.1, rel=1e-12)

    def test_constant_offset(self):
        g = Grid(16)
        p = seed_particles(g)
        q = ParticleSet(p.positions + [0.2, 0.0], 0.0)
        comp = flow_distance(p, q, delta=0.01)
        assert comp.mean_distance == pytest.approx(0.2, rel=1e-12)
        assert comp.l2_distance == pytest.approx(0.2, rel=1e-12)

    def test_delta_above_one_inapplicable(self):
        g = Grid(16)
        p = seed_particles(g)
        comp = flow_distance(p, p, delta=1.5)
        assert not comp.applicable
        assert np.isnan(comp.log_bound)

    def test_diameter_invariant(self):
        rng = np.random.default_rng(5)
        a = ParticleSet(rng.uniform(0, 2 * np.pi, (200, 2)), 0.0)
        b = ParticleSet(rng.uniform(0, 2 * np.pi, (200, 2)), 0.0)
        comp = flow_distance(a, b, delta=0.5)
        assert comp.mean_distance <= np.pi * np.sqrt(2)


class TestHistory:
    def test_linear_time_interpolation(self):
        g = Grid(16)
        snaps = np.stack(
            [
                np.zeros((2, g.n, g.n)),
                np.ones((2, g.n, g.n)),
            ]
        )
        hist = VelocityHistory([0.0, 2.0], snaps, g)
        mid = hist.grids_at(1.0)
        assert np.all(mid == 0.5)

    def test_outside_rejected(self):
        g = Grid(16)
        hist = constant_history(1.0, 0.0, g, t0=0.0, t1=1.0)
        with pytest.raises(ValueError):
            hist.grids_at(1.5)

    def test_from_states_matches_solver_velocity(self):
        g = Grid(32)
        q0 = SpectralField(g, smooth_random(4, 2.0, 5, g).coeffs * 5.0)
        sim = run(q0, AlphaParam(0.2), SolverConfig(t_end=0.2, sample_times=np.linspace(0, 0.2, 3)))
        hist = VelocityHistory.from_states(sim.states)
        from alphaeuler.solver import velocity

        expected = velocity(sim.states[-1].q, AlphaParam(0.2)).physical()
        assert np.abs(hist.snapshots[-1] - expected).max() < 1e-14


def test_particles_csv_export(tmp_path):
    g = Grid(8)
    p = seed_particles(g, stride=4)
    path = tmp_path / "parts.csv"
    export_particles_csv(p, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,id"
    assert len(lines) == 1 + p.count
