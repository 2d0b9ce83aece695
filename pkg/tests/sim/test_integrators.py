"""Tests for the time discretizations."""

import math

import numpy as np
import pytest

from grbm.core.model import ModelSpec, tridiagonal_reflection
from grbm.core.particles import ParticleConfig, Reflection
from grbm.core.potential import PotentialSpec
from grbm.errors import BlowUpError, ConfigurationError, InputError, PreconditionError
from grbm.sim.integrators import (
    GRBMStepper,
    Scheme,
    euler_step,
    gaps,
    grbm_drift,
    make_stepper,
    parse_scheme,
    simulate_grbm,
    simulate_hard_particles,
    simulate_soft_particles,
    soft_particle_drift,
    step_count,
)


class TestStepCount:
    def test_exact_multiple(self):
        assert step_count(1e-3, 1.0) == 1000

    def test_zero_horizon(self):
        assert step_count(0.01, 0.0) == 0

    @pytest.mark.parametrize("dt", [0.0, -0.1, 0.2])
    def test_dt_range(self, dt):
        with pytest.raises(ConfigurationError):
            step_count(dt, 1.0)

    def test_horizon_off_grid(self):
        with pytest.raises(ConfigurationError, match="multiple"):
            step_count(0.03, 1.0)


class TestDrifts:
    def test_general_reflection_matches_matrix_product(self, oconnell_yor_d3):
        refl = np.array(oconnell_yor_d3.refl)
        refl[2, 0] = 0.5
        spec = ModelSpec(3, oconnell_yor_d3.gamma, oconnell_yor_d3.mu, refl,
                         oconnell_yor_d3.potential)
        assert not spec.is_tridiagonal
        x = np.random.default_rng(0).normal(size=(20, 3))
        expected = spec.mu + spec.potential.uprime(x) @ refl.T
        assert np.allclose(grbm_drift(spec, x), expected, rtol=1e-14)

    def test_tridiagonal_shortcut_matches_matrix_product(self, oconnell_yor_d3):
        x = np.random.default_rng(1).normal(size=(20, 3))
        expected = oconnell_yor_d3.drift(x)
        assert np.allclose(grbm_drift(oconnell_yor_d3, x), expected, rtol=1e-14)

    def test_soft_gaps_follow_gap_model(self, soft_triple):
        z = np.array([[0.0, 0.5, 3.0], [-1.0, -0.2, 0.1]])
        particle_drift = soft_particle_drift(soft_triple.mu, soft_triple.potential, z)
        gap_drift = grbm_drift(soft_triple.gap_model(), np.diff(z, axis=1))
        assert np.allclose(np.diff(particle_drift, axis=1), gap_drift, rtol=1e-14)

    def test_tamed_and_plain_steps_agree_to_second_order(self, oconnell_yor_d3):
        states = np.random.default_rng(8).normal(size=(1000, 3))
        b = grbm_drift(oconnell_yor_d3, states)
        speed = np.linalg.norm(b, axis=1)
        zero = np.zeros_like(states)

        def gap(dt):
            tamed = euler_step(zero, b, dt, zero, tamed=True)
            plain = euler_step(zero, b, dt, zero)
            return np.linalg.norm(tamed - plain, axis=1), np.linalg.norm(plain, axis=1)

        dt = 1e-3 / speed.max()
        diff, plain = gap(dt)
        assert np.all(diff <= (dt * speed) ** 2 * (1.0 + 1e-9))
        assert np.all(diff <= 1e-3 * plain)
        assert np.allclose(diff / gap(dt / 2.0)[0], 4.0, rtol=1e-3)

    def test_tamed_step_bounded(self):
        x = np.zeros((1, 1))
        step = euler_step(x, np.array([[1e20]]), 0.01, np.zeros((1, 1)), tamed=True)
        assert 0.0 < step[0, 0] <= 1.0 + 1e-12


class TestGRBMSimulation:
    def test_zero_horizon_returns_initial_state(self, oconnell_yor_d2):
        traj = simulate_grbm(oconnell_yor_d2, [0.3, -0.2], 0.01, 0.0, seed=0)
        assert traj.states.shape == (1, 2)
        assert np.array_equal(traj.states[0], [0.3, -0.2])

    def test_deterministic_flow_stays_at_fixed_point(self, oconnell_yor_d2):
        fixed = np.array([0.0, -math.log(2.0)])
        traj = simulate_grbm(oconnell_yor_d2, fixed, 0.01, 1.0, seed=0, noise_scale=0.0)
        assert np.allclose(traj.states, fixed, atol=1e-12)

    def test_deterministic_flow_relaxes(self, scalar_model):
        traj = simulate_grbm(scalar_model, [3.0], 0.01, 20.0, seed=0, noise_scale=0.0)
        assert abs(traj.states[-1, 0]) < 1e-3

    def test_same_seed_same_path(self, oconnell_yor_d2):
        a = simulate_grbm(oconnell_yor_d2, [0.0, 0.0], 0.01, 1.0, seed=3)
        b = simulate_grbm(oconnell_yor_d2, [0.0, 0.0], 0.01, 1.0, seed=3)
        c = simulate_grbm(oconnell_yor_d2, [0.0, 0.0], 0.01, 1.0, seed=4)
        assert np.array_equal(a.states, b.states)
        assert not np.array_equal(a.states, c.states)

    def test_trajectory_table(self, oconnell_yor_d2, tmp_path):
        traj = simulate_grbm(oconnell_yor_d2, [0.0, 0.0], 0.05, 0.1, seed=1)
        frame = traj.to_frame()
        assert list(frame.columns) == ["t", "x1", "x2"]
        assert np.allclose(frame["t"], [0.0, 0.05, 0.1])
        path = tmp_path / "trajectory.csv"
        traj.to_csv(path)
        assert b"\r\n" not in path.read_bytes()

    def test_untamed_euler_blows_up_deep_in_the_wall(self, scalar_model):
        with pytest.raises(BlowUpError) as info:
            simulate_grbm(scalar_model, [-60.0], 0.01, 1.0, seed=0,
                          scheme=Scheme.EULER_MARUYAMA, noise_scale=0.0)
        assert info.value.step == 1
        assert info.value.path_index == 0

    def test_tamed_euler_survives_deep_in_the_wall(self, scalar_model):
        traj = simulate_grbm(scalar_model, [-60.0], 0.01, 1.0, seed=0, noise_scale=0.0)
        assert np.all(np.isfinite(traj.states))
        assert np.all(np.abs(np.diff(traj.states[:, 0])) <= 1.0 + 1e-12)

    def test_non_finite_initial_state(self, oconnell_yor_d2):
        with pytest.raises(InputError):
            simulate_grbm(oconnell_yor_d2, [np.nan, 0.0], 0.01, 0.1, seed=0)

    def test_wrong_initial_shape(self, oconnell_yor_d2):
        with pytest.raises(ConfigurationError):
            simulate_grbm(oconnell_yor_d2, [0.0], 0.01, 0.1, seed=0)

    def test_hard_recursion_rejected_for_grbm(self, oconnell_yor_d2):
        with pytest.raises(ConfigurationError):
            simulate_grbm(oconnell_yor_d2, [0.0, 0.0], 0.01, 0.1, seed=0,
                          scheme="hard_recursion")

    def test_unknown_scheme(self):
        with pytest.raises(ConfigurationError, match="Supported schemes"):
            parse_scheme("milstein")


class TestHardParticles:
    def test_max_recursion_pushes_follower(self):
        # leader moves 0.125 per step; the follower waits at 0.25 until it is caught
        traj = simulate_hard_particles(2, [2.0, 0.0], [0.0, 0.25], 0.0625, 0.25, seed=0,
                                       noise_scale=0.0)
        assert np.array_equal(traj.states[:, 0], [0.0, 0.125, 0.25, 0.375, 0.5])
        assert np.array_equal(traj.states[:, 1], [0.25, 0.25, 0.25, 0.375, 0.5])

    def test_gap_closes_then_stays_zero(self):
        traj = simulate_hard_particles(2, [0.0, -2.0], [0.0, 0.5], 0.0625, 0.5, seed=0,
                                       noise_scale=0.0)
        gap = gaps(traj).states[:, 0]
        assert np.array_equal(gap[:5], [0.5, 0.375, 0.25, 0.125, 0.0])
        assert np.all(gap[4:] == 0.0)

    def test_order_is_preserved_with_noise(self):
        traj = simulate_hard_particles(4, [0.0, -1.0, -2.0, -3.0], [0.0, 0.1, 0.2, 0.3],
                                       0.01, 2.0, seed=8)
        assert np.all(np.diff(traj.states, axis=1) >= 0)

    def test_unordered_start(self):
        with pytest.raises(PreconditionError, match="ordered"):
            simulate_hard_particles(2, [0.0, -1.0], [1.0, 0.0], 0.01, 0.1, seed=0)


class TestSoftParticles:
    def test_leader_is_free_brownian_motion(self):
        mu = [-0.5, -1.0, -1.5]
        soft = simulate_soft_particles(3, mu, PotentialSpec.exponential(), [0.0, 1.0, 2.0],
                                       0.01, 1.0, seed=4, scheme=Scheme.EULER_MARUYAMA)
        hard = simulate_hard_particles(3, mu, [0.0, 1.0, 2.0], 0.01, 1.0, seed=4)
        assert np.allclose(soft.states[:, 0], hard.states[:, 0], rtol=1e-13)

    def test_gap_helper(self):
        traj = simulate_soft_particles(3, [0.0, -1.0, -2.0], PotentialSpec.exponential(),
                                       [0.0, 1.0, 3.0], 0.01, 0.0, seed=0)
        assert np.array_equal(gaps(traj).states, [[1.0, 2.0]])

    def test_gaps_need_two_coordinates(self, scalar_model):
        traj = simulate_grbm(scalar_model, [0.0], 0.01, 0.0, seed=0)
        with pytest.raises(PreconditionError):
            gaps(traj)


class TestMakeStepper:
    def test_dispatch(self, oconnell_yor_d2, hard_pair, soft_triple):
        assert make_stepper(oconnell_yor_d2, 0.01, 0).scheme is Scheme.TAMED_EULER
        assert make_stepper(hard_pair, 0.01, 0).scheme is Scheme.HARD_RECURSION
        assert make_stepper(soft_triple, 0.01, 0, Scheme.EULER_MARUYAMA).scheme \
            is Scheme.EULER_MARUYAMA

    def test_unknown_target(self):
        with pytest.raises(ConfigurationError):
            make_stepper(object(), 0.01, 0)

    def test_soft_particles_reject_hard_recursion(self):
        config = ParticleConfig(2, [0.0, -1.0], Reflection.SOFT)
        with pytest.raises(ConfigurationError):
            make_stepper(config, 0.01, 0, Scheme.HARD_RECURSION)


class TestNoise:
    @pytest.mark.parametrize("rho", [0.6, -0.4])
    def test_increments_carry_the_covariance(self, rho):
        spec = ModelSpec(2, [[1.0, rho], [rho, 1.0]], [-1.0, -1.0], tridiagonal_reflection(2))
        dt = 0.01
        stepper = GRBMStepper(spec, dt, 12)
        rows = np.arange(200_000)
        dw = np.concatenate([stepper.increments(rows, step) for step in range(5)])
        assert np.corrcoef(dw, rowvar=False)[0, 1] == pytest.approx(rho, abs=0.01)
        assert np.allclose(dw.var(axis=0) / dt, 1.0, atol=0.01)
