"""Observation layout, rewards, episode mechanics for the four cases."""

import numpy as np
import pytest

from armlab.environments import ArmEnv, create, reward_distance, reward_orientation
from armlab.rotation import rotation_about_axis_quaternion
from armlab.runner import RandomPolicy, ZeroPolicy, run_episode
from armlab.scenario import case_defaults

OBS_SIZES = {1: 44, 2: 52, 3: 44 + 7 * 4, 4: 44 + 4 * 10}
ACTION_SIZES = {1: 12, 2: 18, 3: 2, 4: 4}


class TestContracts:
    @pytest.mark.parametrize("case", [1, 2, 3, 4])
    def test_sizes(self, case):
        env = ArmEnv(case_defaults(case, seed=1))
        assert env.action_size() == ACTION_SIZES[case]
        assert env.observation_size() == OBS_SIZES[case]
        obs = env.reset(1)
        assert obs.shape == (OBS_SIZES[case],)

    def test_rest_samples_at_material_heights(self):
        env = ArmEnv(case_defaults(1, seed=3))
        obs = env.reset(3)
        samples = obs[:33].reshape(11, 3)
        np.testing.assert_allclose(samples[:, 2], np.linspace(0.0, 1.0, 11), atol=1e-12)
        np.testing.assert_allclose(samples[:, :2], 0.0, atol=1e-15)

    def test_stationary_target_velocity_convention(self):
        sc = case_defaults(1, seed=3)
        sc.target.law = "static"
        env = ArmEnv(sc)
        obs = env.reset(3)
        np.testing.assert_array_equal(obs[40:43], [0.0, 0.0, 0.0])  # direction
        assert obs[43] == 0.0  # magnitude

    def test_case2_rest_tip_quaternion_is_identity(self):
        env = ArmEnv(case_defaults(2, seed=5))
        obs = env.reset(5)
        np.testing.assert_allclose(obs[44:48], [1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_case3_obstacles_fixed_across_seeds(self):
        a = ArmEnv(case_defaults(3, seed=77))
        b = ArmEnv(case_defaults(3, seed=77))
        obs_a = a.reset(1)
        obs_b = b.reset(999)
        np.testing.assert_array_equal(obs_a[44:], obs_b[44:])
        np.testing.assert_array_equal(a.target.position, b.target.position)

    def test_case4_nest_depends_on_scenario_seed_only(self):
        a = ArmEnv(case_defaults(4, seed=5))
        b = ArmEnv(case_defaults(4, seed=5))
        c = ArmEnv(case_defaults(4, seed=6))
        np.testing.assert_array_equal(a.reset(0)[44:], b.reset(123)[44:])
        assert not np.array_equal(a.reset(0)[44:], c.reset(0)[44:])

    def test_case1_target_sampled_in_shell(self):
        sc = case_defaults(1, seed=2)
        env = ArmEnv(sc)
        for seed in range(8):
            env.reset(seed)
            radius = np.linalg.norm(env.target.position)
            assert 0.4 <= radius / sc.arm.length <= 0.8 + 1e-12


class TestRewards:
    def test_tip_at_target_gets_both_tiers(self):
        coeffs = case_defaults(1).reward
        assert reward_distance([0.1, 0.2, 0.3], [0.1, 0.2, 0.3], coeffs) == pytest.approx(1.5)

    def test_boundary_is_strict(self):
        coeffs = case_defaults(1).reward
        r1 = coeffs.bonus_tiers[0][0]
        reward = reward_distance([r1, 0.0, 0.0], [0.0, 0.0, 0.0], coeffs)
        assert reward == pytest.approx(-coeffs.distance_weight * r1)

    def test_distance_formula(self):
        coeffs = case_defaults(1).reward
        reward = reward_distance([0.5, 0.0, 0.0], [0.0, 0.0, 0.0], coeffs)
        assert reward == pytest.approx(-0.5)

    def test_orientation_identical_and_double_cover(self):
        coeffs = case_defaults(2).reward
        q = rotation_about_axis_quaternion([0, 0, 1], 0.7)
        assert reward_orientation(q, q, coeffs) == pytest.approx(1.5)
        assert reward_orientation(q, -q, coeffs) == pytest.approx(1.5)

    def test_orientation_quarter_turn(self):
        coeffs = case_defaults(2).reward
        qa = np.array([1.0, 0.0, 0.0, 0.0])
        qb = rotation_about_axis_quaternion([0, 0, 1], np.pi / 2)
        expected = -coeffs.orientation_weight * np.pi / 2
        assert reward_orientation(qa, qb, coeffs) == pytest.approx(expected)

    def test_held_at_target_episode_is_positive(self):
        sc = case_defaults(1, seed=1)
        sc.target.law = "static"
        sc.target.position = [0.0, 0.0, 1.0]  # the rest tip
        sc.episode_control_steps = 60
        env = ArmEnv(sc)
        result = run_episode(env, ZeroPolicy(env.action_size()))
        assert result.score > 0.0

    def test_never_near_episode_is_negative(self):
        sc = case_defaults(1, seed=1)
        sc.target.law = "static"
        sc.target.position = [0.7, 0.0, 0.1]
        sc.episode_control_steps = 60
        env = ArmEnv(sc)
        result = run_episode(env, ZeroPolicy(env.action_size()))
        assert result.score < 0.0


class TestStepMechanics:
    def test_zero_action_far_target_negative_reward(self):
        sc = case_defaults(1, seed=4)
        sc.target.law = "static"
        env = ArmEnv(sc)
        env.reset(4)
        result = env.step(np.zeros(env.action_size()))
        assert result.reward < 0.0
        assert not result.terminated

    def test_dimension_mismatch_fails_before_stepping(self):
        env = ArmEnv(case_defaults(1, seed=4))
        obs0 = env.reset(4)
        with pytest.raises(ValueError, match="action"):
            env.step(np.zeros(5))
        result = env.step(np.zeros(12))  # still usable: nothing was stepped
        assert result.observation.shape == obs0.shape

    def test_contact_has_no_reward_penalty(self):
        sc = case_defaults(3, seed=1)
        env = ArmEnv(sc)
        env.reset()
        result = None
        for _ in range(300):  # settles leaning against the wall
            result = env.step(np.array([0.55, -0.2]))
        assert result.info["contact"]
        # reward is exactly the distance term, no contact contribution
        expected = reward_distance(env.tip_position(), env.target.position, sc.reward)
        assert result.reward == pytest.approx(expected, abs=1e-12)

    def test_instability_terminates_cleanly(self):
        sc = case_defaults(2, seed=1)
        sc.actuation.torque_scale = 4e4  # deliberately destabilizing
        sc.actuation.twist_scale = 4e4
        env = ArmEnv(sc)
        obs = env.reset(1)
        policy = RandomPolicy(env.action_size(), seed=0)
        terminated = False
        for _ in range(sc.episode_control_steps):
            result = env.step(policy(obs))
            obs = result.observation
            assert np.all(np.isfinite(obs))
            if result.terminated:
                terminated = True
                assert "instability" in result.info
                assert result.reward == -10.0
                break
        assert terminated

    def test_truncation_at_episode_limit(self):
        sc = case_defaults(1, seed=2)
        sc.episode_control_steps = 3
        env = ArmEnv(sc)
        env.reset(2)
        for k in range(3):
            result = env.step(np.zeros(12))
        assert result.truncated and not result.terminated
        with pytest.raises(RuntimeError, match="reset"):
            env.step(np.zeros(12))

    def test_non_finite_action_entries_neutralized(self):
        env = ArmEnv(case_defaults(1, seed=2))
        env.reset(2)
        action = np.zeros(12)
        action[3] = np.nan
        action[7] = np.inf
        result = env.step(action)
        assert np.all(np.isfinite(result.observation))
        assert not result.terminated


class TestDeterminism:
    def _rollout(self, seed=9, steps=40):
        env = create(case_defaults(1, seed=seed))
        obs = env.reset(seed)
        policy = RandomPolicy(env.action_size(), seed=3)
        rows = [obs]
        rewards = []
        for _ in range(steps):
            result = env.step(policy(obs))
            obs = result.observation
            rows.append(obs)
            rewards.append(result.reward)
        return np.vstack(rows), np.array(rewards)

    def test_bit_identical_rollouts(self):
        obs_a, rew_a = self._rollout()
        obs_b, rew_b = self._rollout()
        assert np.array_equal(obs_a, obs_b)
        assert np.array_equal(rew_a, rew_b)

    def test_observations_finite_during_random_play(self):
        env = create(case_defaults(4, seed=8))
        obs = env.reset(8)
        policy = RandomPolicy(env.action_size(), seed=1)
        for _ in range(80):
            result = env.step(policy(obs))
            obs = result.observation
            assert np.all(np.isfinite(obs))
            if result.terminated or result.truncated:
                obs = env.reset(8)
