"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report lines as they complete.
"""

import json
import time
from importlib import resources

import numpy as np
import pytest

from armlab._backend import available_backends, get_backend
from armlab.benchmarks import time_backend
from armlab.environments import ArmEnv, create
from armlab.runner import RandomPolicy, ScriptedPolicy, ZeroPolicy, run_episode
from armlab.scenario import case_defaults, resolve_scenario
from armlab.validation import (
    CONVERGENCE_RATIO_RANGE,
    _helix_errors,
    conservation_suite,
    timoshenko_suite,
)

ACTION_SIZES = {1: 12, 2: 18, 3: 2, 4: 4}
OBS_SIZES = {1: 44, 2: 52, 3: 72, 4: 84}


def report(name: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {'PASS' if passed else 'FAIL'} — {name}: {detail}", flush=True)


class TestAcceptance:
    def test_timoshenko_cantilever(self):
        result = timoshenko_suite(n_elements=100)
        detail = (
            f"deflection {result.measured_deflection:.6e} m vs theory "
            f"{result.theory_deflection:.6e} m, rel err {result.relative_error:.4%} "
            f"(tol 1%), settled KE {result.kinetic_energy:.1e} J, "
            f"wall {result.wall_time:.1f} s (limit 60 s)"
        )
        passed = result.passed and result.wall_time < 60.0
        report("Timoshenko cantilever", passed, detail)
        assert result.relative_error < 0.01
        assert result.kinetic_energy < 1e-10
        assert result.wall_time < 60.0

    def test_conservation(self):
        result = conservation_suite(steps=100_000)
        detail = (
            f"momentum rel err/step {result.momentum_relative_error:.2e} (tol 1e-12), "
            f"energy drift {result.energy_drift:.4%} over {result.steps} steps (tol 1%), "
            f"wall {result.wall_time:.1f} s (limit 120 s)"
        )
        passed = result.passed and result.wall_time < 120.0
        report("Conservation", passed, detail)
        assert result.momentum_relative_error < 1e-12
        assert result.energy_drift < 0.01
        assert result.wall_time < 120.0

    def test_spatial_convergence(self):
        pairs = [(50, 100), (100, 200)]
        lo, hi = CONVERGENCE_RATIO_RANGE
        ratios = []
        for n, n2 in pairs:
            err_n, err_2n = _helix_errors(n), _helix_errors(n2)
            ratios.append((err_n[0] / err_2n[0], err_n[1] / err_2n[1]))
        detail = ", ".join(
            f"n={n}->{n2}: kappa ratio {rk:.2f}, sigma ratio {rs:.2f}"
            for (n, n2), (rk, rs) in zip(pairs, ratios)
        ) + f" (required [{lo}, {hi}])"
        passed = all(lo <= r <= hi for pair in ratios for r in pair)
        report("Spatial convergence", passed, detail)
        assert passed

    def test_linear_scaling(self):
        if "compiled" not in available_backends():
            report("Linear scaling", False, "compiled kernel core is not built")
            pytest.fail("linear-scaling criterion requires the compiled core")
        backend = get_backend("compiled")
        t100 = time_backend(backend, 100)
        t400 = time_backend(backend, 400)
        ratio = t400 / t100
        detail = (
            f"per-step {t100 * 1e6:.2f} us (n=100) vs {t400 * 1e6:.2f} us (n=400), "
            f"ratio {ratio:.2f} (required [3, 5])"
        )
        passed = 3.0 <= ratio <= 5.0
        report("Linear scaling", passed, detail)
        assert passed

    def test_environment_contracts(self):
        sizes_ok = True
        details = []
        for case in (1, 2, 3, 4):
            env = ArmEnv(case_defaults(case, seed=1))
            obs = env.reset(1)
            ok = (
                env.action_size() == ACTION_SIZES[case]
                and env.observation_size() == OBS_SIZES[case]
                and obs.shape == (OBS_SIZES[case],)
            )
            sizes_ok &= ok
            details.append(f"case {case}: action {env.action_size()}, obs {env.observation_size()}")

        held = case_defaults(1, seed=1)
        held.target.law = "static"
        held.target.position = [0.0, 0.0, 1.0]
        held_score = run_episode(create(held), ZeroPolicy(12)).score
        far = case_defaults(1, seed=1)
        far.target.law = "static"
        far.target.position = [0.7, 0.0, 0.1]
        far_score = run_episode(create(far), ZeroPolicy(12)).score
        signs_ok = held_score > 0.0 and far_score < 0.0
        detail = (
            "; ".join(details)
            + f"; held-at-target score {held_score:.1f} > 0, never-near score {far_score:.1f} < 0"
        )
        passed = sizes_ok and signs_ok
        report("Environment contracts", passed, detail)
        assert passed

    def test_obstacle_exploitation_witness(self):
        actions_spec = json.loads(
            resources.files("armlab")
            .joinpath("data/scenarios/case3_demo_actions.json")
            .read_text()
        )
        tips = {}
        for label, with_obstacles in (("with", True), ("without", False)):
            scenario = resolve_scenario("case3")
            if not with_obstacles:
                scenario.obstacles.preset = "none"
            env = create(scenario)
            env.reset()
            cursor = 0
            sequence = actions_spec["actions"]
            for _ in range(scenario.episode_control_steps):
                action = sequence[min(cursor, len(sequence) - 1)]
                cursor += 1
                result = env.step(np.asarray(action, dtype=float))
                assert not result.terminated, "demonstration action went unstable"
            tips[label] = env.tip_position()
        length = resolve_scenario("case3").arm.length
        difference = float(np.linalg.norm(tips["with"] - tips["without"]))
        detail = (
            f"end tip with obstacles {np.round(tips['with'], 3)} vs without "
            f"{np.round(tips['without'], 3)}; difference {difference:.3f} m "
            f"(required > {0.05 * length:.3f} m)"
        )
        passed = difference > 0.05 * length
        report("Obstacle exploitation witness", passed, detail)
        assert passed

    def test_robustness_random_rollouts(self):
        start = time.perf_counter()
        total = {}
        for case in (1, 2, 3, 4):
            env = ArmEnv(case_defaults(case, seed=case))
            policy = RandomPolicy(env.action_size(), seed=1000 + case)
            obs = env.reset(case)
            steps = 0
            episode = 0
            clean_terminations = 0
            while steps < 10_000:
                result = env.step(policy(obs))
                obs = result.observation
                steps += 1
                assert np.all(np.isfinite(obs)), f"case {case}: NaN observation at step {steps}"
                assert np.isfinite(result.reward)
                if result.terminated:
                    clean_terminations += 1
                if result.terminated or result.truncated:
                    episode += 1
                    obs = env.reset(case * 1000 + episode)
            total[case] = clean_terminations
        detail = (
            f"10,000 random-action steps per case; clean instability terminations "
            f"{total}; no crash, observations finite; wall {time.perf_counter() - start:.0f} s"
        )
        report("Robustness", True, detail)

    def test_determinism_bit_identical(self):
        mismatch = []
        for case in (1, 2, 3, 4):
            streams = []
            for _ in range(2):
                env = ArmEnv(case_defaults(case, seed=17))
                policy = RandomPolicy(env.action_size(), seed=29)
                obs = env.reset(17)
                rows = [obs.copy()]
                rewards = []
                for _ in range(25):
                    result = env.step(policy(obs))
                    obs = result.observation
                    rows.append(obs.copy())
                    rewards.append(result.reward)
                streams.append((np.vstack(rows), np.array(rewards)))
            same = np.array_equal(streams[0][0], streams[1][0]) and np.array_equal(
                streams[0][1], streams[1][1]
            )
            if not same:
                mismatch.append(case)
        detail = (
            "25-step random rollouts repeated per case, observations and rewards "
            + ("bit-identical" if not mismatch else f"MISMATCH in cases {mismatch}")
        )
        report("Determinism", not mismatch, detail)
        assert not mismatch

    def test_scripted_policy_substitute(self):
        # stands in for the paper's RL learning curves (not desk-reproducible)
        scenario = resolve_scenario("case1_static")
        env = create(scenario)
        env.reset()
        target = env.target.position.copy()
        initial = float(np.linalg.norm(env.tip_position() - target))
        result = run_episode(env, ScriptedPolicy(env))
        final = float(np.linalg.norm(env.tip_position() - target))
        detail = (
            f"tip-target distance {initial:.3f} m -> {final:.3f} m "
            f"({final / initial:.1%}, required < 50%); episode score {result.score:.1f}"
        )
        passed = final < 0.5 * initial
        report("Scripted-policy distance reduction", passed, detail)
        assert passed
