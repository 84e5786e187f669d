"""arm-lab command line: scenario runner, kernel benchmark, validation.

Exit codes: 0 success, 2 configuration error, 3 instability in all episodes.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._backend import backend_name
from .benchmarks import run_benchmark
from .environments import ArmEnv, create
from .errors import ConfigError
from .recording import TrajectoryRecord, write_trajectory
from .runner import (
    RandomPolicy,
    ScriptedPolicy,
    StdinPolicy,
    ZeroPolicy,
    run_episode,
)
from .scenario import resolve_scenario
from .validation import conservation_suite, convergence_suite, timoshenko_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3


class SequencePolicy:
    """Plays a fixed action sequence; holds the last entry when exhausted."""

    def __init__(self, actions, hold_last=True):
        self.actions = [np.asarray(a, dtype=float) for a in actions]
        self.hold_last = hold_last
        self.cursor = 0

    def __call__(self, observation):
        if self.cursor < len(self.actions):
            action = self.actions[self.cursor]
            self.cursor += 1
            return action
        if self.hold_last:
            return self.actions[-1]
        return np.zeros_like(self.actions[-1])


def _build_policy(name, env: ArmEnv, seed, actions_file):
    if actions_file is not None:
        spec = json.loads(Path(actions_file).read_text())
        return SequencePolicy(spec["actions"], spec.get("hold_last", True))
    if name == "zero":
        return ZeroPolicy(env.action_size())
    if name == "scripted":
        return ScriptedPolicy(env)
    if name == "random":
        return RandomPolicy(env.action_size(), seed=seed)
    if name == "stdin":
        return StdinPolicy(env.action_size())
    raise ConfigError(f"policy: unknown policy {name!r}")


def _record_path(base: Path, index: int, total: int) -> Path:
    if total == 1:
        return base
    return base.with_name(f"{base.stem}-{index}{base.suffix}")


def _run_one(scenario, policy_name, seed, index, record_base, total, actions_file):
    env = create(scenario)
    policy = _build_policy(policy_name, env, seed, actions_file)
    recorder = TrajectoryRecord(scenario.episode_control_steps) if record_base else None
    result = run_episode(env, policy, seed=seed, recorder=recorder)
    if isinstance(policy, StdinPolicy):
        policy.finish(result.score)
    if recorder is not None:
        write_trajectory(recorder, _record_path(Path(record_base), index, total))
    return result


def cmd_run(args) -> int:
    scenario = resolve_scenario(args.scenario)
    episodes = args.episodes
    base_seed = args.seed if args.seed is not None else scenario.seed
    status_out = sys.stderr if args.policy == "stdin" else sys.stdout
    if args.policy == "stdin" and (episodes != 1 or args.parallel != 1):
        raise ConfigError("policy: stdin protocol supports a single sequential episode")
    seeds = [base_seed + k for k in range(episodes)]
    results = [None] * episodes
    if args.parallel > 1:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            futures = {
                pool.submit(
                    _run_one, scenario, args.policy, seeds[k], k, args.record,
                    episodes, args.actions,
                ): k
                for k in range(episodes)
            }
            for future, k in futures.items():
                results[k] = future.result()
    else:
        for k in range(episodes):
            results[k] = _run_one(
                scenario, args.policy, seeds[k], k, args.record, episodes, args.actions
            )
    unstable = 0
    for k, res in enumerate(results):
        status = "instability" if res.terminated else "truncated"
        unstable += res.terminated
        print(f"episode {k} seed {seeds[k]} score {res.score!r} steps {res.steps} status {status}",
              file=status_out)
    mean = sum(r.score for r in results) / episodes
    print(f"mean_score {mean!r}", file=status_out)
    return EXIT_UNSTABLE if unstable == episodes else EXIT_OK


def cmd_bench(args) -> int:
    resolutions = tuple(int(v) for v in args.resolutions.split(","))
    backends = args.backends.split(",") if args.backends else None
    report = run_benchmark(resolutions, backends)
    for backend in report.backends:
        for n in report.resolutions:
            print(f"{backend} n={n}: {report.per_step_seconds[backend][n] * 1e6:.2f} us/step")
        print(f"{backend} scaling ratio n={max(resolutions)}/n={min(resolutions)}: "
              f"{report.scaling_ratios[backend]:.2f}")
    if args.output:
        Path(args.output).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        print(f"wrote {args.output}")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.suite == "beams":
        res = timoshenko_suite()
        print(f"timoshenko: measured {res.measured_deflection:.6e} m, "
              f"theory {res.theory_deflection:.6e} m, rel err {res.relative_error:.3%}, "
              f"settled in {res.settle_time:.2f} s (KE {res.kinetic_energy:.2e} J), "
              f"wall {res.wall_time:.1f} s")
    elif args.suite == "conservation":
        res = conservation_suite()
        print(f"conservation: momentum rel err/step {res.momentum_relative_error:.2e}, "
              f"energy drift {res.energy_drift:.3%} over {res.steps} steps, "
              f"wall {res.wall_time:.1f} s")
    elif args.suite == "convergence":
        res = convergence_suite()
        print(f"convergence: resolutions {res.resolutions}")
        print(f"  curvature errors {['%.3e' % e for e in res.curvature_errors]} "
              f"ratios {['%.2f' % r for r in res.curvature_ratios]}")
        print(f"  shear errors {['%.3e' % e for e in res.shear_errors]} "
              f"ratios {['%.2f' % r for r in res.shear_ratios]}")
        print(f"  temporal Richardson ratio {res.temporal_ratio:.2f}")
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"suite: unknown suite {args.suite!r}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arm-lab",
        description="Cosserat soft-arm simulator and control environments "
                    f"(kernel backend: {backend_name()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenario episodes")
    run.add_argument("--scenario", required=True,
                     help="scenario JSON path or bundled name (case1..case4)")
    run.add_argument("--seed", type=int, default=None, help="base episode seed")
    run.add_argument("--policy", default="zero",
                     choices=["zero", "scripted", "random", "stdin"])
    run.add_argument("--record", default=None, help="trajectory CSV output path")
    run.add_argument("--episodes", type=int, default=1)
    run.add_argument("--parallel", type=int, default=1,
                     help="worker threads for independent seeds")
    run.add_argument("--actions", default=None,
                     help="JSON action-sequence file (overrides --policy)")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="benchmark stepping kernels")
    bench.add_argument("--resolutions", default="50,100,200,400")
    bench.add_argument("--backends", default=None,
                       help="comma list: compiled,python (default: all available)")
    bench.add_argument("--output", default=None, help="JSON report path")
    bench.set_defaults(func=cmd_bench)

    val = sub.add_parser("validate", help="run a numerical validation suite")
    val.add_argument("--suite", required=True,
                     choices=["beams", "conservation", "convergence"])
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
