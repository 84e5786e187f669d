"""Episode execution: policies, the run loop, and the stdin protocol."""

import sys
from dataclasses import dataclass

import numpy as np

from .environments import ArmEnv
from .recording import TrajectoryRecord

# observation layout offsets shared by the scripted policy
_TIP_POS = slice(30, 33)
_TARGET_POS = slice(37, 40)

SCRIPTED_GAIN = 2.5


class ZeroPolicy:
    """All-zero action; the arm stays passive."""

    def __init__(self, action_size: int):
        self.action_size = action_size

    def __call__(self, observation) -> np.ndarray:
        return np.zeros(self.action_size)


class RandomPolicy:
    """Uniform random actions in [-1, 1] from a dedicated generator."""

    def __init__(self, action_size: int, seed: int = 0):
        self.action_size = action_size
        self.rng = np.random.default_rng(seed)

    def __call__(self, observation) -> np.ndarray:
        return self.rng.uniform(-1.0, 1.0, self.action_size)


class ScriptedPolicy:
    """Proportional planar bend toward the target.

    Commands a uniform value on all bending control points, proportional to
    the polar-angle error between the tip and the target and aimed at the
    target's azimuth: a couple about the binormal moves the tip along
    +normal (+x), a couple about the normal moves it along -binormal (-y).
    Twist control points (case 2) are left at zero.
    """

    def __init__(self, env: ArmEnv, gain: float = SCRIPTED_GAIN):
        self.gain = gain
        self.directions = env.actuation.directions
        self.points = env.actuation.points_per_direction

    def __call__(self, observation) -> np.ndarray:
        tip = observation[_TIP_POS]
        target = observation[_TARGET_POS]
        polar_tip = np.arctan2(np.hypot(tip[0], tip[1]), tip[2])
        polar_target = np.arctan2(np.hypot(target[0], target[1]), target[2])
        azimuth = np.arctan2(target[1], target[0])
        bend = np.clip(self.gain * (polar_target - polar_tip), -1.0, 1.0)
        command = {
            "normal": -np.sin(azimuth) * bend,
            "binormal": np.cos(azimuth) * bend,
            "tangent": 0.0,
        }
        action = np.empty(self.points * len(self.directions))
        for slot, direction in enumerate(self.directions):
            action[slot * self.points : (slot + 1) * self.points] = command[direction]
        return action


class StdinPolicy:
    """Line protocol for external controllers: observation out, action in.

    Each observation is one line of space-separated decimals (repr precision,
    so values round-trip exactly); the reply line is the action.
    """

    def __init__(self, action_size: int, infile=None, outfile=None):
        self.action_size = action_size
        self.infile = infile if infile is not None else sys.stdin
        self.outfile = outfile if outfile is not None else sys.stdout

    def emit(self, observation) -> None:
        self.outfile.write(" ".join(repr(float(v)) for v in observation) + "\n")
        self.outfile.flush()

    def finish(self, score: float) -> None:
        self.outfile.write(f"done {score!r}\n")
        self.outfile.flush()

    def __call__(self, observation) -> np.ndarray:
        self.emit(observation)
        line = self.infile.readline()
        if not line:
            raise EOFError("stdin policy: no action received")
        values = [float(v) for v in line.split()]
        if len(values) != self.action_size:
            raise ValueError(
                f"stdin policy: expected {self.action_size} action values, got {len(values)}"
            )
        return np.array(values)


@dataclass
class EpisodeResult:
    score: float
    steps: int
    terminated: bool
    truncated: bool


def run_episode(env: ArmEnv, policy, seed: int | None = None,
                recorder: TrajectoryRecord | None = None) -> EpisodeResult:
    """Reset and play one full episode; returns the cumulative reward.

    Instability terminates the episode cleanly and is reported through the
    result, not raised.
    """
    observation = env.reset(seed)
    score = 0.0
    steps = 0
    terminated = truncated = False
    while not (terminated or truncated):
        action = policy(observation)
        result = env.step(action)
        observation = result.observation
        score += result.reward
        steps += 1
        terminated, truncated = result.terminated, result.truncated
        if recorder is not None and not terminated:
            recorder.add_row(
                steps,
                result.info["time"],
                env.sample_positions(),
                env.tip_position(),
                env.target.position,
                env.target.velocity,
                result.reward,
                score,
                result.info.get("contact", False),
            )
    return EpisodeResult(score, steps, terminated, truncated)
