"""Bridge handles around one armlab environment instance.

Consumes the primary package only through its public environment surface
(create / reset / step / observation_size / action_size); rollouts through
the bridge are numerically identical to the primary's own.
"""

from dataclasses import dataclass, field

import numpy as np

from armlab.environments import ArmEnv, create
from armlab.errors import ConfigError


class BridgeError(Exception):
    """Configuration or usage error raised by the bridge."""


class BridgeClosedError(BridgeError):
    """Operation on a closed handle."""


@dataclass
class BridgeHandle:
    """Opaque reference to one environment instance plus its size cache."""

    env: ArmEnv | None
    case: int
    observation_size: int
    action_size: int
    last_observation: np.ndarray = field(default=None, repr=False)

    @property
    def closed(self) -> bool:
        return self.env is None

    def _require_open(self) -> ArmEnv:
        if self.env is None:
            raise BridgeClosedError("bridge handle is closed")
        return self.env


def bridge_make(scenario_path, seed: int | None = None) -> BridgeHandle:
    """Create an environment from a scenario file and reset it with seed.

    Primary configuration errors surface as BridgeError with the original
    message.
    """
    try:
        env = create(scenario_path)
    except ConfigError as exc:
        raise BridgeError(str(exc)) from exc
    handle = BridgeHandle(
        env=env,
        case=env.case,
        observation_size=env.observation_size(),
        action_size=env.action_size(),
    )
    handle.last_observation = env.reset(seed)
    return handle


def bridge_reset(handle: BridgeHandle, seed: int | None = None) -> np.ndarray:
    """Start a fresh episode; returns the initial observation."""
    env = handle._require_open()
    handle.last_observation = env.reset(seed)
    return handle.last_observation


def bridge_step(handle: BridgeHandle, action):
    """Advance one control step: returns (observation, reward, terminated,
    truncated, info). Dimension mismatches surface before any stepping."""
    env = handle._require_open()
    action = np.asarray(action, dtype=float)
    if action.shape != (handle.action_size,):
        raise BridgeError(
            f"action has shape {action.shape}, expected ({handle.action_size},)"
        )
    result = env.step(action)
    handle.last_observation = result.observation
    return (
        result.observation,
        result.reward,
        result.terminated,
        result.truncated,
        result.info,
    )


def bridge_close(handle: BridgeHandle) -> None:
    handle.env = None


class ArmBridgeEnv:
    """Class-style wrapper over a handle for toolkits expecting an object
    with reset/step/close methods and size attributes."""

    def __init__(self, scenario_path, seed: int | None = None):
        self._handle = bridge_make(scenario_path, seed)
        self.observation_size = self._handle.observation_size
        self.action_size = self._handle.action_size

    def reset(self, seed: int | None = None):
        return bridge_reset(self._handle, seed), {}

    def step(self, action):
        return bridge_step(self._handle, action)

    def close(self):
        bridge_close(self._handle)
