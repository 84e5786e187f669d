"""In-process bridge exposing the arm environments to RL toolkits.

The bridge follows the prevailing five-tuple step convention
(observation, reward, terminated, truncated, info) so standard RL wrappers
apply unmodified. One handle owns one environment instance; handles are not
shareable across threads.
"""

from .bridge import (
    ArmBridgeEnv,
    BridgeClosedError,
    BridgeError,
    BridgeHandle,
    bridge_close,
    bridge_make,
    bridge_reset,
    bridge_step,
)

__version__ = "0.1.0"

__all__ = [
    "ArmBridgeEnv",
    "BridgeClosedError",
    "BridgeError",
    "BridgeHandle",
    "bridge_close",
    "bridge_make",
    "bridge_reset",
    "bridge_step",
]
