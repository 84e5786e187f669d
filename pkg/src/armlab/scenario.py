"""Scenario configuration: loading, validation, defaults, serialization.

Configs are JSON with plain scalar/list values; all defaults are
materialized at load so a loaded scenario round-trips exactly.
"""

import json
import math
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

from .errors import ConfigError

DEFAULT_TORQUE_SCALE = 130.0  # N m / m; saturating one control point bends ~90 deg
DEFAULT_TWIST_SCALE = 25.0  # N m / m; gentler scale for the twist direction


@dataclass
class ArmConfig:
    n_elements: int = 50
    length: float = 1.0
    base_radius: float = 0.025
    density: float = 1000.0
    young_modulus: float = 1.0e7
    poisson_ratio: float = 0.5
    shear_correction: float = 4.0 / 3.0


@dataclass
class PhysicsConfig:
    dt: float = 2.5e-5
    damping: float = 10.0
    gravity: list = field(default_factory=lambda: [0.0, 0.0, 0.0])


@dataclass
class ActuationConfig:
    control_points: int = 6
    torque_scale: float = DEFAULT_TORQUE_SCALE
    twist_scale: float = DEFAULT_TWIST_SCALE  # used for the tangent direction
    knot_fractions: list | None = None  # None: equidistant interior knots
    directions: list = field(default_factory=lambda: ["normal", "binormal"])


@dataclass
class RewardConfig:
    distance_weight: float = 1.0
    bonus_tiers: list = field(default_factory=lambda: [[0.10, 0.5], [0.05, 1.0]])
    orientation_weight: float = 0.5 / math.pi
    orientation_tiers: list = field(default_factory=lambda: [[0.2, 0.5], [0.1, 1.0]])


@dataclass
class TargetConfig:
    law: str = "static"
    position: list | None = None  # None: sampled at reset (cases 1-2)
    noise_scale: float = 0.3
    mean_reversion: float = 0.5
    max_speed: float = 0.15
    shell: list = field(default_factory=lambda: [0.3, 0.9])
    sample_radius: list = field(default_factory=lambda: [0.4, 0.8])
    sample_polar_max: float = math.radians(75.0)


@dataclass
class ObstaclesConfig:
    preset: str = "none"  # none | case3-wall | case4-nest | explicit
    stiffness: float = 1.0e5
    damping: float = 1.0e2
    items: list = field(default_factory=list)  # explicit obstacle dicts


@dataclass
class CaseScenario:
    case: int
    seed: int = 0
    episode_control_steps: int = 400
    substeps_per_control: int = 100
    arm: ArmConfig = field(default_factory=ArmConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    actuation: ActuationConfig = field(default_factory=ActuationConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    target: TargetConfig = field(default_factory=TargetConfig)
    obstacles: ObstaclesConfig = field(default_factory=ObstaclesConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_CASE_OVERRIDES = {
    1: {
        "actuation": {"control_points": 6, "directions": ["normal", "binormal"]},
        "target": {"law": "random-walk"},
    },
    2: {
        "actuation": {"control_points": 6, "directions": ["normal", "binormal", "tangent"]},
        "target": {"law": "static", "sample_radius": [0.5, 0.9]},
    },
    3: {
        "actuation": {
            "control_points": 2,
            "knot_fractions": [0.4, 0.9],
            "directions": ["binormal"],
        },
        "target": {"law": "static", "position": [0.62, 0.0, 0.55]},
        "obstacles": {"preset": "case3-wall"},
    },
    4: {
        "actuation": {
            "control_points": 2,
            "knot_fractions": [0.4, 0.9],
            "directions": ["normal", "binormal"],
        },
        "target": {"law": "static", "position": [0.5, 0.4, 0.6]},
        "obstacles": {"preset": "case4-nest"},
    },
}

_SECTION_TYPES = {
    "arm": ArmConfig,
    "physics": PhysicsConfig,
    "actuation": ActuationConfig,
    "reward": RewardConfig,
    "target": TargetConfig,
    "obstacles": ObstaclesConfig,
}

_SCALAR_FIELDS = ("case", "seed", "episode_control_steps", "substeps_per_control")


def case_defaults(case: int, seed: int = 0) -> CaseScenario:
    """Fully-populated scenario with the documented defaults of one case."""
    if case not in (1, 2, 3, 4):
        raise ConfigError(f"case: invalid case id {case!r} (expected 1-4)")
    scenario = CaseScenario(case=case, seed=seed)
    for section, values in _CASE_OVERRIDES[case].items():
        target = getattr(scenario, section)
        for key, value in values.items():
            setattr(target, key, value)
    return scenario


def _apply_section(obj, data: dict, path: str) -> None:
    allowed = set(obj.__dataclass_fields__)
    for key, value in data.items():
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
        setattr(obj, key, value)


def scenario_from_dict(data: dict) -> CaseScenario:
    """Build and validate a scenario from a parsed JSON document."""
    if not isinstance(data, dict):
        raise ConfigError("scenario: top level must be an object")
    if "case" not in data:
        raise ConfigError("case: missing required field")
    case = data["case"]
    if case not in (1, 2, 3, 4):
        raise ConfigError(f"case: invalid case id {case!r} (expected 1-4)")
    scenario = case_defaults(case, seed=int(data.get("seed", 0)))
    for key, value in data.items():
        if key in _SCALAR_FIELDS:
            continue
        if key not in _SECTION_TYPES:
            raise ConfigError(f"{key}: unknown key")
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected an object")
        _apply_section(getattr(scenario, key), value, key)
    if "episode_control_steps" in data:
        scenario.episode_control_steps = data["episode_control_steps"]
    if "substeps_per_control" in data:
        scenario.substeps_per_control = data["substeps_per_control"]
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: CaseScenario) -> None:
    if scenario.case not in (1, 2, 3, 4):
        raise ConfigError(f"case: invalid case id {scenario.case!r}")
    for name in ("episode_control_steps", "substeps_per_control"):
        value = getattr(scenario, name)
        if not isinstance(value, int) or value <= 0:
            raise ConfigError(f"{name}: must be a positive integer")
    arm = scenario.arm
    if arm.n_elements < 3:
        raise ConfigError("arm.n_elements: need at least 3 elements")
    for name in ("length", "base_radius", "density", "young_modulus"):
        if getattr(arm, name) <= 0.0:
            raise ConfigError(f"arm.{name}: must be positive")
    phys = scenario.physics
    if phys.dt <= 0.0:
        raise ConfigError("physics.dt: must be positive")
    if phys.damping < 0.0:
        raise ConfigError("physics.damping: must be non-negative")
    if len(phys.gravity) != 3:
        raise ConfigError("physics.gravity: expected a 3-vector")
    act = scenario.actuation
    if not isinstance(act.control_points, int) or act.control_points < 1:
        raise ConfigError("actuation.control_points: must be a positive integer")
    if act.torque_scale <= 0.0:
        raise ConfigError("actuation.torque_scale: must be positive")
    if act.twist_scale <= 0.0:
        raise ConfigError("actuation.twist_scale: must be positive")
    if act.knot_fractions is not None:
        fr = act.knot_fractions
        if len(fr) != act.control_points:
            raise ConfigError("actuation.knot_fractions: length must match control_points")
        if any(not 0.0 < f < 1.0 for f in fr) or any(
            b <= a for a, b in zip(fr, fr[1:])
        ):
            raise ConfigError(
                "actuation.knot_fractions: must be strictly increasing inside (0, 1)"
            )
    if not act.directions or any(
        d not in ("normal", "binormal", "tangent") for d in act.directions
    ):
        raise ConfigError("actuation.directions: subset of normal/binormal/tangent")
    rew = scenario.reward
    tiers = rew.bonus_tiers
    if (
        len(tiers) != 2
        or len(tiers[0]) != 2
        or len(tiers[1]) != 2
        or not tiers[1][0] < tiers[0][0]
        or not tiers[1][1] > tiers[0][1] > 0.0
    ):
        raise ConfigError(
            "reward.bonus_tiers: bonus tiers must satisfy r2 < r1 and b2 > b1 > 0"
        )
    ot = rew.orientation_tiers
    if (
        len(ot) != 2
        or not ot[1][0] < ot[0][0]
        or not ot[1][1] > ot[0][1] > 0.0
    ):
        raise ConfigError(
            "reward.orientation_tiers: bonus tiers must satisfy t2 < t1 and b2 > b1 > 0"
        )
    tgt = scenario.target
    if tgt.law not in ("static", "random-walk"):
        raise ConfigError(f"target.law: unknown law {tgt.law!r}")
    if tgt.position is not None and len(tgt.position) != 3:
        raise ConfigError("target.position: expected a 3-vector")
    if not tgt.shell[0] < tgt.shell[1]:
        raise ConfigError("target.shell: inner radius must be below outer")
    if not tgt.sample_radius[0] <= tgt.sample_radius[1]:
        raise ConfigError("target.sample_radius: lower bound above upper")
    obs = scenario.obstacles
    if obs.preset not in ("none", "case3-wall", "case4-nest", "explicit"):
        raise ConfigError(f"obstacles.preset: unknown preset {obs.preset!r}")
    if obs.preset == "explicit" and not obs.items:
        raise ConfigError("obstacles.items: explicit preset needs at least one item")
    for i, item in enumerate(obs.items):
        if not isinstance(item, dict) or "shape" not in item:
            raise ConfigError(f"obstacles.items[{i}].shape: missing")
        shape = item["shape"]
        if shape == "sphere":
            required = {"center", "radius"}
        elif shape == "capsule":
            required = {"a", "b", "radius"}
        else:
            raise ConfigError(f"obstacles.items[{i}].shape: unknown shape {shape!r}")
        missing = required - set(item)
        if missing:
            raise ConfigError(f"obstacles.items[{i}]: missing {sorted(missing)}")
        unknown = set(item) - required - {"shape", "stiffness", "damping"}
        if unknown:
            raise ConfigError(f"obstacles.items[{i}]: unknown key(s) {sorted(unknown)}")


def load_scenario(path) -> CaseScenario:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(data)


def save_scenario(scenario: CaseScenario, path) -> None:
    Path(path).write_text(scenario.to_json() + "\n")


def resolve_scenario(name_or_path) -> CaseScenario:
    """Resolve a CLI --scenario argument: a file path or a bundled name
    (case1, case2, case3, case4)."""
    path = Path(name_or_path)
    if path.exists():
        return load_scenario(path)
    bundle = resources.files("armlab").joinpath(f"data/scenarios/{name_or_path}.json")
    if bundle.is_file():
        return scenario_from_dict(json.loads(bundle.read_text()))
    raise ConfigError(f"scenario file not found: {name_or_path}")
