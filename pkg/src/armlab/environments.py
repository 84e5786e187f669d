"""Episodic control environments for the four compliant-arm cases.

Case 1: track a randomly moving target in 3D (bend actuation, 12 DOF).
Case 2: reach a random static target and match its tip orientation
        (bend + twist, 18 DOF).
Case 3: planar reach through a wall of capsule obstacles with one opening
        (2 control points, 2 DOF).
Case 4: reach through an unstructured nest of sphere obstacles
        (2 control points in two directions, 4 DOF).
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, RodSimulation
from .errors import ConfigError
from .interactions import (
    CapsuleObstacle,
    SphereObstacle,
    SplineActuation,
    TargetLaw,
    TargetState,
    pack_obstacles,
    update_target,
)
from .kinematics import RodState, SectionProperties
from .rotation import frame_to_quaternion, quaternion_geodesic_angle, rotation_about_axis_quaternion
from .scenario import CaseScenario, RewardConfig, resolve_scenario

N_ARM_SAMPLES = 11
VELOCITY_DIRECTION_FLOOR = 1e-8
INSTABILITY_PENALTY = -10.0
_STATUS_NAMES = {2: "non-finite state", 3: "speed limit exceeded"}


def build_arm(scenario: CaseScenario) -> tuple[SectionProperties, RodState]:
    """Upright arm at rest; rest lengths are taken from the discrete node
    grid so the rest configuration has exactly zero strain."""
    arm = scenario.arm
    grid = np.linspace(0.0, arm.length, arm.n_elements + 1)
    props = SectionProperties.circular(
        arm.n_elements,
        arm.length,
        arm.base_radius,
        arm.density,
        arm.young_modulus,
        arm.poisson_ratio,
        arm.shear_correction,
        rest_lengths=np.diff(grid),
    )
    positions = np.zeros((arm.n_elements + 1, 3))
    positions[:, 2] = grid
    state = RodState(
        positions=positions,
        velocities=np.zeros((arm.n_elements + 1, 3)),
        frames=np.tile(np.eye(3), (arm.n_elements, 1, 1)),
        angular_velocities=np.zeros((arm.n_elements, 3)),
    )
    return props, state


def reward_distance(tip, target, coeffs: RewardConfig) -> float:
    """-w_d * distance plus the two-tier proximity bonus (strict radii)."""
    dist = float(np.linalg.norm(np.asarray(tip) - np.asarray(target)))
    (r1, b1), (r2, b2) = coeffs.bonus_tiers
    reward = -coeffs.distance_weight * dist
    if dist < r1:
        reward += b1
    if dist < r2:
        reward += b2
    return reward


def reward_orientation(tip_quat, target_quat, coeffs: RewardConfig) -> float:
    """-w_o * geodesic angle plus the two-tier alignment bonus."""
    theta = quaternion_geodesic_angle(tip_quat, target_quat)
    (t1, b1), (t2, b2) = coeffs.orientation_tiers
    reward = -coeffs.orientation_weight * theta
    if theta < t1:
        reward += b1
    if theta < t2:
        reward += b2
    return reward


def case3_wall(length: float, stiffness: float, damping: float) -> list:
    """Horizontal capsule bars at x = 0.35 L with one opening; the arm has to
    bend through the gap between the second and third bar."""
    x = 0.35 * length
    half_span = 0.4 * length
    radius = 0.05 * length
    bars = []
    for z in (0.15, 0.45, 0.75, 1.05):
        bars.append(
            CapsuleObstacle(
                endpoint_a=[x, -half_span, z * length],
                endpoint_b=[x, half_span, z * length],
                radius=radius,
                stiffness=stiffness,
                damping=damping,
            )
        )
    return bars


def case4_nest(length: float, seed: int, stiffness: float, damping: float, target) -> list:
    """Seeded random nest of 10 spheres between the arm and the target."""
    rng = np.random.default_rng(seed)
    target = np.asarray(target, dtype=float)
    spheres = []
    lo = np.array([0.10, 0.00, 0.15]) * length
    hi = np.array([0.55, 0.45, 0.85]) * length
    while len(spheres) < 10:
        center = rng.uniform(lo, hi)
        radius = rng.uniform(0.05, 0.09) * length
        if np.hypot(center[0], center[1]) < radius + 0.08 * length:
            continue  # keep the upright rest pose out of contact
        if np.linalg.norm(center - target) < radius + 0.05 * length:
            continue  # keep the target reachable
        spheres.append(
            SphereObstacle(center=center, radius=radius, stiffness=stiffness, damping=damping)
        )
    return spheres


def materialize_obstacles(scenario: CaseScenario) -> list:
    cfg = scenario.obstacles
    if cfg.preset == "none":
        return []
    if cfg.preset == "case3-wall":
        return case3_wall(scenario.arm.length, cfg.stiffness, cfg.damping)
    if cfg.preset == "case4-nest":
        if scenario.target.position is None:
            raise ConfigError("target.position: case4-nest needs a fixed target")
        return case4_nest(
            scenario.arm.length, scenario.seed, cfg.stiffness, cfg.damping,
            scenario.target.position,
        )
    items = []
    for i, item in enumerate(cfg.items):
        stiffness = item.get("stiffness", cfg.stiffness)
        damping = item.get("damping", cfg.damping)
        if item["shape"] == "sphere":
            items.append(SphereObstacle(item["center"], item["radius"], stiffness, damping))
        else:
            items.append(CapsuleObstacle(item["a"], item["b"], item["radius"], stiffness, damping))
    return items


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict = field(default_factory=dict)


class ArmEnv:
    """Reset/step environment around one simulated arm.

    A single instance is strictly sequential; run several instances for
    parallel rollouts.
    """

    def __init__(self, scenario: CaseScenario):
        self.scenario = scenario
        self.case = scenario.case
        self.obstacles = materialize_obstacles(scenario)
        self._spheres, self._capsules = pack_obstacles(self.obstacles)
        self._obstacle_tail = (
            np.concatenate([o.descriptor() for o in self.obstacles])
            if self.obstacles
            else np.zeros(0)
        )
        arm = scenario.arm
        knots = scenario.actuation.knot_fractions
        if knots is None:
            npts = scenario.actuation.control_points
            knots = [(j + 1) / (npts + 1) for j in range(npts)]
        props, _ = build_arm(scenario)
        mid = np.concatenate(([0.0], np.cumsum(props.rest_lengths)))
        self._s_elements = 0.5 * (mid[:-1] + mid[1:])
        self.actuation = SplineActuation(
            knots=np.asarray(knots) * arm.length,
            directions=tuple(scenario.actuation.directions),
            torque_scale=scenario.actuation.torque_scale,
            total_length=arm.length,
            s_elements=self._s_elements,
            direction_scales={"tangent": scenario.actuation.twist_scale},
        )
        self.law = TargetLaw(
            kind=scenario.target.law,
            noise_scale=scenario.target.noise_scale,
            mean_reversion=scenario.target.mean_reversion,
            max_speed=scenario.target.max_speed,
            shell=(
                scenario.target.shell[0] * arm.length,
                scenario.target.shell[1] * arm.length,
            ),
        )
        self.control_dt = scenario.physics.dt * scenario.substeps_per_control
        # 11 sample points at material coordinates j L / 10, interpolated
        # linearly on the rest grid
        s_samples = np.linspace(0.0, arm.length, N_ARM_SAMPLES)
        idx = np.clip(np.searchsorted(mid, s_samples, side="right") - 1, 0, arm.n_elements - 1)
        self._sample_index = idx
        self._sample_weight = (s_samples - mid[idx]) / (mid[idx + 1] - mid[idx])
        self._obs_size = (
            3 * N_ARM_SAMPLES + 4 + 3 + 4
            + (8 if self.case == 2 else 0)
            + self._obstacle_tail.size
        )
        self.sim: RodSimulation | None = None
        self.target: TargetState | None = None
        self.rng = None
        self._needs_reset = True
        self._step_count = 0
        self._last_obs = np.zeros(self._obs_size)

    # -- sizes ------------------------------------------------------------
    def observation_size(self) -> int:
        return self._obs_size

    def action_size(self) -> int:
        return self.actuation.action_size

    # -- episode control ----------------------------------------------------
    def reset(self, seed: int | None = None) -> np.ndarray:
        """Fresh episode: upright arm at rest, target re-sampled (cases 1-2).

        With seed=None the scenario seed is used, so repeated resets of the
        same scenario reproduce the same episode.
        """
        if seed is None:
            seed = self.scenario.seed
        self.rng = np.random.default_rng(seed)
        props, state = build_arm(self.scenario)
        self.sim = RodSimulation(
            state,
            props,
            IntegratorConfig(self.scenario.physics.dt, self.scenario.physics.damping),
            clamp=True,
        )
        self.sim.spheres = self._spheres
        self.sim.capsules = self._capsules
        gravity = np.asarray(self.scenario.physics.gravity, dtype=float)
        self.sim.loads.force_density[:] = (
            self.scenario.arm.density * np.pi * self.scenario.arm.base_radius**2 * gravity
        )
        self.target = self._sample_target()
        self._step_count = 0
        self._needs_reset = False
        obs = self._build_observation()
        self._last_obs = obs
        return obs

    def _sample_target(self) -> TargetState:
        cfg = self.scenario.target
        length = self.scenario.arm.length
        if cfg.position is not None:
            return TargetState(position=np.asarray(cfg.position, dtype=float))
        azimuth = self.rng.uniform(0.0, 2.0 * np.pi)
        polar = self.rng.uniform(0.0, cfg.sample_polar_max)
        radius = self.rng.uniform(cfg.sample_radius[0], cfg.sample_radius[1]) * length
        position = radius * np.array(
            [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)]
        )
        orientation = np.array([1.0, 0.0, 0.0, 0.0])
        if self.case == 2:
            # axial direction upright, normal/binormal rotated in-plane
            orientation = rotation_about_axis_quaternion([0.0, 0.0, 1.0], self.rng.uniform(0.0, 2.0 * np.pi))
        return TargetState(position=position, orientation=orientation)

    def step(self, action) -> StepResult:
        """Hold the action for one control interval of physics substeps."""
        if self._needs_reset:
            raise RuntimeError("environment needs reset() before step()")
        action = np.asarray(action, dtype=float)
        if action.shape != (self.action_size(),):
            raise ValueError(
                f"action has shape {action.shape}, expected ({self.action_size()},)"
            )
        action = np.where(np.isfinite(action), action, 0.0)
        self.actuation.evaluate(action, out=self.sim.loads.couple_density)
        status, contact = self.sim.advance(self.scenario.substeps_per_control)
        self._step_count += 1
        if status != 0:
            self._needs_reset = True
            info = {
                "instability": _STATUS_NAMES.get(status, f"status {status}"),
                "time": self._step_count * self.control_dt,
            }
            return StepResult(self._last_obs.copy(), INSTABILITY_PENALTY, True, False, info)
        self.target = update_target(self.target, self.control_dt, self.rng, self.law)
        obs = self._build_observation()
        tip = self.sim.state.positions[-1]
        dist = float(np.linalg.norm(tip - self.target.position))
        reward = reward_distance(tip, self.target.position, self.scenario.reward)
        info = {
            "time": self._step_count * self.control_dt,
            "tip_distance": dist,
            "contact": bool(contact),
        }
        if self.case == 2:
            tip_quat = frame_to_quaternion(self.sim.state.frames[-1])
            reward += reward_orientation(tip_quat, self.target.orientation, self.scenario.reward)
            info["orientation_error"] = quaternion_geodesic_angle(
                tip_quat, self.target.orientation
            )
        truncated = self._step_count >= self.scenario.episode_control_steps
        if truncated:
            self._needs_reset = True
        self._last_obs = obs
        return StepResult(obs, reward, False, truncated, info)

    # -- observation --------------------------------------------------------
    def _split_velocity(self, velocity) -> tuple[np.ndarray, float]:
        magnitude = float(np.linalg.norm(velocity))
        if magnitude < VELOCITY_DIRECTION_FLOOR:
            return np.zeros(3), magnitude
        return velocity / magnitude, magnitude

    def _build_observation(self) -> np.ndarray:
        pos = self.sim.state.positions
        idx, w = self._sample_index, self._sample_weight
        samples = (1.0 - w)[:, None] * pos[idx] + w[:, None] * pos[idx + 1]
        tip_dir, tip_mag = self._split_velocity(self.sim.state.velocities[-1])
        tgt_dir, tgt_mag = self._split_velocity(self.target.velocity)
        parts = [
            samples.ravel(),
            tip_dir,
            [tip_mag],
            self.target.position,
            tgt_dir,
            [tgt_mag],
        ]
        if self.case == 2:
            parts.append(frame_to_quaternion(self.sim.state.frames[-1]))
            parts.append(self.target.orientation)
        if self._obstacle_tail.size:
            parts.append(self._obstacle_tail)
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    # -- diagnostics ----------------------------------------------------------
    def tip_position(self) -> np.ndarray:
        return self.sim.state.positions[-1].copy()

    def sample_positions(self) -> np.ndarray:
        pos = self.sim.state.positions
        idx, w = self._sample_index, self._sample_weight
        return (1.0 - w)[:, None] * pos[idx] + w[:, None] * pos[idx + 1]


def create(scenario) -> ArmEnv:
    """Environment factory; accepts a CaseScenario, path, or bundled name."""
    if not isinstance(scenario, CaseScenario):
        scenario = resolve_scenario(scenario)
    return ArmEnv(scenario)
