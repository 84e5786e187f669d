"""Load production: spline-distributed actuation couples, rigid-obstacle
penalty contact, and the moving-target law."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import _backend
from ._backend.fallback import CONTACT_DAMPING_RAMP  # noqa: F401  (re-export)
from .errors import ConfigError

DIRECTION_AXES = {"normal": 0, "binormal": 1, "tangent": 2}


def spline_basis(knots, total_length, s_eval) -> np.ndarray:
    """Basis matrix of the natural cubic interpolant through the control
    points with pinned zeros at both rod ends.

    Column j is the profile produced by a unit value at control point j, so
    evaluation is exactly linear in the control-point vector.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 1 or knots.size < 1:
        raise ConfigError("actuation.knots: need at least one control point")
    if np.any(np.diff(knots) <= 0.0):
        raise ConfigError("actuation.knots: knot positions must be strictly increasing")
    if knots[0] <= 0.0 or knots[-1] >= total_length:
        raise ConfigError("actuation.knots: knots must lie strictly inside (0, L)")
    x = np.concatenate(([0.0], knots, [total_length]))
    basis = np.empty((len(s_eval), knots.size))
    y = np.zeros(x.size)
    for j in range(knots.size):
        y[:] = 0.0
        y[j + 1] = 1.0
        basis[:, j] = CubicSpline(x, y, bc_type="natural")(s_eval)
    return basis


def evaluate_spline(control_points, knots, total_length, s_eval) -> np.ndarray:
    """Torque profile of the pinned-end natural cubic spline at s_eval."""
    control_points = np.asarray(control_points, dtype=float)
    return spline_basis(knots, total_length, s_eval) @ control_points


@dataclass
class SplineActuation:
    """Maps a flat action vector to the local-frame couple line density.

    One spline per actuated direction; each spline has the same knots and is
    scaled by torque_scale [N m / m] (the tangent/twist direction may carry
    its own scale). Action layout is direction-major: the first N entries
    drive the first direction, and so on.
    """

    knots: np.ndarray
    directions: tuple[str, ...]
    torque_scale: float
    total_length: float
    s_elements: np.ndarray
    direction_scales: dict | None = None

    def __post_init__(self):
        for d in self.directions:
            if d not in DIRECTION_AXES:
                raise ConfigError(f"actuation.directions: unknown direction {d!r}")
        overrides = self.direction_scales or {}
        self._scales = tuple(overrides.get(d, self.torque_scale) for d in self.directions)
        self.basis = spline_basis(self.knots, self.total_length, self.s_elements)
        self._profile = np.empty(self.s_elements.shape[0])

    @property
    def points_per_direction(self) -> int:
        return int(self.knots.size)

    @property
    def action_size(self) -> int:
        return self.points_per_direction * len(self.directions)

    def evaluate(self, action, out=None) -> np.ndarray:
        """Couple line density (n, 3), local frame; clamps action to [-1, 1]."""
        action = np.asarray(action, dtype=float)
        if action.shape != (self.action_size,):
            raise ValueError(
                f"action length {action.shape} does not match "
                f"{self.action_size} = {self.points_per_direction} control points"
                f" x {len(self.directions)} directions"
            )
        if out is None:
            out = np.zeros((self.s_elements.shape[0], 3))
        else:
            out[:] = 0.0
        npts = self.points_per_direction
        for slot, direction in enumerate(self.directions):
            cps = np.clip(action[slot * npts : (slot + 1) * npts], -1.0, 1.0)
            np.dot(self.basis, cps, out=self._profile)
            out[:, DIRECTION_AXES[direction]] = self._scales[slot] * self._profile
        return out


@dataclass
class SphereObstacle:
    center: np.ndarray
    radius: float
    stiffness: float = 1e5
    damping: float = 1e2

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if self.radius <= 0.0 or self.stiffness <= 0.0:
            raise ConfigError("obstacle: radius and stiffness must be positive")

    def penetration(self, point, point_radius=0.0) -> float:
        return float(self.radius + point_radius - np.linalg.norm(np.asarray(point) - self.center))

    def descriptor(self) -> np.ndarray:
        return np.concatenate((self.center, [self.radius]))

    def packed(self) -> np.ndarray:
        return np.concatenate((self.center, [self.radius, self.stiffness, self.damping]))


@dataclass
class CapsuleObstacle:
    endpoint_a: np.ndarray
    endpoint_b: np.ndarray
    radius: float
    stiffness: float = 1e5
    damping: float = 1e2

    def __post_init__(self):
        self.endpoint_a = np.asarray(self.endpoint_a, dtype=float)
        self.endpoint_b = np.asarray(self.endpoint_b, dtype=float)
        if self.radius <= 0.0 or self.stiffness <= 0.0:
            raise ConfigError("obstacle: radius and stiffness must be positive")

    def penetration(self, point, point_radius=0.0) -> float:
        point = np.asarray(point, dtype=float)
        axis = self.endpoint_b - self.endpoint_a
        t = np.clip(float((point - self.endpoint_a) @ axis) / float(axis @ axis), 0.0, 1.0)
        closest = self.endpoint_a + t * axis
        return float(self.radius + point_radius - np.linalg.norm(point - closest))

    def descriptor(self) -> np.ndarray:
        return np.concatenate((self.endpoint_a, self.endpoint_b, [self.radius]))

    def packed(self) -> np.ndarray:
        return np.concatenate(
            (self.endpoint_a, self.endpoint_b, [self.radius, self.stiffness, self.damping])
        )


def pack_obstacles(obstacles):
    """Split an obstacle list into the (spheres, capsules) kernel arrays."""
    spheres = [o.packed() for o in obstacles if isinstance(o, SphereObstacle)]
    capsules = [o.packed() for o in obstacles if isinstance(o, CapsuleObstacle)]
    return (
        np.array(spheres).reshape(-1, 6) if spheres else np.zeros((0, 6)),
        np.array(capsules).reshape(-1, 9) if capsules else np.zeros((0, 9)),
    )


def obstacle_contact_force(positions, velocities, node_radius, obstacle) -> tuple[np.ndarray, bool]:
    """Per-node contact force line density [N/m] from one obstacle.

    Spring k*d on penetration depth d (node inflated by its radius) plus a
    damping term against the normal approach speed that ramps in over
    CONTACT_DAMPING_RAMP so the force is continuous (and zero) at onset.
    """
    spheres, capsules = pack_obstacles([obstacle])
    force = np.zeros_like(positions)
    node_radius = np.asarray(node_radius, dtype=float)
    if node_radius.ndim == 0:
        node_radius = np.full(positions.shape[0], float(node_radius))
    touched = _backend.contact_forces(positions, velocities, node_radius, spheres, capsules, force)
    return force, bool(touched)


@dataclass
class TargetState:
    """Target position/velocity plus an orientation quaternion (w, x, y, z)."""

    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.orientation = np.asarray(self.orientation, dtype=float)

    def copy(self) -> "TargetState":
        return TargetState(self.position.copy(), self.velocity.copy(), self.orientation.copy())


@dataclass
class TargetLaw:
    """Motion law: 'static' or a bounded Ornstein-Uhlenbeck 'random-walk'
    reflected at a spherical workspace shell."""

    kind: str = "static"
    noise_scale: float = 0.3  # velocity diffusion [m/s/sqrt(s)]
    mean_reversion: float = 0.5  # [1/s]
    max_speed: float = 0.15  # [m/s]
    shell: tuple[float, float] = (0.3, 0.9)  # radii [m]

    def __post_init__(self):
        if self.kind not in ("static", "random-walk"):
            raise ConfigError(f"target.law: unknown law {self.kind!r}")
        if self.shell[0] >= self.shell[1]:
            raise ConfigError("target.shell: inner radius must be below outer")


def update_target(target: TargetState, dt: float, rng, law: TargetLaw) -> TargetState:
    """Advance the target one control interval; 'static' returns it unchanged."""
    if law.kind == "static":
        return target
    out = target.copy()
    vel = out.velocity
    vel += -law.mean_reversion * vel * dt + law.noise_scale * np.sqrt(dt) * rng.standard_normal(3)
    speed = float(np.linalg.norm(vel))
    if speed > law.max_speed:
        vel *= law.max_speed / speed
    out.position += vel * dt
    radius = float(np.linalg.norm(out.position))
    if radius > 1e-12:
        unit = out.position / radius
        radial = float(vel @ unit)
        if radius > law.shell[1]:
            out.position = unit * law.shell[1]
            if radial > 0.0:
                vel -= 2.0 * radial * unit
        elif radius < law.shell[0]:
            out.position = unit * law.shell[0]
            if radial < 0.0:
                vel -= 2.0 * radial * unit
    return out
