"""Momentum-balance right-hand sides and the explicit time stepper.

The public operations are pure (value-semantics in, fresh arrays out) and
delegate to the active kernel backend; environments drive the same kernels
through preallocated buffers for the substep loop.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._backend.fallback import WorkBuffers
from .errors import DynamicsBlowUpError, ZeroLengthElementError
from .kinematics import RodState, SectionProperties, StrainState, compute_strains

_EMPTY_SPHERES = np.zeros((0, 6))
_EMPTY_CAPSULES = np.zeros((0, 9))


@dataclass
class LoadField:
    """External loads: force line density per node (lab frame, N/m) and
    couple line density per element (local frame, N)."""

    force_density: np.ndarray
    couple_density: np.ndarray

    @classmethod
    def zeros(cls, n_elements: int) -> "LoadField":
        return cls(np.zeros((n_elements + 1, 3)), np.zeros((n_elements, 3)))

    def validate(self, n_elements: int) -> None:
        if self.force_density.shape != (n_elements + 1, 3):
            raise ValueError("force_density shape mismatch")
        if self.couple_density.shape != (n_elements, 3):
            raise ValueError("couple_density shape mismatch")
        if not (np.all(np.isfinite(self.force_density)) and np.all(np.isfinite(self.couple_density))):
            raise ValueError("non-finite load entries")


def stability_time_step(props: SectionProperties) -> float:
    """Explicit-integration bound dt <= 0.3 * l_min * sqrt(rho / E)."""
    return float(
        0.3 * np.min(props.rest_lengths) * np.sqrt(props.density / props.young_modulus)
    )


@dataclass
class IntegratorConfig:
    """Time step [s] and linear velocity damping coefficient [1/s]."""

    dt: float
    damping: float = 0.0

    def validate(self, props: SectionProperties) -> None:
        if not 0.0 < self.dt <= stability_time_step(props):
            raise ValueError(
                f"dt {self.dt} outside stability bound {stability_time_step(props):.3e}"
            )
        if self.damping < 0.0:
            raise ValueError("damping must be non-negative")


@dataclass
class EnergyBreakdown:
    translational: float
    rotational: float
    shear_stretch: float
    bend_twist: float

    @property
    def total(self) -> float:
        return self.translational + self.rotational + self.shear_stretch + self.bend_twist

    @property
    def kinetic(self) -> float:
        return self.translational + self.rotational


def compute_accelerations(
    state: RodState,
    props: SectionProperties,
    strains: StrainState,
    loads: LoadField,
    stretch_rate: np.ndarray | None = None,
):
    """Node linear and element angular accelerations.

    stretch_rate is the lagged d(e)/dt used by the dilatation-flux torque
    term; it defaults to zero.
    """
    n = props.n_elements
    loads.validate(n)
    diff = state.positions[1:] - state.positions[:-1]
    lengths = np.linalg.norm(diff, axis=1)
    if np.any(lengths < 1e-14):
        raise ZeroLengthElementError(int(np.flatnonzero(lengths < 1e-14)[0]))
    tangents = diff / lengths[:, None]
    if stretch_rate is None:
        stretch_rate = np.zeros(n)
    acc = np.empty((n + 1, 3))
    alpha = np.empty((n, 3))
    _backend.accelerations(
        state.frames,
        state.angular_velocities,
        props.rest_lengths,
        props.voronoi_lengths,
        props.node_masses,
        props.mass_second_moments,
        props.bend_twist_stiffness,
        props.shear_stretch_stiffness,
        tangents,
        strains.stretch,
        strains.shear,
        strains.curvature,
        stretch_rate,
        loads.force_density,
        loads.couple_density,
        acc,
        alpha,
    )
    for name, arr in (("node acceleration", acc), ("angular acceleration", alpha)):
        finite = np.isfinite(arr).all(axis=1)
        if not finite.all():
            raise DynamicsBlowUpError(int(np.flatnonzero(~finite)[0]), name)
    return acc, alpha


def step(
    state: RodState,
    props: SectionProperties,
    config: IntegratorConfig,
    loads: LoadField,
) -> RodState:
    """One position-Verlet (kick-drift-kick) step; returns the new state.

    Velocity damping is applied as an exponential decay factor per step.
    """
    new = state.copy()
    work = WorkBuffers(props.n_elements)
    stretch_prev = compute_strains(state, props).stretch.copy()
    status, _ = _backend.step_block(
        new.positions,
        new.velocities,
        new.frames,
        new.angular_velocities,
        props.rest_lengths,
        props.voronoi_lengths,
        props.node_masses,
        props.mass_second_moments,
        props.bend_twist_stiffness,
        props.shear_stretch_stiffness,
        np.zeros(props.n_elements + 1),
        stretch_prev,
        loads.force_density,
        loads.couple_density,
        _EMPTY_SPHERES,
        _EMPTY_CAPSULES,
        config.dt,
        config.damping,
        1,
        False,
        np.zeros(3),
        np.eye(3),
        work,
    )
    if status != 0:
        raise DynamicsBlowUpError(0, f"state after step (status {status})")
    return new


def apply_clamped_base(
    state: RodState,
    base_position=(0.0, 0.0, 0.0),
    base_frame: np.ndarray | None = None,
) -> RodState:
    """Reset node 0 and element 0 to the clamp values, in place."""
    state.positions[0] = base_position
    state.velocities[0] = 0.0
    state.frames[0] = np.eye(3) if base_frame is None else base_frame
    state.angular_velocities[0] = 0.0
    return state


def compute_energies(
    state: RodState, props: SectionProperties, strains: StrainState
) -> EnergyBreakdown:
    """Kinetic and elastic energy bookkeeping (diagnostic)."""
    t_kin, r_kin, e_shear, e_bend = _backend.energies(
        state.velocities,
        state.angular_velocities,
        props.node_masses,
        props.mass_second_moments,
        props.rest_lengths,
        props.voronoi_lengths,
        props.shear_stretch_stiffness,
        props.bend_twist_stiffness,
        strains.shear,
        strains.curvature,
    )
    return EnergyBreakdown(t_kin, r_kin, e_shear, e_bend)


@dataclass
class RodSimulation:
    """Owns a rod state plus the preallocated buffers for block stepping.

    This is the engine-facing wrapper environments use: obstacles, loads and
    the lagged stretch persist across control steps without reallocation.
    """

    state: RodState
    props: SectionProperties
    config: IntegratorConfig
    clamp: bool = True
    base_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    base_frame: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        n = self.props.n_elements
        self.work = WorkBuffers(n)
        self.loads = LoadField.zeros(n)
        self.spheres = _EMPTY_SPHERES
        self.capsules = _EMPTY_CAPSULES
        try:
            self.node_radius = self.props.node_radii()
        except ValueError:
            self.node_radius = np.zeros(n + 1)
        self.stretch_prev = np.empty(n)
        self.reset_rates()
        if self.clamp:
            apply_clamped_base(self.state, self.base_position, self.base_frame)

    def reset_rates(self) -> None:
        self.stretch_prev[:] = compute_strains(self.state, self.props).stretch

    def advance(self, n_substeps: int):
        """Run n_substeps; returns (status, contact_flag)."""
        return _backend.step_block(
            self.state.positions,
            self.state.velocities,
            self.state.frames,
            self.state.angular_velocities,
            self.props.rest_lengths,
            self.props.voronoi_lengths,
            self.props.node_masses,
            self.props.mass_second_moments,
            self.props.bend_twist_stiffness,
            self.props.shear_stretch_stiffness,
            self.node_radius,
            self.stretch_prev,
            self.loads.force_density,
            self.loads.couple_density,
            self.spheres,
            self.capsules,
            self.config.dt,
            self.config.damping,
            n_substeps,
            self.clamp,
            self.base_position,
            self.base_frame,
            self.work,
        )

    def energies(self) -> EnergyBreakdown:
        w = self.work
        status = _backend.strains(
            self.state.positions, self.state.frames, self.props.rest_lengths,
            self.props.voronoi_lengths, w.lengths, w.tangents, w.stretch,
            w.sigma, w.kappa,
        )
        if status != 0:
            raise ZeroLengthElementError(0)
        parts = _backend.energies(
            self.state.velocities, self.state.angular_velocities,
            self.props.node_masses, self.props.mass_second_moments,
            self.props.rest_lengths, self.props.voronoi_lengths,
            self.props.shear_stretch_stiffness, self.props.bend_twist_stiffness,
            w.sigma, w.kappa,
        )
        return EnergyBreakdown(*parts)
