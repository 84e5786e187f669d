"""Discrete rod representation and strain/kinematic reductions.

Staggered layout: n+1 nodes carry position/velocity/mass, n elements carry
frames/angular velocity/shear/stretch, n-1 interior nodes carry curvature
and the bend/twist stiffness.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FrameDiscontinuityError, ZeroLengthElementError
from .rotation import orthonormalize, rotation_matrix, rotation_vector

FRAME_TOL = 1e-10
MIN_ELEMENTS = 3


@dataclass
class RodState:
    """Dynamic state of the discretized arm.

    positions, velocities: (n+1, 3) lab frame [m], [m/s]
    frames: (n, 3, 3) lab->local rotation matrices; rows are the directors
    angular_velocities: (n, 3) local frame [rad/s]
    """

    positions: np.ndarray
    velocities: np.ndarray
    frames: np.ndarray
    angular_velocities: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.frames.shape[0]

    def copy(self) -> "RodState":
        return RodState(
            self.positions.copy(),
            self.velocities.copy(),
            self.frames.copy(),
            self.angular_velocities.copy(),
        )

    def validate(self) -> None:
        n = self.n_elements
        if n < MIN_ELEMENTS:
            raise ValueError(f"rod needs at least {MIN_ELEMENTS} elements, got {n}")
        if self.positions.shape != (n + 1, 3) or self.velocities.shape != (n + 1, 3):
            raise ValueError("node array shapes inconsistent with element count")
        if self.angular_velocities.shape != (n, 3):
            raise ValueError("angular velocity shape inconsistent with element count")
        for name in ("positions", "velocities", "frames", "angular_velocities"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite entries in {name}")
        eye = np.eye(3)
        for i, q in enumerate(self.frames):
            if np.max(np.abs(q.T @ q - eye)) > FRAME_TOL:
                raise ValueError(f"frame {i} is not orthonormal to {FRAME_TOL}")


@dataclass
class SectionProperties:
    """Rest-configuration constants of the cross sections.

    Diagonal stiffness matrices are stored as their diagonals:
    second_moments (n, 3) [m^4], bend_twist_stiffness (n-1, 3) [N m^2],
    shear_stretch_stiffness (n, 3) [N].
    """

    rest_lengths: np.ndarray
    density: float
    areas: np.ndarray
    second_moments: np.ndarray
    bend_twist_stiffness: np.ndarray
    shear_stretch_stiffness: np.ndarray
    young_modulus: float
    shear_modulus: float
    radii: np.ndarray | None = None

    voronoi_lengths: np.ndarray = field(init=False)
    node_masses: np.ndarray = field(init=False)
    mass_second_moments: np.ndarray = field(init=False)  # rho * I per element

    def __post_init__(self):
        ell = self.rest_lengths
        n = ell.shape[0]
        if np.any(ell <= 0.0):
            raise ValueError("rest lengths must be strictly positive")
        for name in ("bend_twist_stiffness", "shear_stretch_stiffness"):
            if np.any(getattr(self, name) <= 0.0):
                raise ValueError(f"{name} diagonal must be strictly positive")
        self.voronoi_lengths = 0.5 * (ell[:-1] + ell[1:])
        seg = self.density * self.areas * ell
        masses = np.zeros(n + 1)
        masses[:-1] += 0.5 * seg
        masses[1:] += 0.5 * seg
        self.node_masses = masses
        self.mass_second_moments = self.density * self.second_moments

    @property
    def n_elements(self) -> int:
        return self.rest_lengths.shape[0]

    @property
    def total_rest_length(self) -> float:
        return float(np.sum(self.rest_lengths))

    def node_radii(self) -> np.ndarray:
        """Per-node radius (adjacent-element average), used for contact."""
        if self.radii is None:
            raise ValueError("section has no radius information")
        r = np.empty(self.n_elements + 1)
        r[0] = self.radii[0]
        r[-1] = self.radii[-1]
        r[1:-1] = 0.5 * (self.radii[:-1] + self.radii[1:])
        return r

    @classmethod
    def circular(
        cls,
        n_elements: int,
        length: float,
        radius: float,
        density: float,
        young_modulus: float,
        poisson_ratio: float = 0.5,
        shear_correction: float = 4.0 / 3.0,
        rest_lengths: np.ndarray | None = None,
    ) -> "SectionProperties":
        """Uniform circular cross-section with the standard diagonal closure
        B = diag(E I1, E I2, G I3), S = diag(ac G A, ac G A, E A)."""
        if rest_lengths is None:
            rest_lengths = np.full(n_elements, length / n_elements)
        else:
            rest_lengths = np.asarray(rest_lengths, dtype=float)
            if rest_lengths.shape != (n_elements,):
                raise ValueError("rest_lengths shape mismatch")
        shear_modulus = young_modulus / (2.0 * (1.0 + poisson_ratio))
        area = np.pi * radius**2
        i1 = np.pi * radius**4 / 4.0
        moments = np.tile([i1, i1, 2.0 * i1], (n_elements, 1))
        bend = np.tile(
            [
                young_modulus * i1,
                young_modulus * i1,
                shear_modulus * 2.0 * i1,
            ],
            (n_elements - 1, 1),
        )
        shear = np.tile(
            [
                shear_correction * shear_modulus * area,
                shear_correction * shear_modulus * area,
                young_modulus * area,
            ],
            (n_elements, 1),
        )
        return cls(
            rest_lengths=rest_lengths,
            density=density,
            areas=np.full(n_elements, area),
            second_moments=moments,
            bend_twist_stiffness=bend,
            shear_stretch_stiffness=shear,
            young_modulus=young_modulus,
            shear_modulus=shear_modulus,
            radii=np.full(n_elements, radius),
        )


@dataclass
class StrainState:
    """Strain measures: stretch e (n,), shear sigma (n, 3) local frame,
    curvature kappa (n-1, 3) local frame [1/m]."""

    stretch: np.ndarray
    shear: np.ndarray
    curvature: np.ndarray


def straight_rod(
    props: SectionProperties,
    base_position=(0.0, 0.0, 0.0),
    direction=(0.0, 0.0, 1.0),
) -> RodState:
    """Straight rest-configuration rod; frames align d3 with the axis.

    For the default upright direction the frames are exactly identity.
    """
    n = props.n_elements
    base = np.asarray(base_position, dtype=float)
    axis = np.asarray(direction, dtype=float)
    axis = axis / np.linalg.norm(axis)
    s = np.concatenate(([0.0], np.cumsum(props.rest_lengths)))
    positions = base[None, :] + s[:, None] * axis[None, :]
    if np.allclose(axis, [0.0, 0.0, 1.0]):
        frame = np.eye(3)
    else:
        # build any orthonormal triad with d3 = axis
        helper = np.array([1.0, 0.0, 0.0])
        if abs(axis[0]) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
        d1 = np.cross(helper, axis)
        d1 /= np.linalg.norm(d1)
        d2 = np.cross(axis, d1)
        frame = np.vstack([d1, d2, axis])
    return RodState(
        positions=positions,
        velocities=np.zeros((n + 1, 3)),
        frames=np.tile(frame, (n, 1, 1)),
        angular_velocities=np.zeros((n, 3)),
    )


def _element_vectors(state: RodState, props: SectionProperties):
    diff = state.positions[1:] - state.positions[:-1]
    lengths = np.linalg.norm(diff, axis=1)
    bad = np.flatnonzero(lengths < 1e-14)
    if bad.size:
        raise ZeroLengthElementError(int(bad[0]))
    tangents = diff / lengths[:, None]
    stretch = lengths / props.rest_lengths
    return lengths, tangents, stretch


def compute_stretch(state: RodState, props: SectionProperties) -> np.ndarray:
    """Per-element stretch factor e = |dx| / rest length."""
    return _element_vectors(state, props)[2]


def compute_shear(state: RodState, stretch: np.ndarray) -> np.ndarray:
    """Per-element shear vector sigma = Q x_s - d3 in the local frame.

    x_s is discretized as (pos_{i+1} - pos_i) / rest_length_i, so Q x_s is
    the stretch times the local image of the unit tangent.
    """
    diff = state.positions[1:] - state.positions[:-1]
    lengths = np.linalg.norm(diff, axis=1)
    bad = np.flatnonzero(lengths < 1e-14)
    if bad.size:
        raise ZeroLengthElementError(int(bad[0]))
    tangents = diff / lengths[:, None]
    local_tangent = np.einsum("ijk,ik->ij", state.frames, tangents)
    sigma = stretch[:, None] * local_tangent
    sigma[:, 2] -= 1.0
    return sigma


def compute_curvature(state: RodState, props: SectionProperties) -> np.ndarray:
    """Curvature vector at interior nodes, local frame [1/m].

    kappa_k is the rotation vector of the relative rotation between adjacent
    frames divided by the Voronoi rest length; the direction convention
    follows d(d_j)/ds = kappa x d_j, so a right-handed twist of total angle
    theta over length L yields kappa = (0, 0, theta/L).
    """
    frames = state.frames
    n = frames.shape[0]
    kappa = np.empty((n - 1, 3))
    for k in range(n - 1):
        rel = frames[k] @ frames[k + 1].T
        trace = np.clip((rel[0, 0] + rel[1, 1] + rel[2, 2] - 1.0) * 0.5, -1.0, 1.0)
        if np.arccos(trace) >= np.pi - 1e-9:
            raise FrameDiscontinuityError(k)
        kappa[k] = rotation_vector(rel) / props.voronoi_lengths[k]
    return kappa


def compute_strains(state: RodState, props: SectionProperties) -> StrainState:
    """All strain measures of a state in one pass."""
    stretch = compute_stretch(state, props)
    return StrainState(
        stretch=stretch,
        shear=compute_shear(state, stretch),
        curvature=compute_curvature(state, props),
    )


def rotate_frame(q: np.ndarray, u) -> np.ndarray:
    """Advance a frame by a local-frame rotation vector u (|u| < pi).

    Composed so that u = omega * dt advances the directors per
    d(d_j)/dt = omega x d_j; the result is re-orthonormalized.
    """
    u = np.asarray(u, dtype=float)
    return orthonormalize(rotation_matrix(-u) @ q)
