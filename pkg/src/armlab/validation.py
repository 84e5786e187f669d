"""Numerical validation suites: beam statics, conservation, convergence.

Each suite returns a result dataclass with the measured numbers and a pass
flag; the CLI and the acceptance tests share these entry points.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, RodSimulation, stability_time_step
from .kinematics import RodState, SectionProperties, compute_strains, straight_rod

TIMOSHENKO_TOLERANCE = 0.01
ENERGY_DRIFT_TOLERANCE = 0.01
MOMENTUM_TOLERANCE = 1e-12
CONVERGENCE_RATIO_RANGE = (3.5, 4.5)


# ---------------------------------------------------------------------------
# test-rod constructions
# ---------------------------------------------------------------------------

def clamped_arm(n_elements: int, free_length: float, radius: float, density: float,
                young_modulus: float) -> tuple[SectionProperties, RodState]:
    """Uniform upright arm whose unclamped span is exactly free_length.

    The clamp freezes element 0, which physically grips the rod over half of
    the first element; sizing elements as h = free_length / (n - 1/2) puts
    the effective wall face at s = h/2 and leaves a cantilever of exactly
    free_length beyond it.
    """
    h = free_length / (n_elements - 0.5)
    grid = h * np.arange(n_elements + 1)
    props = SectionProperties.circular(
        n_elements, n_elements * h, radius, density, young_modulus,
        rest_lengths=np.diff(grid),
    )
    positions = np.zeros((n_elements + 1, 3))
    positions[:, 2] = grid
    state = RodState(positions, np.zeros((n_elements + 1, 3)),
                     np.tile(np.eye(3), (n_elements, 1, 1)), np.zeros((n_elements, 3)))
    return props, state


def bent_rod(props: SectionProperties, arc_radius: float) -> RodState:
    """Rod bent onto a circular arc in the x-z plane, frames following the
    tangent; strains are pure bending up to O(h^2)."""
    n = props.n_elements
    s = np.concatenate(([0.0], np.cumsum(props.rest_lengths)))
    phi = s / arc_radius
    positions = np.stack(
        [arc_radius * (1.0 - np.cos(phi)), np.zeros(n + 1), arc_radius * np.sin(phi)], axis=1
    )
    phim = 0.5 * (phi[:-1] + phi[1:])
    frames = np.empty((n, 3, 3))
    for i, p in enumerate(phim):
        tangent = np.array([np.sin(p), 0.0, np.cos(p)])
        binormal = np.array([0.0, 1.0, 0.0])
        frames[i] = np.vstack([np.cross(binormal, tangent), binormal, tangent])
    return RodState(positions, np.zeros((n + 1, 3)), frames, np.zeros((n, 3)))


def helix_rod(props: SectionProperties, helix_radius: float, pitch: float):
    """Nodes on an arc-length-sampled helix; frames use the chord tangent
    with the analytic normal projected onto its orthogonal plane.

    Returns (state, expected local curvature vector (0, k, tau)).
    """
    n = props.n_elements
    c = pitch / (2.0 * np.pi)
    speed = np.sqrt(helix_radius**2 + c**2)
    s = np.concatenate(([0.0], np.cumsum(props.rest_lengths)))
    t = s / speed
    positions = np.stack(
        [helix_radius * np.cos(t), helix_radius * np.sin(t), c * t], axis=1
    )
    frames = np.empty((n, 3, 3))
    tm = 0.5 * (t[:-1] + t[1:])
    for i in range(n):
        chord = positions[i + 1] - positions[i]
        d3 = chord / np.linalg.norm(chord)
        normal = np.array([-np.cos(tm[i]), -np.sin(tm[i]), 0.0])
        d1 = normal - (normal @ d3) * d3
        d1 /= np.linalg.norm(d1)
        frames[i] = np.vstack([d1, np.cross(d3, d1), d3])
    state = RodState(positions, np.zeros((n + 1, 3)), frames, np.zeros((n, 3)))
    curvature = helix_radius / speed**2
    torsion = c / speed**2
    return state, np.array([0.0, curvature, torsion])


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

@dataclass
class BeamResult:
    measured_deflection: float
    theory_deflection: float
    relative_error: float
    settle_time: float
    kinetic_energy: float
    wall_time: float
    passed: bool


def timoshenko_suite(n_elements: int = 100, tip_force: float = 0.15,
                     young_modulus: float = 1.0e7, radius: float = 0.025,
                     density: float = 1000.0, poisson_ratio: float = 0.5,
                     settle_energy: float = 1e-10, max_sim_time: float = 20.0) -> BeamResult:
    """Settled cantilever tip deflection vs Timoshenko theory
    delta = F L^3 / (3 E I) + F L / (ac G A)."""
    start = time.perf_counter()
    free_length = 1.0
    props, state = clamped_arm(n_elements, free_length, radius, density, young_modulus)
    dt = 0.8 * stability_time_step(props)
    sim = RodSimulation(state, props, IntegratorConfig(dt=dt, damping=4.0), clamp=True)
    # constant transverse tip force as a fixed line density over the tip node
    # cell; the rest-weight normalization is exact up to the O(F/EA) stretch
    sim.loads.force_density[-1, 0] = tip_force / (0.5 * props.rest_lengths[-1])
    steps, sim_time = 0, 0.0
    block = 2000
    kinetic = np.inf
    while sim_time < max_sim_time:
        status, _ = sim.advance(block)
        if status != 0:
            raise RuntimeError(f"cantilever settle unstable (status {status})")
        steps += block
        sim_time = steps * dt
        kinetic = sim.energies().kinetic
        if kinetic < settle_energy:
            break
    area = np.pi * radius**2
    moment = np.pi * radius**4 / 4.0
    shear_modulus = young_modulus / (2.0 * (1.0 + poisson_ratio))
    shear_correction = 4.0 / 3.0
    theory = (
        tip_force * free_length**3 / (3.0 * young_modulus * moment)
        + tip_force * free_length / (shear_correction * shear_modulus * area)
    )
    measured = float(sim.state.positions[-1, 0])
    rel = abs(measured - theory) / theory
    return BeamResult(
        measured_deflection=measured,
        theory_deflection=theory,
        relative_error=rel,
        settle_time=sim_time,
        kinetic_energy=float(kinetic),
        wall_time=time.perf_counter() - start,
        passed=rel < TIMOSHENKO_TOLERANCE and kinetic < settle_energy,
    )


@dataclass
class ConservationResult:
    momentum_relative_error: float
    energy_drift: float
    steps: int
    wall_time: float
    passed: bool


def conservation_suite(n_elements: int = 50, arc_radius: float = 6.0,
                       steps: int = 100_000, dt: float = 2.5e-5) -> ConservationResult:
    """Free undamped bent rod: per-step linear momentum conservation and
    total-energy drift over the full run."""
    start = time.perf_counter()
    props = SectionProperties.circular(n_elements, 1.0, 0.025, 1000.0, 1.0e7)
    sim = RodSimulation(bent_rod(props, arc_radius), props,
                        IntegratorConfig(dt=dt, damping=0.0), clamp=False)
    masses = props.node_masses[:, None]
    energy0 = sim.energies().total
    momentum = (sim.state.velocities * masses).sum(axis=0)
    worst_step = 0.0
    worst_drift = 0.0
    max_speed = 0.0
    check_every = 10  # momentum is checked per step, energy every block
    for k in range(steps // check_every):
        for _ in range(check_every):
            status, _ = sim.advance(1)
            if status != 0:
                raise RuntimeError(f"conservation run unstable (status {status})")
            new_momentum = (sim.state.velocities * masses).sum(axis=0)
            worst_step = max(worst_step, float(np.abs(new_momentum - momentum).max()))
            momentum = new_momentum
        max_speed = max(max_speed, float(np.abs(sim.state.velocities).max()))
        worst_drift = max(worst_drift, abs(sim.energies().total - energy0) / energy0)
    momentum_scale = props.node_masses.sum() * max_speed
    momentum_rel = worst_step / momentum_scale
    return ConservationResult(
        momentum_relative_error=momentum_rel,
        energy_drift=worst_drift,
        steps=steps,
        wall_time=time.perf_counter() - start,
        passed=momentum_rel < MOMENTUM_TOLERANCE and worst_drift < ENERGY_DRIFT_TOLERANCE,
    )


@dataclass
class ConvergenceResult:
    resolutions: list
    curvature_errors: list
    shear_errors: list
    curvature_ratios: list
    shear_ratios: list
    temporal_ratio: float
    passed: bool


def _helix_errors(n_elements: int, helix_radius: float = 0.15, pitch: float = 0.35):
    length = 1.0
    props = SectionProperties.circular(n_elements, length, 0.025, 1000.0, 1.0e7)
    state, expected = helix_rod(props, helix_radius, pitch)
    strains = compute_strains(state, props)
    err_kappa = float(np.abs(strains.curvature - expected).max())
    err_sigma = float(np.abs(strains.shear).max())
    return err_kappa, err_sigma


def temporal_convergence_ratio(n_elements: int = 20, base_steps: int = 256) -> float:
    """End-state Richardson ratio ||x(dt)-x(dt/2)|| / ||x(dt/2)-x(dt/4)||.

    Uses a free longitudinal oscillation: with zero angular velocity the
    deliberately lagged dilatation-rate torque and the gyroscopic terms
    vanish, so the measurement isolates the integrator's own order. The
    horizon is an exact step multiple at every dt.
    """
    props = SectionProperties.circular(n_elements, 1.0, 0.025, 1000.0, 1.0e7)
    base_dt = 0.5 * stability_time_step(props)
    ends = []
    for divider in (1, 2, 4):
        state = straight_rod(props)
        state.positions[:, 2] *= 1.02  # uniform axial stretch, released from rest
        sim = RodSimulation(state, props,
                            IntegratorConfig(dt=base_dt / divider, damping=0.0), clamp=False)
        sim.advance(base_steps * divider)
        ends.append(sim.state.positions.copy())
    coarse = float(np.linalg.norm(ends[0] - ends[1]))
    fine = float(np.linalg.norm(ends[1] - ends[2]))
    return coarse / fine


def convergence_suite(resolutions=(50, 100, 200)) -> ConvergenceResult:
    """Spatial strain recovery on an analytic helix plus the temporal
    Richardson ratio; second order means error ratios near 4."""
    errors = [_helix_errors(n) for n in resolutions]
    kappa_ratios = [errors[i][0] / errors[i + 1][0] for i in range(len(errors) - 1)]
    sigma_ratios = [errors[i][1] / errors[i + 1][1] for i in range(len(errors) - 1)]
    temporal = temporal_convergence_ratio()
    lo, hi = CONVERGENCE_RATIO_RANGE
    spatial_ok = all(lo <= r <= hi for r in kappa_ratios + sigma_ratios)
    return ConvergenceResult(
        resolutions=list(resolutions),
        curvature_errors=[e[0] for e in errors],
        shear_errors=[e[1] for e in errors],
        curvature_ratios=kappa_ratios,
        shear_ratios=sigma_ratios,
        temporal_ratio=temporal,
        passed=spatial_ok and 3.0 <= temporal <= 5.0,
    )
