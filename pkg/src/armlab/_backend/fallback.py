"""Pure numpy implementation of the stepping kernels.

Signature-compatible with the compiled core (armlab._core); every function
writes into caller-provided buffers so the hot loop allocates nothing.
Status codes: 0 ok, 1 degenerate element, 2 non-finite state, 3 speed limit.
"""

import numpy as np

SPEED_LIMIT = 100.0  # m/s, instability threshold
CONTACT_DAMPING_RAMP = 1e-3  # m, penetration depth over which damping ramps in
_TINY_LENGTH = 1e-14
_TINY_ANGLE = 1e-6

OK = 0
DEGENERATE = 1
NONFINITE = 2
SPEED = 3


def strains(pos, frames, rest_len, voronoi, lengths, tangents, stretch, sigma, kappa):
    """Fill element lengths/tangents/stretch/shear and interior curvature."""
    diff = pos[1:] - pos[:-1]
    np.einsum("ij,ij->i", diff, diff, out=lengths)
    np.sqrt(lengths, out=lengths)
    if np.any(lengths < _TINY_LENGTH):
        return DEGENERATE
    tangents[:] = diff / lengths[:, None]
    stretch[:] = lengths / rest_len

    local_tan = np.einsum("kij,kj->ki", frames, tangents)
    sigma[:] = stretch[:, None] * local_tan
    sigma[:, 2] -= 1.0

    # relative rotation R_k = Q_k Q_{k+1}^T; kappa = rotvec(R_k) / voronoi
    rel = np.einsum("kij,kmj->kim", frames[:-1], frames[1:])
    trace = np.clip((rel[:, 0, 0] + rel[:, 1, 1] + rel[:, 2, 2] - 1.0) * 0.5, -1.0, 1.0)
    angle = np.arccos(trace)
    sin_a = np.sin(angle)
    factor = np.where(angle < _TINY_ANGLE, 1.0 + angle**2 / 6.0, angle / np.where(sin_a == 0.0, 1.0, sin_a))
    kappa[:, 0] = 0.5 * (rel[:, 2, 1] - rel[:, 1, 2])
    kappa[:, 1] = 0.5 * (rel[:, 0, 2] - rel[:, 2, 0])
    kappa[:, 2] = 0.5 * (rel[:, 1, 0] - rel[:, 0, 1])
    kappa *= (factor / voronoi)[:, None]
    return OK


def accelerations(
    frames,
    omega,
    rest_len,
    voronoi,
    mass,
    rho_moments,
    bend_stiff,
    shear_stiff,
    tangents,
    stretch,
    sigma,
    kappa,
    stretch_rate,
    force_density,
    couple_density,
    acc,
    alpha,
):
    """Momentum-balance right-hand sides divided by the lumped inertias.

    force_density is the full external lab-frame line density (loads plus
    contact); couple_density is the local-frame actuation line density.
    """
    n = rest_len.shape[0]
    local_tan = np.einsum("kij,kj->ki", frames, tangents)
    stress = shear_stiff * sigma  # S sigma, local

    # node forces: difference of element internal forces + external density
    n_lab = np.einsum("kji,kj->ki", frames, stress) / stretch[:, None]
    acc[:] = 0.0
    acc[:-1] += n_lab
    acc[1:] -= n_lab
    half_cell = 0.5 * stretch * rest_len  # current half-lengths in rest measure
    weight = np.zeros(n + 1)
    weight[:-1] += half_cell
    weight[1:] += half_cell
    acc += force_density * weight[:, None]
    acc /= mass[:, None]

    # element torques, local frame
    e_vor = (stretch[:-1] * rest_len[:-1] + stretch[1:] * rest_len[1:]) / (2.0 * voronoi)
    bend = bend_stiff * kappa
    tau = bend / (e_vor**3)[:, None]
    alpha[:] = 0.0
    alpha[:-1] += tau
    alpha[1:] -= tau
    twist_cell = np.cross(kappa, bend) * (voronoi / e_vor**3)[:, None]
    alpha[:-1] += 0.5 * twist_cell
    alpha[1:] += 0.5 * twist_cell
    alpha += np.cross(local_tan, stress) * rest_len[:, None]
    ang_mom = rho_moments * omega
    alpha += np.cross(ang_mom / stretch[:, None], omega) * rest_len[:, None]
    alpha += ang_mom * (stretch_rate * rest_len / stretch**2)[:, None]
    alpha += couple_density * (stretch * rest_len)[:, None]
    alpha *= (stretch / rest_len)[:, None]
    alpha /= rho_moments
    return OK


def contact_forces(pos, vel, node_radius, spheres, capsules, force_density):
    """Penalty contact line density against rigid obstacles.

    Spring on penetration depth plus a damping term that acts only against
    approach and ramps in over CONTACT_DAMPING_RAMP, keeping the force
    continuous (and zero) at contact onset.
    """
    touched = 0
    for sph in spheres:
        delta = pos - sph[:3]
        dist = np.linalg.norm(delta, axis=1)
        np.maximum(dist, _TINY_LENGTH, out=dist)
        pen = (sph[3] + node_radius) - dist
        hit = pen > 0.0
        if not np.any(hit):
            continue
        touched = 1
        normal = delta[hit] / dist[hit, None]
        v_n = np.einsum("ij,ij->i", vel[hit], normal)
        ramp = np.minimum(pen[hit] / CONTACT_DAMPING_RAMP, 1.0)
        mag = sph[4] * pen[hit] + sph[5] * np.maximum(-v_n, 0.0) * ramp
        force_density[hit] += mag[:, None] * normal
    for cap in capsules:
        a, b = cap[:3], cap[3:6]
        axis = b - a
        denom = float(axis @ axis)
        t = np.clip((pos - a) @ axis / denom, 0.0, 1.0)
        closest = a + t[:, None] * axis
        delta = pos - closest
        dist = np.linalg.norm(delta, axis=1)
        np.maximum(dist, _TINY_LENGTH, out=dist)
        pen = (cap[6] + node_radius) - dist
        hit = pen > 0.0
        if not np.any(hit):
            continue
        touched = 1
        normal = delta[hit] / dist[hit, None]
        v_n = np.einsum("ij,ij->i", vel[hit], normal)
        ramp = np.minimum(pen[hit] / CONTACT_DAMPING_RAMP, 1.0)
        mag = cap[7] * pen[hit] + cap[8] * np.maximum(-v_n, 0.0) * ramp
        force_density[hit] += mag[:, None] * normal
    return touched


def energies(vel, omega, mass, rho_moments, rest_len, voronoi, shear_stiff, bend_stiff, sigma, kappa):
    """(translational, rotational, shear/stretch elastic, bend/twist elastic)."""
    t_kin = 0.5 * float(np.sum(mass * np.einsum("ij,ij->i", vel, vel)))
    r_kin = 0.5 * float(np.sum(rest_len * np.einsum("ij,ij->i", omega, rho_moments * omega)))
    e_shear = 0.5 * float(np.sum(rest_len * np.einsum("ij,ij->i", sigma, shear_stiff * sigma)))
    e_bend = 0.5 * float(np.sum(voronoi * np.einsum("ij,ij->i", kappa, bend_stiff * kappa)))
    return t_kin, r_kin, e_shear, e_bend


def _rotate_frames(frames, rot_vec):
    """frames <- exp(-[rot_vec]x) frames per element, re-orthonormalized."""
    u = -rot_vec
    ang2 = np.einsum("ij,ij->i", u, u)
    ang = np.sqrt(ang2)
    small = ang < _TINY_ANGLE
    a = np.where(small, 1.0 - ang2 / 6.0, np.sin(ang) / np.where(ang == 0.0, 1.0, ang))
    b = np.where(small, 0.5 - ang2 / 24.0, (1.0 - np.cos(ang)) / np.where(ang2 == 0.0, 1.0, ang2))
    ux, uy, uz = u[:, 0], u[:, 1], u[:, 2]
    rot = np.empty_like(frames)
    rot[:, 0, 0] = 1.0 - b * (uy * uy + uz * uz)
    rot[:, 0, 1] = -a * uz + b * ux * uy
    rot[:, 0, 2] = a * uy + b * ux * uz
    rot[:, 1, 0] = a * uz + b * ux * uy
    rot[:, 1, 1] = 1.0 - b * (ux * ux + uz * uz)
    rot[:, 1, 2] = -a * ux + b * uy * uz
    rot[:, 2, 0] = -a * uy + b * ux * uz
    rot[:, 2, 1] = a * ux + b * uy * uz
    rot[:, 2, 2] = 1.0 - b * (ux * ux + uy * uy)
    frames[:] = np.einsum("kij,kjl->kil", rot, frames)
    # Gram-Schmidt on rows keeps the orthonormality invariant over long runs
    r0 = frames[:, 0]
    r0 /= np.linalg.norm(r0, axis=1)[:, None]
    r1 = frames[:, 1]
    r1 -= np.einsum("ij,ij->i", r1, r0)[:, None] * r0
    r1 /= np.linalg.norm(r1, axis=1)[:, None]
    frames[:, 2] = np.cross(r0, r1)


def step_block(
    pos,
    vel,
    frames,
    omega,
    rest_len,
    voronoi,
    mass,
    rho_moments,
    bend_stiff,
    shear_stiff,
    node_radius,
    stretch_prev,
    ext_force,
    couple,
    spheres,
    capsules,
    dt,
    gamma,
    n_substeps,
    clamp,
    base_pos,
    base_frame,
    work,
):
    """Advance n_substeps of the kick-drift-kick scheme in place.

    work is the WorkBuffers scratch bundle. Returns (status, contact_flag);
    on a non-zero status the state is left at the offending substep.
    """
    n = rest_len.shape[0]
    lengths, tangents, stretch = work.lengths, work.tangents, work.stretch
    sigma, kappa = work.sigma, work.kappa
    acc, alpha = work.acc, work.alpha
    force = work.force
    rate = work.stretch_rate
    half_dt = 0.5 * dt
    decay = float(np.exp(-gamma * dt))
    has_obstacles = spheres.shape[0] > 0 or capsules.shape[0] > 0
    contact_flag = 0

    for _ in range(int(n_substeps)):
        status = strains(pos, frames, rest_len, voronoi, lengths, tangents, stretch, sigma, kappa)
        if status != OK:
            return status, contact_flag
        rate[:] = (stretch - stretch_prev) / dt
        force[:] = ext_force
        if has_obstacles:
            contact_flag |= contact_forces(pos, vel, node_radius, spheres, capsules, force)
        accelerations(
            frames, omega, rest_len, voronoi, mass, rho_moments, bend_stiff, shear_stiff,
            tangents, stretch, sigma, kappa, rate, force, couple, acc, alpha,
        )
        vel += half_dt * acc
        omega += half_dt * alpha
        if clamp:
            vel[0] = 0.0
            omega[0] = 0.0  # clamped dofs never move through the drift
        pos += dt * vel
        _rotate_frames(frames, dt * omega)

        stretch_prev[:] = stretch  # pre-drift stretch feeds the second-kick rate
        status = strains(pos, frames, rest_len, voronoi, lengths, tangents, stretch, sigma, kappa)
        if status != OK:
            return status, contact_flag
        rate[:] = (stretch - stretch_prev) / dt
        force[:] = ext_force
        if has_obstacles:
            contact_flag |= contact_forces(pos, vel, node_radius, spheres, capsules, force)
        accelerations(
            frames, omega, rest_len, voronoi, mass, rho_moments, bend_stiff, shear_stiff,
            tangents, stretch, sigma, kappa, rate, force, couple, acc, alpha,
        )
        vel += half_dt * acc
        omega += half_dt * alpha
        if gamma != 0.0:
            vel *= decay
            omega *= decay
        if clamp:
            pos[0] = base_pos
            vel[0] = 0.0
            frames[0] = base_frame
            omega[0] = 0.0
        stretch_prev[:] = stretch

        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel)) and np.all(np.isfinite(omega))):
            return NONFINITE, contact_flag
        if np.max(np.einsum("ij,ij->i", vel, vel)) > SPEED_LIMIT**2:
            return SPEED, contact_flag
    return OK, contact_flag


class WorkBuffers:
    """Preallocated scratch arrays for step_block."""

    def __init__(self, n_elements: int):
        n = n_elements
        self.lengths = np.empty(n)
        self.tangents = np.empty((n, 3))
        self.stretch = np.empty(n)
        self.sigma = np.empty((n, 3))
        self.kappa = np.empty((n - 1, 3))
        self.acc = np.empty((n + 1, 3))
        self.alpha = np.empty((n, 3))
        self.force = np.empty((n + 1, 3))
        self.stretch_rate = np.empty(n)
