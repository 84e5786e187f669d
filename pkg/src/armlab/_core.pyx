# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping kernels; signature-compatible with _backend.fallback.

Status codes: 0 ok, 1 degenerate element, 2 non-finite state, 3 speed limit.
"""

from libc.math cimport sqrt, sin, cos, acos, exp, isfinite

import numpy as np

SPEED_LIMIT = 100.0
CONTACT_DAMPING_RAMP = 1e-3

cdef double _SPEED_LIMIT = 100.0
cdef double _RAMP = 1e-3
cdef double _TINY_LENGTH = 1e-14
cdef double _TINY_ANGLE = 1e-6

OK = 0
DEGENERATE = 1
NONFINITE = 2
SPEED = 3


cdef int _strains(
    double[:, ::1] pos, double[:, :, ::1] frames,
    double[::1] rest_len, double[::1] voronoi,
    double[::1] lengths, double[:, ::1] tangents, double[::1] stretch,
    double[:, ::1] sigma, double[:, ::1] kappa,
) noexcept nogil:
    cdef Py_ssize_t n = rest_len.shape[0]
    cdef Py_ssize_t i, k, a
    cdef double dx, dy, dz, ln, tx, ty, tz
    cdef double r00, r01, r02, r10, r11, r12, r20, r21, r22
    cdef double trace, angle, factor, sn
    for i in range(n):
        dx = pos[i + 1, 0] - pos[i, 0]
        dy = pos[i + 1, 1] - pos[i, 1]
        dz = pos[i + 1, 2] - pos[i, 2]
        ln = sqrt(dx * dx + dy * dy + dz * dz)
        if ln < _TINY_LENGTH:
            return 1
        lengths[i] = ln
        tx = dx / ln
        ty = dy / ln
        tz = dz / ln
        tangents[i, 0] = tx
        tangents[i, 1] = ty
        tangents[i, 2] = tz
        stretch[i] = ln / rest_len[i]
        for a in range(3):
            sigma[i, a] = stretch[i] * (
                frames[i, a, 0] * tx + frames[i, a, 1] * ty + frames[i, a, 2] * tz
            )
        sigma[i, 2] -= 1.0
    for k in range(n - 1):
        # rel = Q_k Q_{k+1}^T
        r00 = frames[k, 0, 0] * frames[k + 1, 0, 0] + frames[k, 0, 1] * frames[k + 1, 0, 1] + frames[k, 0, 2] * frames[k + 1, 0, 2]
        r01 = frames[k, 0, 0] * frames[k + 1, 1, 0] + frames[k, 0, 1] * frames[k + 1, 1, 1] + frames[k, 0, 2] * frames[k + 1, 1, 2]
        r02 = frames[k, 0, 0] * frames[k + 1, 2, 0] + frames[k, 0, 1] * frames[k + 1, 2, 1] + frames[k, 0, 2] * frames[k + 1, 2, 2]
        r10 = frames[k, 1, 0] * frames[k + 1, 0, 0] + frames[k, 1, 1] * frames[k + 1, 0, 1] + frames[k, 1, 2] * frames[k + 1, 0, 2]
        r11 = frames[k, 1, 0] * frames[k + 1, 1, 0] + frames[k, 1, 1] * frames[k + 1, 1, 1] + frames[k, 1, 2] * frames[k + 1, 1, 2]
        r12 = frames[k, 1, 0] * frames[k + 1, 2, 0] + frames[k, 1, 1] * frames[k + 1, 2, 1] + frames[k, 1, 2] * frames[k + 1, 2, 2]
        r20 = frames[k, 2, 0] * frames[k + 1, 0, 0] + frames[k, 2, 1] * frames[k + 1, 0, 1] + frames[k, 2, 2] * frames[k + 1, 0, 2]
        r21 = frames[k, 2, 0] * frames[k + 1, 1, 0] + frames[k, 2, 1] * frames[k + 1, 1, 1] + frames[k, 2, 2] * frames[k + 1, 1, 2]
        r22 = frames[k, 2, 0] * frames[k + 1, 2, 0] + frames[k, 2, 1] * frames[k + 1, 2, 1] + frames[k, 2, 2] * frames[k + 1, 2, 2]
        trace = (r00 + r11 + r22 - 1.0) * 0.5
        if trace > 1.0:
            trace = 1.0
        elif trace < -1.0:
            trace = -1.0
        angle = acos(trace)
        if angle < _TINY_ANGLE:
            factor = 1.0 + angle * angle / 6.0
        else:
            sn = sin(angle)
            factor = angle / sn if sn != 0.0 else 1.0
        factor /= voronoi[k]
        kappa[k, 0] = 0.5 * (r21 - r12) * factor
        kappa[k, 1] = 0.5 * (r02 - r20) * factor
        kappa[k, 2] = 0.5 * (r10 - r01) * factor
    return 0


cdef void _accelerations(
    double[:, :, ::1] frames, double[:, ::1] omega,
    double[::1] rest_len, double[::1] voronoi,
    double[::1] mass, double[:, ::1] rho_moments,
    double[:, ::1] bend_stiff, double[:, ::1] shear_stiff,
    double[:, ::1] tangents, double[::1] stretch,
    double[:, ::1] sigma, double[:, ::1] kappa,
    double[::1] stretch_rate,
    double[:, ::1] force_density, double[:, ::1] couple,
    double[:, ::1] acc, double[:, ::1] alpha,
) noexcept nogil:
    cdef Py_ssize_t n = rest_len.shape[0]
    cdef Py_ssize_t i, k, a
    cdef double s0, s1, s2, n0, n1, n2, inv_e
    cdef double q0, q1, q2, w0, w1, w2, m0, m1, m2
    cdef double e_vor, inv_e3, b0, b1, b2, t0, t1, t2, g0, g1, g2
    cdef double half_lo, half_hi, weight, scale, ell

    for i in range(n + 1):
        acc[i, 0] = 0.0
        acc[i, 1] = 0.0
        acc[i, 2] = 0.0
    for i in range(n):
        # stress = S sigma (local); n_lab = Q^T stress / e
        s0 = shear_stiff[i, 0] * sigma[i, 0]
        s1 = shear_stiff[i, 1] * sigma[i, 1]
        s2 = shear_stiff[i, 2] * sigma[i, 2]
        inv_e = 1.0 / stretch[i]
        n0 = (frames[i, 0, 0] * s0 + frames[i, 1, 0] * s1 + frames[i, 2, 0] * s2) * inv_e
        n1 = (frames[i, 0, 1] * s0 + frames[i, 1, 1] * s1 + frames[i, 2, 1] * s2) * inv_e
        n2 = (frames[i, 0, 2] * s0 + frames[i, 1, 2] * s1 + frames[i, 2, 2] * s2) * inv_e
        acc[i, 0] += n0
        acc[i, 1] += n1
        acc[i, 2] += n2
        acc[i + 1, 0] -= n0
        acc[i + 1, 1] -= n1
        acc[i + 1, 2] -= n2

        # element torque accumulators: shear coupling, gyroscopic,
        # dilatation-flux and actuation couple
        ell = rest_len[i]
        q0 = frames[i, 0, 0] * tangents[i, 0] + frames[i, 0, 1] * tangents[i, 1] + frames[i, 0, 2] * tangents[i, 2]
        q1 = frames[i, 1, 0] * tangents[i, 0] + frames[i, 1, 1] * tangents[i, 1] + frames[i, 1, 2] * tangents[i, 2]
        q2 = frames[i, 2, 0] * tangents[i, 0] + frames[i, 2, 1] * tangents[i, 1] + frames[i, 2, 2] * tangents[i, 2]
        w0 = omega[i, 0]
        w1 = omega[i, 1]
        w2 = omega[i, 2]
        m0 = rho_moments[i, 0] * w0 * inv_e
        m1 = rho_moments[i, 1] * w1 * inv_e
        m2 = rho_moments[i, 2] * w2 * inv_e
        scale = stretch_rate[i] * ell * inv_e
        alpha[i, 0] = (q1 * s2 - q2 * s1) * ell + (m1 * w2 - m2 * w1) * ell + m0 * scale + couple[i, 0] * stretch[i] * ell
        alpha[i, 1] = (q2 * s0 - q0 * s2) * ell + (m2 * w0 - m0 * w2) * ell + m1 * scale + couple[i, 1] * stretch[i] * ell
        alpha[i, 2] = (q0 * s1 - q1 * s0) * ell + (m0 * w1 - m1 * w0) * ell + m2 * scale + couple[i, 2] * stretch[i] * ell

    for k in range(n - 1):
        e_vor = (stretch[k] * rest_len[k] + stretch[k + 1] * rest_len[k + 1]) / (2.0 * voronoi[k])
        inv_e3 = 1.0 / (e_vor * e_vor * e_vor)
        b0 = bend_stiff[k, 0] * kappa[k, 0]
        b1 = bend_stiff[k, 1] * kappa[k, 1]
        b2 = bend_stiff[k, 2] * kappa[k, 2]
        t0 = b0 * inv_e3
        t1 = b1 * inv_e3
        t2 = b2 * inv_e3
        g0 = (kappa[k, 1] * b2 - kappa[k, 2] * b1) * voronoi[k] * inv_e3 * 0.5
        g1 = (kappa[k, 2] * b0 - kappa[k, 0] * b2) * voronoi[k] * inv_e3 * 0.5
        g2 = (kappa[k, 0] * b1 - kappa[k, 1] * b0) * voronoi[k] * inv_e3 * 0.5
        alpha[k, 0] += t0 + g0
        alpha[k, 1] += t1 + g1
        alpha[k, 2] += t2 + g2
        alpha[k + 1, 0] += g0 - t0
        alpha[k + 1, 1] += g1 - t1
        alpha[k + 1, 2] += g2 - t2

    for i in range(n + 1):
        half_lo = 0.5 * stretch[i - 1] * rest_len[i - 1] if i > 0 else 0.0
        half_hi = 0.5 * stretch[i] * rest_len[i] if i < n else 0.0
        weight = half_lo + half_hi
        acc[i, 0] = (acc[i, 0] + force_density[i, 0] * weight) / mass[i]
        acc[i, 1] = (acc[i, 1] + force_density[i, 1] * weight) / mass[i]
        acc[i, 2] = (acc[i, 2] + force_density[i, 2] * weight) / mass[i]
    for i in range(n):
        scale = stretch[i] / rest_len[i]
        alpha[i, 0] *= scale / rho_moments[i, 0]
        alpha[i, 1] *= scale / rho_moments[i, 1]
        alpha[i, 2] *= scale / rho_moments[i, 2]


cdef int _contact(
    double[:, ::1] pos, double[:, ::1] vel, double[::1] node_radius,
    double[:, ::1] spheres, double[:, ::1] capsules,
    double[:, ::1] force,
) noexcept nogil:
    cdef Py_ssize_t n_nodes = pos.shape[0]
    cdef Py_ssize_t ns = spheres.shape[0]
    cdef Py_ssize_t nc = capsules.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, dist, pen, nx, ny, nz, v_n, ramp, mag
    cdef double ax, ay, az, ex, ey, ez, denom, t, cx, cy, cz
    cdef int touched = 0
    for j in range(ns):
        for i in range(n_nodes):
            dx = pos[i, 0] - spheres[j, 0]
            dy = pos[i, 1] - spheres[j, 1]
            dz = pos[i, 2] - spheres[j, 2]
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if dist < _TINY_LENGTH:
                dist = _TINY_LENGTH
            pen = spheres[j, 3] + node_radius[i] - dist
            if pen <= 0.0:
                continue
            touched = 1
            nx = dx / dist
            ny = dy / dist
            nz = dz / dist
            v_n = vel[i, 0] * nx + vel[i, 1] * ny + vel[i, 2] * nz
            ramp = pen / _RAMP
            if ramp > 1.0:
                ramp = 1.0
            mag = spheres[j, 4] * pen
            if v_n < 0.0:
                mag -= spheres[j, 5] * v_n * ramp
            force[i, 0] += mag * nx
            force[i, 1] += mag * ny
            force[i, 2] += mag * nz
    for j in range(nc):
        ax = capsules[j, 0]
        ay = capsules[j, 1]
        az = capsules[j, 2]
        ex = capsules[j, 3] - ax
        ey = capsules[j, 4] - ay
        ez = capsules[j, 5] - az
        denom = ex * ex + ey * ey + ez * ez
        for i in range(n_nodes):
            t = ((pos[i, 0] - ax) * ex + (pos[i, 1] - ay) * ey + (pos[i, 2] - az) * ez) / denom
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            cx = ax + t * ex
            cy = ay + t * ey
            cz = az + t * ez
            dx = pos[i, 0] - cx
            dy = pos[i, 1] - cy
            dz = pos[i, 2] - cz
            dist = sqrt(dx * dx + dy * dy + dz * dz)
            if dist < _TINY_LENGTH:
                dist = _TINY_LENGTH
            pen = capsules[j, 6] + node_radius[i] - dist
            if pen <= 0.0:
                continue
            touched = 1
            nx = dx / dist
            ny = dy / dist
            nz = dz / dist
            v_n = vel[i, 0] * nx + vel[i, 1] * ny + vel[i, 2] * nz
            ramp = pen / _RAMP
            if ramp > 1.0:
                ramp = 1.0
            mag = capsules[j, 7] * pen
            if v_n < 0.0:
                mag -= capsules[j, 8] * v_n * ramp
            force[i, 0] += mag * nx
            force[i, 1] += mag * ny
            force[i, 2] += mag * nz
    return touched


cdef void _rotate_frames(double[:, :, ::1] frames, double[:, ::1] omega, double dt) noexcept nogil:
    """frames <- exp(-[dt*omega]x) frames, Gram-Schmidt re-orthonormalized."""
    cdef Py_ssize_t n = frames.shape[0]
    cdef Py_ssize_t i, c
    cdef double ux, uy, uz, ang2, ang, a, b
    cdef double r00, r01, r02, r10, r11, r12, r20, r21, r22
    cdef double f0, f1, f2, g0, g1, g2, h0, h1, h2, nrm, dot
    for i in range(n):
        ux = -dt * omega[i, 0]
        uy = -dt * omega[i, 1]
        uz = -dt * omega[i, 2]
        ang2 = ux * ux + uy * uy + uz * uz
        ang = sqrt(ang2)
        if ang < _TINY_ANGLE:
            a = 1.0 - ang2 / 6.0
            b = 0.5 - ang2 / 24.0
        else:
            a = sin(ang) / ang
            b = (1.0 - cos(ang)) / ang2
        r00 = 1.0 - b * (uy * uy + uz * uz)
        r01 = -a * uz + b * ux * uy
        r02 = a * uy + b * ux * uz
        r10 = a * uz + b * ux * uy
        r11 = 1.0 - b * (ux * ux + uz * uz)
        r12 = -a * ux + b * uy * uz
        r20 = -a * uy + b * ux * uz
        r21 = a * ux + b * uy * uz
        r22 = 1.0 - b * (ux * ux + uy * uy)
        for c in range(3):
            f0 = frames[i, 0, c]
            f1 = frames[i, 1, c]
            f2 = frames[i, 2, c]
            frames[i, 0, c] = r00 * f0 + r01 * f1 + r02 * f2
            frames[i, 1, c] = r10 * f0 + r11 * f1 + r12 * f2
            frames[i, 2, c] = r20 * f0 + r21 * f1 + r22 * f2
        # rows: d1 normalized, d2 orthogonalized, d3 = d1 x d2
        f0 = frames[i, 0, 0]
        f1 = frames[i, 0, 1]
        f2 = frames[i, 0, 2]
        nrm = sqrt(f0 * f0 + f1 * f1 + f2 * f2)
        f0 /= nrm
        f1 /= nrm
        f2 /= nrm
        g0 = frames[i, 1, 0]
        g1 = frames[i, 1, 1]
        g2 = frames[i, 1, 2]
        dot = g0 * f0 + g1 * f1 + g2 * f2
        g0 -= dot * f0
        g1 -= dot * f1
        g2 -= dot * f2
        nrm = sqrt(g0 * g0 + g1 * g1 + g2 * g2)
        g0 /= nrm
        g1 /= nrm
        g2 /= nrm
        h0 = f1 * g2 - f2 * g1
        h1 = f2 * g0 - f0 * g2
        h2 = f0 * g1 - f1 * g0
        frames[i, 0, 0] = f0
        frames[i, 0, 1] = f1
        frames[i, 0, 2] = f2
        frames[i, 1, 0] = g0
        frames[i, 1, 1] = g1
        frames[i, 1, 2] = g2
        frames[i, 2, 0] = h0
        frames[i, 2, 1] = h1
        frames[i, 2, 2] = h2


def strains(pos, frames, rest_len, voronoi, lengths, tangents, stretch, sigma, kappa):
    """Fill element lengths/tangents/stretch/shear and interior curvature."""
    cdef double[:, ::1] p = pos
    cdef double[:, :, ::1] q = frames
    cdef double[::1] rl = rest_len
    cdef double[::1] vor = voronoi
    cdef double[::1] ln = lengths
    cdef double[:, ::1] tn = tangents
    cdef double[::1] e = stretch
    cdef double[:, ::1] sg = sigma
    cdef double[:, ::1] kp = kappa
    cdef int status
    with nogil:
        status = _strains(p, q, rl, vor, ln, tn, e, sg, kp)
    return status


def accelerations(
    frames, omega, rest_len, voronoi, mass, rho_moments, bend_stiff, shear_stiff,
    tangents, stretch, sigma, kappa, stretch_rate, force_density, couple_density,
    acc, alpha,
):
    """Momentum-balance right-hand sides divided by the lumped inertias."""
    cdef double[:, :, ::1] q = frames
    cdef double[:, ::1] w = omega
    cdef double[::1] rl = rest_len
    cdef double[::1] vor = voronoi
    cdef double[::1] m = mass
    cdef double[:, ::1] rm = rho_moments
    cdef double[:, ::1] bs = bend_stiff
    cdef double[:, ::1] ss = shear_stiff
    cdef double[:, ::1] tn = tangents
    cdef double[::1] e = stretch
    cdef double[:, ::1] sg = sigma
    cdef double[:, ::1] kp = kappa
    cdef double[::1] rate = stretch_rate
    cdef double[:, ::1] fd = force_density
    cdef double[:, ::1] cpl = couple_density
    cdef double[:, ::1] a = acc
    cdef double[:, ::1] al = alpha
    with nogil:
        _accelerations(q, w, rl, vor, m, rm, bs, ss, tn, e, sg, kp, rate, fd, cpl, a, al)
    return 0


def contact_forces(pos, vel, node_radius, spheres, capsules, force_density):
    """Penalty contact line density against rigid obstacles."""
    cdef double[:, ::1] p = pos
    cdef double[:, ::1] v = vel
    cdef double[::1] nr = node_radius
    cdef double[:, ::1] sph = spheres
    cdef double[:, ::1] cap = capsules
    cdef double[:, ::1] fd = force_density
    cdef int touched
    with nogil:
        touched = _contact(p, v, nr, sph, cap, fd)
    return touched


def energies(vel, omega, mass, rho_moments, rest_len, voronoi, shear_stiff, bend_stiff, sigma, kappa):
    """(translational, rotational, shear/stretch elastic, bend/twist elastic)."""
    cdef double[:, ::1] v = vel
    cdef double[:, ::1] w = omega
    cdef double[::1] m = mass
    cdef double[:, ::1] rm = rho_moments
    cdef double[::1] rl = rest_len
    cdef double[::1] vor = voronoi
    cdef double[:, ::1] ss = shear_stiff
    cdef double[:, ::1] bs = bend_stiff
    cdef double[:, ::1] sg = sigma
    cdef double[:, ::1] kp = kappa
    cdef Py_ssize_t n = rl.shape[0]
    cdef Py_ssize_t i
    cdef double t_kin = 0.0, r_kin = 0.0, e_shear = 0.0, e_bend = 0.0
    with nogil:
        for i in range(n + 1):
            t_kin += m[i] * (v[i, 0] * v[i, 0] + v[i, 1] * v[i, 1] + v[i, 2] * v[i, 2])
        for i in range(n):
            r_kin += rl[i] * (
                rm[i, 0] * w[i, 0] * w[i, 0] + rm[i, 1] * w[i, 1] * w[i, 1] + rm[i, 2] * w[i, 2] * w[i, 2]
            )
            e_shear += rl[i] * (
                ss[i, 0] * sg[i, 0] * sg[i, 0] + ss[i, 1] * sg[i, 1] * sg[i, 1] + ss[i, 2] * sg[i, 2] * sg[i, 2]
            )
        for i in range(n - 1):
            e_bend += vor[i] * (
                bs[i, 0] * kp[i, 0] * kp[i, 0] + bs[i, 1] * kp[i, 1] * kp[i, 1] + bs[i, 2] * kp[i, 2] * kp[i, 2]
            )
    return 0.5 * t_kin, 0.5 * r_kin, 0.5 * e_shear, 0.5 * e_bend


def step_block(
    pos, vel, frames, omega,
    rest_len, voronoi, mass, rho_moments, bend_stiff, shear_stiff,
    node_radius, stretch_prev, ext_force, couple, spheres, capsules,
    dt, gamma, n_substeps, clamp, base_pos, base_frame, work,
):
    """Advance n_substeps of the kick-drift-kick scheme in place."""
    cdef double[:, ::1] p = pos
    cdef double[:, ::1] v = vel
    cdef double[:, :, ::1] q = frames
    cdef double[:, ::1] w = omega
    cdef double[::1] rl = rest_len
    cdef double[::1] vor = voronoi
    cdef double[::1] m = mass
    cdef double[:, ::1] rm = rho_moments
    cdef double[:, ::1] bs = bend_stiff
    cdef double[:, ::1] ss = shear_stiff
    cdef double[::1] nr = node_radius
    cdef double[::1] e_prev = stretch_prev
    cdef double[:, ::1] fext = ext_force
    cdef double[:, ::1] cpl = couple
    cdef double[:, ::1] sph = spheres
    cdef double[:, ::1] cap = capsules
    cdef double[::1] bp = base_pos
    cdef double[:, ::1] bq = base_frame

    cdef double[::1] lengths = work.lengths
    cdef double[:, ::1] tangents = work.tangents
    cdef double[::1] stretch = work.stretch
    cdef double[:, ::1] sigma = work.sigma
    cdef double[:, ::1] kappa = work.kappa
    cdef double[:, ::1] acc = work.acc
    cdef double[:, ::1] alpha = work.alpha
    cdef double[:, ::1] force = work.force
    cdef double[::1] rate = work.stretch_rate

    cdef double c_dt = dt
    cdef double half_dt = 0.5 * c_dt
    cdef double c_gamma = gamma
    cdef double decay = exp(-c_gamma * c_dt)
    cdef int n_sub = n_substeps
    cdef bint do_clamp = clamp
    cdef bint has_obstacles = sph.shape[0] > 0 or cap.shape[0] > 0
    cdef Py_ssize_t n = rl.shape[0]
    cdef Py_ssize_t i, a, sub
    cdef int status = 0
    cdef int contact_flag = 0
    cdef double speed2, limit2
    limit2 = _SPEED_LIMIT * _SPEED_LIMIT

    with nogil:
        for sub in range(n_sub):
            status = _strains(p, q, rl, vor, lengths, tangents, stretch, sigma, kappa)
            if status != 0:
                break
            for i in range(n):
                rate[i] = (stretch[i] - e_prev[i]) / c_dt
            for i in range(n + 1):
                force[i, 0] = fext[i, 0]
                force[i, 1] = fext[i, 1]
                force[i, 2] = fext[i, 2]
            if has_obstacles:
                contact_flag |= _contact(p, v, nr, sph, cap, force)
            _accelerations(q, w, rl, vor, m, rm, bs, ss, tangents, stretch, sigma,
                           kappa, rate, force, cpl, acc, alpha)
            for i in range(n + 1):
                v[i, 0] += half_dt * acc[i, 0]
                v[i, 1] += half_dt * acc[i, 1]
                v[i, 2] += half_dt * acc[i, 2]
            for i in range(n):
                w[i, 0] += half_dt * alpha[i, 0]
                w[i, 1] += half_dt * alpha[i, 1]
                w[i, 2] += half_dt * alpha[i, 2]
            if do_clamp:
                for a in range(3):
                    v[0, a] = 0.0
                    w[0, a] = 0.0  # clamped dofs never move through the drift
            for i in range(n + 1):
                p[i, 0] += c_dt * v[i, 0]
                p[i, 1] += c_dt * v[i, 1]
                p[i, 2] += c_dt * v[i, 2]
            _rotate_frames(q, w, c_dt)

            for i in range(n):
                e_prev[i] = stretch[i]
            status = _strains(p, q, rl, vor, lengths, tangents, stretch, sigma, kappa)
            if status != 0:
                break
            for i in range(n):
                rate[i] = (stretch[i] - e_prev[i]) / c_dt
            for i in range(n + 1):
                force[i, 0] = fext[i, 0]
                force[i, 1] = fext[i, 1]
                force[i, 2] = fext[i, 2]
            if has_obstacles:
                contact_flag |= _contact(p, v, nr, sph, cap, force)
            _accelerations(q, w, rl, vor, m, rm, bs, ss, tangents, stretch, sigma,
                           kappa, rate, force, cpl, acc, alpha)
            for i in range(n + 1):
                v[i, 0] += half_dt * acc[i, 0]
                v[i, 1] += half_dt * acc[i, 1]
                v[i, 2] += half_dt * acc[i, 2]
            for i in range(n):
                w[i, 0] += half_dt * alpha[i, 0]
                w[i, 1] += half_dt * alpha[i, 1]
                w[i, 2] += half_dt * alpha[i, 2]
            if c_gamma != 0.0:
                for i in range(n + 1):
                    v[i, 0] *= decay
                    v[i, 1] *= decay
                    v[i, 2] *= decay
                for i in range(n):
                    w[i, 0] *= decay
                    w[i, 1] *= decay
                    w[i, 2] *= decay
            if do_clamp:
                for a in range(3):
                    p[0, a] = bp[a]
                    v[0, a] = 0.0
                    w[0, a] = 0.0
                for a in range(3):
                    q[0, a, 0] = bq[a, 0]
                    q[0, a, 1] = bq[a, 1]
                    q[0, a, 2] = bq[a, 2]
            for i in range(n):
                e_prev[i] = stretch[i]

            for i in range(n + 1):
                if not (isfinite(p[i, 0]) and isfinite(p[i, 1]) and isfinite(p[i, 2])
                        and isfinite(v[i, 0]) and isfinite(v[i, 1]) and isfinite(v[i, 2])):
                    status = 2
                    break
                speed2 = v[i, 0] * v[i, 0] + v[i, 1] * v[i, 1] + v[i, 2] * v[i, 2]
                if speed2 > limit2:
                    status = 3
                    break
            if status != 0:
                break
            for i in range(n):
                if not (isfinite(w[i, 0]) and isfinite(w[i, 1]) and isfinite(w[i, 2])):
                    status = 2
                    break
            if status != 0:
                break
    return status, contact_flag
