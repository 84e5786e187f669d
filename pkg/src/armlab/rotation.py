"""Rotation helpers: exponential/log maps, orthonormalization, quaternions.

Frames are stored as 3x3 matrices mapping lab vectors to local coordinates;
the rows are the directors d1, d2, d3 expressed in the lab frame.
"""

import numpy as np

_SMALL_ANGLE = 1e-6


def skew(u):
    """Cross-product matrix [u]x such that skew(u) @ v == cross(u, v)."""
    return np.array(
        [
            [0.0, -u[2], u[1]],
            [u[2], 0.0, -u[0]],
            [-u[1], u[0], 0.0],
        ]
    )


def rotation_matrix(u):
    """Rodrigues rotation matrix exp([u]x) for a rotation vector u."""
    angle = float(np.linalg.norm(u))
    if angle < _SMALL_ANGLE:
        # series for sin(t)/t and (1-cos(t))/t^2
        a = 1.0 - angle**2 / 6.0
        b = 0.5 - angle**2 / 24.0
    else:
        a = np.sin(angle) / angle
        b = (1.0 - np.cos(angle)) / angle**2
    k = skew(u)
    return np.eye(3) + a * k + b * (k @ k)


def rotation_vector(rot):
    """Rotation vector of a rotation matrix (inverse of rotation_matrix).

    Valid for rotation angles below ~pi; near pi the axis extraction from the
    antisymmetric part degrades and callers are expected to reject such input.
    """
    trace = np.clip((rot[0, 0] + rot[1, 1] + rot[2, 2] - 1.0) * 0.5, -1.0, 1.0)
    angle = float(np.arccos(trace))
    vee = 0.5 * np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    )
    if angle < _SMALL_ANGLE:
        # t/sin(t) ~ 1 + t^2/6
        return vee * (1.0 + angle**2 / 6.0)
    return vee * (angle / np.sin(angle))


def orthonormalize(q):
    """Project a near-rotation matrix back onto SO(3) (Gram-Schmidt on rows)."""
    out = np.array(q, dtype=float)
    r0 = out[0] / np.linalg.norm(out[0])
    r1 = out[1] - np.dot(out[1], r0) * r0
    r1 /= np.linalg.norm(r1)
    r2 = np.cross(r0, r1)
    out[0], out[1], out[2] = r0, r1, r2
    return out


def frame_to_quaternion(q):
    """Unit quaternion (w, x, y, z) of the rotation carrying lab axes onto the
    directors, i.e. of Q^T for a lab->local frame matrix Q.

    Uses Shepperd's branch selection; w is kept non-negative.
    """
    # rotation matrix whose columns are the directors
    r = np.asarray(q, dtype=float).T
    t = r[0, 0] + r[1, 1] + r[2, 2]
    if t > 0.0:
        s = np.sqrt(t + 1.0) * 2.0
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] >= r[2, 2]:
        s = np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    quat = np.array([w, x, y, z])
    if quat[0] < 0.0:
        quat = -quat
    return quat / np.linalg.norm(quat)


def quaternion_geodesic_angle(qa, qb):
    """Geodesic angle between two unit quaternions, in [0, pi].

    Absolute inner product makes the metric invariant under the q -> -q
    double cover.
    """
    dot = abs(float(np.dot(qa, qb)))
    return 2.0 * float(np.arccos(min(dot, 1.0)))


def rotation_about_axis_quaternion(axis, angle):
    """Unit quaternion (w, x, y, z) for a rotation of `angle` about `axis`."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * float(angle)
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))
