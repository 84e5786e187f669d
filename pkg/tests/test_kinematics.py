"""Strain reductions, frame algebra, and their analytic oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from armlab.environments import build_arm
from armlab.errors import FrameDiscontinuityError, ZeroLengthElementError
from armlab.kinematics import (
    RodState,
    SectionProperties,
    compute_curvature,
    compute_shear,
    compute_strains,
    compute_stretch,
    rotate_frame,
    straight_rod,
)
from armlab.rotation import rotation_matrix, rotation_vector
from armlab.scenario import case_defaults
from armlab.validation import bent_rod, helix_rod


def default_props(n=20, length=1.0):
    return SectionProperties.circular(n, length, 0.025, 1000.0, 1.0e7)


def rest_arm(n=20):
    sc = case_defaults(1)
    sc.arm.n_elements = n
    return build_arm(sc)


# ---------------------------------------------------------------------------
# stretch
# ---------------------------------------------------------------------------

class TestStretch:
    def test_rest_configuration_is_exactly_one(self):
        props, state = rest_arm()
        assert np.all(compute_stretch(state, props) == 1.0)

    def test_uniform_dilation(self):
        props, state = rest_arm()
        state.positions *= 1.2
        np.testing.assert_allclose(compute_stretch(state, props), 1.2, rtol=1e-14)

    def test_random_configuration_matches_direct_recomputation(self):
        rng = np.random.default_rng(7)
        props, state = rest_arm()
        state.positions += 0.01 * rng.standard_normal(state.positions.shape)
        expected = [
            math.sqrt(sum((state.positions[i + 1, k] - state.positions[i, k]) ** 2 for k in range(3)))
            / props.rest_lengths[i]
            for i in range(props.n_elements)
        ]
        np.testing.assert_allclose(compute_stretch(state, props), expected, rtol=1e-14)

    def test_zero_length_element_raises(self):
        props, state = rest_arm()
        state.positions[3] = state.positions[4]
        with pytest.raises(ZeroLengthElementError, match="zero-length element"):
            compute_stretch(state, props)


# ---------------------------------------------------------------------------
# shear
# ---------------------------------------------------------------------------

class TestShear:
    def test_rest_configuration_is_zero(self):
        props, state = rest_arm()
        stretch = compute_stretch(state, props)
        assert np.all(compute_shear(state, stretch) == 0.0)

    def test_tangent_aligned_pure_stretch(self):
        props, state = rest_arm()
        state.positions[:, 2] *= 1.5
        stretch = compute_stretch(state, props)
        sigma = compute_shear(state, stretch)
        np.testing.assert_allclose(sigma[:, :2], 0.0, atol=1e-13)
        np.testing.assert_allclose(sigma[:, 2], 0.5, rtol=1e-12)

    def test_quarter_turn_about_normal(self):
        # hand-applied rotation: d2 -> z, d3 -> -y, so sigma = (0, 1, -1)
        props, state = rest_arm()
        quarter = rotate_frame(np.eye(3), [0.5 * np.pi, 0.0, 0.0])
        state.frames[:] = quarter
        stretch = compute_stretch(state, props)
        sigma = compute_shear(state, stretch)
        np.testing.assert_allclose(sigma, np.tile([0.0, 1.0, -1.0], (props.n_elements, 1)), atol=1e-12)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

class TestCurvature:
    def test_identical_frames_zero(self):
        props, state = rest_arm()
        assert np.all(compute_curvature(state, props) == 0.0)

    def test_circular_arc_magnitude(self):
        # frames following the tangent on an arc of radius 0.5 -> |kappa| = 2
        errs = []
        for n in (50, 100):
            props = default_props(n)
            state = bent_rod(props, 0.5)
            kappa = compute_curvature(state, props)
            mags = np.linalg.norm(kappa, axis=1)
            errs.append(np.abs(mags - 2.0).max())
        assert errs[0] < 1e-3
        assert errs[1] <= errs[0] + 1e-12  # second-order construction, no growth

    def test_uniform_twist(self):
        props, state = rest_arm(25)
        total_angle = 1.3
        length = props.total_rest_length
        s_mid = np.concatenate(([0.0], np.cumsum(props.rest_lengths)))
        s_mid = 0.5 * (s_mid[:-1] + s_mid[1:])
        for i, s in enumerate(s_mid):
            state.frames[i] = rotate_frame(np.eye(3), [0.0, 0.0, total_angle * s / length])
        kappa = compute_curvature(state, props)
        expected = np.tile([0.0, 0.0, total_angle / length], (props.n_elements - 1, 1))
        np.testing.assert_allclose(kappa, expected, atol=1e-12)

    def test_finite_difference_darboux_oracle(self):
        # independent oracle: solve d(d_j)/ds = kbar x d_j from adjacent frames
        props = default_props(40)
        state, expected = helix_rod(props, 0.18, 0.3)
        kappa = compute_curvature(state, props)
        k = 17
        h = props.voronoi_lengths[k]
        qa, qb = state.frames[k], state.frames[k + 1]
        rows = []
        rhs = []
        for j in range(3):
            d_ds = (qb[j] - qa[j]) / h
            mid = 0.5 * (qa[j] + qb[j])
            rows.append(np.array([[0.0, mid[2], -mid[1]], [-mid[2], 0.0, mid[0]], [mid[1], -mid[0], 0.0]]))
            rhs.append(d_ds)
        kbar, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
        mid_frame = 0.5 * (qa + qb)
        local = mid_frame @ kbar
        np.testing.assert_allclose(kappa[k], local, rtol=1e-2, atol=1e-4)  # one-sided FD oracle is O(h)

    def test_frame_discontinuity(self):
        props, state = rest_arm()
        state.frames[5] = rotation_matrix([np.pi, 0.0, 0.0]) @ state.frames[5]
        with pytest.raises(FrameDiscontinuityError, match="frame discontinuity"):
            compute_curvature(state, props)


# ---------------------------------------------------------------------------
# rotate_frame
# ---------------------------------------------------------------------------

def rodrigues_reference(u):
    """Independent Rodrigues formula for the director rotation R(+u)."""
    angle = np.linalg.norm(u)
    if angle == 0.0:
        return np.eye(3)
    axis = np.asarray(u) / angle
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


class TestRotateFrame:
    def test_zero_vector_is_identity(self):
        q = rotate_frame(np.eye(3), [0.3, -0.1, 0.2])
        np.testing.assert_array_equal(rotate_frame(q, [0.0, 0.0, 0.0]), q)

    def test_quarter_turn_sends_d2_to_d3(self):
        q = rotate_frame(np.eye(3), [0.5 * np.pi, 0.0, 0.0])
        np.testing.assert_allclose(q[1], [0.0, 0.0, 1.0], atol=1e-12)  # new d2 = old d3

    def test_directors_advance_by_rodrigues_rotation(self):
        rng = np.random.default_rng(3)
        q0 = rotate_frame(np.eye(3), rng.uniform(-1, 1, 3))
        u = rng.uniform(-0.8, 0.8, 3)
        q1 = rotate_frame(q0, u)
        # local-frame u corresponds to the lab axis Q^T u
        reference = rodrigues_reference(q0.T @ u)
        for j in range(3):
            np.testing.assert_allclose(q1[j], reference @ q0[j], atol=1e-12)

    def test_rotation_composition(self):
        u = np.array([0.2, -0.4, 0.1])
        q_twice = rotate_frame(rotate_frame(np.eye(3), u), u)
        q_once = rotate_frame(np.eye(3), 2 * u)
        np.testing.assert_allclose(q_twice, q_once, atol=1e-12)

    def test_orthonormality_survives_many_rotations(self):
        rng = np.random.default_rng(11)
        q = np.eye(3)
        for _ in range(100_000):
            q = rotate_frame(q, rng.uniform(-1e-3, 1e-3, 3))
        assert np.abs(q.T @ q - np.eye(3)).max() <= 1e-10

    def test_log_exp_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            u = rng.uniform(-1, 1, 3)
            np.testing.assert_allclose(rotation_vector(rotation_matrix(u)), u, atol=1e-10)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

class TestInvariants:
    def test_rest_strain_state(self):
        props, state = rest_arm()
        strains = compute_strains(state, props)
        assert np.all(strains.stretch == 1.0)
        assert np.all(strains.shear == 0.0)
        assert np.all(strains.curvature == 0.0)

    @settings(max_examples=25, deadline=None)
    @given(
        rot=st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3),
        shift=st.lists(st.floats(-5.0, 5.0), min_size=3, max_size=3),
    )
    def test_strains_are_rigid_transform_invariant(self, rot, shift):
        props = default_props(12)
        state, _ = helix_rod(props, 0.15, 0.4)
        before = compute_strains(state, props)
        rotation = rotation_matrix(np.array(rot))
        moved = RodState(
            positions=state.positions @ rotation.T + np.asarray(shift),
            velocities=state.velocities.copy(),
            # directors rotate with the body: Q -> Q R^T
            frames=np.einsum("kij,mj->kim", state.frames, rotation),
            angular_velocities=state.angular_velocities.copy(),
        )
        after = compute_strains(moved, props)
        np.testing.assert_allclose(after.stretch, before.stretch, atol=1e-12)
        np.testing.assert_allclose(after.shear, before.shear, atol=1e-12)
        np.testing.assert_allclose(after.curvature, before.curvature, atol=1e-12)

    def test_helix_strain_recovery_is_second_order(self):
        from armlab.validation import _helix_errors

        err_n = _helix_errors(60)
        err_2n = _helix_errors(120)
        for a, b in zip(err_n, err_2n):
            assert 3.5 <= a / b <= 4.5

    def test_straight_rod_builder_along_other_axis(self):
        props = default_props(10)
        state = straight_rod(props, direction=(1.0, 0.0, 0.0))
        state.validate()
        strains = compute_strains(state, props)
        assert np.abs(strains.shear).max() < 1e-12
