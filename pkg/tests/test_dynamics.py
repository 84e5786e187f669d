"""Momentum-balance right-hand sides, the Verlet stepper, and energies."""

import numpy as np
import pytest

from armlab.dynamics import (
    IntegratorConfig,
    LoadField,
    RodSimulation,
    apply_clamped_base,
    compute_accelerations,
    compute_energies,
    stability_time_step,
    step,
)
from armlab.environments import build_arm
from armlab.errors import DynamicsBlowUpError
from armlab.kinematics import SectionProperties, compute_strains
from armlab.scenario import case_defaults
from armlab.validation import bent_rod, temporal_convergence_ratio

GRAVITY = np.array([0.0, 0.0, -9.81])


def rest_arm(n=20):
    sc = case_defaults(1)
    sc.arm.n_elements = n
    return build_arm(sc)


class TestAccelerations:
    def test_rest_configuration_zero(self):
        props, state = rest_arm()
        strains = compute_strains(state, props)
        acc, alpha = compute_accelerations(state, props, strains, LoadField.zeros(props.n_elements))
        assert np.abs(acc).max() == 0.0
        assert np.abs(alpha).max() == 0.0

    def test_uniform_gravity_density(self):
        props, state = rest_arm()
        loads = LoadField.zeros(props.n_elements)
        loads.force_density[:] = props.density * props.areas[0] * GRAVITY
        strains = compute_strains(state, props)
        acc, alpha = compute_accelerations(state, props, strains, loads)
        np.testing.assert_allclose(acc, np.tile(GRAVITY, (props.n_elements + 1, 1)), rtol=1e-12)
        assert np.abs(alpha).max() == 0.0

    def test_stretched_rod_forces_telescope(self):
        props, state = rest_arm()
        state.positions *= 1.1
        strains = compute_strains(state, props)
        acc, _ = compute_accelerations(state, props, strains, LoadField.zeros(props.n_elements))
        forces = acc * props.node_masses[:, None]
        # end nodes pulled inward, interior in equilibrium, total zero
        assert forces[0, 2] > 0.0 and forces[-1, 2] < 0.0
        assert np.abs(forces[1:-1]).max() < 1e-12 * np.abs(forces[0, 2])
        assert np.abs(forces.sum(axis=0)).max() < 1e-12 * np.abs(forces[0, 2])

    def test_blow_up_reports_index(self):
        props, state = rest_arm()
        state.positions[7] += 1e200
        with np.errstate(invalid="ignore", over="ignore"):
            strains = compute_strains(state, props)
            with pytest.raises(DynamicsBlowUpError, match="dynamics blow-up"):
                compute_accelerations(state, props, strains, LoadField.zeros(props.n_elements))


class TestStep:
    def test_rest_state_is_a_fixed_point(self):
        props, state = rest_arm()
        cfg = IntegratorConfig(dt=2.5e-5)
        new = step(state, props, cfg, LoadField.zeros(props.n_elements))
        np.testing.assert_array_equal(new.positions, state.positions)
        np.testing.assert_array_equal(new.velocities, state.velocities)
        np.testing.assert_array_equal(new.frames, state.frames)

    def test_ballistic_free_fall(self):
        props, state = rest_arm()
        sim = RodSimulation(state, props, IntegratorConfig(dt=2.5e-5), clamp=False)
        sim.loads.force_density[:] = props.density * props.areas[0] * GRAVITY
        k = 4000
        sim.advance(k)
        t = k * 2.5e-5
        masses = props.node_masses
        drop = 0.5 * props.total_rest_length - float(
            (sim.state.positions[:, 2] * masses).sum() / masses.sum()
        )
        np.testing.assert_allclose(drop, 0.5 * 9.81 * t * t, rtol=1e-9)

    def test_damped_energy_monotone(self):
        props = SectionProperties.circular(30, 1.0, 0.025, 1000.0, 1.0e7)
        sim = RodSimulation(bent_rod(props, 3.0), props,
                            IntegratorConfig(dt=2.5e-5, damping=10.0), clamp=False)
        prev = sim.energies().total
        for _ in range(200):
            sim.advance(10)
            now = sim.energies().total
            assert now <= prev * (1.0 + 1e-12)
            prev = now

    def test_momentum_conserved_per_step(self):
        props = SectionProperties.circular(30, 1.0, 0.025, 1000.0, 1.0e7)
        sim = RodSimulation(bent_rod(props, 4.0), props,
                            IntegratorConfig(dt=2.5e-5, damping=0.0), clamp=False)
        masses = props.node_masses[:, None]
        worst = 0.0
        speed = 0.0
        momentum = (sim.state.velocities * masses).sum(axis=0)
        for _ in range(2000):
            sim.advance(1)
            fresh = (sim.state.velocities * masses).sum(axis=0)
            worst = max(worst, float(np.abs(fresh - momentum).max()))
            momentum = fresh
            speed = max(speed, float(np.abs(sim.state.velocities).max()))
        assert worst <= 1e-12 * props.node_masses.sum() * speed

    def test_temporal_convergence_second_order(self):
        assert 3.0 <= temporal_convergence_ratio() <= 5.0

    def test_dt_outside_stability_bound_rejected(self):
        props, _ = rest_arm()
        cfg = IntegratorConfig(dt=10.0 * stability_time_step(props))
        with pytest.raises(ValueError, match="stability bound"):
            cfg.validate(props)


class TestClampedBase:
    def test_reset_values(self):
        props, state = rest_arm()
        state.positions += 0.3
        state.velocities += 1.0
        state.angular_velocities += 2.0
        apply_clamped_base(state)
        np.testing.assert_array_equal(state.positions[0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(state.velocities[0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(state.frames[0], np.eye(3))
        np.testing.assert_array_equal(state.angular_velocities[0], [0.0, 0.0, 0.0])

    def test_clamp_holds_through_dynamic_steps(self):
        sc = case_defaults(1)
        props, state = build_arm(sc)
        sim = RodSimulation(state, props, IntegratorConfig(dt=2.5e-5, damping=5.0), clamp=True)
        sim.loads.couple_density[:, 1] = 20.0
        sim.advance(2000)
        np.testing.assert_array_equal(sim.state.positions[0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(sim.state.velocities[0], [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(sim.state.frames[0], np.eye(3))
        # and the rest of the rod did move
        assert np.abs(sim.state.positions[-1, 0]) > 1e-3


class TestEnergies:
    def test_rest_zero(self):
        props, state = rest_arm()
        energies = compute_energies(state, props, compute_strains(state, props))
        assert energies.total == 0.0

    def test_rigid_translation(self):
        props, state = rest_arm()
        v = 0.7
        state.velocities[:, 0] = v
        energies = compute_energies(state, props, compute_strains(state, props))
        expected = 0.5 * props.density * props.areas[0] * props.total_rest_length * v**2
        np.testing.assert_allclose(energies.translational, expected, rtol=1e-12)
        assert energies.rotational == 0.0
        assert energies.shear_stretch == 0.0
        assert energies.bend_twist == 0.0

    def test_arc_bending_energy_converges_to_analytic(self):
        radius = 0.5
        errs = []
        for n in (100, 200):
            props = SectionProperties.circular(n, 1.0, 0.025, 1000.0, 1.0e7)
            state = bent_rod(props, radius)
            energies = compute_energies(state, props, compute_strains(state, props))
            analytic = 0.5 * props.bend_twist_stiffness[0, 0] / radius**2 * props.total_rest_length
            errs.append(abs(energies.bend_twist - analytic) / analytic)
        assert errs[0] < 0.03
        assert errs[1] < 0.6 * errs[0]
