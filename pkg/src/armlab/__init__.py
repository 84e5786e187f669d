"""Cosserat-rod soft arm simulator with compliant-arm control environments."""

from ._backend import available_backends, backend_name
from .dynamics import (
    EnergyBreakdown,
    IntegratorConfig,
    LoadField,
    RodSimulation,
    apply_clamped_base,
    compute_accelerations,
    compute_energies,
    stability_time_step,
    step,
)
from .environments import (
    ArmEnv,
    StepResult,
    build_arm,
    create,
    reward_distance,
    reward_orientation,
)
from .errors import (
    ArmLabError,
    ConfigError,
    DynamicsBlowUpError,
    FrameDiscontinuityError,
    ZeroLengthElementError,
)
from .interactions import (
    CapsuleObstacle,
    SphereObstacle,
    SplineActuation,
    TargetLaw,
    TargetState,
    evaluate_spline,
    obstacle_contact_force,
    update_target,
)
from .kinematics import (
    RodState,
    SectionProperties,
    StrainState,
    compute_curvature,
    compute_shear,
    compute_strains,
    compute_stretch,
    rotate_frame,
    straight_rod,
)
from .recording import TrajectoryRecord, read_trajectory, trajectory_columns, write_trajectory
from .runner import (
    EpisodeResult,
    RandomPolicy,
    ScriptedPolicy,
    StdinPolicy,
    ZeroPolicy,
    run_episode,
)
from .scenario import (
    CaseScenario,
    case_defaults,
    load_scenario,
    resolve_scenario,
    save_scenario,
    scenario_from_dict,
)

__version__ = "0.1.0"
