"""Wall-time benchmark of the stepping kernels across backends."""

import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import available_backends, get_backend
from ._backend.fallback import WorkBuffers
from .dynamics import stability_time_step
from .kinematics import SectionProperties, straight_rod


@dataclass
class BenchmarkReport:
    resolutions: list
    per_step_seconds: dict  # backend -> {n: seconds}
    scaling_ratios: dict  # backend -> t(n_max) / t(n_min)
    backends: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "resolutions": self.resolutions,
            "backends": self.backends,
            "per_step_seconds": {
                b: {str(n): t for n, t in d.items()} for b, d in self.per_step_seconds.items()
            },
            "scaling_ratios": self.scaling_ratios,
        }


def time_backend(backend, n_elements: int, min_steps: int = 200,
                 target_seconds: float = 0.15, repeats: int = 3) -> float:
    """Median-of-best per-substep wall time on a rest rod (cost is
    configuration-independent for the kernels)."""
    props = SectionProperties.circular(n_elements, 1.0, 0.025, 1000.0, 1.0e7)
    state = straight_rod(props)
    work = WorkBuffers(n_elements)
    stretch_prev = np.ones(n_elements)
    ext = np.zeros((n_elements + 1, 3))
    couple = np.zeros((n_elements, 3))
    node_radius = np.full(n_elements + 1, 0.025)
    spheres, capsules = np.zeros((0, 6)), np.zeros((0, 9))
    dt = 0.5 * stability_time_step(props)
    args = (
        state.positions, state.velocities, state.frames, state.angular_velocities,
        props.rest_lengths, props.voronoi_lengths, props.node_masses,
        props.mass_second_moments, props.bend_twist_stiffness,
        props.shear_stretch_stiffness, node_radius, stretch_prev, ext, couple,
        spheres, capsules, dt, 0.0,
    )
    tail = (True, np.zeros(3), np.eye(3), work)
    # calibrate the block size so one measurement is long enough to trust
    t0 = time.perf_counter()
    backend.step_block(*args, min_steps, *tail)
    per_step = (time.perf_counter() - t0) / min_steps
    steps = max(min_steps, int(target_seconds / max(per_step, 1e-9)))
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        backend.step_block(*args, steps, *tail)
        best = min(best, (time.perf_counter() - t0) / steps)
    return best


def run_benchmark(resolutions=(50, 100, 200, 400), backends=None) -> BenchmarkReport:
    if backends is None:
        backends = available_backends()
    per_step = {}
    ratios = {}
    for name in backends:
        backend = get_backend(name)
        per_step[name] = {n: time_backend(backend, n) for n in resolutions}
        n_lo, n_hi = min(resolutions), max(resolutions)
        ratios[name] = per_step[name][n_hi] / per_step[name][n_lo]
    return BenchmarkReport(
        resolutions=list(resolutions),
        per_step_seconds=per_step,
        scaling_ratios=ratios,
        backends=list(backends),
    )
