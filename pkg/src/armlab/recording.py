"""Deterministic trajectory recording and columnar CSV output."""

import csv
from pathlib import Path

import numpy as np

N_SAMPLES = 11


def trajectory_columns() -> list[str]:
    cols = ["step", "time"]
    for j in range(N_SAMPLES):
        cols += [f"s{j:02d}_x", f"s{j:02d}_y", f"s{j:02d}_z"]
    cols += ["tip_x", "tip_y", "tip_z"]
    cols += ["target_x", "target_y", "target_z"]
    cols += ["target_vx", "target_vy", "target_vz"]
    cols += ["tip_target_dist", "reward", "reward_cum", "contact"]
    return cols


N_COLUMNS = len(trajectory_columns())


class TrajectoryRecord:
    """Per-control-step rows: time, the 11 arm samples, tip/target state,
    reward bookkeeping and the contact flag."""

    def __init__(self, episode_length: int | None = None):
        self.episode_length = episode_length
        self.rows: list[list[float]] = []

    def add_row(self, step, time, samples, tip, target, target_velocity,
                reward, reward_cum, contact) -> None:
        if self.rows and time <= self.rows[-1][1]:
            raise ValueError("trajectory rows must be strictly increasing in time")
        if self.episode_length is not None and len(self.rows) >= self.episode_length:
            raise ValueError("trajectory exceeds episode length")
        samples = np.asarray(samples, dtype=float).reshape(-1)
        tip = np.asarray(tip, dtype=float)
        target = np.asarray(target, dtype=float)
        row = [float(step), float(time), *samples.tolist(), *tip.tolist(),
               *target.tolist(), *np.asarray(target_velocity, dtype=float).tolist(),
               float(np.linalg.norm(tip - target)), float(reward),
               float(reward_cum), float(bool(contact))]
        if len(row) != N_COLUMNS:
            raise ValueError(f"row has {len(row)} values, expected {N_COLUMNS}")
        self.rows.append(row)

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(-1, N_COLUMNS)


def write_trajectory(record: TrajectoryRecord, path) -> None:
    """Columnar CSV; 12 significant digits keep read-back within 1e-9
    relative of the recorded values."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(trajectory_columns())
            for row in record.rows:
                writer.writerow([f"{v:.12g}" for v in row])
    except OSError as exc:
        raise OSError(f"failed to write trajectory to {path}: {exc}") from exc


def read_trajectory(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    return header, np.array(data, dtype=float).reshape(-1, len(header))
