"""Finite-shot stroboscopic measurement of the probe qubit.

Each grid point (axis, t_k) is an independent preparation: the empirical
mean of ``n_m`` projective +-1 outcomes with ``P(+1) = (1 + m)/2``,
where ``m`` is the (optionally damped) ideal Bloch component.  Shots are
drawn from per-point RNG streams seeded as ``(seed, axis_index, k)``
with the fixed axis map x -> 0, y -> 1, z -> 2 and 1-based time index
``k``, so results for a given axis never depend on which other axes were
requested.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import ValidationError
from .fock import DensityMatrix
from .probe import BlochTrajectory, ProbeConfig, ideal_bloch_trajectory, time_grid

__all__ = [
    "MeasurementPlan",
    "decohered_expectation",
    "sample_trajectory",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class MeasurementPlan:
    """What to measure: grid, shot budget, axes, damping, seed.

    ``n_m = None`` means the infinite-shot (ideal) limit.
    """

    delta_t: float
    n_t: int
    n_m: Optional[int] = None
    axes: tuple[str, ...] = ("x", "y", "z")
    gamma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.delta_t > 0 and math.isfinite(self.delta_t)):
            raise ValidationError(f"delta_t must be positive, got {self.delta_t!r}")
        if int(self.n_t) != self.n_t or self.n_t < 1:
            raise ValidationError(f"n_t must be a positive integer, got {self.n_t!r}")
        if self.n_m is not None and (int(self.n_m) != self.n_m or self.n_m < 1):
            raise ValidationError(f"n_m must be None or a positive integer, got {self.n_m!r}")
        axes = tuple(self.axes)
        if not axes or any(a not in AXIS_INDEX for a in axes) or len(set(axes)) != len(axes):
            raise ValidationError(f"axes must be a subset of x, y, z; got {self.axes!r}")
        object.__setattr__(self, "axes", axes)
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValidationError(f"gamma must be >= 0, got {self.gamma!r}")

    def times(self) -> np.ndarray:
        return time_grid(self.delta_t, int(self.n_t))


def decohered_expectation(ideal: np.ndarray, gamma: float, times: np.ndarray) -> np.ndarray:
    """Exponential envelope exp(-gamma t) applied to an ideal component."""
    if gamma < 0:
        raise ValidationError("gamma must be >= 0")
    if gamma == 0.0:
        return np.asarray(ideal, dtype=float)
    return np.asarray(ideal, dtype=float) * np.exp(-gamma * np.asarray(times, dtype=float))


def _sample_axis(mean: np.ndarray, n_m: int, seed: int, axis: str) -> np.ndarray:
    """Empirical means of n_m two-outcome shots at every grid point."""
    p = 0.5 * (1.0 + mean)
    # Clip pure float fuzz only; anything materially outside is a real bug.
    if np.min(p) < -1e-12 or np.max(p) > 1 + 1e-12:
        raise ValidationError("Bloch component outside [-1, 1] during sampling")
    p = np.clip(p, 0.0, 1.0)
    out = np.empty_like(mean)
    ax = AXIS_INDEX[axis]
    for k in range(mean.size):
        rng = np.random.default_rng(np.random.SeedSequence((seed, ax, k + 1)))
        out[k] = 2.0 * rng.binomial(n_m, p[k]) / n_m - 1.0
    return out


def sample_trajectory(
    rho: DensityMatrix, cfg: ProbeConfig, plan: MeasurementPlan
) -> BlochTrajectory:
    """Simulate the full protocol run for one target state."""
    times = plan.times()
    ideal = ideal_bloch_trajectory(rho, cfg, times)
    comps: dict[str, np.ndarray] = {}
    for axis in plan.axes:
        damped = decohered_expectation(getattr(ideal, axis), plan.gamma, times)
        if plan.n_m is None:
            comps[axis] = damped
        else:
            comps[axis] = _sample_axis(damped, int(plan.n_m), plan.seed, axis)
    return BlochTrajectory(
        times=times,
        x=comps.get("x"),
        y=comps.get("y"),
        z=comps.get("z"),
        kind="ideal" if plan.n_m is None else "sampled",
        metadata={
            "g": cfg.g,
            "n_m": plan.n_m,
            "gamma": plan.gamma,
            "seed": plan.seed,
        },
    )


def write_trajectory_csv(traj: BlochTrajectory, path: str | Path) -> None:
    """Header ``t,x,y,z``; unmeasured axes are left as empty fields."""

    def fmt(v: Optional[float]) -> str:
        return "" if v is None else format(v, ".17g")

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "z"])
        for k, t in enumerate(traj.times):
            writer.writerow(
                [format(t, ".17g")]
                + [
                    fmt(getattr(traj, a)[k] if getattr(traj, a) is not None else None)
                    for a in ("x", "y", "z")
                ]
            )


def read_trajectory_csv(path: str | Path, kind: str = "sampled") -> BlochTrajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t", "x", "y", "z"]:
            raise ValidationError(f"{path}: expected header t,x,y,z, got {header!r}")
        rows = [row for row in reader if row]
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    times = np.array([float(r[0]) for r in rows])
    comps: dict[str, Optional[np.ndarray]] = {}
    for i, axis in enumerate(("x", "y", "z"), start=1):
        cells = [r[i] for r in rows]
        if all(c == "" for c in cells):
            comps[axis] = None
        elif any(c == "" for c in cells):
            raise ValidationError(f"{path}: axis {axis} is only partially present")
        else:
            comps[axis] = np.array([float(c) for c in cells])
    return BlochTrajectory(times=times, kind=kind, **comps)
