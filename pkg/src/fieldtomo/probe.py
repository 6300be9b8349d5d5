"""Resonant probe-qubit dynamics and ideal Bloch trajectories.

The probe qubit couples to the mode through the resonant interaction
``H_I = g (sigma_+ a + sigma_- a^dag)`` (interaction picture, real g).
Each excitation sector ``{|e, n-1>, |g, n>}`` rotates at the Rabi
frequency ``Omega_n = g sqrt(n)``, which gives closed forms for the
reduced qubit state when the probe starts in ``|g>``:

    rho^q_gg(t) = rho_00 + sum_{n>=1} rho_nn cos^2(Omega_n t)
    rho^q_ge(t) = i sum_{n>=0} rho_{n,n+1} cos(Omega_n t) sin(Omega_{n+1} t)

Bloch components follow the usual map ``x = 2 Re rho_ge``,
``y = -2 Im rho_ge``, ``z = 2 rho_gg - 1``.  Everything downstream
(spectral comb layout, coherence pairing signs) assumes exactly these
expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import GridError, ValidationError
from .fock import DensityMatrix

__all__ = [
    "ProbeConfig",
    "BlochTrajectory",
    "rabi_frequency",
    "time_grid",
    "evolve_joint",
    "bloch_from_qubit",
    "ideal_bloch_trajectory",
]

#: terms with |rho element| below this are skipped when summing the comb
_ELEMENT_FLOOR = 1e-14


@dataclass(frozen=True)
class ProbeConfig:
    """Probe coupling.  ``omega`` is informational only: the dynamics are
    evaluated on resonance in the interaction picture, so only ``g``
    enters."""

    g: float
    omega: Optional[float] = None
    cutoff: Optional[int] = None

    def __post_init__(self):
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValidationError(f"coupling g must be positive, got {self.g!r}")


def rabi_frequency(n: int, g: float) -> float:
    """Omega_n = g sqrt(n) for the n-excitation sector."""
    if n < 0:
        raise ValidationError(f"sector index must be >= 0, got {n}")
    if not g > 0:
        raise ValidationError("coupling g must be positive")
    return g * math.sqrt(n)


def time_grid(delta_t: float, n_t: int) -> np.ndarray:
    """Stroboscopic grid t_k = k delta_t, k = 1 .. n_t (t = 0 excluded)."""
    if not delta_t > 0:
        raise GridError(f"delta_t must be positive, got {delta_t!r}")
    if n_t < 1:
        raise GridError(f"n_t must be >= 1, got {n_t!r}")
    return delta_t * np.arange(1, n_t + 1, dtype=float)


def _check_uniform(times: np.ndarray) -> float:
    """Validate a strictly increasing uniform grid; return its spacing."""
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise GridError("times must be a non-empty 1-D array")
    if t.size == 1:
        return float(t[0]) if t[0] > 0 else 1.0
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise GridError("times must be strictly increasing")
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(dt[0], 1.0):
        raise GridError("times must be uniformly spaced")
    return float(dt[0])


@dataclass(frozen=True)
class BlochTrajectory:
    """Sampled (or ideal) Bloch components on a uniform time grid.

    Axes that were never measured stay ``None``.  ``kind`` is "ideal"
    for exact expectation values and "sampled" for finite-shot averages;
    both are bounded by 1 in magnitude (an empirical mean of +-1 values
    cannot leave the interval).
    """

    times: np.ndarray
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    kind: str = "ideal"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        dt = _check_uniform(t)
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        if self.kind not in ("ideal", "sampled"):
            raise ValidationError(f"kind must be 'ideal' or 'sampled', got {self.kind!r}")
        if self.x is None and self.y is None and self.z is None:
            raise ValidationError("trajectory must carry at least one axis")
        for name in ("x", "y", "z"):
            comp = getattr(self, name)
            if comp is None:
                continue
            comp = np.asarray(comp, dtype=float)
            if comp.shape != t.shape:
                raise ValidationError(f"axis {name} has shape {comp.shape}, times {t.shape}")
            if np.max(np.abs(comp)) > 1.0 + 1e-9:
                raise ValidationError(f"axis {name} leaves the Bloch ball")
            comp = comp.copy()
            comp.setflags(write=False)
            object.__setattr__(self, name, comp)
        object.__setattr__(self, "metadata", dict(self.metadata, delta_t=dt))

    @property
    def delta_t(self) -> float:
        return self.metadata["delta_t"]

    @property
    def n_t(self) -> int:
        return self.times.size

    def axes(self) -> tuple[str, ...]:
        return tuple(a for a in ("x", "y", "z") if getattr(self, a) is not None)


def evolve_joint(rho: DensityMatrix, cfg: ProbeConfig, t: float) -> np.ndarray:
    """Reduced 2x2 qubit state after coupling |g><g| x rho for time t."""
    if t < 0:
        raise ValidationError("evolution time must be >= 0")
    diag = rho.diagonal()
    sup = rho.superdiagonal()
    omega = cfg.g * np.sqrt(np.arange(diag.size, dtype=float))
    gg = diag[0] + float(
        np.sum(diag[1:] * np.cos(omega[1:] * t) ** 2)
    ) if diag.size > 1 else diag[0]
    ge = 1j * complex(np.sum(sup * np.cos(omega[:-1] * t) * np.sin(omega[1:] * t)))
    return np.array([[gg, ge], [np.conj(ge), 1.0 - gg]], dtype=complex)


def bloch_from_qubit(rho_q: np.ndarray) -> tuple[float, float, float]:
    """(x, y, z) of a 2x2 qubit density matrix in the |g>, |e> basis."""
    x = 2.0 * rho_q[0, 1].real
    y = -2.0 * rho_q[0, 1].imag
    z = (rho_q[0, 0] - rho_q[1, 1]).real
    return float(x), float(y), float(z)


def ideal_bloch_trajectory(
    rho: DensityMatrix, cfg: ProbeConfig, times: np.ndarray
) -> BlochTrajectory:
    """Exact Bloch components of the probe at each interrogation time.

    Vectorized over times; density-matrix elements below 1e-14 in
    magnitude contribute nothing and are skipped.
    """
    t = np.asarray(times, dtype=float)
    _check_uniform(t)
    diag = rho.diagonal()
    sup = rho.superdiagonal()
    omega = cfg.g * np.sqrt(np.arange(diag.size, dtype=float))

    z = np.full(t.shape, diag[0])
    for n in range(1, diag.size):
        if abs(diag[n]) < _ELEMENT_FLOOR:
            continue
        z = z + diag[n] * np.cos(2.0 * omega[n] * t)
    # z here is 2 rho_gg - 1 after using cos^2 = (1 + cos 2x)/2 and trace 1.

    ge = np.zeros(t.shape, dtype=complex)
    for n in range(sup.size):
        if abs(sup[n]) < _ELEMENT_FLOOR:
            continue
        ge = ge + sup[n] * np.cos(omega[n] * t) * np.sin(omega[n + 1] * t)
    ge = 1j * ge
    return BlochTrajectory(
        times=t,
        x=2.0 * ge.real,
        y=-2.0 * ge.imag,
        z=z,
        kind="ideal",
        metadata={"g": cfg.g},
    )
