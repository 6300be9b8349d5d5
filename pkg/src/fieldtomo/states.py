"""Target-state generators: Fock superpositions, coherent states, file I/O."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import CutoffError, ValidationError
from .fock import FieldState

__all__ = [
    "superposition",
    "coherent_state",
    "load_amplitudes",
    "save_amplitudes",
]


def superposition(terms: Sequence[tuple[int, complex]], cutoff: int) -> FieldState:
    """Normalized superposition from ``(n, amplitude)`` pairs.

    Repeated ``n`` entries accumulate.  Any ``n > cutoff`` is an error,
    not a silent truncation.
    """
    if cutoff < 1:
        raise ValidationError("cutoff must be >= 1")
    amps = np.zeros(cutoff + 1, dtype=complex)
    count = 0
    for n, amp in terms:
        n = int(n)
        if n < 0:
            raise ValidationError(f"negative Fock index {n}")
        if n > cutoff:
            raise CutoffError(f"term |{n}> exceeds cutoff {cutoff}")
        amps[n] += complex(amp)
        count += 1
    if count == 0 or np.linalg.norm(amps) < 1e-300:
        raise ValidationError("superposition needs at least one nonzero term")
    return FieldState(amps).normalize()


def _coherent_required_cutoff(abs_alpha: float, tail: float = 1e-8) -> int:
    """Smallest n_max with truncated-weight deficit below ``tail``."""
    nbar = abs_alpha**2
    term = math.exp(-nbar)  # Poisson pmf at n = 0
    acc = term
    n = 0
    while 1.0 - acc > tail:
        n += 1
        term *= nbar / n
        acc += term
        if n > 100000:  # unreachable for sane alpha; guards infinite loop
            raise ValidationError(f"cannot bound coherent tail for |alpha| = {abs_alpha}")
    return max(n, 1)


def coherent_state(alpha: complex, cutoff: int, tail: float = 1e-8) -> FieldState:
    """Normalized truncated coherent state |alpha>.

    The cutoff must capture all but ``tail`` of the Poisson weight;
    otherwise a `CutoffError` names the required cutoff instead of
    returning a bad state.
    """
    if cutoff < 1:
        raise ValidationError("cutoff must be >= 1")
    alpha = complex(alpha)
    required = _coherent_required_cutoff(abs(alpha), tail)
    if cutoff < required:
        raise CutoffError(
            f"coherent state |alpha| = {abs(alpha):.4g} needs cutoff >= {required}, "
            f"got {cutoff}"
        )
    amps = np.empty(cutoff + 1, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(cutoff):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1)
    return FieldState(amps).normalize()


def load_amplitudes(path: str | Path, cutoff: int | None = None) -> FieldState:
    """Read a state from a text file of ``n  re  im`` lines.

    Blank lines and ``#`` comments are skipped.  The cutoff defaults to
    the largest ``n`` present (at least 1).  The loaded state is
    normalized like any other generator output.
    """
    path = Path(path)
    entries: list[tuple[int, complex]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(
                f"{path.name}:{lineno}: expected 'n re im', got {raw!r}"
            )
        try:
            n = int(parts[0])
            re, im = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ValidationError(f"{path.name}:{lineno}: {exc}") from exc
        entries.append((n, complex(re, im)))
    if not entries:
        raise ValidationError(f"{path}: no amplitude entries found")
    if cutoff is None:
        cutoff = max(1, max(n for n, _ in entries))
    return superposition(entries, cutoff)


def save_amplitudes(state: FieldState, path: str | Path) -> None:
    lines = [
        f"{n} {float(amp.real):.17g} {float(amp.imag):.17g}"
        for n, amp in enumerate(state.amplitudes)
        if amp != 0
    ]
    Path(path).write_text("\n".join(lines) + "\n")
