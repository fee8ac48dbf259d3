"""Exact single-excitation dynamics of the emitter-plus-continuum model.

A two-level emitter couples to a dense uniform grid of field modes with the
flat (frequency-independent) strength g = sqrt(gamma d_omega / (2 pi)), so the
golden-rule rate 2 pi g^2 / d_omega equals gamma by construction.  Restricted
to the single-excitation sector the Hamiltonian is a small Hermitian matrix:
one amplitude on |e, vac> and one on each |g, 1_j>.  Its exact evolution is an
end-to-end check of the coarse-grained derivation, independent of time bins,
Kraus operators, and master equations alike.

The grid is finite, so the dynamics is quasi-periodic; evolution is guarded
to times below the recurrence time 2 pi / d_omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardError

__all__ = [
    "FrequencyGrid",
    "build_microscopic",
    "evolve_microscopic",
    "fit_decay_rate",
]


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform symmetric grid of n_modes frequencies on [-half_width, half_width]."""

    n_modes: int
    half_width: float

    def __post_init__(self) -> None:
        if self.n_modes < 3 or self.n_modes % 2 == 0:
            raise ValueError("n_modes must be odd and >= 3 (grid symmetric about 0)")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_modes - 1)

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_modes)


def build_microscopic(grid: FrequencyGrid, gamma: float) -> np.ndarray:
    """Single-excitation Hamiltonian: basis (|e,vac>, |g,1_1>, ..., |g,1_n>).

    Diagonal (0, omega_1 ... omega_n); coupling i g between the excited
    emitter and each one-photon state, with g = sqrt(gamma spacing / (2 pi)).
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    n = grid.n_modes + 1
    g = math.sqrt(gamma * grid.spacing / (2.0 * math.pi))
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(1, n), np.arange(1, n)] = grid.frequencies
    h[1:, 0] = 1j * g
    h[0, 1:] = -1j * g
    return h


def evolve_microscopic(
    h: np.ndarray, t_final: float, steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Survival probability |c_e(t)|^2 from c_e(0) = 1 on steps+1 sample times.

    One Hermitian eigendecomposition, then pure phase evolution.  The mode
    spacing is read off the diagonal to enforce the recurrence guard
    t_final < 2 pi / spacing; beyond it the finite grid revives.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if h.shape[0] < 3:
        raise ValueError("Hamiltonian too small to contain a mode grid")
    spacing = float(h[2, 2].real - h[1, 1].real)
    recurrence = 2.0 * math.pi / spacing
    if t_final >= recurrence:
        raise GuardError(
            f"t_final={t_final:g} reaches the grid recurrence time {recurrence:g}; "
            "increase n_modes or shorten the run"
        )
    evals, evecs = np.linalg.eigh(h)
    weights = np.abs(evecs[0, :]) ** 2
    times = np.linspace(0.0, t_final, steps + 1)
    amplitude = np.exp(-1j * np.outer(times, evals)) @ weights
    return times, np.abs(amplitude) ** 2


def fit_decay_rate(
    times: np.ndarray,
    survival: np.ndarray,
    window: tuple[float, float] = (0.5, 2.5),
) -> float:
    """Least-squares slope of ln |c_e|^2 over the given time window.

    For exponential decay the slope is -gamma; the early-time Zeno transient
    is excluded by starting the window away from zero.
    """
    mask = (times >= window[0]) & (times <= window[1])
    if int(np.count_nonzero(mask)) < 3:
        raise ValueError("fit window contains fewer than three samples")
    return float(np.polyfit(times[mask], np.log(survival[mask]), 1)[0])
