"""System models, the truncated time-bin Fock space, and the coarse bin map.

One collision evolves system (x) bin with the unitary

    U = exp[-i dt H (x) 1 + sqrt(gamma dt) (sigma (x) dB^dag - sigma^dag (x) dB)],

where dB is the annihilation operator of a single time bin of width dt,
truncated at n_max photons.  Replacing the time-ordered evolution over the
bin by this plain exponential is the coarse-graining step; its per-bin error
is probed numerically by ``ordering_residual``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DensityMatrix, apply_channel, extract_kraus
from .operators import Operator, dagger, expm, identity, kron

__all__ = [
    "SystemModel",
    "BinSpace",
    "CoarseParams",
    "lowering_matrix",
    "two_level_system",
    "truncated_oscillator",
    "dephasing_variant",
    "bin_generator",
    "coarse_map",
    "ordering_residual",
]

HERMITICITY_TOL = 1e-12


def lowering_matrix(dim: int) -> np.ndarray:
    """Ladder operator with sqrt(m) on the superdiagonal (index 0 = ground)."""
    if dim < 2:
        raise ValueError("a ladder needs at least two levels")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class SystemModel:
    """A local quantum system: bath-coupling operator plus its Hamiltonian."""

    dim: int
    lowering: Operator
    hamiltonian: Operator
    label: str

    def __post_init__(self) -> None:
        if self.lowering.dim != self.dim or self.hamiltonian.dim != self.dim:
            raise ValueError("operator dimensions do not match the system dimension")
        h = self.hamiltonian.data
        if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL:
            raise ValueError("system Hamiltonian must be Hermitian")


def two_level_system(omega0: float = 0.0, drive: float = 0.0) -> SystemModel:
    """Qubit in the {|g>, |e>} basis: sigma = |g><e|,
    H = omega0 |e><e| + drive (sigma + sigma^dag)."""
    sigma = lowering_matrix(2)
    h = omega0 * np.diag([0.0, 1.0]).astype(complex) + drive * (sigma + sigma.conj().T)
    return SystemModel(2, Operator(sigma, (2,)), Operator(h, (2,)), "tls")


def truncated_oscillator(levels: int = 3, omega0: float = 0.0) -> SystemModel:
    """Harmonic oscillator truncated to ``levels`` states, coupling via a."""
    a = lowering_matrix(levels)
    h = omega0 * np.diag(np.arange(levels, dtype=float)).astype(complex)
    return SystemModel(levels, Operator(a, (levels,)), Operator(h, (levels,)), f"oscillator{levels}")


def dephasing_variant(base: SystemModel) -> SystemModel:
    """Swap the bath coupling for the excitation number sigma^dag sigma.

    The Hamiltonian is unchanged; the resulting channel leaves populations in
    the number basis fixed and damps coherences.
    """
    number = dagger(base.lowering) @ base.lowering
    return SystemModel(base.dim, number, base.hamiltonian, base.label + "-dephasing")


@dataclass(frozen=True)
class BinSpace:
    """Truncated harmonic-oscillator space of one waveguide time bin."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def annihilate(self) -> Operator:
        return Operator(lowering_matrix(self.dim), (self.dim,))


@dataclass(frozen=True)
class CoarseParams:
    """Decay rate, bin width, and bin truncation of one coarse-grained run."""

    gamma: float
    dt: float
    n_max: int

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


def bin_generator(system: SystemModel, params: CoarseParams) -> Operator:
    """Anti-Hermitian exponent of the one-bin map on system (x) bin."""
    bin_space = BinSpace(params.n_max)
    db = bin_space.annihilate
    coupling = math.sqrt(params.gamma * params.dt)
    gen = (-1j * params.dt) * kron(system.hamiltonian, identity((bin_space.dim,)))
    gen = gen + coupling * (
        kron(system.lowering, dagger(db)) - kron(dagger(system.lowering), db)
    )
    return gen


def coarse_map(system: SystemModel, params: CoarseParams) -> Operator:
    """Unitary one-bin evolution exp(bin_generator(system, params))."""
    return expm(bin_generator(system, params))


def ordering_residual(
    system: SystemModel, params: CoarseParams, subdivisions: int
) -> float:
    """Per-bin discrepancy between one coarse step and a subdivided reference.

    Builds the channel of a single bin of width dt and the channel composed of
    ``subdivisions`` sequential sub-bins of width dt/subdivisions (each sub-bin
    starting in vacuum and traced out), applies both to the projector onto the
    most excited system state, and returns the max-norm difference of the two
    output density matrices.  Channels are compared instead of unitaries so
    the reference's larger bin-product space never has to be formed.
    """
    if subdivisions < 2:
        raise ValueError("subdivisions must be >= 2")
    coarse = extract_kraus(
        coarse_map(system, params), system.dim, params.n_max, params.dt
    )
    fine_params = CoarseParams(params.gamma, params.dt / subdivisions, params.n_max)
    fine = extract_kraus(
        coarse_map(system, fine_params), system.dim, params.n_max, fine_params.dt
    )

    excited = np.zeros(system.dim, dtype=complex)
    excited[system.dim - 1] = 1.0
    rho = DensityMatrix.pure(excited)

    one_step = apply_channel(coarse, rho)
    reference = rho
    for _ in range(subdivisions):
        reference = apply_channel(fine, reference)
    return (one_step.op - reference.op).max_abs()
