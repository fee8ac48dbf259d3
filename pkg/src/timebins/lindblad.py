"""Continuum-limit reference dynamics.

Dissipator and Liouvillian of the master equation

    d rho / dt = -i [H, rho] + gamma (L rho L^dag - 1/2 {L^dag L, rho}),

a fixed-step RK4 integrator on the matrix ODE, and closed-form solutions for
undriven two-level spontaneous emission and pure dephasing used as oracles.
The collapse operator is stored unscaled with gamma kept separate, so rate
sweeps never rebuild operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DensityMatrix
from .errors import GuardError
from .model import SystemModel
from .operators import Operator

__all__ = [
    "LindbladModel",
    "dissipator",
    "liouvillian",
    "integrate_rk4",
    "analytic_oracle",
]

TRACE_DRIFT_ABORT = 1e-8


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus one collapse channel at rate gamma."""

    hamiltonian: Operator
    collapse: Operator
    gamma: float

    def __post_init__(self) -> None:
        h = self.hamiltonian.data
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValueError("Hamiltonian must be Hermitian")
        if self.collapse.dim != self.hamiltonian.dim:
            raise ValueError("collapse operator dimension does not match Hamiltonian")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @classmethod
    def from_system(cls, system: SystemModel, gamma: float) -> "LindbladModel":
        return cls(system.hamiltonian, system.lowering, gamma)


def _rhs(h: np.ndarray, c: np.ndarray, cdc: np.ndarray, gamma: float, r: np.ndarray) -> np.ndarray:
    out = -1j * (h @ r - r @ h)
    out += gamma * (c @ r @ c.conj().T - 0.5 * (cdc @ r + r @ cdc))
    return out


def dissipator(model: LindbladModel, rho: DensityMatrix) -> Operator:
    """gamma (L rho L^dag - 1/2 {L^dag L, rho}); traceless and Hermitian."""
    if rho.dim != model.collapse.dim:
        raise ValueError("state dimension does not match the model")
    c = model.collapse.data
    cdc = c.conj().T @ c
    r = rho.op.data
    out = model.gamma * (c @ r @ c.conj().T - 0.5 * (cdc @ r + r @ cdc))
    return Operator(out, rho.op.dims)


def liouvillian(model: LindbladModel, rho: DensityMatrix) -> Operator:
    """-i [H, rho] plus the dissipator."""
    if rho.dim != model.hamiltonian.dim:
        raise ValueError("state dimension does not match the model")
    h = model.hamiltonian.data
    c = model.collapse.data
    out = _rhs(h, c, c.conj().T @ c, model.gamma, rho.op.data)
    return Operator(out, rho.op.dims)


def integrate_rk4(
    model: LindbladModel, rho0: DensityMatrix, dt: float, steps: int
) -> list[DensityMatrix]:
    """Classic fixed-step RK4 on the matrix ODE; returns the whole trajectory.

    Aborts if the trace drifts from 1 by more than 1e-8, which for this
    trace-preserving generator can only signal a genuinely broken input.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    h = model.hamiltonian.data
    c = model.collapse.data
    cdc = c.conj().T @ c
    gamma = model.gamma
    dims = rho0.op.dims

    series = [rho0]
    r = rho0.op.data
    for k in range(steps):
        k1 = _rhs(h, c, cdc, gamma, r)
        k2 = _rhs(h, c, cdc, gamma, r + 0.5 * dt * k1)
        k3 = _rhs(h, c, cdc, gamma, r + 0.5 * dt * k2)
        k4 = _rhs(h, c, cdc, gamma, r + dt * k3)
        r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(float(np.trace(r).real) - 1.0)
        if drift > TRACE_DRIFT_ABORT:
            raise GuardError(
                f"RK4 trace drifted by {drift:.3e} at step {k + 1} (dt={dt:g})"
            )
        series.append(DensityMatrix(Operator(r, dims)))
    return series


def analytic_oracle(
    kind: str, gamma: float, t: float, rho0: DensityMatrix
) -> DensityMatrix:
    """Closed-form two-level solution at H = 0.

    spontaneous:  rho_ee(t) = rho_ee(0) e^(-gamma t),
                  rho_eg(t) = rho_eg(0) e^(-gamma t / 2), populations sum to 1.
    dephasing:    populations fixed, rho_eg(t) = rho_eg(0) e^(-gamma t / 2).
    """
    if rho0.dim != 2:
        raise ValueError("analytic_oracle covers two-level systems only")
    if kind not in ("spontaneous", "dephasing"):
        raise ValueError(f"unknown oracle kind {kind!r}")
    r = rho0.op.data
    ee0 = float(r[1, 1].real)
    eg0 = complex(r[1, 0])
    coherence = eg0 * math.exp(-gamma * t / 2.0)
    if kind == "spontaneous":
        ee = ee0 * math.exp(-gamma * t)
    else:
        ee = ee0
    out = np.array([[1.0 - ee, coherence.conjugate()], [coherence, ee]], dtype=complex)
    return DensityMatrix(Operator(out, rho0.op.dims))
