"""Kraus operators of the one-bin map and the induced system channel.

The one-bin unitary acts on system (x) bin.  Sandwiching it between the bin
vacuum on the right and the bin number states <m| on the left yields one
system-space Kraus operator per bin photon count m, and the reduced dynamics
is the operator-sum map rho -> sum_m K_m rho K_m^dag.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import GuardError
from .operators import Operator, dagger, identity

if TYPE_CHECKING:
    from .model import SystemModel

__all__ = [
    "DensityMatrix",
    "KrausFamily",
    "ExpansionReport",
    "extract_kraus",
    "apply_channel",
    "iterate_channel",
    "expansion_report",
]

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
MIN_EIGENVALUE = -1e-10

# Per-step trace loss thresholds for apply_channel.
TRACE_WARN = 1e-10
TRACE_ABORT = 1e-6


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state of the system."""

    op: Operator

    def __post_init__(self) -> None:
        m = self.op.data
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (defect {herm:.3e})")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} is not 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < MIN_EIGENVALUE:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")

    @classmethod
    def pure(cls, amplitudes, dims=None) -> "DensityMatrix":
        """Projector onto a (normalized copy of the) given state vector."""
        v = np.asarray(amplitudes, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        dims = (v.size,) if dims is None else tuple(dims)
        return cls(Operator(np.outer(v, v.conj()), dims))

    @classmethod
    def _trusted(cls, op: Operator) -> "DensityMatrix":
        # skips validation: used by apply_channel when it knowingly returns a
        # state carrying a reported truncation trace loss above TRACE_WARN
        self = object.__new__(cls)
        object.__setattr__(self, "op", op)
        return self

    @property
    def dim(self) -> int:
        return self.op.dim

    def purity(self) -> float:
        return float(np.trace(self.op.data @ self.op.data).real)


@dataclass(frozen=True)
class KrausFamily:
    """Kraus operators of one bin collision, indexed by bin photon count m."""

    ops: tuple[Operator, ...]
    dt: float
    n_max: int
    completeness_defect: float


def extract_kraus(u: Operator, sys_dim: int, n_max: int, dt: float) -> KrausFamily:
    """Extract K_m = (1 (x) <m|) U (1 (x) |0>) for m = 0 .. n_max.

    The family covers the whole truncated bin basis, so the completeness
    defect ||sum K^dag K - 1||_max reflects only the accuracy of U itself;
    it is cached on the family rather than renormalized away.
    """
    d_bin = n_max + 1
    if u.dims != (sys_dim, d_bin):
        raise ValueError(f"map has factors {u.dims}, expected {(sys_dim, d_bin)}")
    u4 = u.data.reshape(sys_dim, d_bin, sys_dim, d_bin)
    ops = tuple(Operator(u4[:, m, :, 0].copy(), (sys_dim,)) for m in range(d_bin))

    acc = np.zeros((sys_dim, sys_dim), dtype=complex)
    for k in ops:
        acc += k.data.conj().T @ k.data
    defect = float(np.max(np.abs(acc - np.eye(sys_dim))))
    return KrausFamily(ops, float(dt), int(n_max), defect)


def apply_channel(family: KrausFamily, rho: DensityMatrix) -> DensityMatrix:
    """One collision: rho -> sum_m K_m rho K_m^dag.

    The accumulated output is symmetrized to (rho + rho^dag)/2 after the trace
    check, which removes 1e-16-scale Hermiticity drift over long iterations
    without hiding genuine trace loss.
    """
    if family.ops[0].dim != rho.dim:
        raise ValueError("Kraus family and state have different system dimensions")
    r = rho.op.data
    out = np.zeros_like(r)
    for k in family.ops:
        out += k.data @ r @ k.data.conj().T

    deviation = abs(float(np.trace(out).real) - float(np.trace(r).real))
    if deviation > TRACE_ABORT:
        raise GuardError(
            f"channel lost {deviation:.3e} of the trace in one step; "
            f"bin truncation n_max={family.n_max} is inadequate"
        )
    out = 0.5 * (out + out.conj().T)
    result = Operator(out, rho.op.dims)
    if deviation > TRACE_WARN:
        warnings.warn(
            f"channel trace deviation {deviation:.3e} exceeds {TRACE_WARN:g}",
            RuntimeWarning,
            stacklevel=2,
        )
        # the leak is reported, not hidden; return the state as computed
        return DensityMatrix._trusted(result)
    return DensityMatrix(result)


def iterate_channel(
    family: KrausFamily, rho0: DensityMatrix, steps: int
) -> list[DensityMatrix]:
    """Apply the same time-independent family repeatedly; returns the whole
    trajectory [rho0, rho1, ..., rho_steps]."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    series = [rho0]
    for _ in range(steps):
        series.append(apply_channel(family, series[-1]))
    return series


@dataclass(frozen=True)
class ExpansionReport:
    """Residuals of the small-dt expansion of the first three Kraus operators."""

    dt: float
    r0: float
    r1: float
    r2: float


def expansion_report(
    family: KrausFamily, system: "SystemModel", gamma: float
) -> ExpansionReport:
    """Distance of K_0, K_1, K_2 from their leading small-dt forms.

    r0 = ||K0 - (1 + dt(-i H - gamma/2 n))||, r1 = ||K1 - sqrt(gamma dt) sigma||,
    r2 = ||K2||, all in the max norm; n = sigma^dag sigma.
    """
    if len(family.ops) < 3:
        raise ValueError("expansion_report needs n_max >= 2 so that K_2 exists")
    dt = family.dt
    sigma = system.lowering
    number = dagger(sigma) @ sigma
    k0_ref = identity((system.dim,)) + dt * (
        -1j * system.hamiltonian - (gamma / 2.0) * number
    )
    k1_ref = math.sqrt(gamma * dt) * sigma
    r0 = (family.ops[0] - k0_ref).max_abs()
    r1 = (family.ops[1] - k1_ref).max_abs()
    r2 = family.ops[2].max_abs()
    return ExpansionReport(dt=dt, r0=r0, r1=r1, r2=r2)
