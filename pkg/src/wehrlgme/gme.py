"""Reference GME by global maximization of the Husimi function.

E_G = 1 - max_Omega Q(Omega) for symmetric states. The maximum is found
by multi-start Nelder-Mead in tangent-plane coordinates (no polar
coordinate singularity near any start). Starts are the Majorana points,
their antipodes, and a Fibonacci sphere grid; ties are broken toward
smaller theta, then smaller phi, for determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .states import (BlochDirection, SymmetricState, husimi_coefficients,
                     to_majorana)

NM_MAX_ITER = 200
NM_FTOL = 1e-14
_TIE_Q = 1e-12
_TIE_THETA = 1e-9


@dataclass(frozen=True)
class GmeEstimate:
    """A GME value tagged with the method that produced it."""

    value: float
    method: str
    q_max_used: int | None = None
    maximizer: BlochDirection | None = None
    note: str = ""

    def __post_init__(self):
        if self.method not in ("reference", "ratio", "accel", "ann"):
            raise ValueError(f"unknown method tag {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"GME value {self.value!r} outside [0, 1]")


def max_gme_check(n_qubits: int, value: float) -> bool:
    """True iff value respects the bound E_G <= 1 - 1/(N+1)."""
    return value <= 1.0 - 1.0 / (n_qubits + 1) + 1e-9


def dicke_gme(n: int, k: int) -> float:
    """Closed-form GME of |D_N^(k)>; zero at k = 0 and k = N."""
    if not 0 <= k <= n:
        raise ValueError("k must be in 0..N")
    qmax = math.comb(n, k)
    if 0 < k:
        qmax *= (k / n) ** k
    if k < n:
        qmax *= ((n - k) / n) ** (n - k)
    return 1.0 - qmax


def fibonacci_sphere(count: int) -> np.ndarray:
    """Roughly uniform unit vectors, deterministic."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _start_directions(state: SymmetricState) -> np.ndarray:
    pts = np.array([p.to_cartesian() for p in to_majorana(state).points])
    grid = fibonacci_sphere(max(32, 4 * state.n_qubits))
    return np.vstack([pts, -pts, grid])


def husimi_max(state: SymmetricState) -> tuple[float, BlochDirection]:
    """Global maximum of Q and its location (deterministic tie-break)."""
    wcoef = husimi_coefficients(state)
    qvals, dirs = kernels().husimi_max(wcoef, _start_directions(state),
                                       NM_MAX_ITER, NM_FTOL)
    best = float(qvals.max())
    # mean of Q is 1/(N+1), so the true maximum cannot be below it; a
    # miss here means every start collapsed into a minor basin
    if best < 1.0 / (state.n_qubits + 1) - 1e-9:
        qvals2, dirs2 = kernels().husimi_max(wcoef, fibonacci_sphere(400),
                                             NM_MAX_ITER, NM_FTOL)
        qvals = np.concatenate([qvals, qvals2])
        dirs = np.vstack([dirs, dirs2])
        best = float(qvals.max())
    tied = dirs[qvals >= best - _TIE_Q]
    cand = [BlochDirection.from_cartesian(v) for v in tied]
    theta_min = min(c.theta for c in cand)
    where = min((c for c in cand if c.theta <= theta_min + _TIE_THETA),
                key=lambda c: c.phi)
    return min(best, 1.0), where


def gme_reference(state: SymmetricState) -> GmeEstimate:
    """Reference GME: 1 - max Q via multi-start local maximization."""
    qmax, where = husimi_max(state)
    return GmeEstimate(value=max(0.0, 1.0 - qmax), method="reference",
                       maximizer=where)
