"""Recursive E-algorithm for sequence-limit extrapolation.

The transform eliminates known scaling functions g_1, g_2, ... from an
asymptotic expansion f(q) = f(inf)[1 + l1 g_1(q) + l2 g_2(q) + ...]. For
Wehrl moment ratios the ansatz is g_i(q) = q^(-i): the 1/q leading
correction holds for every state (Laplace asymptotics), so the GME
estimator from a truncated sequence S(2..q_max) is 1 - E_{q_max-2}^{(2)}.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominatorWarning
from .gme import GmeEstimate
from .moments import MomentSequence, ratio_estimate

# denominator degeneracy threshold, relative to operand scale
_DEGEN = 1e-300


@dataclass(frozen=True)
class AccelTable:
    """Triangular E-algorithm table plus its auxiliary g coefficients.

    e_levels[k][j] is E_k^{(q_start + j)}; g_levels[k][i] maps the scaling
    function index i (1-based, i >= k+1) to the row g_{k,i}^{(q)}.
    """

    q_start: int
    base: np.ndarray = field(repr=False)
    e_levels: list = field(repr=False)
    g_levels: list = field(repr=False)
    degenerate: bool = False

    def estimate(self, k: int) -> float:
        """E_k at the earliest base index."""
        return float(self.e_levels[k][0])


def build_table(f, g_funcs, k: int, q_start: int = 2) -> AccelTable:
    """Run the E-algorithm recursion to depth k.

    f is the sequence f(q_start), f(q_start+1), ...; g_funcs[i-1] is the
    scaling function g_i(q). Needs len(f) >= k+1 and len(g_funcs) >= k.
    When a denominator g_{k-1,k}^{(q+1)} - g_{k-1,k}^{(q)} degenerates,
    the table stops early and is marked degenerate; the caller falls back
    to the deepest completed level.
    """
    f = np.asarray(f, dtype=np.float64)
    if k < 0:
        raise ValueError("order k must be >= 0")
    if len(f) < k + 1:
        raise ValueError(f"need at least {k + 1} sequence terms, got {len(f)}")
    if len(g_funcs) < k:
        raise ValueError(f"need {k} scaling functions, got {len(g_funcs)}")
    qs = q_start + np.arange(len(f))
    e_levels = [f.copy()]
    g_levels = [{i: np.array([float(g_funcs[i - 1](q)) for q in qs])
                 for i in range(1, k + 1)}]
    for lvl in range(1, k + 1):
        e_prev = e_levels[lvl - 1]
        g_prev = g_levels[lvl - 1]
        pivot = g_prev[lvl]
        den = pivot[1:] - pivot[:-1]
        scale = np.maximum(np.abs(pivot[1:]), np.abs(pivot[:-1]))
        live = len(e_prev) - 1
        if np.any(np.abs(den[:live]) <= _DEGEN * np.maximum(scale[:live], 1e-300)):
            warnings.warn(
                f"degenerate denominator at level {lvl}; returning level {lvl - 1}",
                DegenerateDenominatorWarning, stacklevel=2)
            return AccelTable(q_start, f, e_levels, g_levels, degenerate=True)
        e_new = (e_prev[:-1] * pivot[1:] - e_prev[1:] * pivot[:-1]) / den
        g_new = {i: (g_prev[i][:-1] * pivot[1:] - g_prev[i][1:] * pivot[:-1]) / den
                 for i in range(lvl + 1, k + 1)}
        e_levels.append(e_new)
        g_levels.append(g_new)
    return AccelTable(q_start, f, e_levels, g_levels)


def e_algorithm(f, g_funcs, k: int, q_start: int = 2) -> float:
    """E_k^{(q_start)} for the sequence f(q_start..); exact when f has a
    finite expansion in the first k scaling functions."""
    table = build_table(f, g_funcs, k, q_start)
    return table.estimate(len(table.e_levels) - 1)


def power_ansatz(k: int):
    """Scaling functions g_i(q) = q^(-i), i = 1..k."""
    return [lambda q, i=i: q ** (-float(i)) for i in range(1, k + 1)]


def accel_estimate(seq: MomentSequence) -> GmeEstimate:
    """Accelerated GME estimate 1 - E_{q_max-2}^{(2)} on the ratio sequence.

    At q_max = 2 there is only one ratio and nothing to accelerate; the
    bare ratio value is returned, tagged as accel with a fallback note.
    The extrapolated value is clamped to the physical range
    [0, 1 - 1/(N+1)].
    """
    if seq.q_max == 2:
        base = ratio_estimate(seq)
        return GmeEstimate(value=base.value, method="accel",
                           q_max_used=2, note="ratio_fallback")
    k = seq.q_max - 2
    table = build_table(seq.ratios, power_ansatz(k), k, q_start=2)
    limit = table.estimate(len(table.e_levels) - 1)
    note = "degenerate_fallback" if table.degenerate else ""
    raw = 1.0 - limit
    hi = 1.0 - 1.0 / (seq.n_qubits + 1)
    value = min(max(raw, 0.0), hi)
    if value != raw:
        note = (note + ",clamped").lstrip(",")
    return GmeEstimate(value=float(value), method="accel",
                       q_max_used=seq.q_max, note=note)
