"""Wehrl moments by three routes, ratio sequences, and derived estimators.

Routes:

- Dicke-basis sum, evaluated as iterated self-convolution of the vector
  u_k = sqrt(binom(N,k)) d_k: the constrained multi-index inner sum over
  i_1..i_q with sum m is exactly the m-th coefficient of the q-fold
  convolution, so the cost is polynomial instead of (N+1)^q.
- Permanent formula on the Gram matrix of the constituent states
  (exponential, used as a small-instance oracle).
- Sphere quadrature, exact for the polynomial integrand: Gauss-Legendre
  in cos(theta) times a uniform trapezoid in phi.

All moments use the normalization (1/4pi) int Q^q dOmega, for which
W^(1) = 1/(N+1) and W^(q) <= 1/(Nq+1) with equality only for coherent
states.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import ComplexityLimitError, NonGenericStateWarning
from .gme import GmeEstimate, gme_reference
from .states import (MajoranaConstellation, SymmetricState, coherent_qubit,
                     husimi_coefficients, sqrt_binomials, to_majorana)

PERMANENT_SIZE_CAP = 24
DICKE_TERM_BUDGET = 1e9


@dataclass(frozen=True)
class MomentSequence:
    """Moments W^(1)..W^(q_max) and ratios S(2)..S(q_max) of one state."""

    n_qubits: int
    q_max: int
    moments: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.moments, dtype=np.float64)
        s = np.asarray(self.ratios, dtype=np.float64)
        n, qm = self.n_qubits, self.q_max
        if qm < 2:
            raise ValueError("q_max must be >= 2")
        if w.shape != (qm,) or s.shape != (qm - 1,):
            raise ValueError("moments/ratios length mismatch with q_max")
        if abs(w[0] - 1.0 / (n + 1)) > 1e-12:
            raise ValueError(f"W(1) = {w[0]!r} violates 1/(N+1) normalization")
        q = np.arange(1, qm + 1)
        if np.any(w <= 0.0) or np.any(w > 1.0 / (n * q + 1) + 1e-12):
            raise ValueError("moment outside (0, 1/(Nq+1)] bound")
        if np.max(np.abs(s - w[1:] / w[:-1])) > 1e-14:
            raise ValueError("ratios inconsistent with moments")
        if np.any(np.diff(s) < -1e-10):
            raise ValueError("ratio sequence decreases beyond tolerance")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "moments", w)
        object.__setattr__(self, "ratios", s)

    @staticmethod
    def from_moments(n_qubits: int, moments) -> "MomentSequence":
        w = np.asarray(moments, dtype=np.float64)
        return MomentSequence(n_qubits, len(w), w, w[1:] / w[:-1])

    def truncated(self, q_max: int) -> "MomentSequence":
        if q_max > self.q_max:
            raise ValueError("cannot extend a moment sequence")
        return MomentSequence(self.n_qubits, q_max,
                              self.moments[:q_max], self.ratios[:q_max - 1])


def _inv_binomials(n: int) -> np.ndarray:
    """1/binom(n, m) for m = 0..n, exact until float overflow."""
    out = np.empty(n + 1)
    for m in range(n // 2 + 1):
        b = math.comb(n, m)
        val = 1.0 / b if b < 1e300 else math.exp(-(math.lgamma(n + 1)
                                                   - math.lgamma(m + 1)
                                                   - math.lgamma(n - m + 1)))
        out[m] = val
        out[n - m] = val
    return out


def moments_dicke(state: SymmetricState, q_max: int,
                  budget: float = DICKE_TERM_BUDGET) -> MomentSequence:
    """Moments from the Dicke expansion via iterated convolution."""
    n = state.n_qubits
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    # work estimate for the convolution evaluation, not the raw
    # (N+1)^q_max enumeration the formula suggests
    if q_max * (n * q_max + 1) * (n + 1) > budget:
        raise ComplexityLimitError(
            f"moment computation to q_max={q_max} exceeds the term budget")
    u = sqrt_binomials(n) * state.dicke
    w = np.empty(q_max)
    v = u
    for q in range(1, q_max + 1):
        inv_b = _inv_binomials(n * q)
        terms = (v.real**2 + v.imag**2) * inv_b
        w[q - 1] = math.fsum(terms) / (n * q + 1)
        if q < q_max:
            v = np.convolve(v, u)
    return MomentSequence.from_moments(n, w)


def gram_matrix(constellation: MajoranaConstellation) -> np.ndarray:
    """Pairwise overlaps <e_i|e_j> of the constituent qubit states."""
    amps = np.array([coherent_qubit(p) for p in constellation.points])
    return np.conj(amps) @ amps.T


def tiled_permanent(g: np.ndarray, q: int) -> complex:
    """Permanent of the q x q block tiling kron(ones((q, q)), g).

    Uses Ryser's inclusion-exclusion over the n distinct columns of the
    tiling, each carried with multiplicity q:

        per = (-1)^(nq) sum_{k in [0,q]^n} (-1)^|k| prod_j C(q, k_j)
              * prod_i (sum_j k_j g_ij)^q

    Cost O((q+1)^n n) instead of O(2^(nq) nq) for the generic formula.
    The alternating sum still cancels heavily (condition number ~1e12
    near nq = 24), so terms are accumulated in multiprecision when gmpy2
    is importable; the extended-precision fallback is good to ~1e-7 at
    the largest sizes.
    """
    g = np.asarray(g, dtype=np.complex128)
    n = g.shape[0]
    if g.shape != (n, n):
        raise ValueError("matrix must be square")
    if q == 1:
        return kernels().permanent(g)
    try:
        return _tiled_permanent_mp(g, n, q)
    except ImportError:
        pass
    grids = np.meshgrid(*([np.arange(q + 1)] * n), indexing="ij")
    k = np.stack([axis.ravel() for axis in grids], axis=1)
    binom = np.array([math.comb(q, i) for i in range(q + 1)], dtype=np.clongdouble)
    coef = np.prod(binom[k], axis=1) * (1 - 2 * (k.sum(axis=1) & 1))
    rows = k.astype(np.clongdouble) @ g.T.astype(np.clongdouble)
    terms = coef * np.prod(rows ** q, axis=1)
    total = np.sum(terms)
    if (n * q) % 2:
        total = -total
    return complex(total)


def _tiled_permanent_mp(g: np.ndarray, n: int, q: int) -> complex:
    import itertools

    import gmpy2

    ctx = gmpy2.get_context().copy()
    ctx.precision = 240
    with ctx:
        gm = [[gmpy2.mpc(float(g[i, j].real), float(g[i, j].imag))
               for j in range(n)] for i in range(n)]
        total = gmpy2.mpc(0)
        for k in itertools.product(range(q + 1), repeat=n):
            coef = math.prod(math.comb(q, kj) for kj in k)
            if sum(k) & 1:
                coef = -coef
            prod = gmpy2.mpc(coef)
            for i in range(n):
                row = gm[i]
                rs = gmpy2.mpc(0)
                for j in range(n):
                    if k[j]:
                        rs += k[j] * row[j]
                prod *= rs ** q
            total += prod
        if (n * q) % 2:
            total = -total
        return complex(total)


def moments_permanent(constellation: MajoranaConstellation | SymmetricState,
                      q_max: int) -> MomentSequence:
    """Moments from permanents of the tiled Gram matrix (oracle route).

    W^(q) = per(G_q) / per(G)^q * (N!)^q / (Nq+1)! with G_q the q x q
    block tiling of G. Exponential in Nq, capped at Nq <= 24.
    """
    if isinstance(constellation, SymmetricState):
        constellation = to_majorana(constellation)
    n = constellation.n_qubits
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    if n * q_max > PERMANENT_SIZE_CAP:
        raise ComplexityLimitError(
            f"permanent route needs N*q_max <= {PERMANENT_SIZE_CAP}")
    g = gram_matrix(constellation)
    per_g = kernels().permanent(g).real
    w = np.empty(q_max)
    fact_n = math.factorial(n)
    for q in range(1, q_max + 1):
        per_gq = tiled_permanent(g, q).real
        w[q - 1] = (per_gq / per_g**q) * (float(fact_n**q)
                                          / float(math.factorial(n * q + 1)))
    return MomentSequence.from_moments(n, w)


def sphere_grid(n_qubits: int, q_max: int):
    """Product quadrature grid exact for Q^q, q <= q_max.

    Q^q is a spherical polynomial of degree N*q, so Gauss-Legendre in
    cos(theta) with N*q_max+1 nodes and 2(N*q_max+1) uniform phi points
    integrate it exactly up to rounding.
    """
    deg = n_qubits * q_max
    x, wx = np.polynomial.legendre.leggauss(deg + 1)
    theta = np.arccos(x)
    n_phi = 2 * deg + 2
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    return theta, wx, phi


def moments_quadrature(state: SymmetricState, q_max: int) -> MomentSequence:
    """Moments by direct sphere quadrature; independent oracle route."""
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    theta, wx, phi = sphere_grid(state.n_qubits, q_max)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    q_vals = kernels().husimi_many(husimi_coefficients(state),
                                   tt.ravel(), pp.ravel())
    q_vals = q_vals.reshape(len(theta), len(phi))
    phi_mean = q_vals.mean(axis=1)
    w = np.empty(q_max)
    w[0] = 0.5 * (wx @ phi_mean)
    power = q_vals
    for q in range(2, q_max + 1):
        power = power * q_vals
        w[q - 1] = 0.5 * (wx @ power.mean(axis=1))
    return MomentSequence.from_moments(state.n_qubits, w)


def dicke_moment(n: int, k: int, q: int) -> float:
    """Closed-form Wehrl moment of |D_N^(k)>."""
    return math.comb(n, k) ** q / ((n * q + 1) * math.comb(n * q, k * q))


def coherent_moment(n: int, q: int) -> float:
    """Closed-form Wehrl moment of any coherent state, 1/(Nq+1).

    This saturates the moment bound; it is the k=0 case of the Dicke
    closed form.
    """
    return 1.0 / (n * q + 1)


def moment_bound(n: int, q: int) -> float:
    """Upper bound 1/(Nq+1), equality only for coherent states."""
    return 1.0 / (n * q + 1)


def ratio_estimate(seq: MomentSequence) -> GmeEstimate:
    """Crude GME estimate 1 - S(q_max); always an upper bound on E_G."""
    return GmeEstimate(value=float(1.0 - seq.ratios[-1]), method="ratio",
                       q_max_used=seq.q_max)


def laplace_residuals(state: SymmetricState, qs,
                      q_norm_inf: float | None = None) -> np.ndarray:
    """The sequence q * W^(q) / ||Q||_inf^q over the given orders.

    Flattens to a constant for states with a unique Husimi maximum.
    Computed in log space to dodge under/overflow at large q.
    """
    qs = np.asarray(qs, dtype=int)
    if q_norm_inf is None:
        q_norm_inf = 1.0 - gme_reference(state).value
    seq = moments_dicke(state, int(qs.max()))
    w = seq.moments[qs - 1]
    return np.exp(np.log(qs) + np.log(w) - qs * math.log(q_norm_inf))


def asymptotic_constant(state: SymmetricState, q_lo: int, q_hi: int,
                        q_norm_inf: float | None = None,
                        spread_tol: float = 0.10) -> float:
    """Least-squares constant c in W^(q) ~ c ||Q||_inf^q / q.

    Warns with NonGenericStateWarning when the residual fails to flatten
    (relative spread over the top half of the range above spread_tol),
    which indicates a degenerate Husimi maximum.
    """
    if q_hi <= q_lo:
        raise ValueError("need q_hi > q_lo")
    qs = np.arange(q_lo, q_hi + 1)
    res = laplace_residuals(state, qs, q_norm_inf)
    spread = (res.max() - res.min()) / res.mean()
    if spread > spread_tol:
        warnings.warn(
            f"residual spread {spread:.3f} over q in [{q_lo}, {q_hi}]; "
            "Husimi maximum likely degenerate",
            NonGenericStateWarning, stacklevel=2)
    # the later entries sit closest to the asymptote
    return float(res[len(res) // 2:].mean())
