"""Symmetric multiqubit states: Dicke and Majorana forms, overlaps, Husimi.

Conventions fixed here and used everywhere else:

- single-qubit coherent state |theta, phi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>,
  with |0> at the north pole (theta = 0);
- Dicke ordering d_0..d_N where |D_N^(k)> has k excitations (J_z eigenvalue
  m = N/2 - k, so k = 0 is the highest-weight state);
- global phase of Dicke vectors fixed so the first nonzero coefficient is
  real positive;
- Majorana points are the Bloch points of the constituent qubit states.
  They are the roots w = e^{i phi} tan(theta/2) of the polynomial with
  coefficients (-1)^k sqrt(binom(N,k)) d_k on w^{N-k}; missing roots
  (leading coefficients ~ 0) sit at the south pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStateError

TWO_PI = 2.0 * math.pi


def sqrt_binomials(n: int) -> np.ndarray:
    """Vector of sqrt(binom(n, k)) for k = 0..n."""
    return np.sqrt([float(math.comb(n, k)) for k in range(n + 1)])


@dataclass(frozen=True)
class BlochDirection:
    """A point on the unit sphere, theta in [0, pi], phi in [0, 2 pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (-1e-12 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta out of range: {self.theta}")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi))
        object.__setattr__(self, "phi", self.phi % TWO_PI)

    def to_cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi),
                         math.cos(self.theta)])

    @staticmethod
    def from_cartesian(v) -> "BlochDirection":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        theta = math.acos(min(max(v[2], -1.0), 1.0))
        phi = math.atan2(v[1], v[0]) % TWO_PI
        return BlochDirection(theta, phi)


@dataclass(frozen=True)
class MajoranaConstellation:
    """The N Bloch points of the constituent qubit states."""

    points: tuple[BlochDirection, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ValueError("constellation needs at least one point")

    @property
    def n_qubits(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SymmetricState:
    """An N-qubit symmetric pure state as N+1 Dicke coefficients."""

    n_qubits: int
    dicke: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.dicke, dtype=np.complex128)
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if d.shape != (self.n_qubits + 1,):
            raise ValueError(f"dicke vector must have length {self.n_qubits + 1}")
        norm2 = float(np.sum(d.real**2 + d.imag**2))
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"dicke vector not normalized: |d|^2 = {norm2!r}")
        d.setflags(write=False)
        object.__setattr__(self, "dicke", d)

    @staticmethod
    def from_dicke(vec) -> "SymmetricState":
        """Build a state from an unnormalized Dicke vector (phase fixed)."""
        d = np.asarray(vec, dtype=np.complex128)
        nrm = np.linalg.norm(d)
        if nrm < 1e-14:
            raise DegenerateStateError("zero Dicke vector")
        return SymmetricState(len(d) - 1, fix_global_phase(d / nrm))


def fix_global_phase(d: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first nonzero coefficient is real positive."""
    d = np.asarray(d, dtype=np.complex128)
    mags = np.abs(d)
    idx = np.nonzero(mags > 1e-12 * mags.max())[0]
    if len(idx) == 0:
        return d
    lead = d[idx[0]]
    return d * (abs(lead) / lead)


def coherent_qubit(direction: BlochDirection) -> np.ndarray:
    """Single-qubit state (cos(theta/2), e^{i phi} sin(theta/2))."""
    half = 0.5 * direction.theta
    return np.array([math.cos(half),
                     complex(math.cos(direction.phi), math.sin(direction.phi))
                     * math.sin(half)], dtype=np.complex128)


def dicke_state(n: int, k: int) -> SymmetricState:
    if not 0 <= k <= n:
        raise ValueError("k must be in 0..N")
    d = np.zeros(n + 1, dtype=np.complex128)
    d[k] = 1.0
    return SymmetricState(n, d)


def coherent_state(n: int, direction: BlochDirection) -> SymmetricState:
    """The N-fold tensor power of |theta, phi> in the Dicke basis."""
    a, b = coherent_qubit(direction)
    k = np.arange(n + 1)
    d = sqrt_binomials(n) * a ** (n - k) * b**k
    return SymmetricState.from_dicke(d)


def ghz_state(n: int) -> SymmetricState:
    d = np.zeros(n + 1, dtype=np.complex128)
    d[0] = d[n] = 1.0 / math.sqrt(2.0)
    return SymmetricState(n, d)


def from_majorana(constellation: MajoranaConstellation) -> SymmetricState:
    """Symmetrize the constituent states into a Dicke vector.

    sqrt(binom(N,k)) d_k is proportional to the coefficient of z^k in
    prod_i (a_i + b_i z) with (a_i, b_i) the constituent amplitudes.
    """
    poly = np.array([1.0 + 0.0j])
    for p in constellation.points:
        a, b = coherent_qubit(p)
        poly = np.convolve(poly, np.array([a, b]))
    if np.abs(poly).max() < 1e-14:
        raise DegenerateStateError("all symmetrized coefficients vanish")
    n = constellation.n_qubits
    return SymmetricState.from_dicke(poly / sqrt_binomials(n))


def to_majorana(state: SymmetricState) -> MajoranaConstellation:
    """Roots of the Majorana polynomial; degree drop maps to the south pole.

    Points are sorted by (theta, phi) for determinism.
    """
    n = state.n_qubits
    coeffs = (-1.0) ** np.arange(n + 1) * sqrt_binomials(n) * state.dicke
    mags = np.abs(coeffs)
    lead = 0
    while lead <= n and mags[lead] < 1e-12 * mags.max():
        lead += 1
    pts = [BlochDirection(math.pi, 0.0)] * lead
    trimmed = coeffs[lead:]
    if len(trimmed) > 1:
        for w in np.roots(trimmed):
            theta = 2.0 * math.atan(abs(w))
            phi = math.atan2(w.imag, w.real) % TWO_PI
            pts.append(BlochDirection(theta, phi))
    pts.sort(key=lambda p: (p.theta, p.phi))
    return MajoranaConstellation(tuple(pts))


def coherent_overlap(state: SymmetricState, direction: BlochDirection) -> complex:
    """Amplitude <theta,phi|^{tensor N} |psi>; its modulus squared is Q."""
    n = state.n_qubits
    a, b = coherent_qubit(direction)
    k = np.arange(n + 1)
    coh = sqrt_binomials(n) * a ** (n - k) * b**k
    return complex(np.vdot(coh, state.dicke))


def husimi(state: SymmetricState, direction: BlochDirection) -> float:
    """Husimi function Q(theta, phi) = |<coherent|psi>|^2."""
    return abs(coherent_overlap(state, direction)) ** 2


def husimi_coefficients(state: SymmetricState) -> np.ndarray:
    """Kernel input vector conj(d_k) sqrt(binom(N,k)).

    The kernels evaluate |sum_k w_k ct^{N-k} (st e^{i phi})^k|^2, which
    equals the Husimi function for this choice of w.
    """
    return np.conj(state.dicke) * sqrt_binomials(state.n_qubits)


def fidelity(s1: SymmetricState, s2: SymmetricState) -> float:
    """|<s1|s2>|^2 in the Dicke basis."""
    return abs(np.vdot(s1.dicke, s2.dicke)) ** 2


def rotate_constellation(constellation: MajoranaConstellation,
                         rot: np.ndarray) -> MajoranaConstellation:
    """Apply a 3x3 rotation matrix to every point."""
    pts = [BlochDirection.from_cartesian(rot @ p.to_cartesian())
           for p in constellation.points]
    return MajoranaConstellation(tuple(pts))
