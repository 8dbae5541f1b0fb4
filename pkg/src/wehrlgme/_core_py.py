"""Pure NumPy implementations of the numerical kernels.

Mirrors the compiled extension ``wehrlgme._core``. Both expose the same
three entry points so the backend can be swapped at import time:

- ``permanent(a)``: permanent of a square complex matrix via Ryser's
  inclusion-exclusion formula.
- ``husimi_many(wcoef, theta, phi)``: Husimi values at many sphere points.
- ``husimi_max(wcoef, starts, max_iter, ftol)``: per-start Nelder-Mead
  maximization of the Husimi function, in tangent-plane coordinates.

``wcoef`` is the precomputed vector conj(d_k)*sqrt(binom(N, k)); the
Husimi amplitude at (theta, phi) is sum_k wcoef[k] ct^(N-k) (st e^{i phi})^k
with ct = cos(theta/2), st = sin(theta/2).
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"

_RYSER_BLOCK = 1 << 14


def permanent(a: np.ndarray) -> complex:
    """Permanent of a square matrix by Ryser's formula, O(2^n n).

    Subset row sums are built in blocks; products and the outer sum are
    accumulated in extended precision (clongdouble) because the
    inclusion-exclusion terms cancel heavily for matrices with large
    permanents (condition number ~1e9 at n=24 for the all-ones matrix).
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(a[0, 0])

    # all stages in clongdouble: the row-sum matmul in double precision
    # would put a cond(per) * 1e-16 floor on the result, ~1e-8 at n=24.
    # Block sums are combined pairwise at the end for the same reason.
    al = a.astype(np.clongdouble)
    blocks = []
    for lo in range(1, 1 << n, _RYSER_BLOCK):
        hi = min(lo + _RYSER_BLOCK, 1 << n)
        idx = np.arange(lo, hi, dtype=np.uint64)
        bits = ((idx[:, None] >> np.arange(n, dtype=np.uint64)) & 1)
        rowsum = bits.astype(np.clongdouble) @ al
        prods = np.prod(rowsum, axis=1)
        sign = 1 - 2 * (bits.sum(axis=1).astype(np.int64) & 1)
        blocks.append(np.sum(sign * prods, dtype=np.clongdouble))
    total = np.sum(np.array(blocks, dtype=np.clongdouble))
    if n & 1:
        total = -total
    return complex(total)


def _amp_factors(wcoef, ct, st, ph):
    """Powers ct^(N-k) and (st*ph)^k for k = 0..N, by running products."""
    n = len(wcoef) - 1
    m = ct.shape[0]
    ctp = np.empty((m, n + 1), dtype=np.float64)
    zp = np.empty((m, n + 1), dtype=np.complex128)
    ctp[:, n] = 1.0
    for k in range(n - 1, -1, -1):
        ctp[:, k] = ctp[:, k + 1] * ct
    z = st * ph
    zp[:, 0] = 1.0
    for k in range(1, n + 1):
        zp[:, k] = zp[:, k - 1] * z
    return ctp, zp


def husimi_many(wcoef: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Husimi function at the given sphere points, vectorized."""
    wcoef = np.asarray(wcoef, dtype=np.complex128)
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    ct = np.cos(0.5 * theta)
    st = np.sin(0.5 * theta)
    ph = np.exp(1j * phi)
    ctp, zp = _amp_factors(wcoef, ct, st, ph)
    amp = (ctp * zp) @ wcoef
    return amp.real**2 + amp.imag**2


def _husimi_vec(wcoef, n, v):
    """Husimi value at one cartesian unit vector (scalar path)."""
    z = v[2]
    if z > 1.0:
        z = 1.0
    elif z < -1.0:
        z = -1.0
    ct = math.sqrt(0.5 * (1.0 + z))
    st = math.sqrt(0.5 * (1.0 - z))
    rho = math.hypot(v[0], v[1])
    if rho < 1e-290:
        ph = 1.0 + 0.0j
    else:
        ph = complex(v[0] / rho, v[1] / rho)
    zz = st * ph
    amp = 0.0 + 0.0j
    zk = 1.0 + 0.0j
    # ct^(N-k) built descending to avoid division by ct near the south pole
    ctp = [1.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        ctp[k] = ctp[k + 1] * ct
    for k in range(n + 1):
        amp += wcoef[k] * ctp[k] * zk
        zk *= zz
    return amp.real * amp.real + amp.imag * amp.imag


def _frame(s):
    """Orthonormal tangent frame (e1, e2) at unit vector s."""
    if abs(s[2]) <= 0.9:
        u = np.array([0.0, 0.0, 1.0])
    else:
        u = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(s, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(s, e1)
    return e1, e2


def _embed(s, e1, e2, x):
    """Map tangent coordinates to a point on the sphere (exponential map)."""
    r = math.hypot(x[0], x[1])
    if r < 1e-290:
        return s.copy()
    f = math.sin(r) / r
    return math.cos(r) * s + f * (x[0] * e1 + x[1] * e2)


_NM_H = 0.1  # initial simplex edge, radians


def _nm_from(wcoef, n, s, max_iter, ftol):
    """One Nelder-Mead run started at unit vector s; returns (q, v)."""
    e1, e2 = _frame(s)

    def f(x):
        return -_husimi_vec(wcoef, n, _embed(s, e1, e2, x))

    pts = [np.zeros(2), np.array([_NM_H, 0.0]), np.array([0.0, _NM_H])]
    vals = [f(p) for p in pts]
    for _ in range(max_iter):
        order = sorted(range(3), key=lambda i: vals[i])
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        if vals[2] - vals[0] <= ftol:
            break
        c = 0.5 * (pts[0] + pts[1])
        xr = c + (c - pts[2])
        fr = f(xr)
        if fr < vals[0]:
            xe = c + 2.0 * (c - pts[2])
            fe = f(xe)
            if fe < fr:
                pts[2], vals[2] = xe, fe
            else:
                pts[2], vals[2] = xr, fr
        elif fr < vals[1]:
            pts[2], vals[2] = xr, fr
        else:
            if fr < vals[2]:
                xc = c + 0.5 * (xr - c)
            else:
                xc = c + 0.5 * (pts[2] - c)
            fc = f(xc)
            if fc < min(fr, vals[2]):
                pts[2], vals[2] = xc, fc
            else:
                for i in (1, 2):
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                    vals[i] = f(pts[i])
    best = min(range(3), key=lambda i: vals[i])
    return -vals[best], _embed(s, e1, e2, pts[best])


def husimi_max(wcoef: np.ndarray, starts: np.ndarray,
               max_iter: int = 200, ftol: float = 1e-14):
    """Maximize the Husimi function from each start direction.

    Returns (qvals, dirs): the best Husimi value per start and the
    corresponding cartesian unit vectors, shape (n_starts,) and
    (n_starts, 3). Runs that converge far from their start center are
    recentered (fresh tangent frame) for conditioning.
    """
    wcoef = np.asarray(wcoef, dtype=np.complex128)
    n = len(wcoef) - 1
    starts = np.asarray(starts, dtype=np.float64)
    m = starts.shape[0]
    qvals = np.empty(m)
    dirs = np.empty((m, 3))
    for i in range(m):
        s = starts[i] / np.linalg.norm(starts[i])
        q, v = _nm_from(wcoef, n, s, max_iter, ftol)
        for _ in range(3):
            if np.dot(v, s) > math.cos(0.5):
                break
            s = v / np.linalg.norm(v)
            q, v = _nm_from(wcoef, n, s, max_iter, ftol)
        qvals[i] = q
        dirs[i] = v / np.linalg.norm(v)
    return qvals, dirs
