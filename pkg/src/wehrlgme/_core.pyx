# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numerical kernels.

Same contract as ``wehrlgme._core_py``: permanent, husimi_many, husimi_max.
"""

import numpy as np

cimport cython
from libc.math cimport atan2, cos, fabs, hypot, sin, sqrt
from libc.stdlib cimport free, malloc

NAME = "compiled"

ctypedef long double real_t
ctypedef long double complex cplx_t


def permanent(a):
    """Permanent via Ryser's formula with Gray-code subset updates.

    Row sums, products and the outer alternating sum are kept in long
    double precision; the inclusion-exclusion terms cancel heavily for
    matrices with large permanents.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0.0j
    if n > 30:
        raise ValueError("permanent limited to n <= 30")
    cdef double complex[:, ::1] am = a
    cdef cplx_t* row = <cplx_t*> malloc(n * sizeof(cplx_t))
    if row is NULL:
        raise MemoryError()
    # Kahan-compensated accumulation: the alternating terms cancel
    # heavily, so naive summation of 2^n terms costs ~sqrt(2^n) ulps
    cdef cplx_t total = 0, comp = 0, prod, y, tt
    cdef unsigned long long t, tmax = (<unsigned long long> 1) << n
    cdef unsigned long long gray
    cdef Py_ssize_t j, k
    try:
        for j in range(n):
            row[j] = 0
        for t in range(1, tmax):
            j = 0
            while not (t >> j) & 1:
                j += 1
            gray = t ^ (t >> 1)
            if (gray >> j) & 1:
                for k in range(n):
                    row[k] = row[k] + am[j, k]
            else:
                for k in range(n):
                    row[k] = row[k] - am[j, k]
            prod = 1
            for k in range(n):
                prod = prod * row[k]
            if t & 1:
                prod = -prod
            y = prod - comp
            tt = total + y
            comp = (tt - total) - y
            total = tt
    finally:
        free(row)
    if n & 1:
        total = -total
    return complex(total)


cdef double _husimi_point(double complex* w, Py_ssize_t n, double ct,
                          double st, double complex ph) nogil:
    cdef double complex amp = 0, zk = 1, zz = st * ph
    cdef double* ctp = <double*> malloc((n + 1) * sizeof(double))
    cdef Py_ssize_t k
    if ctp is NULL:
        return -1.0
    ctp[n] = 1.0
    for k in range(n - 1, -1, -1):
        ctp[k] = ctp[k + 1] * ct
    for k in range(n + 1):
        amp = amp + w[k] * ctp[k] * zk
        zk = zk * zz
    free(ctp)
    return amp.real * amp.real + amp.imag * amp.imag


def husimi_many(wcoef, theta, phi):
    """Husimi function at the given sphere points."""
    wcoef = np.ascontiguousarray(wcoef, dtype=np.complex128)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double complex[::1] w = wcoef
    cdef double[::1] th = theta
    cdef double[::1] ph = phi
    cdef Py_ssize_t n = w.shape[0] - 1, m = th.shape[0], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] q = out
    cdef double complex e
    for i in range(m):
        e = cos(ph[i]) + 1j * sin(ph[i])
        q[i] = _husimi_point(&w[0], n, cos(0.5 * th[i]), sin(0.5 * th[i]), e)
    return out


cdef double _husimi_vec(double complex* w, Py_ssize_t n, double* v) nogil:
    cdef double z = v[2], ct, st, rho
    cdef double complex ph
    if z > 1.0:
        z = 1.0
    elif z < -1.0:
        z = -1.0
    ct = sqrt(0.5 * (1.0 + z))
    st = sqrt(0.5 * (1.0 - z))
    rho = hypot(v[0], v[1])
    if rho < 1e-290:
        ph = 1.0
    else:
        ph = (v[0] / rho) + 1j * (v[1] / rho)
    return _husimi_point(w, n, ct, st, ph)


cdef void _frame(double* s, double* e1, double* e2) nogil:
    cdef double ux = 0, uy = 0, uz = 1, nrm
    if fabs(s[2]) > 0.9:
        ux, uz = 1, 0
    # e1 = s x u, normalized; e2 = s x e1
    e1[0] = s[1] * uz - s[2] * uy
    e1[1] = s[2] * ux - s[0] * uz
    e1[2] = s[0] * uy - s[1] * ux
    nrm = sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2])
    e1[0] /= nrm; e1[1] /= nrm; e1[2] /= nrm
    e2[0] = s[1] * e1[2] - s[2] * e1[1]
    e2[1] = s[2] * e1[0] - s[0] * e1[2]
    e2[2] = s[0] * e1[1] - s[1] * e1[0]


cdef void _embed(double* s, double* e1, double* e2, double a, double b,
                 double* v) nogil:
    cdef double r = hypot(a, b), f, c
    if r < 1e-290:
        v[0] = s[0]; v[1] = s[1]; v[2] = s[2]
        return
    f = sin(r) / r
    c = cos(r)
    v[0] = c * s[0] + f * (a * e1[0] + b * e2[0])
    v[1] = c * s[1] + f * (a * e1[1] + b * e2[1])
    v[2] = c * s[2] + f * (a * e1[2] + b * e2[2])


cdef double _nm_eval(double complex* w, Py_ssize_t n, double* s, double* e1,
                     double* e2, double a, double b, double* scratch) nogil:
    _embed(s, e1, e2, a, b, scratch)
    return -_husimi_vec(w, n, scratch)


cdef double _nm_from(double complex* w, Py_ssize_t n, double* s,
                     int max_iter, double ftol, double* vout) nogil:
    cdef double e1[3]
    cdef double e2[3]
    cdef double tmp[3]
    cdef double px[3]
    cdef double py[3]
    cdef double fv[3]
    cdef double cx, cy, xrx, xry, fr, xex, xey, fe, xcx, xcy, fc
    cdef double tpx, tpy, tfv
    cdef int it, i, j
    _frame(s, e1, e2)
    px[0] = 0;    py[0] = 0
    px[1] = 0.1;  py[1] = 0
    px[2] = 0;    py[2] = 0.1
    for i in range(3):
        fv[i] = _nm_eval(w, n, s, e1, e2, px[i], py[i], tmp)
    for it in range(max_iter):
        # insertion sort of the three vertices by value (stable)
        for i in range(1, 3):
            tpx = px[i]; tpy = py[i]; tfv = fv[i]
            j = i - 1
            while j >= 0 and fv[j] > tfv:
                px[j + 1] = px[j]; py[j + 1] = py[j]; fv[j + 1] = fv[j]
                j -= 1
            px[j + 1] = tpx; py[j + 1] = tpy; fv[j + 1] = tfv
        if fv[2] - fv[0] <= ftol:
            break
        cx = 0.5 * (px[0] + px[1])
        cy = 0.5 * (py[0] + py[1])
        xrx = cx + (cx - px[2])
        xry = cy + (cy - py[2])
        fr = _nm_eval(w, n, s, e1, e2, xrx, xry, tmp)
        if fr < fv[0]:
            xex = cx + 2.0 * (cx - px[2])
            xey = cy + 2.0 * (cy - py[2])
            fe = _nm_eval(w, n, s, e1, e2, xex, xey, tmp)
            if fe < fr:
                px[2] = xex; py[2] = xey; fv[2] = fe
            else:
                px[2] = xrx; py[2] = xry; fv[2] = fr
        elif fr < fv[1]:
            px[2] = xrx; py[2] = xry; fv[2] = fr
        else:
            if fr < fv[2]:
                xcx = cx + 0.5 * (xrx - cx)
                xcy = cy + 0.5 * (xry - cy)
            else:
                xcx = cx + 0.5 * (px[2] - cx)
                xcy = cy + 0.5 * (py[2] - cy)
            fc = _nm_eval(w, n, s, e1, e2, xcx, xcy, tmp)
            if fc < fr and fc < fv[2]:
                px[2] = xcx; py[2] = xcy; fv[2] = fc
            else:
                for i in range(1, 3):
                    px[i] = px[0] + 0.5 * (px[i] - px[0])
                    py[i] = py[0] + 0.5 * (py[i] - py[0])
                    fv[i] = _nm_eval(w, n, s, e1, e2, px[i], py[i], tmp)
    j = 0
    for i in range(1, 3):
        if fv[i] < fv[j]:
            j = i
    _embed(s, e1, e2, px[j], py[j], vout)
    return -fv[j]


def husimi_max(wcoef, starts, int max_iter=200, double ftol=1e-14):
    """Maximize the Husimi function from each start direction.

    Returns (qvals, dirs) as in the NumPy backend.
    """
    wcoef = np.ascontiguousarray(wcoef, dtype=np.complex128)
    starts = np.ascontiguousarray(starts, dtype=np.float64)
    cdef double complex[::1] w = wcoef
    cdef double[:, ::1] st = starts
    cdef Py_ssize_t n = w.shape[0] - 1, m = st.shape[0], i
    cdef int rec
    qout = np.empty(m, dtype=np.float64)
    dout = np.empty((m, 3), dtype=np.float64)
    cdef double[::1] qv = qout
    cdef double[:, ::1] dv = dout
    cdef double s[3]
    cdef double v[3]
    cdef double nrm, q, cosh = cos(0.5)
    for i in range(m):
        nrm = sqrt(st[i, 0] ** 2 + st[i, 1] ** 2 + st[i, 2] ** 2)
        s[0] = st[i, 0] / nrm; s[1] = st[i, 1] / nrm; s[2] = st[i, 2] / nrm
        q = _nm_from(&w[0], n, s, max_iter, ftol, v)
        for rec in range(3):
            if v[0] * s[0] + v[1] * s[1] + v[2] * s[2] > cosh:
                break
            nrm = sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
            s[0] = v[0] / nrm; s[1] = v[1] / nrm; s[2] = v[2] / nrm
            q = _nm_from(&w[0], n, s, max_iter, ftol, v)
        qv[i] = q
        nrm = sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
        dv[i, 0] = v[0] / nrm; dv[i, 1] = v[1] / nrm; dv[i, 2] = v[2] / nrm
    return qout, dout
