# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: the Faddeeva function and phase-type sum sampling.

Both functions have drop-in pure-Python twins in :mod:`corrph._pykernels`;
:mod:`corrph.kernels` picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, cos, sin, sqrt, fabs, log, pow, lround
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double FACTOR = 1.12837916709551257388  # 2/sqrt(pi)


cdef inline double complex _w(double xi, double yi) noexcept nogil:
    # Poppe & Wijers (1990) region split: power series near the origin,
    # Gautschi's truncated continued fraction elsewhere.
    cdef double xabs = fabs(xi), yabs = fabs(yi)
    cdef double x = xabs / 6.3, y = yabs / 4.4
    cdef double qrho = x * x + y * y
    cdef double xquad = xabs * xabs - yabs * yabs
    cdef double yquad = 2.0 * xabs * yabs
    cdef double u = 0.0, v = 0.0, u1, v1, u2 = 0.0, v2 = 0.0, daux
    cdef double xsum, ysum, xaux, h, h2 = 0.0, qlam = 0.0
    cdef double rx, ry, sx, sy, tx, ty, c, w1
    cdef long n, i, j, kapn, nu, np1
    cdef bint small = qrho < 0.085264
    cdef bint use_h

    if small:
        qrho = (1.0 - 0.85 * y) * sqrt(qrho)
        n = lround(6.0 + 72.0 * qrho)
        j = 2 * n + 1
        xsum = 1.0 / j
        ysum = 0.0
        i = n
        while i >= 1:
            j -= 2
            xaux = (xsum * xquad - ysum * yquad) / i
            ysum = (xsum * yquad + ysum * xquad) / i
            xsum = xaux + 1.0 / j
            i -= 1
        u1 = -FACTOR * (xsum * yabs + ysum * xabs) + 1.0
        v1 = FACTOR * (xsum * xabs - ysum * yabs)
        daux = exp(-xquad)
        u2 = daux * cos(yquad)
        v2 = -daux * sin(yquad)
        u = u1 * u2 - v1 * v2
        v = u1 * v2 + v1 * u2
    else:
        if qrho > 1.0:
            h = 0.0
            kapn = 0
            qrho = sqrt(qrho)
            nu = <long>(3.0 + 1442.0 / (26.0 * qrho + 77.0))
        else:
            qrho = (1.0 - y) * sqrt(1.0 - qrho)
            h = 1.88 * qrho
            h2 = 2.0 * h
            kapn = lround(7.0 + 34.0 * qrho)
            nu = lround(16.0 + 26.0 * qrho)
        use_h = h > 0.0
        if use_h:
            qlam = pow(h2, <double>kapn)
        rx = 0.0
        ry = 0.0
        sx = 0.0
        sy = 0.0
        n = nu
        while n >= 0:
            np1 = n + 1
            tx = yabs + h + np1 * rx
            ty = xabs - np1 * ry
            c = 0.5 / (tx * tx + ty * ty)
            rx = c * tx
            ry = c * ty
            if use_h and n <= kapn:
                tx = qlam + sx
                sx = rx * tx - ry * sy
                sy = ry * tx + rx * sy
                qlam = qlam / h2
            n -= 1
        if h == 0.0:
            u = FACTOR * rx
            v = FACTOR * ry
        else:
            u = FACTOR * sx
            v = FACTOR * sy
        if yabs == 0.0:
            u = exp(-xabs * xabs)

    if yi < 0.0:
        if small:
            u2 = 2.0 * u2
            v2 = 2.0 * v2
        else:
            w1 = 2.0 * exp(-xquad)
            u2 = w1 * cos(yquad)
            v2 = -w1 * sin(yquad)
        u = u2 - u
        v = v2 - v
        if xi > 0.0:
            v = -v
    elif xi < 0.0:
        v = -v
    return u + 1j * v


def faddeeva(z):
    """Elementwise w(z) = exp(-z**2) erfc(-i z) for a complex array."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zf = np.ascontiguousarray(
        np.asarray(z, dtype=np.complex128).ravel())
    cdef Py_ssize_t k, m = zf.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(m, dtype=np.complex128)
    with nogil:
        for k in range(m):
            out[k] = _w(zf[k].real, zf[k].imag)
    return out.reshape(np.shape(z))


cdef inline Py_ssize_t _pick(double[::1] cum, double r) noexcept nogil:
    cdef Py_ssize_t j = 0, last = cum.shape[0] - 1
    while j < last and r >= cum[j]:
        j += 1
    return j


def ph_sums(bit_generator, long[::1] counts, double[::1] init_cum,
            double[:, ::1] jump_cum, double[::1] rates):
    """Sum ``counts[i]`` independent phase-type draws for every ``i``.

    ``init_cum`` is the cumulative initial law over the ``n`` phases followed
    by the zero-claim atom; row ``k`` of ``jump_cum`` is the cumulative jump
    law out of phase ``k`` (absorption last). The embedded jump chain is
    walked explicitly, one exponential sojourn per visit.
    """
    cdef Py_ssize_t nphase = rates.shape[0]
    cdef Py_ssize_t i, c, state, m = counts.shape[0]
    cdef double total
    cdef bitgen_t *rng
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m, dtype=np.float64)
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator capsule")
    rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    with bit_generator.lock, nogil:
        for i in range(m):
            total = 0.0
            for c in range(counts[i]):
                state = _pick(init_cum, rng.next_double(rng.state))
                while state < nphase:
                    total += -log(1.0 - rng.next_double(rng.state)) / rates[state]
                    state = _pick(jump_cum[state], rng.next_double(rng.state))
            out[i] = total
    return out
