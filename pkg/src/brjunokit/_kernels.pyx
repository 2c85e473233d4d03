# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; the formulas mirror _fallback.py operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, isfinite

cnp.import_array()

cdef double U = 2.0 ** -53
cdef double TINY = 1e-300


def iterate_disks(double[::1] zr, double[::1] zi, double[::1] rad,
                  double cr, double ci, double crad, double R0, int maxiter,
                  double[::1] tr, double[::1] ti, double[::1] trad):
    """Disk iteration under z^2 + c.  Verdict 1 = escaped, 2 = trapped, 0 = neither."""
    cdef Py_ssize_t m = zr.shape[0]
    cdef Py_ssize_t ntrap = tr.shape[0]
    verdict_arr = np.zeros(m, dtype=np.int8)
    iters_arr = np.full(m, maxiter, dtype=np.int32)
    cdef signed char[::1] verdict = verdict_arr
    cdef int[::1] iters = iters_arr
    cdef double x, y, r, az, az2, nx, ny, e, cabs, rmax
    cdef Py_ssize_t p, t
    cdef int n
    cdef bint done
    cabs = hypot(cr, ci)
    rmax = 4.0 * R0 + 4.0
    with nogil:
        for p in range(m):
            x = zr[p]
            y = zi[p]
            r = rad[p]
            for n in range(maxiter + 1):
                az = hypot(x, y)
                if az * (1.0 - 4.0 * U) - r * (1.0 + 4.0 * U) > R0 * (1.0 + 4.0 * U):
                    verdict[p] = 1
                    iters[p] = n
                    break
                done = False
                for t in range(ntrap):
                    if hypot(x - tr[t], y - ti[t]) * (1.0 + 4.0 * U) + r * (1.0 + 4.0 * U) + TINY < trad[t] * (1.0 - 4.0 * U):
                        done = True
                        break
                if done:
                    verdict[p] = 2
                    iters[p] = n
                    break
                if n == maxiter or r > rmax or not isfinite(r):
                    break
                az2 = x * x + y * y
                nx = x * x - y * y + cr
                ny = 2.0 * x * y + ci
                e = 8.0 * U * (az2 + cabs) + TINY
                r = (2.0 * az * (1.0 + 2.0 * U) * r + r * r + crad + e) * (1.0 + 8.0 * U) + TINY
                x = nx
                y = ny
    return verdict_arr, iters_arr


def linearizer_series(double[::1] dre, double[::1] dim, double[::1] drad, double t, int n):
    """Ball coefficients c_k = b_k t^k with c_k (lambda^k - lambda) = sum c_i c_{k-i}.

    Returns (re, im, rad, failed_at); failed_at is 0 on success.
    """
    re_arr = np.zeros(n + 1)
    im_arr = np.zeros(n + 1)
    rad_arr = np.zeros(n + 1)
    cdef double[::1] cre = re_arr
    cdef double[::1] cim = im_arr
    cdef double[::1] crad = rad_arr
    cdef double sr, si, rr, mag, ar, ai, ap, br, bi, bp, am, bm, err, R
    cdef double dr, di, dp, dm, den, qr, qi, qm
    cdef Py_ssize_t k, i
    cdef int failed = 0
    if n >= 1:
        cre[1] = t
    with nogil:
        for k in range(2, n + 1):
            sr = 0.0
            si = 0.0
            rr = 0.0
            mag = 0.0
            for i in range(1, k):
                ar = cre[i]
                ai = cim[i]
                ap = crad[i]
                br = cre[k - i]
                bi = cim[k - i]
                bp = crad[k - i]
                sr = sr + (ar * br - ai * bi)
                si = si + (ar * bi + ai * br)
                am = hypot(ar, ai)
                bm = hypot(br, bi)
                mag = mag + am * bm
                rr = rr + (am * bp + bm * ap + ap * bp)
            err = (k + 8) * 4.0 * U * mag
            R = (rr + err) * (1.0 + (k + 8) * 2.0 * U) + TINY
            dr = dre[k]
            di = dim[k]
            dp = drad[k]
            dm = hypot(dr, di)
            if dm * (1.0 - 4.0 * U) <= dp:
                failed = <int>k
                break
            den = dr * dr + di * di
            qr = (sr * dr + si * di) / den
            qi = (si * dr - sr * di) / den
            qm = hypot(qr, qi)
            cre[k] = qr
            cim[k] = qi
            crad[k] = ((R + qm * (1.0 + 4.0 * U) * dp) / (dm * (1.0 - 4.0 * U) - dp) + 16.0 * U * qm) * (1.0 + 8.0 * U) + TINY
            if not (isfinite(qm) and isfinite(crad[k])):
                failed = <int>k
                break
    return re_arr, im_arr, rad_arr, failed
