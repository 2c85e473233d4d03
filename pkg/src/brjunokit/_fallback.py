"""Pure numpy versions of the compiled kernels (same formulas, same verdicts)."""

from __future__ import annotations

import numpy as np

U = 2.0 ** -53
TINY = 1e-300


def iterate_disks(zr, zi, rad, cr, ci, crad, R0, maxiter, tr, ti, trad):
    zr = np.ascontiguousarray(zr, dtype=np.float64)
    m = zr.shape[0]
    x = zr.copy()
    y = np.array(zi, dtype=np.float64)
    r = np.array(rad, dtype=np.float64)
    tr = np.asarray(tr, dtype=np.float64)
    ti = np.asarray(ti, dtype=np.float64)
    trad = np.asarray(trad, dtype=np.float64)
    verdict = np.zeros(m, dtype=np.int8)
    iters = np.full(m, maxiter, dtype=np.int32)
    active = np.arange(m)
    cabs = float(np.hypot(cr, ci))
    rmax = 4.0 * R0 + 4.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(maxiter + 1):
            if active.size == 0:
                break
            xa, ya, ra = x[active], y[active], r[active]
            az = np.hypot(xa, ya)
            esc = az * (1.0 - 4.0 * U) - ra * (1.0 + 4.0 * U) > R0 * (1.0 + 4.0 * U)
            trapped = np.zeros(active.size, dtype=bool)
            for t in range(tr.shape[0]):
                trapped |= np.hypot(xa - tr[t], ya - ti[t]) * (1.0 + 4.0 * U) + ra * (1.0 + 4.0 * U) + TINY \
                    < trad[t] * (1.0 - 4.0 * U)
            trapped &= ~esc
            verdict[active[esc]] = 1
            iters[active[esc]] = n
            verdict[active[trapped]] = 2
            iters[active[trapped]] = n
            keep = ~(esc | trapped)
            if n == maxiter:
                break
            keep &= ~((ra > rmax) | ~np.isfinite(ra))
            active = active[keep]
            xa, ya, ra, az = xa[keep], ya[keep], ra[keep], az[keep]
            az2 = xa * xa + ya * ya
            nx = xa * xa - ya * ya + cr
            ny = 2.0 * xa * ya + ci
            e = 8.0 * U * (az2 + cabs) + TINY
            r[active] = (2.0 * az * (1.0 + 2.0 * U) * ra + ra * ra + crad + e) * (1.0 + 8.0 * U) + TINY
            x[active] = nx
            y[active] = ny
    return verdict, iters


def _seqsum(x):
    # left-to-right like the compiled loop (np.sum is pairwise)
    return float(np.add.accumulate(x)[-1])


def linearizer_series(dre, dim, drad, t, n):
    cre = np.zeros(n + 1)
    cim = np.zeros(n + 1)
    crad = np.zeros(n + 1)
    if n >= 1:
        cre[1] = t
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(2, n + 1):
            ar, ai, ap = cre[1:k], cim[1:k], crad[1:k]
            br, bi, bp = cre[k - 1:0:-1], cim[k - 1:0:-1], crad[k - 1:0:-1]
            sr = _seqsum(ar * br - ai * bi)
            si = _seqsum(ar * bi + ai * br)
            am = np.hypot(ar, ai)
            bm = np.hypot(br, bi)
            mag = _seqsum(am * bm)
            rr = _seqsum(am * bp + bm * ap + ap * bp)
            err = (k + 8) * 4.0 * U * mag
            R = (rr + err) * (1.0 + (k + 8) * 2.0 * U) + TINY
            dr, di, dp = float(dre[k]), float(dim[k]), float(drad[k])
            dm = float(np.hypot(dr, di))
            if dm * (1.0 - 4.0 * U) <= dp:
                return cre, cim, crad, k
            den = dr * dr + di * di
            qr = (sr * dr + si * di) / den
            qi = (si * dr - sr * di) / den
            qm = float(np.hypot(qr, qi))
            cre[k] = qr
            cim[k] = qi
            crad[k] = ((R + qm * (1.0 + 4.0 * U) * dp) / (dm * (1.0 - 4.0 * U) - dp) + 16.0 * U * qm) \
                * (1.0 + 8.0 * U) + TINY
            if not (np.isfinite(qm) and np.isfinite(crad[k])):
                return cre, cim, crad, k
    return cre, cim, crad, 0
