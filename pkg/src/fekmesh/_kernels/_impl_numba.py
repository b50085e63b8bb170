"""Numba-compiled kernel implementations.

Loop structure mirrors :mod:`fekmesh._kernels._impl_numpy`; arithmetic
per element is kept identical so the two backends agree to the last few
ulps.  No fastmath, no parallelism: results must be deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def select_pivots(matrix, tie_rtol, rank_rtol):
    a = matrix.copy()
    n, m = a.shape
    perm = np.arange(m)
    ind = np.zeros(n, dtype=np.int64)
    ref2 = 0.0
    for j in range(m):
        s = 0.0
        for i in range(n):
            s += a[i, j] * a[i, j]
        if s > ref2:
            ref2 = s
    ref = np.sqrt(ref2)
    if ref == 0.0:
        return ind, 0
    norms = np.empty(m, dtype=np.float64)
    for k in range(n):
        best = -1.0
        for j in range(k, m):
            s = 0.0
            for i in range(k, n):
                s += a[i, j] * a[i, j]
            norms[j] = np.sqrt(s)
            if norms[j] > best:
                best = norms[j]
        if best <= rank_rtol * ref:
            return ind, k
        thr = best * (1.0 - tie_rtol)
        pick = -1
        pick_orig = m + 1
        for j in range(k, m):
            if norms[j] >= thr and perm[j] < pick_orig:
                pick = j
                pick_orig = perm[j]
        if pick != k:
            for i in range(n):
                tmp = a[i, k]
                a[i, k] = a[i, pick]
                a[i, pick] = tmp
            tmpi = perm[k]
            perm[k] = perm[pick]
            perm[pick] = tmpi
        ind[k] = perm[k]
        s = 0.0
        for i in range(k, n):
            s += a[i, k] * a[i, k]
        xnorm = np.sqrt(s)
        if xnorm == 0.0:
            return ind, k
        if a[k, k] != 0.0:
            alpha = -np.sign(a[k, k]) * xnorm
        else:
            alpha = -xnorm
        v = np.empty(n - k, dtype=np.float64)
        for i in range(k, n):
            v[i - k] = a[i, k]
        v[0] -= alpha
        vsq = 0.0
        for i in range(n - k):
            vsq += v[i] * v[i]
        if vsq > 0.0:
            for j in range(k + 1, m):
                dot = 0.0
                for i in range(n - k):
                    dot += v[i] * a[k + i, j]
                scale = 2.0 * dot / vsq
                for i in range(n - k):
                    a[k + i, j] -= scale * v[i]
        a[k, k] = alpha
        for i in range(k + 1, n):
            a[i, k] = 0.0
    return ind, -1


@njit(cache=True)
def chebyshev_table(x, kmax):
    m = x.size
    t = np.empty((kmax + 1, m), dtype=np.float64)
    for j in range(m):
        t[0, j] = 1.0
    if kmax >= 1:
        for j in range(m):
            t[1, j] = x[j]
    for k in range(2, kmax + 1):
        for j in range(m):
            t[k, j] = 2.0 * x[j] * t[k - 1, j] - t[k - 2, j]
    return t


@njit(cache=True)
def logan_shepp_matrix(x, y, degree):
    m = x.size
    n_terms = (degree + 1) * (degree + 2) // 2
    out = np.empty((n_terms, m), dtype=np.float64)
    c = 1.0 / np.sqrt(np.pi)
    row = 0
    for k in range(degree + 1):
        for j in range(k + 1):
            th = j * np.pi / (k + 1)
            ct = np.cos(th)
            st = np.sin(th)
            for q in range(m):
                p = ct * x[q] + st * y[q]
                if k == 0:
                    out[row, q] = c
                else:
                    um1 = 1.0
                    u = 2.0 * p
                    for _ in range(2, k + 1):
                        tmp = 2.0 * p * u - um1
                        um1 = u
                        u = tmp
                    out[row, q] = c * u
            row += 1
    return out


@njit(cache=True)
def points_in_polygon(px, py, vx, vy, tol):
    npt = px.size
    m = vx.size
    out = np.zeros(npt, dtype=np.bool_)
    tol2 = tol * tol
    for q in range(npt):
        x = px[q]
        y = py[q]
        inside = False
        on_edge = False
        for i in range(m):
            x1 = vx[i]
            y1 = vy[i]
            i2 = i + 1
            if i2 == m:
                i2 = 0
            x2 = vx[i2]
            y2 = vy[i2]
            if (y1 > y) != (y2 > y):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if x < xint:
                    inside = not inside
            ex = x2 - x1
            ey = y2 - y1
            ee = ex * ex + ey * ey
            if ee == 0.0:
                d2 = (x - x1) ** 2 + (y - y1) ** 2
            else:
                t = ((x - x1) * ex + (y - y1) * ey) / ee
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                d2 = (x - (x1 + t * ex)) ** 2 + (y - (y1 + t * ey)) ** 2
            if d2 <= tol2:
                on_edge = True
        out[q] = inside or on_edge
    return out
