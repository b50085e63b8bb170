"""Pure-numpy kernel implementations.

Reference semantics for the numba backend: both must produce the same
pivot sequences, tables and masks on the same inputs.
"""

from __future__ import annotations

import numpy as np


def select_pivots(matrix, tie_rtol, rank_rtol):
    """Column-pivoted Householder orthogonalization, first ``n`` pivots.

    Greedy max-volume column selection on an ``n x m`` matrix (rows are
    basis elements, columns are points): at each step the remaining
    column of largest residual Euclidean norm is chosen and the other
    columns are orthogonalized against it via a Householder reflection,
    which is the column-pivoted QR update restricted to the leading
    ``n`` pivots.

    Ties within ``tie_rtol`` (relative) are broken toward the lowest
    original column index.  When the best residual norm falls to
    ``rank_rtol`` times the largest initial column norm the matrix is
    numerically rank deficient and the step index is reported.

    Returns
    -------
    (ind, fail) : (int64 array of length n, int)
        ``ind`` holds the selected original column indices in pick
        order; ``fail`` is -1 on success, else the zero-based step at
        which rank deficiency was detected (entries of ``ind`` from
        that step on are meaningless).
    """
    a = np.array(matrix, dtype=np.float64, order="C", copy=True)
    n, m = a.shape
    perm = np.arange(m, dtype=np.int64)
    ind = np.zeros(n, dtype=np.int64)
    ref = np.sqrt((a * a).sum(axis=0).max())
    if ref == 0.0:
        return ind, 0
    for k in range(n):
        sub = a[k:, k:]
        norms = np.sqrt((sub * sub).sum(axis=0))
        best = norms.max()
        if best <= rank_rtol * ref:
            return ind, k
        cand = np.nonzero(norms >= best * (1.0 - tie_rtol))[0]
        pick = k + cand[np.argmin(perm[k + cand])]
        if pick != k:
            a[:, [k, pick]] = a[:, [pick, k]]
            perm[[k, pick]] = perm[[pick, k]]
        ind[k] = perm[k]
        x = a[k:, k]
        xnorm = np.sqrt((x * x).sum())
        if xnorm == 0.0:
            return ind, k
        alpha = -np.copysign(xnorm, x[0]) if x[0] != 0.0 else -xnorm
        v = x.copy()
        v[0] -= alpha
        vsq = (v * v).sum()
        if vsq > 0.0 and k + 1 < m:
            w = (v @ a[k:, k + 1 :]) * (2.0 / vsq)
            a[k:, k + 1 :] -= np.outer(v, w)
        a[k, k] = alpha
        a[k + 1 :, k] = 0.0
    return ind, -1


def chebyshev_table(x, kmax):
    """First-kind Chebyshev values T_k(x) for k = 0..kmax, shape (kmax+1, len(x))."""
    x = np.asarray(x, dtype=np.float64)
    t = np.empty((kmax + 1, x.size), dtype=np.float64)
    t[0] = 1.0
    if kmax >= 1:
        t[1] = x
    for k in range(2, kmax + 1):
        t[k] = 2.0 * x * t[k - 1] - t[k - 2]
    return t


def logan_shepp_matrix(x, y, degree):
    """Ridge-polynomial basis rows evaluated at the given points.

    Row (k, j) holds U_k(x cos(theta) + y sin(theta)) / sqrt(pi) with
    theta = j*pi/(k+1), for k = 0..degree and j = 0..k, ordered with k
    outer and j inner.  U_k is the second-kind Chebyshev polynomial.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_terms = (degree + 1) * (degree + 2) // 2
    out = np.empty((n_terms, x.size), dtype=np.float64)
    c = 1.0 / np.sqrt(np.pi)
    row = 0
    for k in range(degree + 1):
        for j in range(k + 1):
            th = j * np.pi / (k + 1)
            p = np.cos(th) * x + np.sin(th) * y
            if k == 0:
                out[row] = c
            else:
                um1 = np.ones_like(p)
                u = 2.0 * p
                for _ in range(2, k + 1):
                    um1, u = u, 2.0 * p * u - um1
                out[row] = c * u
            row += 1
    return out


def points_in_polygon(px, py, vx, vy, tol):
    """Membership mask for points against a simple polygon.

    Interior decided by ray casting (half-open edge rule); points within
    ``tol`` of any boundary segment count as inside.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    m = vx.size
    inside = np.zeros(px.size, dtype=np.bool_)
    on_edge = np.zeros(px.size, dtype=np.bool_)
    tol2 = tol * tol
    for i in range(m):
        x1, y1 = vx[i], vy[i]
        x2, y2 = vx[(i + 1) % m], vy[(i + 1) % m]
        crosses = (y1 > py) != (y2 > py)
        if crosses.any():
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (px < xint)
        ex, ey = x2 - x1, y2 - y1
        ee = ex * ex + ey * ey
        if ee == 0.0:
            d2 = (px - x1) ** 2 + (py - y1) ** 2
        else:
            t = ((px - x1) * ex + (py - y1) * ey) / ee
            t = np.clip(t, 0.0, 1.0)
            d2 = (px - (x1 + t * ex)) ** 2 + (py - (y1 + t * ey)) ** 2
        on_edge |= d2 <= tol2
    return inside | on_edge
