"""Quadrature rules that integrate bivariate polynomials exactly.

Every rule is a tensor Gauss-Legendre grid pushed through the domain map,
with node counts sized from the map degree so that any polynomial up to
the requested degree is integrated without truncation error.  Polygons
integrate as the sum over an ear-clip triangulation.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss

from fekmesh.geometry import (
    Domain,
    Polygon,
    PolyTrapezoid,
    Square,
    Triangle,
    UnitDisk,
    decompose_polygon,
)

__all__ = ["domain_quadrature", "integrate"]


def _check_degree(degree) -> int:
    d = int(degree)
    if d != degree or d < 0:
        raise ValueError("degree must be a non-negative integer")
    return d


def _disk_rule(degree: int):
    # radial integrand carries an extra factor r; angles need only
    # trig-degree exactness, which equispaced nodes give for free
    nr = degree // 2 + 2
    na = degree + 2
    r, wr = leggauss(nr)
    r = 0.5 * (r + 1.0)
    wr = 0.5 * wr
    phi = 2.0 * np.pi * np.arange(na) / na
    rr = np.repeat(r, na)
    pp = np.tile(phi, nr)
    pts = np.stack((rr * np.cos(pp), rr * np.sin(pp)), axis=-1)
    w = np.repeat(wr * r, na) * (2.0 * np.pi / na)
    return pts, w


def _square_rule(dom: Square, degree: int):
    n = degree // 2 + 2
    y, w = leggauss(n)
    y1 = np.repeat(y, n)
    y2 = np.tile(y, n)
    pts = dom.map_points(np.stack((y1, y2), axis=-1))
    r = dom.rect
    jac = 0.25 * (r.x_hi - r.x_lo) * (r.y_hi - r.y_lo)
    return pts, np.repeat(w, n) * np.tile(w, n) * jac


def _triangle_rule(tri: Triangle, degree: int):
    # the collapse map is quadratic, so composed integrands reach
    # degree 2*degree + 1 per reference variable
    n = degree + 2
    y, w = leggauss(n)
    y1 = np.repeat(y, n)
    y2 = np.tile(y, n)
    pts = tri.map_points(np.stack((y1, y2), axis=-1))
    jac = (1.0 - y2) * (tri.area() / 4.0)
    return pts, np.repeat(w, n) * np.tile(w, n) * jac


def _trapezoid_rule(dom: PolyTrapezoid, degree: int):
    nu = max(dom.g1.size - 1, dom.g2.size - 1)
    n1 = max(degree, nu * (degree + 1)) // 2 + 2
    n2 = degree // 2 + 2
    ya, wa = leggauss(n1)
    yb, wb = leggauss(n2)
    t1 = 0.5 * (dom.b - dom.a) * ya + 0.5 * (dom.b + dom.a)
    thick = 0.5 * (npoly.polyval(t1, dom.g2) - npoly.polyval(t1, dom.g1))
    y1 = np.repeat(ya, n2)
    y2 = np.tile(yb, n1)
    pts = dom.map_points(np.stack((y1, y2), axis=-1))
    w = np.repeat(wa * 0.5 * (dom.b - dom.a) * thick, n2) * np.tile(wb, n1)
    return pts, w


def domain_quadrature(domain: Domain, degree):
    """Nodes and weights exact for all polynomials up to ``degree``.

    Returns ``(points, weights)`` with points of shape (m, 2).
    """
    degree = _check_degree(degree)
    if isinstance(domain, UnitDisk):
        return _disk_rule(degree)
    if isinstance(domain, Square):
        return _square_rule(domain, degree)
    if isinstance(domain, Triangle):
        return _triangle_rule(domain, degree)
    if isinstance(domain, PolyTrapezoid):
        return _trapezoid_rule(domain, degree)
    if isinstance(domain, Polygon):
        parts = [
            _triangle_rule(t, degree)
            for t in decompose_polygon(domain, "triangles")
        ]
        pts = np.concatenate([p for p, _ in parts], axis=0)
        w = np.concatenate([w for _, w in parts])
        return pts, w
    raise ValueError(f"no quadrature rule for domain kind {domain.kind!r}")


def integrate(domain: Domain, f, degree) -> float:
    """Integrate ``f`` over the domain with a rule exact to ``degree``.

    ``f`` takes an (m, 2) array and returns m values.
    """
    pts, w = domain_quadrature(domain, degree)
    vals = np.asarray(f(pts), dtype=np.float64).reshape(-1)
    if vals.shape[0] != w.shape[0]:
        raise ValueError("integrand returned the wrong number of values")
    return float(w @ vals)
