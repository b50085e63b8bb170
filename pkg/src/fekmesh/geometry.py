"""Compact 2-D domains and the reference-rectangle maps that build their meshes.

Each domain is the image of an axis-aligned reference rectangle under a
fixed surjective map (polar for the disk, a quadratic collapse for
triangles, a graph-bounded strip map for trapezoids, affine for
rectangles).  Polygons carry no single map; they decompose into mapped
pieces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from fekmesh import _kernels

INSIDE_TOL = 1e-10
_EPS = 1e-14

__all__ = [
    "INSIDE_TOL",
    "Rect",
    "Domain",
    "UnitDisk",
    "Triangle",
    "PolyTrapezoid",
    "Polygon",
    "Square",
    "polar_map",
    "duffy_map",
    "trapezoid_map",
    "decompose_polygon",
    "domain_from_json",
    "builtin_domain",
    "BUILTIN_DOMAIN_NAMES",
]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi]."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        vals = (self.x_lo, self.x_hi, self.y_lo, self.y_hi)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("rectangle bounds must be finite")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError("rectangle must have positive width and height")

    @property
    def diameter(self) -> float:
        return math.hypot(self.x_hi - self.x_lo, self.y_hi - self.y_lo)

    def as_tuple(self):
        return (self.x_lo, self.x_hi, self.y_lo, self.y_hi)


def _points_array(y) -> np.ndarray:
    a = np.asarray(y, dtype=np.float64)
    if a.ndim == 1:
        if a.shape[0] != 2:
            raise ValueError("a point needs exactly two coordinates")
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("points must have shape (m, 2)")
    return a


def polar_map(r, phi):
    """Map polar coordinates in [0, 1] x [0, 2*pi] onto the unit disk.

    Accepts scalars or broadcastable arrays; returns coordinates stacked
    along the last axis.
    """
    r = np.asarray(r, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(r < -1e-15) or np.any(r > 1.0 + 1e-15):
        raise ValueError("radius outside [0, 1]")
    x, y = np.broadcast_arrays(r * np.cos(phi), r * np.sin(phi))
    return np.stack((x, y), axis=-1)


def _triangle_scale(u, v, w) -> float:
    return max(
        float(np.hypot(*(v - u))), float(np.hypot(*(w - u))), float(np.hypot(*(w - v)))
    )


def duffy_map(u, v, w, y):
    """Quadratic map from [-1, 1]^2 onto the triangle (u, v, w).

    The side y2 = 1 of the reference square collapses onto the vertex w;
    y = (-1, -1) lands on u and y = (1, -1) on v.

    Parameters
    ----------
    u, v, w : array_like, shape (2,)
        Triangle vertices (must not be collinear).
    y : array_like, shape (..., 2)
        Reference-square coordinates.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    scale = _triangle_scale(u, v, w)
    cross = (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
    if scale == 0.0 or abs(cross) <= _EPS * scale * scale:
        raise ValueError("degenerate triangle: vertices are collinear")
    y = np.asarray(y, dtype=np.float64)
    y1 = y[..., 0]
    y2 = y[..., 1]
    out = (
        0.25 * ((1.0 + y1) * (1.0 - y2))[..., None] * (v - u)
        + 0.5 * (1.0 + y2)[..., None] * (w - u)
        + u
    )
    return out


def trapezoid_map(dom: "PolyTrapezoid", y):
    """Map [-1, 1]^2 onto a region bounded by two polynomial graphs.

    First coordinate goes affinely onto [a, b]; the second interpolates
    between the lower and upper graphs at the mapped abscissa, so the map
    has polynomial degree max(deg g1, deg g2) + 1.
    """
    y = np.asarray(y, dtype=np.float64)
    y1 = y[..., 0]
    y2 = y[..., 1]
    t1 = 0.5 * (dom.b - dom.a) * y1 + 0.5 * (dom.b + dom.a)
    lo = npoly.polyval(t1, dom.g1)
    hi = npoly.polyval(t1, dom.g2)
    t2 = 0.5 * (hi - lo) * y2 + 0.5 * (hi + lo)
    return np.stack(np.broadcast_arrays(t1, t2), axis=-1)


class Domain:
    """Base interface: a compact planar region meshes are built on."""

    kind: str = "abstract"

    @property
    def reference(self) -> Rect | None:
        """Reference rectangle the domain map is defined on (None if no map)."""
        return None

    @property
    def map_degree(self) -> int | None:
        """Polynomial degree of the domain map (None for non-polynomial maps)."""
        return None

    def map_points(self, y) -> np.ndarray:
        raise NotImplementedError(f"domain kind {self.kind!r} has no single map")

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> Rect:
        raise NotImplementedError

    def area(self) -> float:
        raise NotImplementedError

    def diameter(self) -> float:
        return self.bounding_box().diameter

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class UnitDisk(Domain):
    kind: str = field(default="disk", init=False)

    @property
    def reference(self) -> Rect:
        return Rect(0.0, 1.0, 0.0, 2.0 * math.pi)

    def map_points(self, y) -> np.ndarray:
        y = _points_array(y)
        return polar_map(y[:, 0], y[:, 1])

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        pts = _points_array(pts)
        return np.hypot(pts[:, 0], pts[:, 1]) <= 1.0 + tol

    def bounding_box(self) -> Rect:
        return Rect(-1.0, 1.0, -1.0, 1.0)

    def area(self) -> float:
        return math.pi

    def to_json(self) -> dict:
        return {"kind": "disk"}


@dataclass(frozen=True, eq=False)
class Triangle(Domain):
    vertices: np.ndarray
    kind: str = field(default="triangle", init=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.shape != (3, 2):
            raise ValueError("a triangle needs exactly three 2-D vertices")
        if not np.all(np.isfinite(verts)):
            raise ValueError("triangle vertices must be finite")
        # delegate the collinearity check
        duffy_map(verts[0], verts[1], verts[2], np.zeros((1, 2)))
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @property
    def reference(self) -> Rect:
        return Rect(-1.0, 1.0, -1.0, 1.0)

    @property
    def map_degree(self) -> int:
        return 2

    def map_points(self, y) -> np.ndarray:
        return duffy_map(self.vertices[0], self.vertices[1], self.vertices[2], _points_array(y))

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        pts = _points_array(pts)
        u, v, w = self.vertices
        d = (v[1] - w[1]) * (u[0] - w[0]) + (w[0] - v[0]) * (u[1] - w[1])
        l1 = ((v[1] - w[1]) * (pts[:, 0] - w[0]) + (w[0] - v[0]) * (pts[:, 1] - w[1])) / d
        l2 = ((w[1] - u[1]) * (pts[:, 0] - w[0]) + (u[0] - w[0]) * (pts[:, 1] - w[1])) / d
        l3 = 1.0 - l1 - l2
        s = tol / max(1.0, self.diameter())
        return (l1 >= -s) & (l2 >= -s) & (l3 >= -s)

    def bounding_box(self) -> Rect:
        v = self.vertices
        return Rect(v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def area(self) -> float:
        u, v, w = self.vertices
        return 0.5 * abs(
            (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
        )

    def to_json(self) -> dict:
        return {"kind": "triangle", "vertices": self.vertices.tolist()}


def _trim_coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=np.float64))
    if c.ndim != 1 or c.size == 0:
        raise ValueError("polynomial coefficients must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("polynomial coefficients must be finite")
    nz = np.nonzero(c)[0]
    out = c[: nz[-1] + 1] if nz.size else c[:1]
    out = np.array(out)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PolyTrapezoid(Domain):
    """Region a <= x <= b, g1(x) <= y <= g2(x) with polynomial graphs g1, g2.

    Coefficients are ascending (constant term first).
    """

    a: float
    b: float
    g1: np.ndarray
    g2: np.ndarray
    kind: str = field(default="trapezoid", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError("need finite a < b")
        object.__setattr__(self, "g1", _trim_coeffs(self.g1))
        object.__setattr__(self, "g2", _trim_coeffs(self.g2))
        # graphs must not cross: endpoints plus a dense sample
        xs = np.concatenate(
            ([self.a, self.b], np.linspace(self.a, self.b, 257))
        )
        lo = npoly.polyval(xs, self.g1)
        hi = npoly.polyval(xs, self.g2)
        scale = 1.0 + float(np.abs(np.concatenate((lo, hi))).max())
        if np.any(hi - lo < -1e-12 * scale):
            raise ValueError("upper graph dips below lower graph on [a, b]")

    @property
    def reference(self) -> Rect:
        return Rect(-1.0, 1.0, -1.0, 1.0)

    @property
    def map_degree(self) -> int:
        nu = max(self.g1.size - 1, self.g2.size - 1)
        return nu + 1

    def map_points(self, y) -> np.ndarray:
        return trapezoid_map(self, _points_array(y))

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        pts = _points_array(pts)
        x, y = pts[:, 0], pts[:, 1]
        lo = npoly.polyval(x, self.g1)
        hi = npoly.polyval(x, self.g2)
        s = tol * max(1.0, self.diameter())
        return (x >= self.a - s) & (x <= self.b + s) & (y >= lo - s) & (y <= hi + s)

    def bounding_box(self) -> Rect:
        xs = np.linspace(self.a, self.b, 513)
        lo = npoly.polyval(xs, self.g1)
        hi = npoly.polyval(xs, self.g2)
        return Rect(self.a, self.b, float(lo.min()), float(hi.max()))

    def area(self) -> float:
        diff = npoly.polysub(self.g2, self.g1)
        anti = npoly.polyint(diff)
        return float(npoly.polyval(self.b, anti) - npoly.polyval(self.a, anti))

    def to_json(self) -> dict:
        return {
            "kind": "trapezoid",
            "a": self.a,
            "b": self.b,
            "g1": self.g1.tolist(),
            "g2": self.g2.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Square(Domain):
    """Axis-aligned rectangle domain (the name follows the common special case)."""

    rect: Rect = field(default_factory=lambda: Rect(-1.0, 1.0, -1.0, 1.0))
    kind: str = field(default="square", init=False)

    @property
    def reference(self) -> Rect:
        return Rect(-1.0, 1.0, -1.0, 1.0)

    @property
    def map_degree(self) -> int:
        return 1

    def map_points(self, y) -> np.ndarray:
        y = _points_array(y)
        r = self.rect
        x = 0.5 * (r.x_hi - r.x_lo) * y[:, 0] + 0.5 * (r.x_hi + r.x_lo)
        z = 0.5 * (r.y_hi - r.y_lo) * y[:, 1] + 0.5 * (r.y_hi + r.y_lo)
        return np.stack((x, z), axis=-1)

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        pts = _points_array(pts)
        r = self.rect
        s = tol * max(1.0, self.diameter())
        return (
            (pts[:, 0] >= r.x_lo - s)
            & (pts[:, 0] <= r.x_hi + s)
            & (pts[:, 1] >= r.y_lo - s)
            & (pts[:, 1] <= r.y_hi + s)
        )

    def bounding_box(self) -> Rect:
        return self.rect

    def area(self) -> float:
        r = self.rect
        return (r.x_hi - r.x_lo) * (r.y_hi - r.y_lo)

    def to_json(self) -> dict:
        return {"kind": "square", "rect": list(self.rect.as_tuple())}


def _signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _segments_cross(p, q, r, s, eps) -> bool:
    o1 = _orient(p, q, r)
    o2 = _orient(p, q, s)
    o3 = _orient(r, s, p)
    o4 = _orient(r, s, q)
    if ((o1 > eps and o2 < -eps) or (o1 < -eps and o2 > eps)) and (
        (o3 > eps and o4 < -eps) or (o3 < -eps and o4 > eps)
    ):
        return True
    # collinear overlap
    def on_seg(a, b, c):
        return (
            abs(_orient(a, b, c)) <= eps
            and min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps
        )

    return on_seg(p, q, r) or on_seg(p, q, s) or on_seg(r, s, p) or on_seg(r, s, q)


@dataclass(frozen=True, eq=False)
class Polygon(Domain):
    """Simple polygon; vertices are normalized to counter-clockwise order."""

    vertices: np.ndarray
    kind: str = field(default="polygon", init=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ValueError("a polygon needs at least three 2-D vertices")
        if not np.all(np.isfinite(verts)):
            raise ValueError("polygon vertices must be finite")
        m = verts.shape[0]
        scale = 1.0 + float(np.abs(verts).max())
        tol = 1e-12 * scale
        for i in range(m):
            for j in range(i + 1, m):
                if np.hypot(*(verts[i] - verts[j])) <= tol:
                    raise ValueError(f"repeated vertices: {i} and {j}")
        area = _signed_area(verts)
        if abs(area) <= tol * tol:
            raise ValueError("polygon has (near) zero area")
        if area < 0:
            verts = verts[::-1].copy()
        eps = _EPS * scale * scale
        for i in range(m):
            for j in range(i + 1, m):
                # skip edges sharing a vertex
                if j == i or (j + 1) % m == i or (i + 1) % m == j:
                    continue
                if _segments_cross(
                    verts[i], verts[(i + 1) % m], verts[j], verts[(j + 1) % m], eps
                ):
                    raise ValueError(
                        f"edges ({i},{(i + 1) % m}) and ({j},{(j + 1) % m}) intersect"
                    )
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    def contains(self, pts, tol: float = INSIDE_TOL) -> np.ndarray:
        pts = _points_array(pts)
        s = tol * max(1.0, self.diameter())
        return _kernels.points_in_polygon(
            np.ascontiguousarray(pts[:, 0]),
            np.ascontiguousarray(pts[:, 1]),
            np.ascontiguousarray(self.vertices[:, 0]),
            np.ascontiguousarray(self.vertices[:, 1]),
            s,
        )

    def bounding_box(self) -> Rect:
        v = self.vertices
        return Rect(v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def area(self) -> float:
        return abs(_signed_area(self.vertices))

    def to_json(self) -> dict:
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


def _is_ear(verts, ring, ip, i, inx, eps) -> bool:
    a, b, c = verts[ip], verts[i], verts[inx]
    if _orient(a, b, c) <= eps:
        return False
    for j in ring:
        if j in (ip, i, inx):
            continue
        p = verts[j]
        l1 = _orient(a, b, p)
        l2 = _orient(b, c, p)
        l3 = _orient(c, a, p)
        if l1 >= -eps and l2 >= -eps and l3 >= -eps:
            return False
    return True


def _ear_clip(verts: np.ndarray) -> list[tuple[int, int, int]]:
    m = verts.shape[0]
    scale = 1.0 + float(np.abs(verts).max())
    eps = _EPS * scale * scale
    ring = list(range(m))
    tris: list[tuple[int, int, int]] = []
    while len(ring) > 3:
        best_pos = -1
        best_tip = None
        for pos in range(len(ring)):
            ip = ring[pos - 1]
            i = ring[pos]
            inx = ring[(pos + 1) % len(ring)]
            if _is_ear(verts, ring, ip, i, inx, eps):
                if best_tip is None or i < best_tip:
                    best_tip = i
                    best_pos = pos
        if best_pos < 0:
            raise ValueError("cannot triangulate polygon: no ear found (degenerate input)")
        ip = ring[best_pos - 1]
        i = ring[best_pos]
        inx = ring[(best_pos + 1) % len(ring)]
        tris.append((ip, i, inx))
        del ring[best_pos]
    tris.append((ring[0], ring[1], ring[2]))
    return tris


def _trapezoid_panels(poly: Polygon) -> list[PolyTrapezoid] | None:
    """Split along vertical lines through the vertices; None when a vertical
    line would meet the boundary in more than two points."""
    verts = poly.vertices
    m = verts.shape[0]
    scale = 1.0 + float(np.abs(verts).max())
    tol = 1e-12 * scale
    xs = np.sort(verts[:, 0])
    cuts = [float(xs[0])]
    for x in xs[1:]:
        if x - cuts[-1] > tol:
            cuts.append(float(x))
    if len(cuts) < 2:
        return None
    panels: list[PolyTrapezoid] = []
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        xm = 0.5 * (x0 + x1)
        covering = []
        for i in range(m):
            pa, pb = verts[i], verts[(i + 1) % m]
            if abs(pb[0] - pa[0]) <= tol:
                continue
            if min(pa[0], pb[0]) <= x0 + tol and max(pa[0], pb[0]) >= x1 - tol:
                slope = (pb[1] - pa[1]) / (pb[0] - pa[0])
                intercept = pa[1] - slope * pa[0]
                covering.append((intercept + slope * xm, (intercept, slope)))
        if len(covering) != 2:
            return None
        covering.sort(key=lambda t: t[0])
        g1 = covering[0][1]
        g2 = covering[1][1]
        panels.append(PolyTrapezoid(x0, x1, np.array(g1), np.array(g2)))
    return panels


def decompose_polygon(poly: Polygon, method: str = "triangles") -> list[Domain]:
    """Split a simple polygon into mapped-mesh-ready pieces.

    ``triangles`` ear-clips into m - 2 triangles (lowest-index ear
    first).  ``trapezoids`` projects the sides onto the x-axis and cuts
    vertical panels; it requires every vertical line to meet the
    boundary in at most two points and otherwise falls back to
    triangulation.  ``auto`` means trapezoids when supported.
    """
    if not isinstance(poly, Polygon):
        raise ValueError("decompose_polygon expects a Polygon")
    if method not in ("triangles", "trapezoids", "auto"):
        raise ValueError(f"unknown decomposition method {method!r}")
    if method in ("trapezoids", "auto"):
        panels = _trapezoid_panels(poly)
        if panels is not None:
            return list(panels)
    tris = _ear_clip(poly.vertices)
    return [Triangle(poly.vertices[list(t)]) for t in tris]


def domain_from_json(src) -> Domain:
    """Build a domain from a JSON object (or its text form)."""
    obj = json.loads(src) if isinstance(src, (str, bytes)) else src
    if not isinstance(obj, dict):
        raise ValueError("domain description must be a JSON object")
    kind = obj.get("kind")
    if kind == "disk":
        return UnitDisk()
    if kind == "triangle":
        return Triangle(np.asarray(obj["vertices"], dtype=np.float64))
    if kind == "trapezoid":
        return PolyTrapezoid(
            float(obj["a"]),
            float(obj["b"]),
            np.asarray(obj["g1"], dtype=np.float64),
            np.asarray(obj["g2"], dtype=np.float64),
        )
    if kind == "polygon":
        return Polygon(np.asarray(obj["vertices"], dtype=np.float64))
    if kind == "square":
        rect = obj.get("rect", [-1.0, 1.0, -1.0, 1.0])
        return Square(Rect(*map(float, rect)))
    raise ValueError(f"unknown domain kind {kind!r}")


def _builtin_lintrap() -> PolyTrapezoid:
    return PolyTrapezoid(-1.0, 1.0, np.array([-0.75, -0.25]), np.array([0.75, 0.25]))


def _builtin_cubtrap() -> PolyTrapezoid:
    g2 = np.array([0.75, 0.75, 0.0, -0.25])
    return PolyTrapezoid(-1.0, 1.0, -g2, g2)


def _builtin_convpoly() -> Polygon:
    return Polygon(
        np.array(
            [
                [1.00, 0.40],
                [0.90, 0.90],
                [0.50, 1.00],
                [0.10, 0.80],
                [0.00, 0.30],
                [0.55, 0.00],
            ]
        )
    )


def _builtin_nonconvpoly() -> Polygon:
    return Polygon(
        np.array(
            [
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 0.5],
                [0.5, 0.5],
                [0.5, 1.0],
                [0.0, 1.0],
            ]
        )
    )


_BUILTINS = {
    "disk": UnitDisk,
    "simplex": lambda: Triangle(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])),
    "square": Square,
    "lintrap": _builtin_lintrap,
    "cubtrap": _builtin_cubtrap,
    "convpoly": _builtin_convpoly,
    "nonconvpoly": _builtin_nonconvpoly,
}

BUILTIN_DOMAIN_NAMES = tuple(_BUILTINS)


def builtin_domain(name: str) -> Domain:
    """Named example domains used by the command-line tables."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown domain name {name!r}; choose from {BUILTIN_DOMAIN_NAMES}"
        ) from None
    return factory()
