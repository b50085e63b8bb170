"""Weakly admissible meshes: mapped Chebyshev-style grids whose sup norm
controls the sup norm of every polynomial on the domain.

The disk gets a dedicated polar grid; mapped domains push a degree-k*n
interpolation point family through their degree-k map; polygons take the
union over a decomposition.  A brute uniform grid is also provided for
comparison, with a guard against the quadratic growth of its workspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fekmesh.basis import poly_space_dim
from fekmesh.geometry import (
    INSIDE_TOL,
    Domain,
    Polygon,
    PolyTrapezoid,
    Square,
    Triangle,
    UnitDisk,
    decompose_polygon,
    polar_map,
)

DEDUP_RTOL = 1e-12

__all__ = [
    "Mesh",
    "MeshTooLargeError",
    "chebyshev_lobatto",
    "padua_points",
    "disk_wam",
    "mapped_wam",
    "tensor_wam",
    "union_wam",
    "wam",
    "uniform_am",
    "uniform_am_cardinality",
    "control_mesh",
    "write_points_csv",
    "mesh_metadata",
]


class MeshTooLargeError(Exception):
    """Raised when a uniform grid would need more workspace than allowed."""

    def __init__(self, degree, projected, cap):
        self.degree = degree
        self.projected = projected
        self.cap = cap
        super().__init__(
            f"uniform grid at degree {degree} needs a workspace of about "
            f"{projected:.2e} entries, over the cap of {cap:.2e}; "
            f"use a mapped mesh instead or raise the cap"
        )


@dataclass(frozen=True)
class Mesh:
    """A finite point set tied to a polynomial degree.

    ``constant_class`` names the growth of the norm-comparison constant:
    ``log^2(n)`` for direct Chebyshev-style grids, ``log^2(kn)`` when a
    degree-k map stretches the underlying family, ``max-of-union`` for
    unions, ``O(1)-grid`` for dense uniform grids.
    """

    degree: int
    points: np.ndarray = field(repr=False)
    domain: Domain | None
    provenance: dict
    constant_class: str

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise ValueError("mesh degree must be a positive integer")
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
            raise ValueError("mesh points must be a non-empty (m, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("mesh points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def cardinality(self) -> int:
        return self.points.shape[0]


def _check_degree(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("degree must be a positive integer")
    return int(n)


def chebyshev_lobatto(n: int) -> np.ndarray:
    """n + 1 Chebyshev extrema of degree n, symmetrized so the endpoints
    are exactly +-1 and the midpoint (even n) exactly 0."""
    n = _check_degree(n)
    x = np.cos(np.arange(n + 1) * (np.pi / n))
    return 0.5 * (x - x[::-1])


def padua_points(m: int) -> np.ndarray:
    """The (m + 1)(m + 2) / 2 points of the degree-m interpolation family
    on [-1, 1]^2: odd-index pairs of two interlaced Chebyshev grids."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError("family degree must be a positive integer")
    xa = chebyshev_lobatto(int(m))
    xb = chebyshev_lobatto(int(m) + 1)
    j = np.repeat(np.arange(m + 1), m + 2)
    k = np.tile(np.arange(m + 2), m + 1)
    odd = (j + k) % 2 == 1
    return np.stack((xa[j[odd]], xb[k[odd]]), axis=-1)


def _dedup_indices(points: np.ndarray, tol: float) -> np.ndarray:
    """Indices of the first occurrence of each point, tolerance ``tol``
    per coordinate; earlier rows win."""
    cells: dict[tuple[int, int], list[int]] = {}
    keep: list[int] = []
    for i in range(points.shape[0]):
        x, y = points[i]
        cx = math.floor(x / tol)
        cy = math.floor(y / tol)
        hit = False
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in cells.get((cx + dx, cy + dy), ()):
                    if abs(points[j, 0] - x) <= tol and abs(points[j, 1] - y) <= tol:
                        hit = True
                        break
                if hit:
                    break
            if hit:
                break
        if not hit:
            cells.setdefault((cx, cy), []).append(i)
            keep.append(i)
    return np.asarray(keep, dtype=np.int64)


def _dedup(points: np.ndarray, scale: float) -> np.ndarray:
    tol = DEDUP_RTOL * (1.0 + abs(scale))
    return points[_dedup_indices(points, tol)]


def disk_wam(n: int) -> Mesh:
    """Polar grid on the unit disk: n + 1 Chebyshev-spaced radii times
    2n + 1 equispaced angles, origin counted once; 2n^2 + n + 1 points."""
    n = _check_degree(n)
    r = 0.5 * (1.0 + chebyshev_lobatto(n))
    phi = 2.0 * np.pi * np.arange(2 * n + 1) / (2 * n + 1)
    pts = polar_map(np.repeat(r, 2 * n + 1), np.tile(phi, n + 1)).reshape(-1, 2)
    pts = _dedup(pts, 1.0)
    return Mesh(
        degree=n,
        points=pts,
        domain=UnitDisk(),
        provenance={"construction": "disk-polar", "radii": n + 1, "angles": 2 * n + 1},
        constant_class="log^2(n)",
    )


def mapped_wam(domain: Domain, n: int) -> Mesh:
    """Push the degree k*n square family through the domain's degree-k map."""
    n = _check_degree(n)
    k = domain.map_degree
    if k is None:
        raise ValueError(
            f"domain kind {domain.kind!r} has no polynomial map; use wam() instead"
        )
    base = padua_points(k * n)
    pts = _dedup(domain.map_points(base), domain.diameter())
    return Mesh(
        degree=n,
        points=pts,
        domain=domain,
        provenance={
            "construction": "mapped-padua",
            "map_degree": k,
            "base_degree": k * n,
        },
        constant_class="log^2(kn)",
    )


def tensor_wam(domain: Square, n: int) -> Mesh:
    """Full (n + 1)^2 Chebyshev-Lobatto tensor grid on a rectangle."""
    n = _check_degree(n)
    if not isinstance(domain, Square):
        raise ValueError("tensor grids are defined on rectangle domains only")
    x = chebyshev_lobatto(n)
    base = np.stack(
        (np.repeat(x, n + 1), np.tile(x, n + 1)), axis=-1
    )
    return Mesh(
        degree=n,
        points=domain.map_points(base),
        domain=domain,
        provenance={"construction": "tensor-lobatto"},
        constant_class="log^2(n)",
    )


def union_wam(meshes, domain: Domain | None = None) -> Mesh:
    """Concatenate meshes of one common degree, dropping repeated points
    (the earliest copy survives)."""
    meshes = list(meshes)
    if not meshes:
        raise ValueError("union of no meshes")
    degree = meshes[0].degree
    if any(m.degree != degree for m in meshes):
        raise ValueError("all meshes in a union must share one degree")
    pts = np.concatenate([m.points for m in meshes], axis=0)
    scale = float(np.abs(pts).max())
    kept = _dedup(pts, scale)
    return Mesh(
        degree=degree,
        points=kept,
        domain=domain,
        provenance={
            "construction": "union",
            "parts": [m.provenance for m in meshes],
            "removed": int(pts.shape[0] - kept.shape[0]),
        },
        constant_class="max-of-union",
    )


def wam(domain: Domain, n: int, decomposition: str = "auto") -> Mesh:
    """Build the standard mesh for any supported domain.

    Polygons decompose first (``auto`` prefers vertical panels, falling
    back to triangles) and take the union of the pieces' meshes.
    """
    n = _check_degree(n)
    if isinstance(domain, UnitDisk):
        return disk_wam(n)
    if isinstance(domain, Polygon):
        pieces = decompose_polygon(domain, decomposition)
        parts = [mapped_wam(p, n) for p in pieces]
        out = union_wam(parts, domain=domain)
        out.provenance["decomposition"] = (
            "trapezoids" if isinstance(pieces[0], PolyTrapezoid) else "triangles"
        )
        return out
    return mapped_wam(domain, n)


def uniform_am(
    domain: Domain,
    n: int,
    cap: float = 1e7,
    tol: float = INSIDE_TOL,
) -> Mesh:
    """Uniform grid of spacing 1 / (n^2 + 1) clipped to the domain.

    The grid is anchored at the lower-left corner of the bounding box.
    Because later stages hold an (points x coefficients) matrix, the
    projected workspace nx * ny * N(n) is checked against ``cap`` before
    any allocation.
    """
    n = _check_degree(n)
    h = 1.0 / (n * n + 1.0)
    bb = domain.bounding_box()
    nx = int(math.floor((bb.x_hi - bb.x_lo) / h)) + 1
    ny = int(math.floor((bb.y_hi - bb.y_lo) / h)) + 1
    dim = poly_space_dim(n)
    projected = float(nx) * float(ny) * float(dim)
    if projected > cap:
        raise MeshTooLargeError(n, projected, cap)
    xs = bb.x_lo + h * np.arange(nx)
    ys = bb.y_lo + h * np.arange(ny)
    pts = np.stack((np.repeat(xs, ny), np.tile(ys, nx)), axis=-1)
    pts = pts[domain.contains(pts, tol)]
    if pts.shape[0] < dim:
        raise ValueError(
            f"uniform grid keeps only {pts.shape[0]} points inside the domain, "
            f"fewer than the {dim} needed at degree {n}"
        )
    return Mesh(
        degree=n,
        points=pts,
        domain=domain,
        provenance={"construction": "uniform-grid", "spacing": h},
        constant_class="O(1)-grid",
    )


def uniform_am_cardinality(domain: Domain, n: int, tol: float = INSIDE_TOL) -> int:
    """Count the points of ``uniform_am`` without building the mesh.

    Streams the grid one block of columns at a time, so the count stays
    available at degrees where the mesh itself would blow the workspace
    cap.
    """
    n = _check_degree(n)
    h = 1.0 / (n * n + 1.0)
    bb = domain.bounding_box()
    nx = int(math.floor((bb.x_hi - bb.x_lo) / h)) + 1
    ny = int(math.floor((bb.y_hi - bb.y_lo) / h)) + 1
    ys = bb.y_lo + h * np.arange(ny)
    block = max(1, 200000 // ny)
    total = 0
    for lo in range(0, nx, block):
        xs = bb.x_lo + h * np.arange(lo, min(lo + block, nx))
        pts = np.stack((np.repeat(xs, ny), np.tile(ys, xs.shape[0])), axis=-1)
        total += int(np.count_nonzero(domain.contains(pts, tol)))
    return total


def control_mesh(domain: Domain, n: int, factor: int = 4) -> Mesh:
    """Finer mesh of the same construction, used to estimate sup norms."""
    if factor < 2:
        raise ValueError("control factor must be at least 2")
    return wam(domain, factor * _check_degree(n))


def write_points_csv(path, points) -> None:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for x, y in pts:
            fh.write(f"{x:.17g},{y:.17g}\n")


def mesh_metadata(mesh: Mesh) -> dict:
    return {
        "degree": mesh.degree,
        "cardinality": mesh.cardinality,
        "constant_class": mesh.constant_class,
        "provenance": mesh.provenance,
        "domain": None if mesh.domain is None else mesh.domain.to_json(),
    }
