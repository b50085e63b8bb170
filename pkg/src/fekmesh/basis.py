"""Polynomial bases of total degree n and their rectangular sample matrices.

Three families are supported: raw monomials, products of Chebyshev
polynomials of the first kind on a bounding rectangle, and a ridge basis
built from second-kind Chebyshev polynomials along equally spaced
directions, which is orthonormal over the unit disk.  Columns are
ordered degree by degree; within degree d the first index runs
(d, 0), (d - 1, 1), ..., (0, d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fekmesh import _kernels
from fekmesh.geometry import Domain, Rect, UnitDisk

FAMILIES = ("mon", "cheb", "logan-shepp")

__all__ = [
    "FAMILIES",
    "poly_space_dim",
    "exponent_pairs",
    "BasisSpec",
    "eval_basis",
    "vandermonde",
    "VandermondeMatrix",
    "orthonormality_defect",
]


def poly_space_dim(degree: int) -> int:
    """Dimension of bivariate polynomials of total degree <= degree."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    return (degree + 1) * (degree + 2) // 2


def exponent_pairs(degree: int) -> np.ndarray:
    """Exponent table (N, 2) in the package-wide column order."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    pairs = [(d - k, k) for d in range(degree + 1) for k in range(d + 1)]
    return np.array(pairs, dtype=np.int64)


@dataclass(frozen=True)
class BasisSpec:
    """Which basis to evaluate: family, total degree, optional premap.

    The premap sends a rectangle onto [-1, 1]^2 before evaluation; the
    Chebyshev family needs one so its arguments stay in the natural
    range.  ``for_domain`` fills it with the domain's bounding box.
    """

    family: str
    degree: int
    premap: Rect | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}; choose from {FAMILIES}")
        if not isinstance(self.degree, int) or self.degree < 0:
            raise ValueError("degree must be a non-negative integer")
        if self.premap is not None and not isinstance(self.premap, Rect):
            raise ValueError("premap must be a Rect or None")

    @property
    def size(self) -> int:
        return poly_space_dim(self.degree)

    @classmethod
    def for_domain(cls, family: str, degree: int, domain: Domain) -> "BasisSpec":
        premap = domain.bounding_box() if family == "cheb" else None
        return cls(family, degree, premap)

    def to_json(self) -> dict:
        out = {"family": self.family, "degree": self.degree}
        if self.premap is not None:
            out["premap"] = list(self.premap.as_tuple())
        return out


def _apply_premap(spec: BasisSpec, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if spec.premap is None:
        return pts[:, 0], pts[:, 1]
    r = spec.premap
    x = (2.0 * pts[:, 0] - (r.x_hi + r.x_lo)) / (r.x_hi - r.x_lo)
    y = (2.0 * pts[:, 1] - (r.y_hi + r.y_lo)) / (r.y_hi - r.y_lo)
    return x, y


def _check_points(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (m, 2)")
    return pts


def _power_table(x: np.ndarray, kmax: int) -> np.ndarray:
    out = np.empty((kmax + 1, x.shape[0]))
    out[0] = 1.0
    for k in range(1, kmax + 1):
        out[k] = out[k - 1] * x
    return out


def eval_basis(spec: BasisSpec, pts) -> np.ndarray:
    """Evaluate all N basis functions at m points; shape (m, N)."""
    pts = _check_points(pts)
    x, y = _apply_premap(spec, pts)
    n = spec.degree
    if spec.family == "logan-shepp":
        rows = _kernels.logan_shepp_matrix(
            np.ascontiguousarray(x), np.ascontiguousarray(y), n
        )
        return rows.T
    if spec.family == "mon":
        tx = _power_table(x, n)
        ty = _power_table(y, n)
    else:
        tx = _kernels.chebyshev_table(np.ascontiguousarray(x), n)
        ty = _kernels.chebyshev_table(np.ascontiguousarray(y), n)
    pairs = exponent_pairs(n)
    out = np.empty((pts.shape[0], pairs.shape[0]))
    for col, (i, j) in enumerate(pairs):
        out[:, col] = tx[i] * ty[j]
    return out


@dataclass(frozen=True)
class VandermondeMatrix:
    """Rectangular basis sample matrix, one row per basis element.

    entries[i, j] = (basis element i)(point j), shape (N, M) with M >= N.
    """

    entries: np.ndarray = field(repr=False)
    spec: BasisSpec
    points: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.entries.shape


def vandermonde(spec: BasisSpec, pts) -> VandermondeMatrix:
    """Sample the basis on a point set; requires at least N points."""
    pts = _check_points(pts)
    if pts.shape[0] < spec.size:
        raise ValueError(
            f"{pts.shape[0]} points cannot determine a degree-{spec.degree} "
            f"polynomial ({spec.size} coefficients)"
        )
    entries = np.ascontiguousarray(eval_basis(spec, pts).T)
    return VandermondeMatrix(entries, spec, pts)


def orthonormality_defect(spec: BasisSpec) -> float:
    """Max deviation of the disk Gram matrix from the identity.

    Only meaningful for the ridge family, which is orthonormal over the
    unit disk by construction.
    """
    if spec.family != "logan-shepp":
        raise ValueError("orthonormality over the disk holds only for the ridge family")
    from fekmesh.quadrature import domain_quadrature

    pts, w = domain_quadrature(UnitDisk(), 2 * spec.degree)
    v = eval_basis(spec, pts)
    gram = (v * w[:, None]).T @ v
    return float(np.abs(gram - np.eye(spec.size)).max())
