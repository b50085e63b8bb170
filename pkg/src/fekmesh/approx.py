"""Polynomial fitting and quality metrics on meshes and extracted nodes.

Least-squares fits live on a whole mesh; interpolation lives on the
square system at extracted nodes.  Quality is measured in the sup norm
over a control mesh: direct error for a given function, the Lebesgue
constant for a node set, and a sampled norm-comparison constant for a
mesh.  All control-mesh sweeps stream in fixed-size chunks so the basis
never materializes on more than ``EVAL_CHUNK`` points at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lstsq

from fekmesh.basis import BasisSpec, eval_basis, vandermonde
from fekmesh.fekete import FeketeResult, RankDeficiencyError, to_refined_basis
from fekmesh.mesh import Mesh

EVAL_CHUNK = 20000

TEST_FUNCTION_IDS = (1, 2, 3)

__all__ = [
    "EVAL_CHUNK",
    "TEST_FUNCTION_IDS",
    "test_function",
    "PolyApprox",
    "least_squares_fit",
    "interpolate",
    "lebesgue_constant",
    "uniform_error",
    "empirical_wam_constant",
]


def test_function(fid: int, shifted: bool = False):
    """The three benchmark functions, by increasing difficulty.

    1: an entire cosine; 2: a bivariate Runge function (analytic, not
    entire); 3: a radial power with C^1 smoothness only at the origin.
    ``shifted`` composes with x -> 2x - 1 so domains living in [0, 1]^2
    see the interesting behavior (used for the polygon benchmarks).
    """
    if fid == 1:
        base = lambda x, y: np.cos(x + y)
    elif fid == 2:
        base = lambda x, y: 1.0 / (1.0 + 16.0 * (x * x + y * y))
    elif fid == 3:
        base = lambda x, y: (x * x + y * y) ** 1.5
    else:
        raise ValueError(f"unknown test function id {fid!r}; choose from {TEST_FUNCTION_IDS}")

    def f(pts):
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        x, y = pts[:, 0], pts[:, 1]
        if shifted:
            x, y = 2.0 * x - 1.0, 2.0 * y - 1.0
        return base(x, y)

    return f


def _chunks(pts: np.ndarray, size: int):
    for lo in range(0, pts.shape[0], size):
        yield pts[lo : lo + size]


def _values_on(f, points: np.ndarray) -> np.ndarray:
    vals = f(points) if callable(f) else f
    vals = np.asarray(vals, dtype=np.float64).reshape(-1)
    if vals.shape[0] != points.shape[0]:
        raise ValueError(
            f"got {vals.shape[0]} function values for {points.shape[0]} points"
        )
    if not np.all(np.isfinite(vals)):
        raise ValueError("function values must be finite")
    return vals


@dataclass(frozen=True)
class PolyApprox:
    """A polynomial in coefficient form, evaluable anywhere.

    Coefficients refer to the refined basis when ``transition`` is set
    (original basis evaluations are changed over to it first), else to
    the plain basis of ``spec``.  ``factors`` carries the triangular
    factors of the refinement rounds when known, so the change of basis
    runs by back substitution.
    """

    coefficients: np.ndarray = field(repr=False)
    spec: BasisSpec
    kind: str
    transition: np.ndarray | None = field(default=None, repr=False)
    factors: tuple[np.ndarray, ...] = field(default=(), repr=False)

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        out = np.empty(pts.shape[0])
        pos = 0
        for chunk in _chunks(pts, EVAL_CHUNK):
            b = eval_basis(self.spec, chunk)
            if self.transition is not None:
                b = to_refined_basis(b, self.transition, self.factors)
            out[pos : pos + chunk.shape[0]] = b @ self.coefficients
            pos += chunk.shape[0]
        return out

    @property
    def degree(self) -> int:
        return self.spec.degree


def least_squares_fit(f, mesh: Mesh, spec: BasisSpec) -> PolyApprox:
    """Best l2 fit of f on the mesh points, solved by pivoted QR."""
    if mesh.degree < spec.degree:
        raise ValueError(
            f"a degree-{mesh.degree} mesh cannot control a degree-{spec.degree} fit"
        )
    design = vandermonde(spec, mesh.points).entries.T
    vals = _values_on(f, mesh.points)
    coeffs, _, rank, _ = lstsq(design, vals, lapack_driver="gelsy")
    if rank < spec.size:
        raise RankDeficiencyError(rank, stage="least-squares")
    return PolyApprox(coeffs, spec, kind="least-squares")


def interpolate(f, result: FeketeResult, spec: BasisSpec | None = None) -> PolyApprox:
    """Polynomial through f at the result's nodes (square solve)."""
    if spec is not None and spec != result.spec:
        raise ValueError("basis spec does not match the one used for extraction")
    vals = _values_on(f, result.points)
    try:
        coeffs = np.linalg.solve(result.selected, vals)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(result.size - 1, stage="interpolation") from exc
    return PolyApprox(
        coeffs,
        result.spec,
        kind="interpolation",
        transition=result.transition,
        factors=result.factors,
    )


def lebesgue_constant(
    result: FeketeResult, control: Mesh, chunk: int = EVAL_CHUNK
) -> float:
    """Worst-case interpolation amplification, maximized over a control mesh.

    Evaluates all cardinal polynomials of the node set with a single
    N-right-hand-side solve, then scans the control points chunkwise for
    the largest absolute row sum.
    """
    if control.cardinality < 4 * result.mesh_cardinality:
        raise ValueError(
            f"control mesh with {control.cardinality} points is too coarse for an "
            f"extraction mesh of {result.mesh_cardinality}; need at least 4x as many"
        )
    n = result.size
    cardinal = np.linalg.solve(result.selected, np.eye(n))
    best = 0.0
    for part in _chunks(control.points, chunk):
        refined = to_refined_basis(
            eval_basis(result.spec, part), result.transition, result.factors
        )
        rows = np.abs(refined @ cardinal).sum(axis=1)
        best = max(best, float(rows.max()))
    return best


def uniform_error(approx: PolyApprox, f, control: Mesh) -> float:
    """Sup-norm distance between f and the approximant on a control mesh."""
    vals = _values_on(f, control.points)
    return float(np.abs(vals - approx(control.points)).max())


def empirical_wam_constant(
    mesh: Mesh,
    control: Mesh,
    n_polys: int = 200,
    seed: int = 0,
    chunk: int = EVAL_CHUNK,
) -> float:
    """Sampled norm-comparison constant of a mesh.

    Draws random polynomials of the mesh degree (normal coefficients in
    the bounding-box Chebyshev basis) and returns the largest ratio of
    control-mesh sup norm to mesh sup norm, an empirical stand-in for
    the mesh's norming constant.
    """
    if mesh.domain is None:
        raise ValueError("mesh must carry its domain to sample the constant")
    spec = BasisSpec.for_domain("cheb", mesh.degree, mesh.domain)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((spec.size, n_polys))

    def sup_norms(points):
        sup = np.zeros(n_polys)
        for part in _chunks(points, chunk):
            vals = np.abs(eval_basis(spec, part) @ coeffs)
            np.maximum(sup, vals.max(axis=0), out=sup)
        return sup

    on_mesh = sup_norms(mesh.points)
    on_control = sup_norms(control.points)
    return float((on_control / on_mesh).max())
