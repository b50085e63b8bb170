"""Greedy extraction of near-optimal interpolation nodes from a mesh.

The node set is the size-N subset whose square basis sample matrix has
(approximately) maximal absolute determinant, found column by column:
always take the remaining point whose basis column has the largest
residual norm, then project it out of the others.  An optional change to
a discretely orthonormal basis (iterated QR) keeps the selection stable
when the starting basis is badly conditioned.  Solving the same square
system against the basis integrals yields interpolatory cubature
weights at no extra cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular

from fekmesh import _kernels
from fekmesh.basis import BasisSpec, VandermondeMatrix, eval_basis, vandermonde
from fekmesh.geometry import Domain
from fekmesh.mesh import DEDUP_RTOL, Mesh, _dedup_indices, wam
from fekmesh.quadrature import domain_quadrature

TIE_RTOL = 1e-14
RANK_RTOL = 1e-12

__all__ = [
    "TIE_RTOL",
    "RANK_RTOL",
    "RankDeficiencyError",
    "RefineResult",
    "FeketeResult",
    "refine_basis",
    "to_refined_basis",
    "greedy_select",
    "extract_afp",
    "moment_vector",
    "refined_moments",
    "cubature_weights",
    "afp_cubature",
]


class RankDeficiencyError(Exception):
    """The basis lost numerical independence on the given points."""

    def __init__(self, step: int, stage: str = "selection"):
        self.step = step
        self.stage = stage
        super().__init__(
            f"numerically rank-deficient basis sample matrix ({stage} step "
            f"{step}); refine the basis or switch family"
        )


@dataclass(frozen=True)
class RefineResult:
    """Outcome of the iterated-QR change of basis.

    ``entries`` holds the working matrix (one row per mesh point, one
    column per refined basis element); ``transition`` maps original
    basis coefficients: refined row = original row @ transition.
    ``cond_history`` records a condition estimate (ratio of extreme
    triangular diagonal magnitudes) seen by each round.  ``factors``
    keeps the triangular factor of every round so the same change of
    basis can later be applied by back substitution instead of through
    the explicitly multiplied-out transition.
    """

    entries: np.ndarray = field(repr=False)
    transition: np.ndarray = field(repr=False)
    cond_history: tuple[float, ...]
    factors: tuple[np.ndarray, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class FeketeResult:
    """Selected nodes plus everything needed to use them.

    ``indices`` are mesh positions in pick order; ``selected`` is the
    square matrix of the refined basis at the nodes (row per node);
    ``transition`` turns original-basis evaluations into refined ones.
    """

    indices: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    transition: np.ndarray = field(repr=False)
    selected: np.ndarray = field(repr=False)
    vdm_logabs: float
    rank_report: dict
    spec: BasisSpec
    mesh_cardinality: int
    weights: np.ndarray | None = field(default=None, repr=False)
    factors: tuple[np.ndarray, ...] = field(default=(), repr=False)

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    @property
    def vdm_abs(self) -> float:
        try:
            return math.exp(self.vdm_logabs)
        except OverflowError:
            return math.inf


def refine_basis(vdm: VandermondeMatrix | np.ndarray, rounds: int = 2) -> RefineResult:
    """Iterate toward a basis orthonormal in the mesh inner product.

    Each round takes a thin QR of the working (points x basis) matrix
    and multiplies on the right by the inverse triangular factor; one
    round already gives orthonormal columns, a second absorbs the
    roundoff left by an ill-conditioned start.  The product with the
    inverse factor is taken as the orthonormal Q of the same
    factorization, which stays orthonormal even when the triangular
    factor is nearly singular.  rounds=0 returns the input with an
    identity transition.
    """
    if rounds < 0:
        raise ValueError("refinement rounds must be non-negative")
    entries = vdm.entries if isinstance(vdm, VandermondeMatrix) else np.asarray(vdm)
    work = np.array(entries.T, dtype=np.float64)
    m, n = work.shape
    if m < n:
        raise ValueError("need at least as many points as basis elements")
    transition = np.eye(n)
    history = []
    factors = []
    for k in range(rounds):
        q, r = np.linalg.qr(work)
        diag = np.abs(np.diagonal(r))
        if not np.all(np.isfinite(diag)) or diag.min() == 0.0:
            raise RankDeficiencyError(k, stage="refinement")
        history.append(float(diag.max() / diag.min()))
        u = solve_triangular(r, np.eye(n))
        work = q
        transition = transition @ u
        factors.append(r)
    return RefineResult(work, transition, tuple(history), tuple(factors))


def to_refined_basis(
    raw: np.ndarray,
    transition: np.ndarray,
    factors: tuple[np.ndarray, ...] = (),
) -> np.ndarray:
    """Turn plain-basis evaluations (row per point) into refined ones.

    With the triangular round factors available, applies each inverse by
    back substitution, which stays accurate even when the accumulated
    transition is nearly singular; otherwise multiplies by the
    transition matrix directly.
    """
    if not factors:
        return raw @ transition
    out = np.asarray(raw, dtype=np.float64).T
    for r in factors:
        out = solve_triangular(r.T, out, lower=True)
    return out.T


def _run_selection(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] > rows.shape[1]:
        raise ValueError("selection needs at least as many points as basis elements")
    ind, fail = _kernels.select_pivots(
        np.ascontiguousarray(rows), TIE_RTOL, RANK_RTOL
    )
    if fail >= 0:
        raise RankDeficiencyError(fail, stage="selection")
    return ind


def greedy_select(vdm: VandermondeMatrix) -> FeketeResult:
    """Pick N mesh points by greedy max-volume column selection.

    Works directly in the basis of ``vdm`` (no refinement): equivalent
    to column-pivoted QR stopped after the first N pivots.
    """
    n, m = vdm.entries.shape
    indices = _run_selection(vdm.entries)
    selected = np.ascontiguousarray(vdm.entries.T[indices])
    _, logabs = np.linalg.slogdet(selected)
    return FeketeResult(
        indices=indices,
        points=vdm.points[indices],
        transition=np.eye(n),
        selected=selected,
        vdm_logabs=float(logabs),
        rank_report={"refine_rounds": 0, "cond_history": ()},
        spec=vdm.spec,
        mesh_cardinality=m,
    )


def extract_afp(mesh: Mesh, spec: BasisSpec, rounds: int = 2) -> FeketeResult:
    """Extract the approximate max-volume node set from a mesh.

    Builds the basis sample matrix, applies ``rounds`` of QR basis
    refinement, then runs the greedy selection on the refined matrix.
    """
    if spec.degree != mesh.degree:
        raise ValueError(
            f"basis degree {spec.degree} does not match mesh degree {mesh.degree}"
        )
    pts = mesh.points
    scale = float(np.abs(pts).max())
    if _dedup_indices(pts, DEDUP_RTOL * (1.0 + scale)).shape[0] != pts.shape[0]:
        raise ValueError("mesh contains duplicate points; deduplicate it first")
    vdm = vandermonde(spec, pts)
    refined = refine_basis(vdm, rounds)
    indices = _run_selection(refined.entries.T)
    selected = np.ascontiguousarray(refined.entries[indices])
    _, logabs = np.linalg.slogdet(selected)
    return FeketeResult(
        indices=indices,
        points=pts[indices],
        transition=refined.transition,
        selected=selected,
        vdm_logabs=float(logabs),
        rank_report={
            "refine_rounds": rounds,
            "cond_history": refined.cond_history,
        },
        spec=spec,
        mesh_cardinality=pts.shape[0],
        factors=refined.factors,
    )


def moment_vector(domain: Domain, spec: BasisSpec) -> np.ndarray:
    """Integrals of every basis element over the domain (original basis)."""
    pts, w = domain_quadrature(domain, spec.degree)
    return eval_basis(spec, pts).T @ w


def refined_moments(result: FeketeResult, moments: np.ndarray) -> np.ndarray:
    """Convert original-basis integrals to the result's refined basis."""
    moments = np.asarray(moments, dtype=np.float64).reshape(-1)
    if moments.shape[0] != result.size:
        raise ValueError("moment vector length does not match the basis size")
    return to_refined_basis(moments[np.newaxis, :], result.transition, result.factors)[0]


def cubature_weights(result: FeketeResult, moments_refined: np.ndarray) -> np.ndarray:
    """Weights making the node set an exact cubature rule for the degree.

    ``moments_refined`` must live in the refined basis of ``result``
    (see refined_moments); the weights solve the square matching system
    so that the rule integrates every basis element exactly.
    """
    b = np.asarray(moments_refined, dtype=np.float64).reshape(-1)
    if b.shape[0] != result.size:
        raise ValueError("moment vector length does not match the node count")
    try:
        return np.linalg.solve(result.selected.T, b)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(result.size - 1, stage="weights") from exc


def afp_cubature(
    domain: Domain, n: int, family: str = "cheb", rounds: int = 2
) -> FeketeResult:
    """One-call pipeline: mesh, node extraction, and cubature weights."""
    mesh = wam(domain, n)
    spec = BasisSpec.for_domain(family, n, domain)
    result = extract_afp(mesh, spec, rounds)
    b = refined_moments(result, moment_vector(domain, spec))
    return replace(result, weights=cubature_weights(result, b))
