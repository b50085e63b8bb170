"""Meshes, near-optimal interpolation nodes, and polynomial fitting on
compact plane domains.

Workflow: describe a domain (``geometry``), build a degree-n mesh whose
sup norm controls polynomials on the whole domain (``mesh``), extract a
square set of well-spread nodes by greedy max-volume selection
(``fekete``), then fit or interpolate and measure quality (``approx``).
"""

from fekmesh._kernels import BACKEND
from fekmesh.approx import (
    PolyApprox,
    empirical_wam_constant,
    interpolate,
    least_squares_fit,
    lebesgue_constant,
    test_function,
    uniform_error,
)
from fekmesh.basis import (
    FAMILIES,
    BasisSpec,
    VandermondeMatrix,
    eval_basis,
    exponent_pairs,
    poly_space_dim,
    vandermonde,
)
from fekmesh.fekete import (
    FeketeResult,
    RankDeficiencyError,
    afp_cubature,
    cubature_weights,
    extract_afp,
    greedy_select,
    moment_vector,
    refine_basis,
    refined_moments,
    to_refined_basis,
)
from fekmesh.geometry import (
    BUILTIN_DOMAIN_NAMES,
    Domain,
    Polygon,
    PolyTrapezoid,
    Rect,
    Square,
    Triangle,
    UnitDisk,
    builtin_domain,
    decompose_polygon,
    domain_from_json,
)
from fekmesh.mesh import (
    Mesh,
    MeshTooLargeError,
    chebyshev_lobatto,
    control_mesh,
    disk_wam,
    mapped_wam,
    mesh_metadata,
    padua_points,
    tensor_wam,
    uniform_am,
    uniform_am_cardinality,
    union_wam,
    wam,
    write_points_csv,
)
from fekmesh.quadrature import domain_quadrature, integrate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "PolyApprox",
    "empirical_wam_constant",
    "interpolate",
    "least_squares_fit",
    "lebesgue_constant",
    "test_function",
    "uniform_error",
    "FAMILIES",
    "BasisSpec",
    "VandermondeMatrix",
    "eval_basis",
    "exponent_pairs",
    "poly_space_dim",
    "vandermonde",
    "FeketeResult",
    "RankDeficiencyError",
    "afp_cubature",
    "cubature_weights",
    "extract_afp",
    "greedy_select",
    "moment_vector",
    "refine_basis",
    "refined_moments",
    "to_refined_basis",
    "BUILTIN_DOMAIN_NAMES",
    "Domain",
    "Polygon",
    "PolyTrapezoid",
    "Rect",
    "Square",
    "Triangle",
    "UnitDisk",
    "builtin_domain",
    "decompose_polygon",
    "domain_from_json",
    "Mesh",
    "MeshTooLargeError",
    "chebyshev_lobatto",
    "control_mesh",
    "disk_wam",
    "mapped_wam",
    "mesh_metadata",
    "padua_points",
    "tensor_wam",
    "uniform_am",
    "uniform_am_cardinality",
    "union_wam",
    "wam",
    "write_points_csv",
    "domain_quadrature",
    "integrate",
]
