import math

import numpy as np
import pytest

import fekmesh as fm
from fekmesh.geometry import Polygon, Square, Triangle, builtin_domain, decompose_polygon
from fekmesh.mesh import (
    Mesh,
    MeshTooLargeError,
    _dedup_indices,
    chebyshev_lobatto,
    control_mesh,
    disk_wam,
    mapped_wam,
    padua_points,
    tensor_wam,
    uniform_am,
    uniform_am_cardinality,
    union_wam,
    wam,
    write_points_csv,
)


def test_chebyshev_lobatto_exact_values():
    np.testing.assert_array_equal(chebyshev_lobatto(1), [1.0, -1.0])
    np.testing.assert_array_equal(chebyshev_lobatto(2), [1.0, 0.0, -1.0])
    x = chebyshev_lobatto(4)
    assert x[0] == 1.0 and x[-1] == -1.0 and x[2] == 0.0
    np.testing.assert_allclose(x, [1.0, math.sqrt(2) / 2, 0.0, -math.sqrt(2) / 2, -1.0],
                               atol=1e-15)
    assert np.all(np.diff(x) < 0)
    with pytest.raises(ValueError):
        chebyshev_lobatto(0)


def test_padua_points_degree_one_pinned():
    got = padua_points(1)
    expect = np.array([[1.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]])
    np.testing.assert_array_equal(got, expect)


def test_padua_points_cardinality():
    for m in (1, 2, 8, 16):
        pts = padua_points(m)
        assert pts.shape == ((m + 1) * (m + 2) // 2, 2)
        # no duplicates
        assert np.unique(np.round(pts, 12), axis=0).shape[0] == pts.shape[0]
    with pytest.raises(ValueError):
        padua_points(0)


def test_disk_wam_cardinality_formula():
    for n in (1, 5, 8, 30):
        m = disk_wam(n)
        assert m.cardinality == 2 * n * n + n + 1
        assert m.degree == n
    m5 = disk_wam(5)
    assert m5.provenance["construction"] == "disk-polar"
    assert m5.constant_class == "log^2(n)"
    assert np.all(np.hypot(m5.points[:, 0], m5.points[:, 1]) <= 1.0 + 1e-12)


def test_mapped_triangle_cardinality():
    tri = builtin_domain("simplex")
    for n in (1, 2, 3, 8):
        m = mapped_wam(tri, n)
        # the top side of the base family collapses onto one vertex
        assert m.cardinality == 2 * n * n + 2 * n + 2
    assert mapped_wam(tri, 8).constant_class == "log^2(kn)"


def test_mapped_trapezoid_cardinality():
    ct = builtin_domain("cubtrap")
    m = mapped_wam(ct, 8)
    # map degree 4: full degree-32 family survives, nothing collapses
    assert m.cardinality == 33 * 34 // 2
    lt = builtin_domain("lintrap")
    assert mapped_wam(lt, 8).cardinality == 17 * 18 // 2


def test_mapped_wam_needs_polynomial_map():
    with pytest.raises(ValueError):
        mapped_wam(builtin_domain("disk"), 4)


def test_square_wam_is_base_family():
    sq = builtin_domain("square")
    m = wam(sq, 8)
    assert m.cardinality == 45
    base = padua_points(8)
    order_m = np.lexsort((m.points[:, 1], m.points[:, 0]))
    order_b = np.lexsort((base[:, 1], base[:, 0]))
    np.testing.assert_allclose(m.points[order_m], base[order_b], atol=1e-15)


def test_tensor_wam():
    m = tensor_wam(Square(), 3)
    assert m.cardinality == 16
    with pytest.raises(ValueError):
        tensor_wam(builtin_domain("disk"), 3)


def test_union_idempotent_and_degree_checked():
    m = disk_wam(4)
    u = union_wam([m, m])
    assert u.cardinality == m.cardinality
    assert u.provenance["removed"] == m.cardinality
    with pytest.raises(ValueError):
        union_wam([disk_wam(3), disk_wam(4)])
    with pytest.raises(ValueError):
        union_wam([])


def test_union_associative_point_set():
    parts = [mapped_wam(t, 4) for t in decompose_polygon(builtin_domain("convpoly"), "triangles")]
    left = union_wam([union_wam(parts[:2]), *parts[2:]])
    flat = union_wam(parts)
    a = np.unique(np.round(left.points, 12), axis=0)
    b = np.unique(np.round(flat.points, 12), axis=0)
    np.testing.assert_array_equal(a, b)


def test_union_square_split_shares_two_points():
    square = Polygon(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))
    tris = decompose_polygon(square, "triangles")
    assert len(tris) == 2
    parts = [mapped_wam(t, 8) for t in tris]
    assert all(p.cardinality == 146 for p in parts)
    stacked = np.vstack([p.points for p in parts])
    direct_count = np.unique(np.round(stacked, 9), axis=0).shape[0]
    u = union_wam(parts, domain=square)
    assert u.cardinality == direct_count
    assert u.cardinality < sum(p.cardinality for p in parts)
    # the split diagonal contributes interlaced interior points from the
    # two sides; only its two endpoints coincide
    assert u.cardinality == 2 * 146 - 2


def test_wam_dispatch_and_polygon_decomposition_tag():
    assert wam(builtin_domain("disk"), 4).provenance["construction"] == "disk-polar"
    poly = wam(builtin_domain("nonconvpoly"), 4)
    assert poly.provenance["construction"] == "union"
    assert poly.provenance["decomposition"] == "trapezoids"
    tri_way = wam(builtin_domain("nonconvpoly"), 4, decomposition="triangles")
    assert tri_way.provenance["decomposition"] == "triangles"
    assert poly.constant_class == "max-of-union"


def test_nonconvpoly_panels_share_one_point():
    poly = builtin_domain("nonconvpoly")
    panels = decompose_polygon(poly, "trapezoids")
    n = 6
    parts = [mapped_wam(p, n) for p in panels]
    u = union_wam(parts, domain=poly)
    assert u.cardinality == sum(p.cardinality for p in parts) - 1


def test_dedup_keeps_first_occurrence():
    pts = np.array([[0.0, 0.0], [1e-14, 0.0], [1.0, 1.0], [0.0, 0.0]])
    keep = _dedup_indices(pts, 1e-12)
    np.testing.assert_array_equal(keep, [0, 2])


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(degree=0, points=np.zeros((3, 2)), domain=None, provenance={}, constant_class="x")
    with pytest.raises(ValueError):
        Mesh(degree=2, points=np.zeros((0, 2)), domain=None, provenance={}, constant_class="x")
    with pytest.raises(ValueError):
        Mesh(degree=2, points=np.array([[np.nan, 0.0]]), domain=None, provenance={},
             constant_class="x")
    m = disk_wam(3)
    with pytest.raises(ValueError):
        m.points[0, 0] = 5.0


def test_uniform_am_square_count():
    m = uniform_am(Square(), 2)
    assert m.cardinality == 121
    assert m.provenance["spacing"] == pytest.approx(1.0 / 5.0)
    assert m.constant_class == "O(1)-grid"


def test_uniform_am_disk_counts_and_growth():
    c5 = uniform_am(builtin_domain("disk"), 5).cardinality
    assert 1600 <= c5 <= 2600
    c10 = uniform_am(builtin_domain("disk"), 10).cardinality
    assert 14.0 <= c10 / c5 <= 18.0
    assert uniform_am_cardinality(builtin_domain("disk"), 5) == c5
    assert uniform_am_cardinality(builtin_domain("disk"), 10) == c10


def test_uniform_am_workspace_guard():
    disk = builtin_domain("disk")
    with pytest.raises(MeshTooLargeError) as info:
        uniform_am(disk, 13, cap=1e7)
    assert info.value.degree == 13
    assert info.value.projected > info.value.cap
    # a raised cap lets the same degree through
    m = uniform_am(disk, 13, cap=1e9)
    assert m.cardinality > 50000


def test_meshes_stay_inside_domain():
    for name in fm.BUILTIN_DOMAIN_NAMES:
        dom = builtin_domain(name)
        m = wam(dom, 7)
        assert np.all(dom.contains(m.points, tol=1e-10)), name


def test_control_mesh_scaling():
    ctrl = control_mesh(builtin_domain("disk"), 5)
    assert ctrl.degree == 20
    with pytest.raises(ValueError):
        control_mesh(builtin_domain("disk"), 5, factor=1)


def test_write_points_csv_roundtrip(tmp_path):
    m = disk_wam(4)
    path = tmp_path / "pts.csv"
    write_points_csv(path, m.points)
    text = path.read_text().splitlines()
    assert text[0] == "x,y"
    back = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(back, m.points)


def test_degree_validation():
    with pytest.raises(ValueError):
        wam(builtin_domain("disk"), 0)
    with pytest.raises(ValueError):
        uniform_am(builtin_domain("disk"), -1)
