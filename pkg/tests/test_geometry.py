import json
import math

import numpy as np
import pytest

from fekmesh.geometry import (
    BUILTIN_DOMAIN_NAMES,
    Polygon,
    PolyTrapezoid,
    Rect,
    Square,
    Triangle,
    UnitDisk,
    builtin_domain,
    decompose_polygon,
    domain_from_json,
    duffy_map,
    polar_map,
    trapezoid_map,
)


def shoelace(verts):
    v = np.asarray(verts, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def test_rect_validation_and_diameter():
    with pytest.raises(ValueError):
        Rect(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Rect(0.0, np.inf, 0.0, 1.0)
    assert Rect(0.0, 1.0, 0.0, 1.0).diameter == pytest.approx(math.sqrt(2.0))
    assert Rect(-1.0, 1.0, -2.0, 2.0).as_tuple() == (-1.0, 1.0, -2.0, 2.0)


def test_polar_map_pins():
    np.testing.assert_allclose(polar_map(1.0, 0.0), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(polar_map(0.5, np.pi), [-0.5, 0.0], atol=1e-15)
    out = polar_map([0.0, 1.0], [0.3, np.pi / 2.0])
    np.testing.assert_allclose(out, [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)
    with pytest.raises(ValueError):
        polar_map(1.5, 0.0)
    with pytest.raises(ValueError):
        polar_map(-0.1, 0.0)


def test_duffy_map_corner_pins():
    u, v, w = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])
    np.testing.assert_allclose(duffy_map(u, v, w, [-1.0, -1.0]), u, atol=1e-15)
    np.testing.assert_allclose(duffy_map(u, v, w, [1.0, -1.0]), v, atol=1e-15)
    # the whole top side collapses onto the third vertex
    for y1 in (-1.0, -0.3, 0.5, 1.0):
        np.testing.assert_allclose(duffy_map(u, v, w, [y1, 1.0]), w, atol=1e-15)


def test_duffy_map_affine_equivariance():
    rng = np.random.default_rng(11)
    u, v, w = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0])
    a = np.array([[2.0, 0.5], [-0.3, 1.5]])
    b = np.array([0.7, -2.0])
    y = rng.uniform(-1.0, 1.0, size=(50, 2))
    direct = duffy_map(a @ u + b, a @ v + b, a @ w + b, y)
    lifted = duffy_map(u, v, w, y) @ a.T + b
    np.testing.assert_allclose(direct, lifted, atol=1e-12)


def test_duffy_map_rejects_collinear():
    with pytest.raises(ValueError):
        duffy_map([0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 0.0])


def test_triangle_basics():
    tri = builtin_domain("simplex")
    assert isinstance(tri, Triangle)
    assert tri.area() == pytest.approx(0.5)
    assert tri.map_degree == 2
    got = tri.contains(np.array([[0.2, 0.2], [0.6, 0.6], [0.0, 0.0], [1.0, 0.0]]))
    np.testing.assert_array_equal(got, [True, False, True, True])
    assert not tri.contains(np.array([[0.5, 0.51]]))[0]
    bb = tri.bounding_box()
    assert bb.as_tuple() == (0.0, 1.0, 0.0, 1.0)


def test_trapezoid_map_pins_and_area():
    lt = builtin_domain("lintrap")
    assert isinstance(lt, PolyTrapezoid)
    assert lt.map_degree == 2
    np.testing.assert_allclose(trapezoid_map(lt, [1.0, 1.0]), [1.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(trapezoid_map(lt, [-1.0, -1.0]), [-1.0, -0.5], atol=1e-15)
    assert lt.area() == pytest.approx(3.0)
    ct = builtin_domain("cubtrap")
    assert ct.map_degree == 4
    assert ct.area() == pytest.approx(3.0)
    assert ct.contains(np.array([[0.0, 0.0]]))[0]


def test_trapezoid_rejects_crossing_graphs():
    with pytest.raises(ValueError):
        PolyTrapezoid(-1.0, 1.0, [0.5], [0.0])
    with pytest.raises(ValueError):
        PolyTrapezoid(-1.0, 1.0, [0.0], [0.0, 1.0])


def test_square_basics():
    sq = Square()
    assert sq.map_degree == 1
    assert sq.area() == pytest.approx(4.0)
    pts = np.array([[0.25, -0.5], [1.0, 1.0]])
    np.testing.assert_allclose(sq.map_points(pts), pts, atol=1e-15)
    assert sq.bounding_box().as_tuple() == (-1.0, 1.0, -1.0, 1.0)


def test_disk_basics():
    disk = UnitDisk()
    assert disk.area() == pytest.approx(np.pi)
    assert disk.map_degree is None
    got = disk.contains(np.array([[0.0, 0.0], [1.0, 0.0], [0.8, 0.7]]))
    np.testing.assert_array_equal(got, [True, True, False])


def test_polygon_validation():
    with pytest.raises(ValueError):
        Polygon(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ValueError):
        Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="edge"):
        Polygon(
            np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, -1.0], [0.0, 2.0]])
        )


def test_polygon_orientation_normalized():
    ccw = Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    cw = Polygon(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]))
    assert ccw.area() == pytest.approx(1.0)
    assert cw.area() == pytest.approx(1.0)
    assert cw.contains(np.array([[0.5, 0.5]]))[0]
    assert shoelace(cw.vertices) == pytest.approx(1.0)


def test_polygon_area_matches_shoelace():
    for name in ("convpoly", "nonconvpoly"):
        poly = builtin_domain(name)
        assert poly.area() == pytest.approx(shoelace(poly.vertices), rel=1e-12)


def test_decompose_triangle_counts():
    square = Polygon(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))
    tris = decompose_polygon(square, "triangles")
    assert len(tris) == 2
    assert all(isinstance(t, Triangle) for t in tris)
    hexa = builtin_domain("convpoly")
    assert len(decompose_polygon(hexa, "triangles")) == 4


def test_decompose_panel_counts():
    conv = decompose_polygon(builtin_domain("convpoly"), "trapezoids")
    assert len(conv) == 5
    assert all(isinstance(p, PolyTrapezoid) for p in conv)
    nonconv = decompose_polygon(builtin_domain("nonconvpoly"), "trapezoids")
    assert len(nonconv) == 2
    assert all(isinstance(p, PolyTrapezoid) for p in nonconv)


def test_decompose_panel_fallback():
    # open side facing right: some vertical lines meet two separate
    # intervals, so panels are impossible and triangles take over
    cshape = Polygon(
        np.array(
            [
                [0.0, 0.0],
                [3.0, 0.0],
                [3.0, 1.0],
                [1.0, 1.0],
                [1.0, 2.0],
                [3.0, 2.0],
                [3.0, 3.0],
                [0.0, 3.0],
            ]
        )
    )
    pieces = decompose_polygon(cshape, "trapezoids")
    assert len(pieces) == 6
    assert all(isinstance(p, Triangle) for p in pieces)
    auto = decompose_polygon(cshape, "auto")
    assert all(isinstance(p, Triangle) for p in auto)
    with pytest.raises(ValueError):
        decompose_polygon(cshape, "pentagons")


def test_decompose_areas_sum():
    shapes = [builtin_domain("convpoly"), builtin_domain("nonconvpoly")]
    shapes.append(
        Polygon(np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [1.0, 1.0],
                          [1.0, 2.0], [3.0, 2.0], [3.0, 3.0], [0.0, 3.0]]))
    )
    for poly in shapes:
        oracle = shoelace(poly.vertices)
        for method in ("triangles", "trapezoids", "auto"):
            pieces = decompose_polygon(poly, method)
            assert sum(p.area() for p in pieces) == pytest.approx(oracle, rel=1e-10)


def test_decompose_covers_polygon():
    rng = np.random.default_rng(5)
    for name in ("convpoly", "nonconvpoly"):
        poly = builtin_domain(name)
        bb = poly.bounding_box()
        pts = np.stack(
            (
                rng.uniform(bb.x_lo, bb.x_hi, 10000),
                rng.uniform(bb.y_lo, bb.y_hi, 10000),
            ),
            axis=-1,
        )
        inside = poly.contains(pts, tol=0.0)
        outside = ~poly.contains(pts, tol=1e-7)
        for method in ("triangles", "trapezoids"):
            pieces = decompose_polygon(poly, method)
            in_piece = np.zeros(pts.shape[0], dtype=bool)
            in_piece_strict = np.zeros(pts.shape[0], dtype=bool)
            for p in pieces:
                in_piece |= p.contains(pts, tol=1e-7)
                in_piece_strict |= p.contains(pts, tol=-1e-7)
            assert np.all(in_piece[inside]), f"{name}/{method} misses interior points"
            assert not np.any(in_piece_strict[outside]), f"{name}/{method} leaks outside"


def test_domain_json_roundtrip():
    for name in BUILTIN_DOMAIN_NAMES:
        dom = builtin_domain(name)
        back = domain_from_json(json.dumps(dom.to_json()))
        assert back.kind == dom.kind
        assert back.area() == pytest.approx(dom.area(), rel=1e-12)
        assert back.bounding_box().as_tuple() == pytest.approx(
            dom.bounding_box().as_tuple(), rel=1e-12
        )


def test_domain_from_json_rejects_unknown():
    with pytest.raises(ValueError):
        domain_from_json({"kind": "blob"})
    with pytest.raises(ValueError):
        domain_from_json(json.dumps([1, 2, 3]))


def test_builtin_names():
    assert BUILTIN_DOMAIN_NAMES == (
        "disk",
        "simplex",
        "square",
        "lintrap",
        "cubtrap",
        "convpoly",
        "nonconvpoly",
    )
    with pytest.raises(ValueError):
        builtin_domain("heptagon")
