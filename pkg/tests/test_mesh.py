import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antipodal.mesh import (
    DegenerateFace,
    InvalidPoint,
    NonPlanarFace,
    NotClosed,
    NotConvex,
    ParseError,
    Polyhedron,
    SurfacePoint,
    cube,
    dump_off,
    load_off,
    random_convex,
    vertex_curvature,
)

CUBE_OFF = """OFF
# unit cube
8 6 12
0 0 0
1 0 0
0 1 0
1 1 0
0 0 1
1 0 1
0 1 1
1 1 1
4 0 2 3 1
4 4 5 7 6
4 0 1 5 4
4 2 6 7 3
4 0 4 6 2
4 1 3 7 5
"""


def test_cube_combinatorics():
    P = load_off(CUBE_OFF)
    assert (P.n_vertices, P.n_edges, P.n_faces) == (8, 12, 6)
    assert P.euler_characteristic == 2


def test_tetrahedron_total_angle(tet):
    for v in range(4):
        assert tet.total_angle[v] == pytest.approx(math.pi, abs=1e-12)
        assert vertex_curvature(tet, v) == pytest.approx(math.pi, abs=1e-12)


def test_cube_curvature(cube_mesh):
    ks = [vertex_curvature(cube_mesh, v) for v in range(8)]
    assert ks == pytest.approx([math.pi / 2] * 8, abs=1e-12)
    assert sum(ks) == pytest.approx(4 * math.pi, abs=1e-9)


def test_open_box_not_closed():
    lines = CUBE_OFF.splitlines()
    lines[2] = "8 5 12"
    with pytest.raises(NotClosed):
        load_off("\n".join(lines[:-1]) + "\n")


@pytest.mark.parametrize(
    "text",
    ["", "OFF\n", "OFF\nx y z\n", "OFF\n4 4 6\n0 0 0\n", "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 9\n"],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        load_off(text)


def test_nonconvex_rejected():
    # a cube with one top corner pushed outward breaks planarity of three faces
    verts = [list(v) for v in cube().vertices]
    verts[7] = [1.2, 1.2, 1.2]
    with pytest.raises(NotConvex):
        Polyhedron(verts, cube().faces)


def test_nonplanar_is_notconvex_subclass():
    assert issubclass(NonPlanarFace, NotConvex)


def test_dent_rejected():
    # octahedron-like solid with an inward vertex
    verts = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, 0.2)]
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4), (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    with pytest.raises(NotConvex):
        Polyhedron(verts, faces)


def test_degenerate_face():
    verts = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0), (0, 0, 1)]
    faces = [(0, 1, 2), (0, 3, 4), (1, 3, 4), (0, 1, 4), (2, 3, 4)]
    with pytest.raises(DegenerateFace):
        Polyhedron(verts, faces)


def test_coplanar_split_face_kept():
    # cube whose top face is split into two coplanar triangles
    c = cube()
    faces = [f for f in c.faces if f != c.faces[1]]
    a, b, d, e = c.faces[1]
    faces += [(a, b, d), (a, d, e)]
    P = Polyhedron(c.vertices, faces)
    assert P.n_faces == 7 and P.euler_characteristic == 2
    assert sum(P.curvature(v) for v in range(8)) == pytest.approx(4 * math.pi, abs=1e-9)


def test_load_deterministic():
    a, b = load_off(CUBE_OFF), load_off(CUBE_OFF)
    assert a.faces == b.faces and a.edges == b.edges


def test_off_roundtrip(rand12):
    P = load_off(dump_off(rand12))
    assert P.faces == rand12.faces
    np.testing.assert_array_equal(P.vertices, rand12.vertices)


def test_canonical_point_on_edge(cube_mesh):
    # the midpoint of an edge shared by faces 0 and 2 has one representative
    e = next(e for e in cube_mesh.edges if {e.left, e.right} == {0, 2})
    mid = (cube_mesh.vertices[e.a] + cube_mesh.vertices[e.b]) / 2
    p0 = cube_mesh.point_from_local(0, cube_mesh.to_local(0, mid))
    p2 = cube_mesh.point_from_local(2, cube_mesh.to_local(2, mid))
    assert p0 == p2 and p0.face == 0


def test_vertex_point_canonical(cube_mesh):
    for v in range(8):
        p = cube_mesh.vertex_point(v)
        assert p.face == min(cube_mesh.vertex_faces[v])
        assert cube_mesh.vertex_of(p) == v


def test_invalid_point(cube_mesh):
    with pytest.raises(InvalidPoint):
        cube_mesh.point(0, [0.5, 0.6, 0, 0])
    with pytest.raises(InvalidPoint):
        cube_mesh.point(7, [0.25] * 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=4, max_value=30), st.integers(min_value=0, max_value=10_000))
def test_random_hulls_valid(n, seed):
    P = random_convex(n, seed)
    assert P.n_vertices == n
    assert P.n_vertices - P.n_edges + P.n_faces == 2
    deficits = [P.curvature(v) for v in range(n)]
    assert min(deficits) >= 0
    assert sum(deficits) == pytest.approx(4 * math.pi, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5), st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_local_roundtrip(f, w):
    P = cube()
    w = np.array(w) / sum(w)
    p = P.point(f, w)
    q = P.point_from_local(p.face, P.local(p))
    assert P.same_point(p, q, 1e-12)
    assert isinstance(p, SurfacePoint)
