import math

import pytest
from hypothesis import given, settings, strategies as st

from antipodal.unfold import (
    BothTranslations,
    InvalidEdge,
    PlanarIsometry,
    chain_from_edges,
    classify_pair,
    compose,
    extend,
    rotation_center,
    start_chain,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
coords = st.floats(-5, 5, allow_nan=False)


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def iso_close(f, g, tol=1e-12):
    return close((f.c, f.s, f.tx, f.ty), (g.c, g.s, g.tx, g.ty), tol)


def test_inverse_rotations():
    r = PlanarIsometry.rotation(0.7)
    assert iso_close(compose(r, PlanarIsometry.rotation(-0.7)), PlanarIsometry.identity())


def test_half_turns_give_translation():
    f = compose(PlanarIsometry.rotation(math.pi, (1, 0)), PlanarIsometry.rotation(math.pi, (0, 0)))
    assert f.is_translation()
    assert close((f.tx, f.ty), (2, 0))


def test_translations_add():
    f = compose(PlanarIsometry.translation(1, 2), PlanarIsometry.translation(-3, 0.5))
    assert iso_close(f, PlanarIsometry.translation(-2, 2.5))


def test_rotation_center_examples():
    assert close(rotation_center(PlanarIsometry.rotation(math.pi / 2, (1, 0))), (1, 0))
    assert rotation_center(PlanarIsometry.translation(0, 3)) is None
    assert rotation_center(PlanarIsometry.identity()) is None


def test_classify_equal_angles():
    r = classify_pair(PlanarIsometry.rotation(math.pi / 3, (1, 0)), PlanarIsometry.rotation(math.pi / 3, (-1, 0)))
    assert r.epsilon == 0
    assert close(r.centers[0], (1, 0)) and close(r.centers[1], (-1, 0))


def test_classify_distinct_angles():
    f1, fm1 = PlanarIsometry.rotation(math.pi / 3, (0, 0)), PlanarIsometry.rotation(math.pi / 4, (2, 1))
    r = classify_pair(f1, fm1)
    assert r.epsilon == 1 and len(r.centers) == 3
    assert close(r.centers[2], rotation_center(compose(fm1.inverse(), f1)))


def test_classify_both_translations():
    t = PlanarIsometry.translation(1, 1)
    with pytest.raises(BothTranslations):
        classify_pair(t, t)


@pytest.mark.parametrize("which", [0, 1])
def test_one_translation_rebased(which):
    rot = PlanarIsometry.rotation(0.9, (0.3, -1.0))
    tr = PlanarIsometry.translation(2.0, 0.5)
    f1, fm1 = (rot, tr) if which == 0 else (tr, rot)
    r = classify_pair(f1, fm1)
    assert r.epsilon == 0
    assert not r.f1.is_translation() and not r.fm1.is_translation()
    assert abs(r.f1.c - r.fm1.c) + abs(r.f1.s - r.fm1.s) < 1e-10


@settings(max_examples=100, deadline=None)
@given(angles, coords, coords, angles, coords, coords, coords, coords)
def test_compose_applies_right_first(a1, x1, y1, a2, x2, y2, px, py):
    f, g = PlanarIsometry.rotation(a1, (x1, y1)), PlanarIsometry.rotation(a2, (x2, y2))
    assert close(compose(f, g)((px, py)), f(g((px, py))), 1e-10)
    assert close(f.inverse()(f((px, py))), (px, py), 1e-10)


@settings(max_examples=100, deadline=None)
@given(angles, angles, angles, coords, coords)
def test_compose_associative(a, b, c, x, y):
    f, g, h = (PlanarIsometry.rotation(t, (x, t)) for t in (a, b, c))
    assert iso_close(compose(compose(f, g), h), compose(f, compose(g, h)), 1e-11)


@settings(max_examples=100, deadline=None)
@given(angles, coords, coords)
def test_center_is_fixed(a, x, y):
    f = PlanarIsometry.rotation(a, (x, y))
    c = rotation_center(f)
    if c is not None:
        assert close(f(c), c, 1e-9)


def test_extend_one_hinge(cube_mesh):
    fe = cube_mesh.face_edges[1][0]
    ch = extend(cube_mesh, start_chain(1), fe.edge)
    assert ch.faces == (1, fe.neighbor) and ch.edges == (fe.edge,)
    # the hinge fixes the shared edge and turns the neighbor flat by a quarter turn of the dihedral
    a, b = (fe.ax, fe.ay), (fe.bx, fe.by)
    assert ch.corridor == ((a, b),)
    g = fe.neighbor
    for v in (cube_mesh.edges[fe.edge].a, cube_mesh.edges[fe.edge].b):
        xy_g = cube_mesh.to_local(g, cube_mesh.vertices[v])
        xy_1 = cube_mesh.to_local(1, cube_mesh.vertices[v])
        assert close(ch.cumulative(xy_g), xy_1, 1e-12)
    # the far side of the neighbor lands one unit outside face 1
    n = (b[1] - a[1], a[0] - b[0])
    far = [v for v in cube_mesh.faces[g] if v not in (cube_mesh.edges[fe.edge].a, cube_mesh.edges[fe.edge].b)]
    for v in far:
        x = ch.cumulative(cube_mesh.to_local(g, cube_mesh.vertices[v]))
        assert (x[0] - a[0]) * n[0] + (x[1] - a[1]) * n[1] == pytest.approx(1.0, abs=1e-12)


def test_extend_invalid(cube_mesh):
    foreign = next(e for e in range(cube_mesh.n_edges) if e not in cube_mesh.face_edge_ids[1])
    with pytest.raises(InvalidEdge):
        extend(cube_mesh, start_chain(1), foreign)
    e = cube_mesh.face_edges[1][0].edge
    ch = extend(cube_mesh, start_chain(1), e)
    with pytest.raises(InvalidEdge):
        extend(cube_mesh, ch, e)


def test_flat_hinge_identity_in_space():
    from antipodal.mesh import Polyhedron, cube

    c = cube()
    faces = [f for f in c.faces if f != c.faces[1]]
    a, b, d, e = c.faces[1]
    faces += [(a, b, d), (a, d, e)]
    P = Polyhedron(c.vertices, faces)
    f, g = P.n_faces - 2, P.n_faces - 1
    edge = next(fe.edge for fe in P.face_edges[f] if fe.neighbor == g)
    ch = chain_from_edges(P, f, [edge])
    # a coplanar crossing changes nothing: the unfolded neighbor matches its true position
    for v in P.faces[g]:
        xy = ch.cumulative(P.to_local(g, P.vertices[v]))
        assert close(P.to_3d(f, xy), P.vertices[v], 1e-12)


def test_unfolding_preserves_lengths(rand12):
    P = rand12
    ch = start_chain(0)
    for _ in range(5):
        fe = next(fe for fe in P.face_edges[ch.last] if not ch.edges or fe.edge != ch.edges[-1])
        ch = extend(P, ch, fe.edge)
        pts = P.local2d[ch.last]
        for i in range(len(pts)):
            a, b = pts[i], pts[(i + 1) % len(pts)]
            ia, ib = ch.cumulative(a), ch.cumulative(b)
            assert math.dist(ia, ib) == pytest.approx(math.dist(a, b), abs=1e-12)
    direct = start_chain(0)
    for e in ch.edges:
        direct = extend(P, direct, e)
    assert iso_close(direct.cumulative, ch.cumulative, 1e-12)
