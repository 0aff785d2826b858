import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from antipodal.antipode import SourceField, circumcenter
from antipodal.unfold import BothTranslations, PlanarIsometry, classify_pair
from antipodal.zonemap import (
    Boundary,
    Circle,
    DegenerateAngle,
    EmptyOrPointLocus,
    Line,
    OnLocus,
    RankDeficient,
    RationalMapCoeffs,
    TripleZone,
    VertexZone,
    delta,
    denominator_locus,
    fit_zone_map,
    gamma_polylines,
    largest_triple_zone,
    lemma2_normal_form,
    openness_probe,
    sample_zone_map,
    tau_from_isometries,
    zone_samples,
    zone_svg,
)

Q = math.pi / 2


def quarter_pair():
    return PlanarIsometry.rotation(Q, (1, 0)), PlanarIsometry.rotation(Q, (-1, 0))


def test_quarter_turn_coefficients():
    m = tau_from_isometries(*quarter_pair())
    assert m.epsilon == 0
    np.testing.assert_allclose(m.X, [-1, 0, 0, 1, 0, -1], atol=1e-12)
    np.testing.assert_allclose(m.Y, [-1, 0, 0, 1, 2, 1], atol=1e-12)
    np.testing.assert_allclose(m.L, [0, 0, 2], atol=1e-12)
    assert m(0, -1) == pytest.approx((1, 0), abs=1e-12)


def test_lemma2_quarter_and_half_turn():
    m = lemma2_normal_form(Q)
    np.testing.assert_allclose(m.X, [-1, 0, 0, 1, 0, -1], atol=1e-15)
    np.testing.assert_allclose(m.Y, [-1, 0, 0, 1, 2, 1], atol=1e-15)
    h = lemma2_normal_form(math.pi)
    np.testing.assert_allclose(h.X, [0, 0, 0, 0, -2, 0], atol=1e-15)
    np.testing.assert_allclose(h.Y, [-2, 0, 0, 2, 0, 0], atol=1e-15)
    assert h.L == (0.0, 0.0, 2.0) and h.epsilon == 0
    with pytest.raises(DegenerateAngle):
        lemma2_normal_form(0.0)
    with pytest.raises(DegenerateAngle):
        lemma2_normal_form(2 * math.pi)


def test_lemma2_matches_tau():
    rng = np.random.default_rng(1)
    for _ in range(100):
        t = rng.uniform(0.1, math.pi - 0.1)
        f1, fm1 = PlanarIsometry.rotation(t, (1, 0)), PlanarIsometry.rotation(t, (-1, 0))
        a, b = lemma2_normal_form(t), tau_from_isometries(f1, fm1)
        x, y = rng.uniform(-3, 3), rng.uniform(0.01, 3) * rng.choice([-1, 1])
        assert a(x, y) == pytest.approx(b(x, y), abs=1e-10 * (1 + abs(a(x, y)[0]) + abs(a(x, y)[1])))


def test_delta_examples():
    m = lemma2_normal_form(Q)
    assert m(0, 1) == pytest.approx((-1, 0), abs=1e-15)
    assert delta((0, 1), m) == pytest.approx(2, abs=1e-14)
    assert delta((0, -1), m) == pytest.approx(2, abs=1e-14)
    with pytest.raises(OnLocus):
        delta((0.5, 0.0), m)


def distinct_pair():
    return PlanarIsometry.rotation(Q, (0, 0)), PlanarIsometry.rotation(math.pi / 3, (2, 0))


def test_circle_case():
    f1, fm1 = distinct_pair()
    m = tau_from_isometries(f1, fm1)
    assert m.epsilon == 1
    loc = denominator_locus(m)
    assert isinstance(loc, Circle)
    for c in classify_pair(f1, fm1).centers:
        assert loc.residual(c) < 1e-9
    # direct circumcenters blow up near the circle
    (cx, cy), r = loc
    for k in range(8):
        a = 0.2 + k * 0.7
        x, y = cx + r * math.cos(a), cy + r * math.sin(a)
        assert abs(m.denominator(x, y)) < 1e-9
        near = (cx + (r + 1e-6) * math.cos(a), cy + (r + 1e-6) * math.sin(a))
        z = circumcenter(near, fm1(near), f1(near))
        assert math.hypot(*z) > 1e3


def test_literal_third_center_is_off_circle():
    # the center of fm1 ∘ f1^-1 (f1^-1 applied first) is not on the locus
    from antipodal.unfold import compose, rotation_center

    f1, fm1 = distinct_pair()
    loc = denominator_locus(tau_from_isometries(f1, fm1))
    assert loc.residual(rotation_center(compose(fm1, f1.inverse()))) > 1e-3


def test_line_case():
    loc = denominator_locus(lemma2_normal_form(1.0))
    assert isinstance(loc, Line)
    assert loc.residual((1, 0)) < 1e-15 and loc.residual((-1, 0)) < 1e-15


def test_empty_locus():
    with pytest.raises(EmptyOrPointLocus):
        denominator_locus(RationalMapCoeffs(1, (0,) * 6, (0,) * 6, (1.0, 0.0, 0.0)))
    with pytest.raises(EmptyOrPointLocus):
        denominator_locus(RationalMapCoeffs(1, (0,) * 6, (0,) * 6, (0.0, 0.0, 0.0)))


def test_both_translations():
    t = PlanarIsometry.translation(1, 0)
    with pytest.raises(BothTranslations):
        tau_from_isometries(t, PlanarIsometry.translation(0, 1))


rot = st.tuples(st.floats(0.05, 2 * math.pi - 0.05), st.floats(-3, 3), st.floats(-3, 3))


@settings(max_examples=60, deadline=None)
@given(rot, rot, st.integers(0, 2**32 - 1))
def test_tau_equals_direct(r1, r2, seed):
    f1, fm1 = PlanarIsometry.rotation(r1[0], r1[1:]), PlanarIsometry.rotation(r2[0], r2[1:])
    # equal maps give coincident images and no circumcenter at all
    assume(abs(f1.c - fm1.c) + abs(f1.s - fm1.s) + abs(f1.tx - fm1.tx) + abs(f1.ty - fm1.ty) > 1e-3)
    m = tau_from_isometries(f1, fm1)
    assert m.epsilon in (0, 1)
    X, Y, L = m.degrees
    assert X <= 2 and Y <= 2 and L <= 1
    rng = np.random.default_rng(seed)
    for x, y in rng.uniform(-4, 4, size=(1000, 2)):
        a, b, c = (x, y), fm1((x, y)), f1((x, y))
        area = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        if area < 1e-3:
            continue
        z = circumcenter(a, b, c)
        scale = 1 + math.hypot(*z)
        assert m(x, y) == pytest.approx(z, abs=1e-10 * scale / min(1.0, area))


def test_scale_equivariance():
    lam = 2.0
    for t1, t2 in ((0.7, 0.7), (0.7, 1.9)):
        f1, fm1 = PlanarIsometry.rotation(t1, (1, 0.5)), PlanarIsometry.rotation(t2, (-1, 0.2))
        g1, gm1 = PlanarIsometry.rotation(t1, (lam, lam * 0.5)), PlanarIsometry.rotation(t2, (-lam, lam * 0.2))
        p = (0.3, -0.8)
        z = circumcenter(p, fm1(p), f1(p))
        w = circumcenter((lam * p[0], lam * p[1]), gm1((lam * p[0], lam * p[1])), g1((lam * p[0], lam * p[1])))
        assert w == pytest.approx((lam * z[0], lam * z[1]), abs=1e-12)


def test_fit_round_trip():
    m = lemma2_normal_form(1.0)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.2, 1.5, size=(40, 2))
    fit = fit_zone_map([((x, y), m(x, y)) for x, y in pts])
    assert fit.residual < 1e-10
    assert fit.coeffs.epsilon == 0
    np.testing.assert_allclose(fit.coeffs.X, m.X, atol=1e-7)
    np.testing.assert_allclose(fit.coeffs.Y, m.Y, atol=1e-7)
    np.testing.assert_allclose(fit.coeffs.L, m.L, atol=1e-7)


def test_fit_circle_case():
    m = tau_from_isometries(*distinct_pair())
    rng = np.random.default_rng(4)
    pts = rng.uniform(-0.5, 0.5, size=(40, 2)) + (6, 6)
    fit = fit_zone_map([((x, y), m(x, y)) for x, y in pts])
    assert fit.coeffs.epsilon == 1
    assert fit.residual < 1e-9


def test_fit_underdetermined():
    m = lemma2_normal_form(1.0)
    with pytest.raises(RankDeficient):
        fit_zone_map([((x, 1.0 + x), m(x, 1.0 + x)) for x in (0.1, 0.2, 0.3, 0.4, 0.5)])
    with pytest.raises(RankDeficient):
        # collinear samples do not pin a quadratic map
        fit_zone_map([((x, 0.5), m(x, 0.5)) for x in np.linspace(0, 1, 30)])


@pytest.fixture(scope="module")
def tet_maps(tet):
    return sample_zone_map(tet, 0, 32), sample_zone_map(tet, 0, 64)


def test_zone_map_labels(tet, tet_maps):
    zm, fine = tet_maps
    labels = zm.labels()
    assert 1 < len(labels) < 50
    assert all(isinstance(lab, (VertexZone, TripleZone)) or lab is Boundary for lab in labels)
    assert zm.boundary_fraction() < 0.15
    assert fine.boundary_fraction() < 0.15
    # coarse lattice points are exactly the even fine points
    idx = fine.by_index()
    for s in zm.samples:
        t = idx[(2 * s.i, 2 * s.j)]
        assert t.xy == s.xy and t.label == s.label


def test_triple_samples_are_circumcenters(tet, tet_maps):
    zm, _ = tet_maps
    for s in zm.samples[::7]:
        if not isinstance(s.label, TripleZone):
            continue
        fieldp = SourceField(tet, tet.point_from_local(zm.face, s.xy))
        imgs = {n.edges(): (n.ix, n.iy) for n in fieldp.images(s.target_face).nodes}
        ds = [math.dist(imgs[sig], s.target_xy) for sig in s.label.chains]
        assert max(ds) - min(ds) <= 1e-9 * tet.diameter
        assert s.delta == pytest.approx(ds[0] ** 2, rel=1e-9)


def test_fit_on_tetrahedron_zone(tet_maps):
    zm, _ = tet_maps
    lab = largest_triple_zone(zm)
    fit = fit_zone_map(zone_samples(zm, lab))
    assert fit.n >= 20
    assert fit.residual < 1e-8


def test_openness(tet, tet_maps):
    zm, fine = tet_maps
    rep = openness_probe(tet, zm, fine)
    assert rep.failed == []
    assert rep.checked == rep.direct + rep.refined


def test_cube_unique_labels(cube_mesh):
    zm = sample_zone_map(cube_mesh, 0, 32)
    # off the symmetry lines of the face every sample has a single realizing candidate
    for s in zm.samples:
        x, y = s.xy
        if min(abs(x - 0.5), abs(y - 0.5), abs(x - y), abs(x + y - 1)) > 0.05:
            assert s.label is not Boundary
    assert zm.boundary_fraction() < 0.15


def test_svg_and_json(tet, tet_maps):
    zm, _ = tet_maps
    svg = zone_svg(tet, zm)
    assert svg.startswith("<svg") and 'width="1000"' in svg and "clipPath" in svg
    assert svg.count("<rect") == len(zm.samples)
    if any(s.label is Boundary for s in zm.samples):
        assert 'fill="#000000"' in svg
    assert zone_svg(tet, zm) == svg
    doc = zm.to_json()
    assert len(doc["samples"]) == len(zm.samples)
    assert gamma_polylines(zm)


def test_resolution_floor(tet):
    with pytest.raises(ValueError):
        sample_zone_map(tet, 0, 4)
