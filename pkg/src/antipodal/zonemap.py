"""Zones of the antipodal map and their circumcenter rational maps.

On a zone where the farthest point is not a vertex it is the circumcenter of
three unfolded images of the source, ``p -> cc(p, fm1(p), f1(p))``.  In fixed
frames that map is

    (X(x, y), Y(x, y)) / (eps * (x^2 + y^2) + L(x, y))

with ``X``, ``Y`` quadratic, ``L`` affine and ``eps`` in {0, 1}.  Quadratic
coefficient arrays are ordered ``[1, x, y, x^2, xy, y^2]`` and affine ones
``[1, x, y]``.

Normalization: with ``eps = 1`` the ``x^2 + y^2`` coefficient is 1; with
``eps = 0`` the gradient of ``L`` has norm 2 and points to positive ``y``
(positive ``x`` if it is horizontal).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .antipode import LABEL_TIE, CircumcenterKind, VertexKind, _distinct, analyze
from .errors import AntipodalError
from .mesh import Polyhedron, SurfacePoint
from .unfold import PlanarIsometry, classify_pair

MONOMIALS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


class DegenerateAngle(AntipodalError):
    pass


class EmptyOrPointLocus(AntipodalError):
    pass


class OnLocus(AntipodalError):
    pass


class RankDeficient(AntipodalError):
    pass


# -- tiny bivariate polynomials: {(i, j): coeff} ---------------------------------


def _padd(*polys):
    out: dict = {}
    for p in polys:
        for k, v in p.items():
            out[k] = out.get(k, 0.0) + v
    return out


def _pscale(p, a):
    return {k: a * v for k, v in p.items()}


def _pmul(p, q):
    out: dict = {}
    for (i1, j1), a in p.items():
        for (i2, j2), b in q.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0.0) + a * b
    return out


def _ppow(p, n):
    out = {(0, 0): 1.0}
    for _ in range(n):
        out = _pmul(out, p)
    return out


def _substitute(p, xmap, ymap):
    """p(xmap(x, y), ymap(x, y)) for polynomial maps."""
    out: dict = {}
    for (i, j), a in p.items():
        out = _padd(out, _pscale(_pmul(_ppow(xmap, i), _ppow(ymap, j)), a))
    return out


def _quad(p) -> tuple[float, ...]:
    return tuple(float(p.get(m, 0.0)) for m in MONOMIALS)


def _lin(p) -> tuple[float, ...]:
    return tuple(float(p.get(m, 0.0)) for m in MONOMIALS[:3])


# -- rational maps -------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMapCoeffs:
    epsilon: int
    X: tuple[float, ...]
    Y: tuple[float, ...]
    L: tuple[float, ...]

    def denominator(self, x, y):
        a, b, c = self.L
        return self.epsilon * (x * x + y * y) + a + b * x + c * y

    def numerators(self, x, y):
        mons = (1.0, x, y, x * x, x * y, y * y)
        return sum(a * m for a, m in zip(self.X, mons)), sum(a * m for a, m in zip(self.Y, mons))

    def __call__(self, x, y):
        d = self.denominator(x, y)
        nx, ny = self.numerators(x, y)
        return nx / d, ny / d

    @property
    def degrees(self) -> tuple[int, int, int]:
        def deg(coeffs, mons):
            scale = max(max(abs(c) for c in coeffs), 1e-300)
            ds = [i + j for c, (i, j) in zip(coeffs, mons) if abs(c) > 1e-13 * scale]
            return max(ds) if ds else -1

        return deg(self.X, MONOMIALS), deg(self.Y, MONOMIALS), deg(self.L, MONOMIALS[:3])

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "X": list(self.X), "Y": list(self.Y), "L": list(self.L)}


def _normalized(epsilon: int, X: dict, Y: dict, D: dict) -> RationalMapCoeffs:
    if epsilon == 1:
        k = D.get((2, 0), 0.0)
        if k == 0.0:
            raise EmptyOrPointLocus("no quadratic part in the denominator")
    else:
        b, c = D.get((1, 0), 0.0), D.get((0, 1), 0.0)
        g = math.hypot(b, c)
        if g == 0.0:
            raise EmptyOrPointLocus("constant denominator (the two isometries coincide)")
        sign = math.copysign(1.0, c) if abs(c) > 1e-12 * g else math.copysign(1.0, b)
        k = sign * g / 2.0
        D = {m: v for m, v in D.items() if m in MONOMIALS[:3]}
    return RationalMapCoeffs(epsilon, _quad(_pscale(X, 1 / k)), _quad(_pscale(Y, 1 / k)), _lin(_pscale(D, 1 / k)))


def tau_from_isometries(f1: PlanarIsometry, fm1: PlanarIsometry) -> RationalMapCoeffs:
    """Coefficients of ``p -> cc(p, fm1(p), f1(p))`` with all three points in one frame."""
    epsilon = classify_pair(f1, fm1).epsilon
    px, py = {(1, 0): 1.0}, {(0, 1): 1.0}

    def image(f):
        return (
            _padd(_pscale(px, f.c), _pscale(py, -f.s), {(0, 0): f.tx}),
            _padd(_pscale(px, f.s), _pscale(py, f.c), {(0, 0): f.ty}),
        )

    rows, rhs = [], []
    for f in (fm1, f1):
        bx, by = image(f)
        rows.append((_pscale(_padd(bx, _pscale(px, -1)), 2.0), _pscale(_padd(by, _pscale(py, -1)), 2.0)))
        # |f(p)|^2 - |p|^2 = 2 t . R p + |t|^2
        rhs.append(
            _padd(
                _pscale(_padd(bx, {(0, 0): -f.tx}), 2 * f.tx),
                _pscale(_padd(by, {(0, 0): -f.ty}), 2 * f.ty),
                {(0, 0): f.tx * f.tx + f.ty * f.ty},
            )
        )
    (m11, m12), (m21, m22) = rows
    det = _padd(_pmul(m11, m22), _pscale(_pmul(m12, m21), -1))
    X = _padd(_pmul(m22, rhs[0]), _pscale(_pmul(m12, rhs[1]), -1))
    Y = _padd(_pmul(m11, rhs[1]), _pscale(_pmul(m21, rhs[0]), -1))
    return _normalized(epsilon, X, Y, det)


def lemma2_normal_form(theta: float) -> RationalMapCoeffs:
    """Closed form for two rotations of angle ``theta`` centered at (1, 0) and (-1, 0)."""
    half = math.sin(theta / 2)
    if abs(half) < 1e-12:
        raise DegenerateAngle("theta is a multiple of 2*pi")
    c, s = math.cos(theta), math.sin(theta)
    k = math.cos(theta / 2) / half
    X = (-s, 0.0, 0.0, s, 2 * c, -s)
    u = 1 - c
    Y = (-u, 0.0, 0.0, u, 2 * k * u, k * k * u)
    return RationalMapCoeffs(0, X, Y, (0.0, 0.0, 2.0))


class Line(NamedTuple):
    """Points with ``a + b x + c y = 0``, with ``b^2 + c^2 = 1``."""

    a: float
    b: float
    c: float

    def residual(self, pt) -> float:
        return abs(self.a + self.b * pt[0] + self.c * pt[1])


class Circle(NamedTuple):
    center: tuple[float, float]
    radius: float

    def residual(self, pt) -> float:
        return abs(math.hypot(pt[0] - self.center[0], pt[1] - self.center[1]) - self.radius)


def denominator_locus(m: RationalMapCoeffs) -> Union[Line, Circle]:
    a, b, c = m.L
    if m.epsilon == 0:
        g = math.hypot(b, c)
        if g == 0.0:
            raise EmptyOrPointLocus("denominator is constant")
        return Line(a / g, b / g, c / g)
    cx, cy = -b / 2, -c / 2
    r2 = cx * cx + cy * cy - a
    if r2 <= 1e-24 * max(1.0, cx * cx + cy * cy):
        raise EmptyOrPointLocus(f"denominator vanishes on an empty or single-point set (r^2 = {r2:.3g})")
    return Circle((cx, cy), math.sqrt(r2))


def delta(p, m: RationalMapCoeffs) -> float:
    """Squared distance between ``p`` and its image under ``m``."""
    x, y = p
    d = m.denominator(x, y)
    scale = 1.0 + abs(x) + abs(y)
    if abs(d) <= 1e-14 * scale * scale:
        raise OnLocus(f"{p} lies on the denominator locus")
    fx, fy = m(x, y)
    return (fx - x) ** 2 + (fy - y) ** 2


# -- fitting -------------------------------------------------------------------------


class ZoneFit(NamedTuple):
    coeffs: RationalMapCoeffs
    residual: float
    n: int


def fit_zone_map(samples) -> ZoneFit:
    """Least-squares fit of the rational form to ``(point, image)`` pairs.

    Points and images are given in fixed planar frames.  ``residual`` is the
    largest distance between a fitted image and the sampled one.
    """
    pts = np.array([s[0] for s in samples], dtype=float).reshape(-1, 2)
    tgt = np.array([s[1] for s in samples], dtype=float).reshape(-1, 2)
    if len(pts) < 8:
        raise RankDeficient(f"{len(pts)} samples cannot determine 16 coefficients")
    x0 = pts.mean(axis=0)
    sigma = float(np.abs(pts - x0).max()) or 1.0
    w0 = tgt.mean(axis=0)
    tau = float(np.abs(tgt - w0).max()) or 1.0
    u = (pts - x0) / sigma
    w = (tgt - w0) / tau

    def solve(with_eps: bool):
        mons = np.stack([u[:, 0] ** i * u[:, 1] ** j for i, j in MONOMIALS], axis=1)
        den_cols = [mons[:, 0], mons[:, 1], mons[:, 2]]
        if with_eps:
            den_cols = [u[:, 0] ** 2 + u[:, 1] ** 2] + den_cols
        den = np.stack(den_cols, axis=1)
        z = np.zeros_like(mons)
        A = np.vstack(
            [
                np.hstack([mons, z, -w[:, :1] * den]),
                np.hstack([z, mons, -w[:, 1:] * den]),
            ]
        )
        norms = np.linalg.norm(A, axis=0)
        norms[norms == 0] = 1.0
        _, sv, vt = np.linalg.svd(A / norms, full_matrices=False)
        if len(sv) < A.shape[1] or sv[-2] <= 1e-9 * sv[0]:
            raise RankDeficient("samples do not determine the map (degenerate or too few)")
        return vt[-1] / norms

    sol = solve(True)
    eps_n = sol[12]
    if abs(eps_n) <= 1e-7 * np.abs(sol[12:]).max():
        sol = solve(False)
        sol = np.concatenate([sol[:12], [0.0], sol[12:]])
        epsilon = 0
    else:
        epsilon = 1
    Xn = {m: sol[k] for k, m in enumerate(MONOMIALS)}
    Yn = {m: sol[6 + k] for k, m in enumerate(MONOMIALS)}
    Dn = {(2, 0): sol[12], (0, 2): sol[12], (0, 0): sol[13], (1, 0): sol[14], (0, 1): sol[15]}
    xmap = {(1, 0): 1 / sigma, (0, 0): -x0[0] / sigma}
    ymap = {(0, 1): 1 / sigma, (0, 0): -x0[1] / sigma}
    D = _substitute(Dn, xmap, ymap)
    X = _padd(_pscale(D, w0[0]), _pscale(_substitute(Xn, xmap, ymap), tau))
    Y = _padd(_pscale(D, w0[1]), _pscale(_substitute(Yn, xmap, ymap), tau))
    coeffs = _normalized(epsilon, X, Y, D)
    fitted = np.array([coeffs(*p) for p in pts])
    residual = float(np.hypot(*(fitted - tgt).T).max())
    return ZoneFit(coeffs, residual, len(pts))


# -- sampled zone maps --------------------------------------------------------------


@dataclass(frozen=True)
class VertexZone:
    vertex: int

    def __str__(self):
        return f"V{self.vertex}"


@dataclass(frozen=True)
class TripleZone:
    chains: tuple[tuple[int, ...], ...]

    def __str__(self):
        return "T" + "|".join(".".join(map(str, c)) for c in self.chains)


class _Boundary:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Boundary"

    def __str__(self):
        return "B"


Boundary = _Boundary()
Label = Union[VertexZone, TripleZone, _Boundary]


@dataclass(frozen=True)
class ZoneSample:
    i: int
    j: int
    xy: tuple[float, float]
    label: Label
    antipode: SurfacePoint | None
    delta: float
    target_face: int
    target_xy: tuple[float, float]
    gap: float  # relative gap to the best candidate with another label


@dataclass
class ZoneMap:
    face: int
    resolution: int
    origin: tuple[float, float]
    spacing: float
    samples: list[ZoneSample] = field(default_factory=list)

    def by_index(self) -> dict[tuple[int, int], ZoneSample]:
        return {(s.i, s.j): s for s in self.samples}

    def labels(self) -> list[Label]:
        seen: dict = {}
        for s in self.samples:
            seen.setdefault(s.label, None)
        return list(seen)

    def counts(self) -> dict:
        out: dict = {}
        for s in self.samples:
            out[s.label] = out.get(s.label, 0) + 1
        return out

    def boundary_fraction(self) -> float:
        return sum(s.label is Boundary for s in self.samples) / max(len(self.samples), 1)

    def to_json(self) -> dict:
        labels = self.labels()
        index = {lab: k for k, lab in enumerate(labels)}
        return {
            "face": self.face,
            "resolution": self.resolution,
            "origin": list(self.origin),
            "spacing": self.spacing,
            "labels": [str(lab) for lab in labels],
            "samples": [
                {
                    "i": s.i,
                    "j": s.j,
                    "xy": list(s.xy),
                    "label": index[s.label],
                    "delta": s.delta,
                    "antipode": None if s.antipode is None else {"face": s.antipode.face, "bary": list(s.antipode.bary)},
                }
                for s in self.samples
            ],
        }


def label_point(P: Polyhedron, p: SurfacePoint):
    """(label, antipode, radius, target face, target xy, relative gap) at ``p``."""
    res = analyze(P, p, grid=0)
    r = res.radius
    ranked = sorted(res.candidates, key=lambda c: -c.value)
    near = [c for c in ranked if c.value >= r * (1 - LABEL_TIE)]
    distinct = _distinct(P, near)
    best, sp = distinct[0]
    others = [c for c in ranked if c.kind != best.kind and not _same_spot(P, c, sp)]
    gap = (r - others[0].value) / r if others else 1.0
    if len(distinct) > 1 or (isinstance(best.kind, CircumcenterKind) and best.ties > 3):
        label: Label = Boundary
    elif isinstance(best.kind, VertexKind):
        label = VertexZone(best.kind.vertex)
    else:
        label = TripleZone(best.kind.chains)
    return label, sp, r, best.face, best.xy, gap


def _same_spot(P, c, sp) -> bool:
    if isinstance(c.kind, VertexKind):
        q = P.vertex_point(c.kind.vertex)
    else:
        q = P.point_from_local(c.face, c.xy)
    return P.same_point(q, sp)


def face_grid(P: Polyhedron, face: int, resolution: int):
    """Lattice of the face's bounding box; ``(i, j)`` at ``resolution`` is ``(2i, 2j)`` at twice it."""
    pts = np.array(P.local2d[face])
    lo = pts.min(axis=0)
    span = float((pts.max(axis=0) - lo).max())
    h = span / resolution
    margin = 1e-9 * P.diameter
    out = []
    for i in range(resolution + 1):
        for j in range(resolution + 1):
            xy = (float(lo[0] + i * h), float(lo[1] + j * h))
            if P.boundary_distance(face, xy) > margin:
                out.append((i, j, xy))
    return (float(lo[0]), float(lo[1])), h, out


def sample_zone_map(P: Polyhedron, face: int, resolution: int = 64) -> ZoneMap:
    """Label a lattice of points of ``face`` by the candidate realizing their antipode."""
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    origin, h, grid = face_grid(P, face, resolution)
    zm = ZoneMap(face, resolution, origin, h)
    for i, j, xy in grid:
        p = P.point_from_local(face, xy)
        label, sp, r, tf, txy, gap = label_point(P, p)
        zm.samples.append(ZoneSample(i, j, xy, label, sp, r * r, tf, txy, gap))
    return zm


def zone_samples(zm: ZoneMap, label: Label) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """(source xy, antipode xy) pairs of one zone, in the source and target face frames."""
    rows = [s for s in zm.samples if s.label == label]
    if not rows:
        return []
    faces: dict = {}
    for s in rows:
        faces[s.target_face] = faces.get(s.target_face, 0) + 1
    target = max(faces, key=lambda f: (faces[f], -f))
    return [(s.xy, s.target_xy) for s in rows if s.target_face == target]


def largest_triple_zone(zm: ZoneMap) -> TripleZone | None:
    counts = {lab: n for lab, n in zm.counts().items() if isinstance(lab, TripleZone)}
    if not counts:
        return None
    return max(counts, key=lambda lab: (counts[lab], str(lab)))


class OpennessReport(NamedTuple):
    checked: int
    direct: int  # neighbors at double resolution already agree
    refined: int  # agreement needed a smaller neighborhood
    failed: list


def openness_probe(P: Polyhedron, coarse: ZoneMap, fine: ZoneMap, max_halvings: int = 30) -> OpennessReport:
    """Check that every non-boundary coarse sample has a 4-neighborhood with its label.

    Neighbors are first taken from the fine map (offset half a coarse step);
    where one disagrees the offset is halved until all four agree.
    """
    if fine.resolution != 2 * coarse.resolution or fine.face != coarse.face:
        raise ValueError("fine map must be the same face at twice the resolution")
    fine_idx = fine.by_index()
    face = coarse.face
    steps = ((1, 0), (-1, 0), (0, 1), (0, -1))
    margin = 1e-9 * P.diameter
    checked = direct = refined = 0
    failed = []
    for s in coarse.samples:
        if s.label is Boundary:
            continue
        checked += 1
        agree = all(
            (n := fine_idx.get((2 * s.i + di, 2 * s.j + dj))) is None or n.label == s.label for di, dj in steps
        )
        if agree:
            direct += 1
            continue
        offset = coarse.spacing / 2
        for _ in range(max_halvings):
            offset /= 2
            ok = True
            for di, dj in steps:
                xy = (s.xy[0] + di * offset, s.xy[1] + dj * offset)
                if P.boundary_distance(face, xy) <= margin:
                    continue
                if label_point(P, P.point_from_local(face, xy))[0] != s.label:
                    ok = False
                    break
            if ok:
                refined += 1
                break
        else:
            failed.append((s.i, s.j))
    return OpennessReport(checked, direct, refined, failed)


def gamma_polylines(zm: ZoneMap) -> list[np.ndarray]:
    """Marching-squares outlines between labels, in face coordinates."""
    import contourpy

    n = zm.resolution + 1
    labels = [lab for lab in zm.labels() if lab is not Boundary]
    idx = zm.by_index()
    lines = []
    for lab in labels:
        z = np.zeros((n, n))
        mask = np.ones((n, n), dtype=bool)
        for (i, j), s in idx.items():
            mask[j, i] = False
            z[j, i] = 1.0 if s.label == lab else 0.0
        gen = contourpy.contour_generator(
            x=zm.origin[0] + zm.spacing * np.arange(n),
            y=zm.origin[1] + zm.spacing * np.arange(n),
            z=np.ma.array(z, mask=mask),
        )
        lines.extend(line for line in gen.lines(0.5) if len(line) > 1)
    return lines


def label_color(label: Label) -> str:
    if label is Boundary:
        return "#000000"
    digest = hashlib.sha256(str(label).encode()).digest()
    hue = digest[0] / 255.0
    import colorsys

    r, g, b = colorsys.hls_to_rgb(hue, 0.55 + 0.2 * digest[1] / 255.0, 0.65)
    return "#{:02x}{:02x}{:02x}".format(int(r * 255), int(g * 255), int(b * 255))


def zone_svg(P: Polyhedron, zm: ZoneMap, size: int = 1000) -> str:
    """SVG document: one square cell per sample colored by label, boundary cells black."""
    pts = np.array(P.local2d[zm.face])
    lo = pts.min(axis=0)
    span = float((pts.max(axis=0) - lo).max())
    pad = 20.0
    k = (size - 2 * pad) / span

    def tx(x, y):
        return pad + (x - lo[0]) * k, size - pad - (y - lo[1]) * k

    poly = " ".join("{:.3f},{:.3f}".format(*tx(x, y)) for x, y in pts)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<clipPath id="face{zm.face}"><polygon points="{poly}"/></clipPath>',
        f'<g clip-path="url(#face{zm.face})" shape-rendering="crispEdges">',
    ]
    cell = zm.spacing * k
    for s in zm.samples:
        cx, cy = tx(*s.xy)
        out.append(
            f'<rect x="{cx - cell / 2:.3f}" y="{cy - cell / 2:.3f}" width="{cell:.3f}" height="{cell:.3f}" '
            f'fill="{label_color(s.label)}"><title>{s.label}</title></rect>'
        )
    out.append("</g>")
    for line in gamma_polylines(zm):
        d = " ".join("{:.3f},{:.3f}".format(*tx(x, y)) for x, y in line)
        out.append(f'<polyline points="{d}" fill="none" stroke="#000000" stroke-width="1.5"/>')
    out.append(f'<polygon points="{poly}" fill="none" stroke="#333333" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
