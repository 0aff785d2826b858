"""Farthest points (antipodes) of a surface point.

The wavefront from the source is unfolded into every face: each face receives
the images of the source that can see part of it through their chain.  The
distance from the source to a point of the face is the smallest distance to an
image that sees it.  A farthest point is either a vertex or a point at equal
distance from three images, so the maximum is taken over the vertices and
over the circumcenters of image triples, all evaluated exactly.  A coarse grid
of the same distance field is kept as a cross-check of the maximum.
"""

from __future__ import annotations

import heapq
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AntipodalError
from .geodesic import (
    CLEARANCE,
    MAX_CHAINS,
    Geodesic,
    SearchBudgetExceeded,
    _children,
    _Node,
    _roots,
    graph_distances,
    shortest_paths,
)
from .mesh import Polyhedron, SurfacePoint

BAND = 1e-7  # co-antipode band, relative to the radius
SINGLE_TOL = 1e-5  # antipode-set spread, relative to the diameter
LABEL_TIE = 1e-6  # two candidates within this relative gap make a Γ sample
GRID = 32


class Collinear(AntipodalError):
    pass


def circumcenter(a, b, c) -> tuple[float, float]:
    """Center of the circle through three planar points."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    scale = max(abs(bx - ax), abs(by - ay), abs(cx - ax), abs(cy - ay))
    d = 2.0 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    if abs(d) <= 2e-12 * scale * scale:
        raise Collinear(f"points {a}, {b}, {c} are collinear")
    b2 = (bx - ax) ** 2 + (by - ay) ** 2
    c2 = (cx - ax) ** 2 + (cy - ay) ** 2
    ux = ((cy - ay) * b2 - (by - ay) * c2) / d
    uy = ((bx - ax) * c2 - (cx - ax) * b2) / d
    return ax + ux, ay + uy


@dataclass(frozen=True)
class VertexKind:
    vertex: int


@dataclass(frozen=True)
class CircumcenterKind:
    chains: tuple[tuple[int, ...], ...]


AntipodeKind = Union[VertexKind, CircumcenterKind]


@dataclass(frozen=True)
class Candidate:
    """A local candidate for the farthest point, with its distance to the source."""

    value: float
    face: int
    xy: tuple[float, float]
    kind: AntipodeKind
    ties: int = 3  # images at (numerically) equal distance, circumcenters only

    @property
    def label(self):
        return self.kind


@dataclass
class _FaceImages:
    nodes: list
    img: np.ndarray
    r0: np.ndarray
    r1: np.ndarray
    root: np.ndarray


class SourceField:
    """Every source image that matters for the distance function, face by face."""

    def __init__(self, P: Polyhedron, p: SurfacePoint, max_chains: int = MAX_CHAINS):
        self.P = P
        self.source = p
        diam = P.diameter
        self.vis_tol = 1e-12 * diam
        clearance = CLEARANCE * diam
        on_edge = 1e-12 * diam

        counter = itertools.count()
        heap = [(0.0, next(counter), r) for r in _roots(P, p)]
        per_face: list[list[_Node]] = [[] for _ in P.faces]
        explored = 0

        def grow(bound):
            nonlocal explored
            while heap and heap[0][0] <= bound:
                _, _, node = heapq.heappop(heap)
                explored += 1
                if explored > max_chains:
                    raise SearchBudgetExceeded(f"explored more than {max_chains} chains")
                per_face[node.face].append(node)
                for child in _children(P, node, clearance, on_edge):
                    heapq.heappush(heap, (child.lb, next(counter), child))

        ub_vertices, _ = graph_distances(P, p)
        bound = float(ub_vertices.max()) * (1 + 1e-9)
        grow(bound)
        self._per_face = per_face
        self._faces = [None] * P.n_faces
        self.vertex_distance = self._vertex_distances()
        self.face_bound = self._face_bounds()
        final = float(self.face_bound.max())
        if final > bound:
            grow(final)
            self._faces = [None] * P.n_faces
        self.explored = explored

    # -- images --------------------------------------------------------------

    def images(self, f: int) -> _FaceImages:
        cached = self._faces[f]
        if cached is not None:
            return cached
        nodes = self._per_face[f]
        bound = getattr(self, "face_bound", None)
        if bound is not None:
            nodes = [n for n in nodes if n.lb <= bound[f] * (1 + 1e-9)]
        img = np.array([(n.ix, n.iy) for n in nodes], dtype=float).reshape(-1, 2)
        r0 = np.zeros_like(img)
        r1 = np.zeros_like(img)
        root = np.zeros(len(nodes), dtype=bool)
        for k, n in enumerate(nodes):
            if n.w is None:
                root[k] = True
                continue
            x0, y0, x1, y1 = n.w
            a = np.array([x0 - n.ix, y0 - n.iy])
            b = np.array([x1 - n.ix, y1 - n.iy])
            r0[k] = a / np.linalg.norm(a)
            r1[k] = b / np.linalg.norm(b)
        out = _FaceImages(nodes, img, r0, r1, root)
        self._faces[f] = out
        return out

    def visibility(self, f: int, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(m, k) visibility mask and distances from points of face ``f`` to its images."""
        fi = self.images(f)
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        dx = pts[:, None, 0] - fi.img[None, :, 0]
        dy = pts[:, None, 1] - fi.img[None, :, 1]
        c0 = fi.r0[None, :, 0] * dy - fi.r0[None, :, 1] * dx
        c1 = dx * fi.r1[None, :, 1] - dy * fi.r1[None, :, 0]
        vis = fi.root[None, :] | ((c0 >= -self.vis_tol) & (c1 >= -self.vis_tol))
        return vis, np.hypot(dx, dy)

    def distance_in_face(self, f: int, pts) -> np.ndarray:
        vis, dist = self.visibility(f, pts)
        if vis.shape[1] == 0:
            return np.full(vis.shape[0], np.inf)
        return np.where(vis, dist, np.inf).min(axis=1)

    def distance_to(self, q: SurfacePoint) -> float:
        P = self.P
        xyz = P.xyz(q)
        best = math.inf
        for f in P.faces_containing(q):
            xy = P.local(q) if f == q.face else P.to_local(f, xyz)
            best = min(best, float(self.distance_in_face(f, [xy])[0]))
        return best

    # -- bounds ----------------------------------------------------------------

    def _vertex_distances(self) -> np.ndarray:
        P = self.P
        out = np.full(P.n_vertices, np.inf)
        for f, face in enumerate(P.faces):
            d = self.distance_in_face(f, np.array(P.local2d[f]))
            for i, v in enumerate(face):
                out[v] = min(out[v], d[i])
        return out

    def _face_bounds(self, n: int = 8) -> np.ndarray:
        # d(p, x) <= min_v (d(p, v) + |x - v|) over the vertices of x's face;
        # that bound is 1-Lipschitz, so a lattice plus its covering radius bounds it
        P = self.P
        out = np.zeros(P.n_faces)
        for f, face in enumerate(P.faces):
            verts = np.array(P.local2d[f])
            pts, cover = _face_lattice(verts, n)
            d = np.sqrt(((pts[:, None, :] - verts[None, :, :]) ** 2).sum(-1))
            g = (d + self.vertex_distance[list(face)][None, :]).min(axis=1)
            out[f] = g.max() + cover
        return out

    # -- candidates --------------------------------------------------------------

    def candidates(self) -> list[Candidate]:
        P = self.P
        diam = P.diameter
        out = []
        for v in range(P.n_vertices):
            f = P.vertex_faces[v][0]
            xy = P.local2d[f][P.faces[f].index(v)]
            out.append(Candidate(float(self.vertex_distance[v]), f, xy, VertexKind(v)))
        inside_tol = 1e-12 * diam
        for f in range(P.n_faces):
            fi = self.images(f)
            k = len(fi.nodes)
            if k < 3:
                continue
            tri = np.array(list(itertools.combinations(range(k), 3)))
            a, b, c = fi.img[tri[:, 0]], fi.img[tri[:, 1]], fi.img[tri[:, 2]]
            ab, ac = b - a, c - a
            d = 2.0 * (ab[:, 0] * ac[:, 1] - ac[:, 0] * ab[:, 1])
            scale = np.maximum(np.abs(ab).max(axis=1), np.abs(ac).max(axis=1))
            ok = np.abs(d) > 2e-12 * scale * scale
            if not ok.any():
                continue
            tri, a, ab, ac, d = tri[ok], a[ok], ab[ok], ac[ok], d[ok]
            b2 = (ab ** 2).sum(1)
            c2 = (ac ** 2).sum(1)
            z = a + np.stack([(ac[:, 1] * b2 - ab[:, 1] * c2) / d, (ab[:, 0] * c2 - ac[:, 0] * b2) / d], axis=1)
            r = np.hypot(z[:, 0] - a[:, 0], z[:, 1] - a[:, 1])
            verts = np.array(P.local2d[f])
            keep = (r <= self.face_bound[f] * (1 + 1e-9)) & _inside(verts, z, inside_tol)
            if not keep.any():
                continue
            tri, z, r = tri[keep], z[keep], r[keep]
            vis, dist = self.visibility(f, z)
            rows = np.arange(len(tri))
            seen = vis[rows, tri[:, 0]] & vis[rows, tri[:, 1]] & vis[rows, tri[:, 2]]
            nearest = np.where(vis, dist, np.inf).min(axis=1)
            good = seen & (nearest >= r * (1 - 1e-9))
            ties = (vis & (dist <= r[:, None] * (1 + LABEL_TIE))).sum(axis=1)
            for idx in np.flatnonzero(good):
                chains = tuple(sorted(fi.nodes[j].edges() for j in tri[idx]))
                out.append(
                    Candidate(float(r[idx]), f, (float(z[idx, 0]), float(z[idx, 1])), CircumcenterKind(chains), int(ties[idx]))
                )
        return out

    def grid_maximum(self, n: int = GRID) -> float:
        """Largest distance over a lattice of every face (corners excluded)."""
        best = 0.0
        for f in range(self.P.n_faces):
            verts = np.array(self.P.local2d[f])
            pts, _ = _face_lattice(verts, n, corners=False)
            d = self.distance_in_face(f, pts)
            finite = d[np.isfinite(d)]
            if len(finite):
                best = max(best, float(finite.max()))
        return best


def _inside(verts: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    ok = np.ones(len(pts), dtype=bool)
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        e = b - a
        cr = (e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])) / math.hypot(e[0], e[1])
        ok &= cr >= -tol
    return ok


def _face_lattice(verts: np.ndarray, n: int, corners: bool = True) -> tuple[np.ndarray, float]:
    """Barycentric lattice of step 1/n on each fan triangle; returns points and covering radius."""
    pts = []
    cover = 0.0
    ij = [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]
    if not corners:
        ij = [(i, j) for i, j in ij if (i, j) not in ((0, 0), (n, 0), (0, n))]
    w = np.array([(1 - (i + j) / n, i / n, j / n) for i, j in ij])
    for k in range(1, len(verts) - 1):
        tri = np.array([verts[0], verts[k], verts[k + 1]])
        pts.append(w @ tri)
        longest = max(np.linalg.norm(tri[i] - tri[i - 1]) for i in range(3))
        cover = max(cover, longest / n)
    return np.vstack(pts), cover


@dataclass
class AntipodeResult:
    source: SurfacePoint
    antipodes: list[SurfacePoint]
    radius: float
    kinds: list[AntipodeKind]
    segments: list[list[Geodesic]] = field(default_factory=list)
    candidates: list[Candidate] = field(default_factory=list, repr=False)
    grid_radius: float = 0.0

    @property
    def single_valued(self) -> bool:
        return len(self.antipodes) == 1


def _distinct(P: Polyhedron, cands: list[Candidate]) -> list[tuple[Candidate, SurfacePoint]]:
    # one entry per surface point, preferring vertex candidates, then lower faces
    cands = sorted(cands, key=lambda c: (not isinstance(c.kind, VertexKind), c.face, -c.value))
    out: list[tuple[Candidate, SurfacePoint, np.ndarray]] = []
    tol = 1e-9 * P.diameter
    for c in cands:
        sp = P.vertex_point(c.kind.vertex) if isinstance(c.kind, VertexKind) else P.point_from_local(c.face, c.xy)
        xyz = P.xyz(sp)
        if any(np.linalg.norm(xyz - x) <= tol for _, _, x in out):
            continue
        out.append((c, sp, xyz))
    return [(c, sp) for c, sp, _ in out]


def analyze(P: Polyhedron, p: SurfacePoint, grid: int = GRID, band: float = BAND) -> AntipodeResult:
    """Antipodes, radius and all candidates, without realizing the segments.

    :param grid: per-face lattice size of the sanity check (0 skips it)
    :param band: candidates within this relative gap of the radius are co-antipodes
    """
    fieldp = SourceField(P, p)
    cands = fieldp.candidates()
    radius = max(c.value for c in cands)
    top = [c for c in cands if c.value >= radius * (1 - band)]
    chosen = _distinct(P, top)
    src_xyz = P.xyz(p)
    chosen = [
        (c, sp) for c, sp in chosen if np.linalg.norm(P.xyz(sp) - src_xyz) > 1e-9 * P.diameter
    ]
    chosen.sort(key=lambda t: (-round(t[0].value / radius, 9), t[1].face, t[1].bary))
    grid_radius = fieldp.grid_maximum(grid) if grid else 0.0
    if grid_radius > radius * (1 + 1e-9):
        warnings.warn(f"grid maximum {grid_radius!r} exceeds candidate maximum {radius!r}", RuntimeWarning)
    return AntipodeResult(
        source=p,
        antipodes=[sp for _, sp in chosen],
        radius=radius,
        kinds=[c.kind for c, _ in chosen],
        candidates=cands,
        grid_radius=grid_radius,
    )


def antipodes(
    P: Polyhedron, p: SurfacePoint, with_segments: bool = True, grid: int = GRID, band: float = BAND
) -> AntipodeResult:
    """All farthest points from ``p`` with their realizing segments."""
    res = analyze(P, p, grid=grid, band=band)
    if with_segments:
        res.segments = [shortest_paths(P, p, q) for q in res.antipodes]
    return res


def radius(P: Polyhedron, p: SurfacePoint) -> float:
    return analyze(P, p, grid=0).radius


def antipode_spread(P: Polyhedron, res: AntipodeResult) -> float:
    """Largest intrinsic distance between two antipodes of ``res``."""
    from .geodesic import distance

    best = 0.0
    pts = res.antipodes
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, distance(P, pts[i], pts[j]))
    return best
