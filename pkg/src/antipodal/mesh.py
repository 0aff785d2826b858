"""Convex polyhedral surfaces: loading, validation and indexing.

A :class:`Polyhedron` is immutable once built.  Every face carries a local
orthonormal 2D frame (origin at its first vertex, x axis along its first
edge, outward normal as z), and every edge carries the planar isometries
that unfold one of its faces onto the plane of the other.  The unfolding and
geodesic modules only ever work in these face frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AntipodalError
from .unfold import PlanarIsometry

TWO_PI = 2.0 * math.pi

# relative to the diameter
PLANAR_TOL = 1e-9
CONVEX_TOL = 1e-9
ON_BOUNDARY_TOL = 1e-12
# relative to the squared diameter
AREA_TOL = 1e-12


class ParseError(AntipodalError):
    pass


class NotClosed(AntipodalError):
    pass


class NotConvex(AntipodalError):
    pass


class NonPlanarFace(NotConvex):
    pass


class DegenerateFace(AntipodalError):
    pass


class InvalidPoint(AntipodalError):
    pass


class Edge(NamedTuple):
    """An undirected edge; ``a -> b`` is counter-clockwise in ``left``."""

    left: int
    right: int
    a: int
    b: int


class FaceEdge(NamedTuple):
    """Edge ``i`` of a face, from local vertex ``i`` to ``i + 1``, in face coordinates."""

    edge: int
    ax: float
    ay: float
    bx: float
    by: float
    neighbor: int
    to_neighbor: PlanarIsometry


@dataclass(frozen=True)
class SurfacePoint:
    """A point of the surface: a face id and weights over that face's vertices.

    Use :meth:`Polyhedron.point` (or the other constructors on the polyhedron)
    to obtain the canonical representative; two canonical points are equal
    exactly when they are the same point of the surface.
    """

    face: int
    bary: tuple[float, ...]


class Polyhedron:
    """Closed convex polyhedral surface.

    :param vertices: (V, 3) coordinates; input order is preserved.
    :param faces: vertex index lists.  Faces are re-oriented counter-clockwise
        as seen from outside if necessary.
    """

    def __init__(self, vertices, faces: Sequence[Sequence[int]], name: str = ""):
        verts = np.array(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) < 4:
            raise ParseError("need at least 4 vertices with 3 coordinates")
        if not np.all(np.isfinite(verts)):
            raise ParseError("non-finite vertex coordinate")
        nv = len(verts)
        face_list = []
        for f in faces:
            f = [int(i) for i in f]
            if len(f) < 3:
                raise ParseError("face with fewer than 3 vertices")
            if min(f) < 0 or max(f) >= nv:
                raise ParseError(f"vertex index out of range in face {f}")
            if len(set(f)) != len(f):
                raise ParseError(f"repeated vertex in face {f}")
            face_list.append(f)
        if len(face_list) < 4:
            raise NotClosed("fewer than 4 faces")

        self.name = name
        diff = verts[:, None, :] - verts[None, :, :]
        self.diameter = float(np.sqrt((diff ** 2).sum(-1).max()))
        diam = self.diameter
        centroid = verts.mean(axis=0)

        oriented = []
        normals = []
        for fi, f in enumerate(face_list):
            pts = verts[f]
            n = _newell_normal(pts)
            area = 0.5 * float(np.linalg.norm(n))
            if area < AREA_TOL * diam * diam:
                raise DegenerateFace(f"face {fi} has area {area:.3e}")
            n = n / (2.0 * area)
            side = float(np.dot(n, pts.mean(axis=0) - centroid))
            if abs(side) <= CONVEX_TOL * diam:
                raise NotConvex(f"face {fi} passes through the centroid")
            if side < 0:
                f = f[::-1]
                n = -n
            oriented.append(tuple(f))
            normals.append(n)
        self.faces: tuple[tuple[int, ...], ...] = tuple(oriented)
        self.normals = np.array(normals)

        used = set()
        for f in self.faces:
            used.update(f)
        if len(used) != nv:
            raise NotClosed("vertex not used by any face")

        self._build_edges()
        V, E, F = nv, len(self.edges), len(self.faces)
        if V - E + F != 2:
            raise NotClosed(f"Euler characteristic {V - E + F} != 2")

        for fi, f in enumerate(self.faces):
            off = (verts[list(f)] - verts[f[0]]) @ self.normals[fi]
            if np.abs(off).max() > PLANAR_TOL * diam:
                raise NonPlanarFace(f"face {fi} is not planar")
            # every vertex of the solid lies behind every face plane
            height = (verts - verts[f[0]]) @ self.normals[fi]
            if height.max() > CONVEX_TOL * diam:
                raise NotConvex(f"vertex {int(height.argmax())} lies outside the plane of face {fi}")

        verts.setflags(write=False)
        self.vertices = verts
        self._build_frames()
        self._build_angles()

        self.vertex_faces: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(fi for fi, f in enumerate(self.faces) if v in f)) for v in range(nv)
        )

    # -- construction helpers -------------------------------------------------

    def _build_edges(self):
        table: dict[tuple[int, int], list] = {}
        order: list[tuple[int, int]] = []
        for fi, f in enumerate(self.faces):
            n = len(f)
            for i in range(n):
                a, b = f[i], f[(i + 1) % n]
                key = (min(a, b), max(a, b))
                if key not in table:
                    table[key] = []
                    order.append(key)
                table[key].append((fi, a, b))
        edges = []
        face_edge_ids = [[None] * len(f) for f in self.faces]
        for eid, key in enumerate(order):
            uses = table[key]
            if len(uses) != 2:
                raise NotClosed(f"edge {key} bounds {len(uses)} face(s)")
            (f0, a0, b0), (f1, a1, b1) = uses
            if (a0, b0) != (b1, a1):
                raise NotClosed(f"faces {f0} and {f1} are inconsistently oriented")
            edges.append(Edge(f0, f1, a0, b0))
            for fi in (f0, f1):
                face = self.faces[fi]
                n = len(face)
                for i in range(n):
                    if (min(face[i], face[(i + 1) % n]), max(face[i], face[(i + 1) % n])) == key:
                        face_edge_ids[fi][i] = eid
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.face_edge_ids: tuple[tuple[int, ...], ...] = tuple(tuple(ids) for ids in face_edge_ids)

    def _build_frames(self):
        verts = self.vertices
        origins, exs, eys, local = [], [], [], []
        for fi, f in enumerate(self.faces):
            o = verts[f[0]]
            ex = verts[f[1]] - o
            ex = ex / np.linalg.norm(ex)
            ey = np.cross(self.normals[fi], ex)
            origins.append(o)
            exs.append(ex)
            eys.append(ey)
            rel = verts[list(f)] - o
            local.append(tuple((float(r @ ex), float(r @ ey)) for r in rel))
        self.frame_origin = np.array(origins)
        self.frame_x = np.array(exs)
        self.frame_y = np.array(eys)
        self.local2d: tuple[tuple[tuple[float, float], ...], ...] = tuple(local)

        face_edges = []
        for fi, f in enumerate(self.faces):
            n = len(f)
            row = []
            for i in range(n):
                eid = self.face_edge_ids[fi][i]
                e = self.edges[eid]
                g = e.right if e.left == fi else e.left
                a2, b2 = self.local2d[fi][i], self.local2d[fi][(i + 1) % n]
                ga = self.local2d[g][self.faces[g].index(f[i])]
                gb = self.local2d[g][self.faces[g].index(f[(i + 1) % n])]
                row.append(FaceEdge(eid, a2[0], a2[1], b2[0], b2[1], g, _match(a2, b2, ga, gb)))
            face_edges.append(tuple(row))
        self.face_edges: tuple[tuple[FaceEdge, ...], ...] = tuple(face_edges)

    def _build_angles(self):
        total = np.zeros(len(self.vertices))
        for fi, f in enumerate(self.faces):
            pts = self.local2d[fi]
            n = len(f)
            for i in range(n):
                p, q, r = pts[i - 1], pts[i], pts[(i + 1) % n]
                u = (p[0] - q[0], p[1] - q[1])
                w = (r[0] - q[0], r[1] - q[1])
                total[f[i]] += math.atan2(abs(u[0] * w[1] - u[1] * w[0]), u[0] * w[0] + u[1] * w[1])
        deficit = TWO_PI - total
        if deficit.min() < -CONVEX_TOL:
            raise NotConvex(f"vertex {int(deficit.argmin())} has negative curvature")
        if abs(deficit.sum() - 2 * TWO_PI) > 1e-9:
            raise NotConvex(f"curvature sum {deficit.sum():.12g} differs from 4*pi")
        total.setflags(write=False)
        self.total_angle = total

    # -- combinatorics ----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def curvature(self, v: int) -> float:
        return vertex_curvature(self, v)

    def face_area(self, f: int) -> float:
        pts = self.local2d[f]
        return 0.5 * abs(sum(pts[i - 1][0] * pts[i][1] - pts[i][0] * pts[i - 1][1] for i in range(len(pts))))

    # -- coordinates ------------------------------------------------------------

    def to_local(self, f: int, xyz) -> tuple[float, float]:
        r = np.asarray(xyz, dtype=float) - self.frame_origin[f]
        return float(r @ self.frame_x[f]), float(r @ self.frame_y[f])

    def to_3d(self, f: int, xy) -> np.ndarray:
        return self.frame_origin[f] + xy[0] * self.frame_x[f] + xy[1] * self.frame_y[f]

    def xyz(self, p: SurfacePoint) -> np.ndarray:
        return np.asarray(p.bary) @ self.vertices[list(self.faces[p.face])]

    def local(self, p: SurfacePoint, face: int | None = None) -> tuple[float, float]:
        """Coordinates of ``p`` in the frame of ``face`` (default: its own face)."""
        if face is None or face == p.face:
            pts = self.local2d[p.face]
            return (
                sum(w * q[0] for w, q in zip(p.bary, pts)),
                sum(w * q[1] for w, q in zip(p.bary, pts)),
            )
        return self.to_local(face, self.xyz(p))

    def boundary_distance(self, f: int, xy) -> float:
        """Signed distance from ``xy`` to the boundary of face ``f`` (positive inside)."""
        best = math.inf
        for fe in self.face_edges[f]:
            dx, dy = fe.bx - fe.ax, fe.by - fe.ay
            d = (dx * (xy[1] - fe.ay) - dy * (xy[0] - fe.ax)) / math.hypot(dx, dy)
            best = min(best, d)
        return best

    def faces_containing(self, p: SurfacePoint) -> tuple[int, ...]:
        """All faces whose closure contains ``p``, sorted."""
        tol = ON_BOUNDARY_TOL * self.diameter
        xy = self.local(p)
        found = {p.face}
        for fe in self.face_edges[p.face]:
            dx, dy = fe.bx - fe.ax, fe.by - fe.ay
            length = math.hypot(dx, dy)
            if abs(dx * (xy[1] - fe.ay) - dy * (xy[0] - fe.ax)) / length <= tol:
                found.add(fe.neighbor)
        for i, v in enumerate(self.faces[p.face]):
            q = self.local2d[p.face][i]
            if math.hypot(xy[0] - q[0], xy[1] - q[1]) <= tol:
                found.update(self.vertex_faces[v])
        return tuple(sorted(found))

    def point(self, face: int, bary: Sequence[float]) -> SurfacePoint:
        """Canonical surface point from weights over the vertices of ``face``."""
        if not 0 <= face < self.n_faces:
            raise InvalidPoint(f"no face {face}")
        w = np.asarray(bary, dtype=float)
        if w.shape != (len(self.faces[face]),):
            raise InvalidPoint(f"face {face} needs {len(self.faces[face])} weights")
        if w.min() < -1e-12 or abs(w.sum() - 1.0) > 1e-9:
            raise InvalidPoint("weights must be non-negative and sum to 1")
        pts = self.local2d[face]
        xy = (float(w @ [q[0] for q in pts]), float(w @ [q[1] for q in pts]))
        return self.point_from_local(face, xy)

    def point_from_local(self, face: int, xy) -> SurfacePoint:
        """Canonical surface point from coordinates in the frame of ``face``."""
        tol = ON_BOUNDARY_TOL * self.diameter
        if self.boundary_distance(face, xy) < -1e-9 * self.diameter:
            raise InvalidPoint(f"point {xy} is outside face {face}")
        probe = SurfacePoint(face, _fan_bary(self.local2d[face], xy))
        owners = self.faces_containing(probe)
        canon = owners[0]
        if canon != face:
            xy = self.to_local(canon, self.to_3d(face, xy))
        pts = self.local2d[canon]
        for i, q in enumerate(pts):
            if math.hypot(xy[0] - q[0], xy[1] - q[1]) <= tol:
                w = [0.0] * len(pts)
                w[i] = 1.0
                return SurfacePoint(canon, tuple(w))
        return SurfacePoint(canon, _fan_bary(pts, xy))

    def vertex_point(self, v: int) -> SurfacePoint:
        f = self.vertex_faces[v][0]
        w = [0.0] * len(self.faces[f])
        w[self.faces[f].index(v)] = 1.0
        return SurfacePoint(f, tuple(w))

    def face_center(self, f: int) -> SurfacePoint:
        n = len(self.faces[f])
        return self.point(f, [1.0 / n] * n)

    def vertex_of(self, p: SurfacePoint) -> int | None:
        """Vertex id if ``p`` is a vertex, else None."""
        for i, w in enumerate(p.bary):
            if w == 1.0:
                return self.faces[p.face][i]
        return None

    def same_point(self, p: SurfacePoint, q: SurfacePoint, tol: float = 1e-9) -> bool:
        return float(np.linalg.norm(self.xyz(p) - self.xyz(q))) <= tol * self.diameter

    def fan_triangles(self) -> list[tuple[int, tuple[float, float], tuple[float, float], tuple[float, float]]]:
        """(face, a, b, c) local-coordinate triangles of the fan from each face's first vertex."""
        out = []
        for fi, pts in enumerate(self.local2d):
            for k in range(1, len(pts) - 1):
                out.append((fi, pts[0], pts[k], pts[k + 1]))
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [[float(c) for c in v] for v in self.vertices],
            "faces": [list(f) for f in self.faces],
            "deficits": [float(TWO_PI - a) for a in self.total_angle],
        }

    def __repr__(self):
        return f"Polyhedron({self.name!r}, V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"


def vertex_curvature(P: Polyhedron, v: int) -> float:
    """Angle deficit at ``v``: 2*pi minus the sum of incident face angles."""
    if not 0 <= v < P.n_vertices:
        raise IndexError(f"no vertex {v}")
    return float(TWO_PI - P.total_angle[v])


def _newell_normal(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    return np.array(
        [
            ((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])).sum(),
            ((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])).sum(),
            ((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])).sum(),
        ]
    )


def _match(a, b, ga, gb) -> PlanarIsometry:
    # direct isometry sending a -> ga and b -> gb (|ab| == |ga gb|)
    ang = math.atan2(gb[1] - ga[1], gb[0] - ga[0]) - math.atan2(b[1] - a[1], b[0] - a[0])
    c, s = math.cos(ang), math.sin(ang)
    return PlanarIsometry(c, s, ga[0] - (c * a[0] - s * a[1]), ga[1] - (s * a[0] + c * a[1]))


def _tri_bary(a, b, c, p):
    det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
    l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det
    l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det
    return 1.0 - l1 - l2, l1, l2


def _fan_bary(pts, xy) -> tuple[float, ...]:
    n = len(pts)
    best, best_k, best_w = -math.inf, 1, None
    for k in range(1, n - 1):
        w = _tri_bary(pts[0], pts[k], pts[k + 1], xy)
        if min(w) > best:
            best, best_k, best_w = min(w), k, w
        if min(w) >= 0:
            break
    w = [max(x, 0.0) for x in best_w]
    total = sum(w)
    out = [0.0] * n
    out[0], out[best_k], out[best_k + 1] = w[0] / total, w[1] / total, w[2] / total
    return tuple(out)


# -- OFF input/output -----------------------------------------------------------


def load_off(text: str, name: str = "") -> Polyhedron:
    """Parse an ASCII OFF document into a validated :class:`Polyhedron`."""
    tokens_by_line = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens_by_line.append(line.split())
    if not tokens_by_line:
        raise ParseError("empty document")
    head = tokens_by_line[0]
    if head[0].upper().endswith("OFF"):
        if head[0].upper() != "OFF":
            raise ParseError(f"unsupported OFF variant {head[0]!r}")
        rest = head[1:]
        body = tokens_by_line[1:]
        if not rest:
            if not body:
                raise ParseError("missing counts line")
            rest, body = body[0], body[1:]
    else:
        rest, body = head, tokens_by_line[1:]
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (IndexError, ValueError):
        raise ParseError(f"bad counts line {' '.join(rest)!r}") from None
    if nv < 0 or nf < 0:
        raise ParseError("negative counts")
    if len(body) < nv + nf:
        raise ParseError(f"expected {nv} vertex and {nf} face lines, found {len(body)} lines")
    try:
        verts = [[float(t) for t in body[i][:3]] for i in range(nv)]
    except ValueError as err:
        raise ParseError(f"bad vertex line: {err}") from None
    if any(len(v) != 3 for v in verts):
        raise ParseError("vertex line with fewer than 3 coordinates")
    faces = []
    for line in body[nv:nv + nf]:
        try:
            k = int(line[0])
            idx = [int(t) for t in line[1:1 + k]]
        except ValueError:
            raise ParseError(f"bad face line {' '.join(line)!r}") from None
        if k < 3 or len(idx) != k:
            raise ParseError(f"bad face line {' '.join(line)!r}")
        faces.append(idx)
    return Polyhedron(verts, faces, name=name)


def read_off(path) -> Polyhedron:
    from pathlib import Path

    path = Path(path)
    return load_off(path.read_text(), name=path.stem)


def dump_off(P: Polyhedron) -> str:
    lines = ["OFF", f"{P.n_vertices} {P.n_faces} {P.n_edges}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in P.vertices]
    lines += [" ".join(str(i) for i in (len(f), *f)) for f in P.faces]
    return "\n".join(lines) + "\n"


# -- standard shapes ------------------------------------------------------------


def cube(side: float = 1.0) -> Polyhedron:
    verts = [(x, y, z) for z in (0.0, side) for y in (0.0, side) for x in (0.0, side)]
    faces = [
        (0, 2, 3, 1),  # z = 0
        (4, 5, 7, 6),  # z = side
        (0, 1, 5, 4),  # y = 0
        (2, 6, 7, 3),  # y = side
        (0, 4, 6, 2),  # x = 0
        (1, 3, 7, 5),  # x = side
    ]
    return Polyhedron(verts, faces, name="cube")


def regular_tetrahedron(edge: float = 1.0) -> Polyhedron:
    k = edge / (2.0 * math.sqrt(2.0))
    verts = [(k, k, k), (k, -k, -k), (-k, k, -k), (-k, -k, k)]
    faces = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    return Polyhedron(verts, faces, name="tetrahedron")


def random_convex(n: int = 12, seed: int = 0) -> Polyhedron:
    """Convex hull of ``n`` seeded random points on the unit sphere.

    Points on a sphere are all extreme, so the hull has exactly ``n`` vertices.
    """
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    hull = ConvexHull(pts)
    return Polyhedron(pts, hull.simplices.tolist(), name=f"random{n}_s{seed}")
