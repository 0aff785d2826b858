"""All shortest segments between two surface points.

The search unfolds chains of faces into the plane of the source face and keeps,
for each chain, the *window*: the part of the last crossed edge that a straight
line from the source image can reach through every earlier edge.  A chain is
dropped as soon as its window is empty, and chains are explored best-first by
the distance from the source image to the window, which never decreases along
a chain.

Two facts about convex polyhedra keep the search finite and exact: a shortest
path never passes through a vertex (windows are shrunk by a small clearance
away from edge endpoints) and never meets a face twice (chains are simple).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalError
from .mesh import Polyhedron, SurfacePoint
from .unfold import UnfoldChain, chain_from_edges

DEFAULT_TOL = 1e-7
CLEARANCE = 1e-9  # relative to the diameter
MAX_CHAINS = 1_000_000


class SearchBudgetExceeded(AntipodalError):
    pass


class SamePoint(AntipodalError):
    pass


@dataclass(frozen=True)
class Geodesic:
    chain: UnfoldChain
    length: float
    planar: tuple[tuple[float, float], tuple[float, float]]
    points: tuple[SurfacePoint, ...]

    @property
    def signature(self) -> tuple[int, ...]:
        return self.chain.edges


class _Node:
    """One unfolding chain during the search, expressed in its last face's frame."""

    __slots__ = ("face", "ix", "iy", "w", "edge", "parent", "visited", "lb", "depth")

    def __init__(self, face, ix, iy, w, edge, parent, visited, lb, depth):
        self.face = face
        self.ix = ix  # source image
        self.iy = iy
        self.w = w  # window (x0, y0, x1, y1) on the entry edge, None for a root
        self.edge = edge
        self.parent = parent
        self.visited = visited  # bitmask of faces in the chain
        self.lb = lb
        self.depth = depth

    def edges(self) -> tuple[int, ...]:
        out = []
        node = self
        while node.parent is not None:
            out.append(node.edge)
            node = node.parent
        return tuple(reversed(out))

    def root(self) -> _Node:
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def sees(self, x: float, y: float, tol: float) -> bool:
        """Whether the straight line from the source image to (x, y) passes the window."""
        if self.w is None:
            return True
        x0, y0, x1, y1 = self.w
        ix, iy = self.ix, self.iy
        r0x, r0y, r1x, r1y = x0 - ix, y0 - iy, x1 - ix, y1 - iy
        dx, dy = x - ix, y - iy
        n0, n1 = math.hypot(r0x, r0y), math.hypot(r1x, r1y)
        return r0x * dy - r0y * dx >= -tol * n0 and dx * r1y - dy * r1x >= -tol * n1


def _roots(P: Polyhedron, p: SurfacePoint) -> list[_Node]:
    faces = P.faces_containing(p)
    mask = 0
    for f in faces:
        mask |= 1 << f
    xyz = P.xyz(p)
    roots = []
    for f in faces:
        x, y = P.local(p) if f == p.face else P.to_local(f, xyz)
        roots.append(_Node(f, x, y, None, None, None, mask, 0.0, 0))
    return roots


def _clip(a, b, lo, hi):
    # restrict s in [lo, hi] to a + b s >= 0
    if b > 0.0:
        lo = max(lo, -a / b)
    elif b < 0.0:
        hi = min(hi, -a / b)
    elif a < 0.0:
        return 1.0, 0.0
    return lo, hi


def _children(P: Polyhedron, node: _Node, clearance: float, on_edge_tol: float) -> list[_Node]:
    out = []
    ix, iy = node.ix, node.iy
    w = node.w
    if w is not None:
        r0x, r0y, r1x, r1y = w[0] - ix, w[1] - iy, w[2] - ix, w[3] - iy
    for fe in P.face_edges[node.face]:
        g = fe.neighbor
        if fe.edge == node.edge or (node.visited >> g) & 1:
            continue
        dx, dy = fe.bx - fe.ax, fe.by - fe.ay
        length = math.hypot(dx, dy)
        qx, qy = fe.ax - ix, fe.ay - iy
        lo = clearance / length
        hi = 1.0 - lo
        if w is None:
            if abs(dx * qy - dy * qx) <= on_edge_tol * length:
                continue
        else:
            lo, hi = _clip(r0x * qy - r0y * qx, r0x * dy - r0y * dx, lo, hi)
            lo, hi = _clip(qx * r1y - qy * r1x, dx * r1y - dy * r1x, lo, hi)
        if hi <= lo:
            continue
        ax, ay = fe.ax + lo * dx, fe.ay + lo * dy
        bx, by = fe.ax + hi * dx, fe.ay + hi * dy
        ux, uy, vx, vy = ax - ix, ay - iy, bx - ix, by - iy
        cr = ux * vy - uy * vx
        if cr < 0.0:
            ax, ay, bx, by = bx, by, ax, ay
            ux, uy, vx, vy = vx, vy, ux, uy
            cr = -cr
        if cr <= 1e-15 * math.hypot(ux, uy) * math.hypot(vx, vy):
            continue
        # distance from the image to the window segment
        sx, sy = bx - ax, by - ay
        t = -(ux * sx + uy * sy) / (sx * sx + sy * sy)
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
        lb = math.hypot(ux + t * sx, uy + t * sy)
        if lb < node.lb:
            lb = node.lb
        h = fe.to_neighbor
        c, s, tx, ty = h.c, h.s, h.tx, h.ty
        out.append(
            _Node(
                g,
                c * ix - s * iy + tx,
                s * ix + c * iy + ty,
                (c * ax - s * ay + tx, s * ax + c * ay + ty, c * bx - s * by + tx, s * bx + c * by + ty),
                fe.edge,
                node,
                node.visited | (1 << g),
                lb,
                node.depth + 1,
            )
        )
    return out


# -- upper bound -------------------------------------------------------------------


def graph_distances(P: Polyhedron, p: SurfacePoint, targets=()) -> tuple[np.ndarray, list[float]]:
    """Dijkstra over {vertices, edge midpoints, p, targets} with straight in-face hops.

    Returns upper bounds on the intrinsic distance from ``p`` to every vertex
    and to every target point.
    """
    nv, ne = P.n_vertices, P.n_edges
    pts = [P.vertices[v] for v in range(nv)]
    pts += [(P.vertices[e.a] + P.vertices[e.b]) / 2 for e in P.edges]
    members: list[list[int]] = []
    for fi, f in enumerate(P.faces):
        members.append(list(f) + [nv + e for e in P.face_edge_ids[fi]])
    extra = [p, *targets]
    for k, sp in enumerate(extra):
        idx = nv + ne + k
        pts.append(P.xyz(sp))
        for f in P.faces_containing(sp):
            members[f].append(idx)
    pts = np.array(pts)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(len(pts))]
    for group in members:
        sub = pts[group]
        d = np.sqrt(((sub[:, None, :] - sub[None, :, :]) ** 2).sum(-1))
        for i, a in enumerate(group):
            for j, b in enumerate(group):
                if i != j:
                    adj[a].append((b, float(d[i, j])))
    dist = [math.inf] * len(pts)
    src = nv + ne
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d0, a = heapq.heappop(heap)
        if d0 > dist[a]:
            continue
        for b, w in adj[a]:
            if d0 + w < dist[b]:
                dist[b] = d0 + w
                heapq.heappush(heap, (d0 + w, b))
    return np.array(dist[:nv]), dist[nv + ne + 1:]


def edge_graph_upper_bound(P: Polyhedron, p: SurfacePoint, q: SurfacePoint) -> float:
    """Length of a shortest path through vertices and edge midpoints; >= d(p, q)."""
    if P.same_point(p, q, 1e-12):
        raise SamePoint("p and q coincide")
    return graph_distances(P, p, (q,))[1][0]


# -- exact search --------------------------------------------------------------------


def _finish(P: Polyhedron, p: SurfacePoint, q: SurfacePoint, found, tol) -> list[Geodesic]:
    if not found:
        return []
    best = min(length for length, _, _ in found)
    keep = [(length, node, qxy) for length, node, qxy in found if length <= best * (1.0 + tol)]
    out = []
    seen_flat = False
    for length, node, qxy in sorted(keep, key=lambda t: (t[1].depth, t[1].root().face)):
        if node.parent is None:
            # the in-face segment is the same for every face holding both points
            if seen_flat:
                continue
            seen_flat = True
        out.append(_build(P, p, q, node, qxy, length))
    out.sort(key=lambda g: (float(f"{g.length:.9e}"), g.chain.faces))
    return out


def _build(P: Polyhedron, p, q, node: _Node, qxy, length) -> Geodesic:
    root = node.root()
    chain = chain_from_edges(P, root.face, node.edges())
    start = (root.ix, root.iy)
    end = chain.cumulative(qxy)
    points = [p]
    ex, ey = end[0] - start[0], end[1] - start[1]
    for k, (a, b) in enumerate(chain.corridor):
        dx, dy = b[0] - a[0], b[1] - a[1]
        den = ex * dy - ey * dx
        s = ((a[0] - start[0]) * ey - (a[1] - start[1]) * ex) / den
        face = chain.faces[k]
        fe = next(fe for fe in P.face_edges[face] if fe.edge == chain.edges[k])
        local = (fe.ax + s * (fe.bx - fe.ax), fe.ay + s * (fe.by - fe.ay))
        points.append(P.point_from_local(face, local))
    points.append(q)
    return Geodesic(chain, length, (start, end), tuple(points))


def shortest_paths(
    P: Polyhedron,
    p: SurfacePoint,
    q: SurfacePoint,
    tol: float = DEFAULT_TOL,
    max_chains: int = MAX_CHAINS,
) -> list[Geodesic]:
    """Every segment from ``p`` to ``q`` whose length is within ``(1 + tol)`` of the minimum.

    Sorted by length, then by face sequence.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    diam = P.diameter
    clearance = CLEARANCE * diam
    on_edge = 1e-12 * diam
    upper = edge_graph_upper_bound(P, p, q)
    q_faces = P.faces_containing(q)
    q_xyz = P.xyz(q)
    q_local = {f: (P.local(q) if f == q.face else P.to_local(f, q_xyz)) for f in q_faces}

    counter = itertools.count()
    heap = [(0.0, next(counter), r) for r in _roots(P, p)]
    heapq.heapify(heap)
    found = []
    best = math.inf
    explored = 0
    while heap:
        lb, _, node = heapq.heappop(heap)
        bound = min(best, upper) * (1.0 + tol) + 1e-15 * diam
        if lb > bound:
            break
        explored += 1
        if explored > max_chains:
            raise SearchBudgetExceeded(f"explored more than {max_chains} chains")
        qxy = q_local.get(node.face)
        if qxy is not None and _reaches(P, node, qxy, on_edge):
            length = math.hypot(qxy[0] - node.ix, qxy[1] - node.iy)
            found.append((length, node, qxy))
            best = min(best, length)
            bound = min(best, upper) * (1.0 + tol) + 1e-15 * diam
        for child in _children(P, node, clearance, on_edge):
            if child.lb <= bound:
                heapq.heappush(heap, (child.lb, next(counter), child))
    return _finish(P, p, q, found, tol)


def _reaches(P: Polyhedron, node: _Node, qxy, on_edge: float) -> bool:
    if node.w is None:
        return True
    x0, y0, x1, y1 = node.w
    # the entry crossing must come strictly before q
    dx, dy = x1 - x0, y1 - y0
    if abs(dx * (qxy[1] - y0) - dy * (qxy[0] - x0)) <= on_edge * math.hypot(dx, dy):
        return False
    return node.sees(qxy[0], qxy[1], 1e-12)


def distance(P: Polyhedron, p: SurfacePoint, q: SurfacePoint, tol: float = DEFAULT_TOL) -> float:
    """Intrinsic distance; zero when ``p`` and ``q`` coincide."""
    if P.same_point(p, q, 1e-12):
        return 0.0
    return shortest_paths(P, p, q, tol)[0].length


# -- brute-force oracle ------------------------------------------------------------


def _rodrigues(axis: np.ndarray, angle: float) -> np.ndarray:
    k = axis / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def oracle_enumerate(
    P: Polyhedron, p: SurfacePoint, q: SurfacePoint, max_faces: int, tol: float = DEFAULT_TOL
) -> list[Geodesic]:
    """Exhaustive search over all simple face chains of at most ``max_faces`` faces.

    Each chain is flattened with 3D hinge rotations about its shared edges and
    the straight segment is checked edge by edge; nothing else is pruned.  Meant
    as a test oracle, slow by design.
    """
    if max_faces < 1:
        raise ValueError("max_faces must be >= 1")
    diam = P.diameter
    clearance = CLEARANCE * diam
    p_xyz, q_xyz = P.xyz(p), P.xyz(q)
    q_faces = set(P.faces_containing(q))
    V = P.vertices
    found = []

    def shared_edge(f, g):
        for fe in P.face_edges[f]:
            if fe.neighbor == g:
                return fe.edge
        return None

    def visit(path, rots, trans):
        f = path[-1]
        if f in q_faces:
            res = _oracle_check(P, path, rots, trans, p_xyz, q_xyz, clearance)
            if res is not None:
                found.append((res, tuple(path)))
        if len(path) == max_faces:
            return
        for fe in P.face_edges[f]:
            g = fe.neighbor
            if g in path:
                continue
            e = P.edges[fe.edge]
            a, b = V[e.a], V[e.b]
            n_f, n_g = P.normals[f], P.normals[g]
            axis = (b - a) / np.linalg.norm(b - a)
            ang = math.atan2(float(axis @ np.cross(n_g, n_f)), float(n_g @ n_f))
            R = _rodrigues(axis, ang)
            # x -> rots @ (R @ (x - a) + a) + trans
            new_rot = rots[-1] @ R
            new_trans = rots[-1] @ (a - R @ a) + trans[-1]
            visit(path + [g], rots + [new_rot], trans + [new_trans])

    for f0 in P.faces_containing(p):
        visit([f0], [np.eye(3)], [np.zeros(3)])
    if not found:
        return []
    best = min(r[0] for r, _ in found)
    keep = sorted(
        ((r, path) for r, path in found if r[0] <= best * (1 + tol)), key=lambda t: (len(t[1]), t[1])
    )
    out = []
    seen_flat = False
    for (length, _), path in keep:
        if len(path) == 1:
            if seen_flat:
                continue
            seen_flat = True
        edges = [shared_edge(path[i], path[i + 1]) for i in range(len(path) - 1)]
        chain = chain_from_edges(P, path[0], edges)
        start = P.to_local(path[0], p_xyz)
        end = chain.cumulative(P.to_local(path[-1], q_xyz))
        out.append(Geodesic(chain, length, (start, end), (p, q)))
    out.sort(key=lambda g: (float(f"{g.length:.9e}"), g.chain.faces))
    return out


def _oracle_check(P, path, rots, trans, p_xyz, q_xyz, clearance):
    f0 = path[0]
    o, ex, ey = P.frame_origin[f0], P.frame_x[f0], P.frame_y[f0]

    def flat(k, x):
        y = rots[k] @ x + trans[k] - o
        return np.array([y @ ex, y @ ey])

    start = flat(0, p_xyz)
    end = flat(len(path) - 1, q_xyz)
    seg = end - start
    length = float(np.linalg.norm(seg))
    if length <= 1e-12 * P.diameter:
        return None
    t_prev = 0.0
    for k in range(len(path) - 1):
        f, g = path[k], path[k + 1]
        fe = next(fe for fe in P.face_edges[f] if fe.neighbor == g)
        e = P.edges[fe.edge]
        A, B = flat(k, P.vertices[e.a]), flat(k, P.vertices[e.b])
        AB = B - A
        den = seg[0] * AB[1] - seg[1] * AB[0]
        if abs(den) < 1e-15:
            return None
        rel = A - start
        t = (rel[0] * AB[1] - rel[1] * AB[0]) / den
        s = (rel[0] * seg[1] - rel[1] * seg[0]) / den
        edge_len = float(np.linalg.norm(AB))
        margin = clearance / edge_len
        if not (t_prev < t < 1.0 - 1e-12) or not (margin <= s <= 1.0 - margin):
            return None
        if k == 0 and t <= 1e-12:
            return None
        t_prev = t
    return length, end


class OracleMismatch(AntipodalError):
    pass


def compare_with_oracle(P: Polyhedron, p: SurfacePoint, q: SurfacePoint, max_faces: int = 6, rel: float = 1e-9):
    """None when the search and the exhaustive oracle agree, else a description.

    Agreement means equal minimum lengths within ``rel`` and equal sets of
    minimizing edge sequences.
    """
    if P.same_point(p, q):
        return None
    fast = shortest_paths(P, p, q)
    slow = oracle_enumerate(P, p, q, max_faces)
    if not slow:
        return f"oracle found no path within {max_faces} faces"
    a, b = fast[0].length, slow[0].length
    if abs(a - b) > rel * max(a, b):
        return f"length {a!r} vs oracle {b!r}"
    sa, sb = {g.signature for g in fast}, {g.signature for g in slow}
    if sa != sb:
        return f"chains {sorted(sa)} vs oracle {sorted(sb)}"
    return None
