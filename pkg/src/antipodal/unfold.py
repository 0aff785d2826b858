"""Planar direct isometries and face-chain unfoldings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

from .errors import AntipodalError

if TYPE_CHECKING:
    from .mesh import Polyhedron

# |c1 - c2| + |s1 - s2| below this means "same rotation angle"
ANGLE_TOL = 1e-10


class InvalidEdge(AntipodalError):
    pass


class BothTranslations(AntipodalError):
    pass


@dataclass(frozen=True, slots=True)
class PlanarIsometry:
    """``x -> R(c, s) x + t``, an orientation-preserving isometry of the plane."""

    c: float
    s: float
    tx: float
    ty: float

    @classmethod
    def identity(cls) -> PlanarIsometry:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def rotation(cls, angle: float, center=(0.0, 0.0)) -> PlanarIsometry:
        c, s = math.cos(angle), math.sin(angle)
        x, y = center
        return cls(c, s, x - (c * x - s * y), y - (s * x + c * y))

    @classmethod
    def translation(cls, tx: float, ty: float) -> PlanarIsometry:
        return cls(1.0, 0.0, tx, ty)

    @property
    def angle(self) -> float:
        return math.atan2(self.s, self.c)

    def __call__(self, pt) -> tuple[float, float]:
        x, y = pt
        return self.c * x - self.s * y + self.tx, self.s * x + self.c * y + self.ty

    def apply_array(self, pts):
        """Apply to an (n, 2) numpy array."""
        import numpy as np

        pts = np.asarray(pts, dtype=float)
        R = np.array([[self.c, -self.s], [self.s, self.c]])
        return pts @ R.T + np.array([self.tx, self.ty])

    def __matmul__(self, other: PlanarIsometry) -> PlanarIsometry:
        return compose(self, other)

    def inverse(self) -> PlanarIsometry:
        c, s = self.c, -self.s
        return PlanarIsometry(c, s, -(c * self.tx - s * self.ty), -(s * self.tx + c * self.ty))

    def is_translation(self) -> bool:
        return abs(self.c - 1.0) + abs(self.s) < ANGLE_TOL


def compose(a: PlanarIsometry, b: PlanarIsometry) -> PlanarIsometry:
    """``a ∘ b``: apply ``b`` first."""
    c = a.c * b.c - a.s * b.s
    s = a.s * b.c + a.c * b.s
    norm = math.hypot(c, s)
    return PlanarIsometry(
        c / norm,
        s / norm,
        a.c * b.tx - a.s * b.ty + a.tx,
        a.s * b.tx + a.c * b.ty + a.ty,
    )


def rotation_center(f: PlanarIsometry) -> tuple[float, float] | None:
    """Fixed point of ``f``, or None for translations (identity included)."""
    if f.is_translation():
        return None
    # (I - R) z = t
    a, b = 1.0 - f.c, f.s
    det = a * a + b * b
    return (a * f.tx - b * f.ty) / det, (b * f.tx + a * f.ty) / det


def same_angle(f: PlanarIsometry, g: PlanarIsometry) -> bool:
    return abs(f.c - g.c) + abs(f.s - g.s) < ANGLE_TOL


class PairClass(NamedTuple):
    epsilon: int
    centers: list
    f1: PlanarIsometry
    fm1: PlanarIsometry


def classify_pair(f1: PlanarIsometry, fm1: PlanarIsometry) -> PairClass:
    """Classify the isometry pair carrying the central source image to the other two.

    ``epsilon`` is 0 when both are rotations by the same angle, 1 otherwise.
    The third center for ``epsilon = 1`` is that of ``fm1^-1 ∘ f1`` (apply
    ``f1`` first), which lies on the denominator circle of the zone map.
    When exactly one of them is a translation the pair is re-based on the
    rotated image, which turns it into two rotations of the same angle; the
    returned ``f1``/``fm1`` are the pair actually classified.
    """
    t1, tm1 = f1.is_translation(), fm1.is_translation()
    if t1 and tm1:
        raise BothTranslations("both isometries are translations")
    if tm1:
        f1, fm1 = f1.inverse(), compose(fm1, f1.inverse())
    elif t1:
        f1, fm1 = compose(f1, fm1.inverse()), fm1.inverse()
    c1, cm1 = rotation_center(f1), rotation_center(fm1)
    if same_angle(f1, fm1):
        return PairClass(0, [c1, cm1], f1, fm1)
    return PairClass(1, [c1, cm1, rotation_center(compose(fm1.inverse(), f1))], f1, fm1)


@dataclass(frozen=True)
class UnfoldChain:
    """A sequence of faces laid out in the plane of the first one.

    ``cumulative`` maps coordinates of the last face into the frame of the
    first face; ``corridor`` holds the crossed edges, in crossing order, as
    segments in the first face's frame.
    """

    faces: tuple[int, ...]
    edges: tuple[int, ...]
    cumulative: PlanarIsometry
    corridor: tuple[tuple[tuple[float, float], tuple[float, float]], ...]

    @property
    def last(self) -> int:
        return self.faces[-1]

    @property
    def signature(self) -> tuple[int, ...]:
        return self.edges


def start_chain(face: int) -> UnfoldChain:
    return UnfoldChain((face,), (), PlanarIsometry.identity(), ())


def extend(P: Polyhedron, chain: UnfoldChain, edge: int) -> UnfoldChain:
    """Unfold the face across ``edge`` (an edge of the chain's last face) onto the chain."""
    last = chain.last
    for fe in P.face_edges[last]:
        if fe.edge == edge:
            break
    else:
        raise InvalidEdge(f"edge {edge} does not bound face {last}")
    if chain.edges and chain.edges[-1] == edge:
        raise InvalidEdge(f"edge {edge} is the entry edge of face {last}")
    g = fe.neighbor
    hinge = fe.to_neighbor.inverse()  # neighbor frame -> last frame
    cum = compose(chain.cumulative, hinge)
    seg = (chain.cumulative((fe.ax, fe.ay)), chain.cumulative((fe.bx, fe.by)))
    return UnfoldChain(chain.faces + (g,), chain.edges + (edge,), cum, chain.corridor + (seg,))


def chain_from_edges(P: Polyhedron, face: int, edges) -> UnfoldChain:
    chain = start_chain(face)
    for e in edges:
        chain = extend(P, chain, e)
    return chain
