"""Sampling surveys of the antipodal map against the involution property.

A surface is Steinhaus when every point has a single antipode and the
antipode of the antipode is the point itself.  The survey measures how far
``F(F(p))`` lands from ``p``; a flat rectangular torus serves as the control
where the defect vanishes identically.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .antipode import BAND, SINGLE_TOL, analyze, antipode_spread
from .geodesic import distance
from .mesh import Polyhedron, SurfacePoint

# a defect above VERDICT_FACTOR * SINGLE_TOL * diameter is a witness
VERDICT_FACTOR = 10.0
SMALL_DEFECT = 1e-6  # relative to the diameter
N_WITNESSES = 5

_MASK = (1 << 64) - 1


class SplitMix64:
    """``state += 0x9E3779B97F4A7C15``, then the usual xor-shift-multiply finalizer."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def sample_points(P: Polyhedron, n: int, seed: int) -> list[SurfacePoint]:
    """``n`` area-uniform surface points; three draws per point (triangle, two in-triangle)."""
    tris = P.fan_triangles()
    areas = np.array([abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) / 2 for _, a, b, c in tris])
    cum = np.cumsum(areas) / areas.sum()
    rng = SplitMix64(seed)
    out = []
    for _ in range(n):
        k = min(int(np.searchsorted(cum, rng.uniform(), side="right")), len(tris) - 1)
        f, a, b, c = tris[k]
        r1 = math.sqrt(rng.uniform())
        r2 = rng.uniform()
        wa, wb, wc = 1 - r1, r1 * (1 - r2), r1 * r2
        xy = (wa * a[0] + wb * b[0] + wc * c[0], wa * a[1] + wb * b[1] + wc * c[1])
        out.append(P.point_from_local(f, xy))
    return out


@dataclass
class SampleRecord:
    point: SurfacePoint
    radius: float
    single: bool
    double: bool
    defect: float | None


def _single(P: Polyhedron, res, tol_single: float) -> bool:
    return len(res.antipodes) == 1 or antipode_spread(P, res) < tol_single * P.diameter


def evaluate_point(
    P: Polyhedron, p: SurfacePoint, tol_single: float = SINGLE_TOL, band: float = BAND
) -> SampleRecord:
    first = analyze(P, p, grid=0, band=band)
    if not _single(P, first, tol_single):
        return SampleRecord(p, first.radius, False, False, None)
    q = first.antipodes[0]
    second = analyze(P, q, grid=0, band=band)
    if not _single(P, second, tol_single):
        return SampleRecord(p, first.radius, True, False, None)
    return SampleRecord(p, first.radius, True, True, distance(P, p, second.antipodes[0]))


def involution_defect(P: Polyhedron, p: SurfacePoint, tol_single: float = SINGLE_TOL) -> float | None:
    """Intrinsic distance from ``p`` to ``F(F(p))``, or None when either step is multi-valued."""
    return evaluate_point(P, p, tol_single).defect


@dataclass
class Witness:
    face: int
    bary: tuple[float, ...]
    xyz: tuple[float, float, float]
    defect: float


@dataclass
class SurveyReport:
    mesh: str
    n: int
    seed: int
    diameter: float
    n_defined: int = 0
    fraction_single: float = 0.0
    fraction_double: float = 0.0
    fraction_small_defect: float = 0.0
    defect_min: float | None = None
    defect_mean: float | None = None
    defect_max: float | None = None
    radius_min: float | None = None
    radius_max: float | None = None
    witnesses: list[Witness] = field(default_factory=list)
    defects: list[float | None] = field(default_factory=list)  # per sample, None where undefined

    def to_json(self) -> dict:
        return asdict(self)


def survey(
    P: Polyhedron, n: int = 200, seed: int = 42, tol_single: float = SINGLE_TOL, band: float = BAND
) -> SurveyReport:
    """Evaluate ``n`` area-uniform samples and aggregate their involution defects."""
    if n < 1:
        raise ValueError("n must be >= 1")
    records = [evaluate_point(P, p, tol_single, band) for p in sample_points(P, n, seed)]
    rep = SurveyReport(P.name, n, seed, P.diameter)
    defined = [r for r in records if r.defect is not None]
    rep.n_defined = len(defined)
    rep.defects = [r.defect for r in records]
    rep.fraction_single = sum(r.single for r in records) / n
    rep.fraction_double = sum(r.double for r in records) / n
    radii = [r.radius for r in records]
    rep.radius_min, rep.radius_max = min(radii), max(radii)
    if defined:
        d = np.array([r.defect for r in defined])
        rep.defect_min, rep.defect_mean, rep.defect_max = float(d.min()), float(d.mean()), float(d.max())
        rep.fraction_small_defect = float((d < SMALL_DEFECT * P.diameter).mean())
        order = sorted(range(len(defined)), key=lambda k: (-defined[k].defect, k))[:N_WITNESSES]
        for k in order:
            r = defined[k]
            xyz = tuple(float(v) for v in P.xyz(r.point))
            rep.witnesses.append(Witness(r.point.face, tuple(r.point.bary), xyz, float(r.defect)))
    return rep


@dataclass(frozen=True)
class NotSteinhaus:
    witness: Witness

    name = "NotSteinhaus"


@dataclass(frozen=True)
class Inconclusive:
    name = "Inconclusive"


def verdict(r: SurveyReport | None) -> NotSteinhaus | Inconclusive:
    """Never claims the property holds: sampling cannot certify it."""
    if r is None or not r.witnesses:
        return Inconclusive()
    w = r.witnesses[0]
    if w.defect > VERDICT_FACTOR * SINGLE_TOL * r.diameter:
        return NotSteinhaus(w)
    return Inconclusive()


# -- flat torus control ------------------------------------------------------------


def torus_antipode(a, b, p):
    """Half-period shift on the ``a x b`` flat torus; exact for exact inputs."""
    x, y = p
    return (x + a / 2 if x < a / 2 else x - a / 2, y + b / 2 if y < b / 2 else y - b / 2)


def torus_distance(a: float, b: float, p, q) -> float:
    dx = abs(p[0] - q[0]) % a
    dy = abs(p[1] - q[1]) % b
    return math.hypot(min(dx, a - dx), min(dy, b - dy))


def torus_radius(a: float, b: float) -> float:
    return math.hypot(a, b) / 2


def torus_defect(a, b, p) -> float:
    return torus_distance(a, b, p, torus_antipode(a, b, torus_antipode(a, b, p)))


def torus_report(a: float, b: float, n: int = 200, seed: int = 42) -> SurveyReport:
    """Survey of the torus control, same shape as a polyhedron survey."""
    rng = SplitMix64(seed)
    pts = [(a * rng.uniform(), b * rng.uniform()) for _ in range(n)]
    # the torus' intrinsic diameter equals its radius
    rep = SurveyReport(f"torus{a}x{b}", n, seed, torus_radius(a, b))
    d = np.array([torus_defect(a, b, p) for p in pts])
    rep.n_defined = n
    rep.defects = [float(v) for v in d]
    rep.fraction_single = rep.fraction_double = 1.0
    rep.defect_min, rep.defect_mean, rep.defect_max = float(d.min()), float(d.mean()), float(d.max())
    rep.fraction_small_defect = float((d < SMALL_DEFECT * rep.diameter).mean())
    rep.radius_min = rep.radius_max = torus_radius(a, b)
    return rep
