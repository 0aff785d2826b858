"""Intrinsic geometry and antipodal maps of convex polyhedra."""

from .antipode import AntipodeResult, analyze, antipodes, circumcenter, radius
from .errors import AntipodalError
from .geodesic import Geodesic, distance, oracle_enumerate, shortest_paths
from .mesh import Polyhedron, SurfacePoint, cube, load_off, random_convex, read_off, regular_tetrahedron
from .steinhaus import involution_defect, survey, torus_antipode, verdict
from .symtrig import TrigPoly, verify_counterexample, verify_lemma2
from .unfold import PlanarIsometry, classify_pair, compose, rotation_center
from .zonemap import (
    RationalMapCoeffs,
    denominator_locus,
    fit_zone_map,
    lemma2_normal_form,
    sample_zone_map,
    tau_from_isometries,
)

__all__ = [
    "AntipodalError",
    "AntipodeResult",
    "Geodesic",
    "PlanarIsometry",
    "Polyhedron",
    "RationalMapCoeffs",
    "SurfacePoint",
    "TrigPoly",
    "analyze",
    "antipodes",
    "circumcenter",
    "classify_pair",
    "compose",
    "cube",
    "denominator_locus",
    "distance",
    "fit_zone_map",
    "involution_defect",
    "lemma2_normal_form",
    "load_off",
    "oracle_enumerate",
    "radius",
    "random_convex",
    "read_off",
    "regular_tetrahedron",
    "rotation_center",
    "sample_zone_map",
    "shortest_paths",
    "survey",
    "tau_from_isometries",
    "torus_antipode",
    "verdict",
    "verify_counterexample",
    "verify_lemma2",
]
