"""Command-line front end.

Exit status: 0 success, 1 domain error (printed as ``error [module.Class]``),
2 usage error.  Numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .antipode import BAND, SINGLE_TOL, VertexKind, antipodes
from .errors import AntipodalError
from .geodesic import OracleMismatch, compare_with_oracle, shortest_paths
from .mesh import Polyhedron, SurfacePoint, cube, random_convex, read_off, regular_tetrahedron

BUILTIN = {
    "cube": cube,
    "tetrahedron": regular_tetrahedron,
    "random12": lambda: random_convex(12, 0),
}


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    command: str
    mesh: str | None = None
    points: tuple[str, ...] = ()
    out: str | None = None
    fmt: str = "json"
    resolution: int = 64
    n: int = 200
    seed: int = 42
    tol_tie: float = BAND
    tol_single: float = SINGLE_TOL
    theta: float = math.pi / 2
    face: int | None = None
    depth: int = 6

    def check(self) -> None:
        if self.tol_tie <= 0 or self.tol_single <= 0:
            raise UsageError("tolerances must be > 0")
        if self.resolution < 8:
            raise UsageError("--resolution must be >= 8")
        if self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.out is not None and not self.out:
            raise UsageError("--out must be a nonempty path")


def fmt(x) -> str:
    return f"{x:.12g}"


def rounded(obj):
    """Copy of a JSON-like tree with floats cut to 12 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if hasattr(obj, "item"):
        return rounded(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def load_mesh(arg: str) -> Polyhedron:
    if os.path.exists(arg):
        return read_off(arg)
    if arg in BUILTIN:
        return BUILTIN[arg]()
    raise UsageError(f"no such mesh file or builtin: {arg!r} (builtins: {', '.join(BUILTIN)})")


def parse_point(P: Polyhedron, text: str) -> SurfacePoint:
    """``F:b0,b1,...`` (face and weights), ``v:K`` (vertex) or ``c:F`` (face center)."""
    head, sep, tail = text.partition(":")
    if not sep:
        raise UsageError(f"bad point {text!r}; use F:b0,b1,.. or v:K or c:F")
    try:
        if head == "v":
            k = int(tail)
            if not 0 <= k < P.n_vertices:
                raise UsageError(f"no vertex {k}")
            return P.vertex_point(k)
        if head == "c":
            return P.face_center(int(tail))
        return P.point(int(head), [float(w) for w in tail.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None


def point_json(P: Polyhedron, p: SurfacePoint) -> dict:
    return {"face": p.face, "bary": list(p.bary), "xyz": [float(v) for v in P.xyz(p)]}


def kind_json(kind) -> dict:
    if isinstance(kind, VertexKind):
        return {"type": "vertex", "vertex": kind.vertex}
    return {"type": "circumcenter", "chains": [list(c) for c in kind.chains]}


def _write(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _emit(cfg: CommandConfig, doc: dict, lines: list[str], out) -> None:
    """Text (or JSON with ``--format json``) on stdout; ``--out`` also gets the JSON."""
    out.write(dumps(doc) if cfg.fmt == "json" else "\n".join(lines) + "\n")
    if cfg.out is not None:
        _write(cfg.out, dumps(doc))


def cmd_validate(cfg: CommandConfig, out) -> int:
    P = load_mesh(cfg.mesh)
    deficits = [2 * math.pi - a for a in P.total_angle]
    doc = {
        "mesh": P.name,
        "V": P.n_vertices,
        "E": P.n_edges,
        "F": P.n_faces,
        "euler": P.euler_characteristic,
        "deficit_sum": sum(deficits),
        "diameter": P.diameter,
        "deficits": deficits,
    }
    lines = [
        f"mesh {P.name}",
        f"V {P.n_vertices} E {P.n_edges} F {P.n_faces} euler {P.euler_characteristic}",
        f"deficit_sum {fmt(sum(deficits))} (4pi = {fmt(4 * math.pi)})",
        f"diameter {fmt(P.diameter)}",
    ]
    _emit(cfg, doc, lines, out)
    return 0


def cmd_distance(cfg: CommandConfig, out) -> int:
    P = load_mesh(cfg.mesh)
    if len(cfg.points) != 2:
        raise UsageError("distance needs two points")
    p, q = (parse_point(P, t) for t in cfg.points)
    paths = [] if P.same_point(p, q) else shortest_paths(P, p, q, tol=cfg.tol_tie)
    d = paths[0].length if paths else 0.0
    doc = {
        "source": point_json(P, p),
        "target": point_json(P, q),
        "distance": d,
        "geodesics": [{"length": g.length, "edges": list(g.signature), "faces": list(g.chain.faces)} for g in paths],
    }
    lines = [f"distance {fmt(d)}", f"geodesics {len(paths)}"]
    for g in paths:
        lines.append(f"  length {fmt(g.length)} edges {list(g.signature)} faces {list(g.chain.faces)}")
    _emit(cfg, doc, lines, out)
    return 0


def cmd_antipode(cfg: CommandConfig, out) -> int:
    P = load_mesh(cfg.mesh)
    if len(cfg.points) != 1:
        raise UsageError("antipode needs one point")
    p = parse_point(P, cfg.points[0])
    res = antipodes(P, p, band=cfg.tol_tie)
    doc = {
        "source": point_json(P, p),
        "radius": res.radius,
        "grid_radius": res.grid_radius,
        "antipodes": [
            {**point_json(P, a), "kind": kind_json(k), "segments": [list(g.signature) for g in segs]}
            for a, k, segs in zip(res.antipodes, res.kinds, res.segments)
        ],
    }
    lines = [f"radius {fmt(res.radius)}", f"antipodes {len(res.antipodes)}"]
    for a, k, segs in zip(res.antipodes, res.kinds, res.segments):
        xyz = " ".join(fmt(float(v)) for v in P.xyz(a))
        what = f"vertex {k.vertex}" if isinstance(k, VertexKind) else "circumcenter"
        lines.append(f"  face {a.face} xyz {xyz} {what} segments {len(segs)}")
    _emit(cfg, doc, lines, out)
    return 0


def cmd_zonemap(cfg: CommandConfig, out) -> int:
    from .plotting import plot_zone_map
    from .zonemap import RankDeficient, fit_zone_map, largest_triple_zone, sample_zone_map, zone_samples, zone_svg

    P = load_mesh(cfg.mesh)
    if cfg.out is None:
        raise UsageError("zonemap needs --out DIR")
    faces = range(P.n_faces) if cfg.face is None else [cfg.face]
    if cfg.face is not None and not 0 <= cfg.face < P.n_faces:
        raise UsageError(f"no face {cfg.face}")
    stem = Path(cfg.out) / P.name
    for f in faces:
        zm = sample_zone_map(P, f, cfg.resolution)
        base = f"{stem}_face{f}"
        if cfg.fmt == "svg":
            _write(base + ".svg", zone_svg(P, zm))
        else:
            doc = zm.to_json()
            lab = largest_triple_zone(zm)
            doc["fit"] = None
            if lab is not None:
                try:
                    fit = fit_zone_map(zone_samples(zm, lab))
                    doc["fit"] = {"label": str(lab), "residual": fit.residual, "n": fit.n, **fit.coeffs.to_json()}
                except RankDeficient:
                    pass
            _write(base + ".json", dumps(doc))
        plot_zone_map(P, zm, base + ".png")
        out.write(
            f"face {f} samples {len(zm.samples)} labels {len(zm.counts())} "
            f"boundary_fraction {fmt(zm.boundary_fraction())}\n"
        )
    return 0


def cmd_survey(cfg: CommandConfig, out) -> int:
    from .plotting import plot_survey
    from .steinhaus import survey, verdict

    P = load_mesh(cfg.mesh)
    rep = survey(P, cfg.n, cfg.seed, tol_single=cfg.tol_single, band=cfg.tol_tie)
    v = verdict(rep)
    doc = rep.to_json()
    doc["verdict"] = v.name
    lines = [
        f"mesh {rep.mesh} n {rep.n} seed {rep.seed} defined {rep.n_defined}",
        f"fraction_single {fmt(rep.fraction_single)} fraction_double {fmt(rep.fraction_double)}",
        f"fraction_small_defect {fmt(rep.fraction_small_defect)}",
    ]
    if rep.n_defined:
        lines.append(f"defect min {fmt(rep.defect_min)} mean {fmt(rep.defect_mean)} max {fmt(rep.defect_max)}")
    lines.append(f"verdict {v.name}")
    _emit(cfg, doc, lines, out)
    if cfg.out is not None:
        plot_survey(rep, str(Path(cfg.out).with_suffix(".png")))
    return 0


def cmd_verify_symbolic(cfg: CommandConfig, out) -> int:
    from .symtrig import involution_obstruction_demo, verify_counterexample, verify_lemma2

    l2 = verify_lemma2()
    ce = verify_counterexample()
    demo = involution_obstruction_demo(cfg.theta)
    lines = [
        "lemma2: residuals 0; counterexample: residuals 0",
        f"theta {fmt(cfg.theta)} p1 ({fmt(demo['p1'][0])}, {fmt(demo['p1'][1])}) "
        f"p2 ({fmt(demo['p2'][0])}, {fmt(demo['p2'][1])}) |p1-p2| {fmt(demo['distance_p1_p2'])}",
    ]
    _emit(cfg, {"lemma2": l2, "counterexample": ce, "demo": demo}, lines, out)
    return 0


def cmd_oracle_check(cfg: CommandConfig, out) -> int:
    from .steinhaus import sample_points

    P = load_mesh(cfg.mesh)
    pts = sample_points(P, 2 * cfg.n, cfg.seed)
    bad = []
    for k in range(cfg.n):
        msg = compare_with_oracle(P, pts[2 * k], pts[2 * k + 1], cfg.depth)
        if msg is not None:
            bad.append((k, msg))
    lines = [f"pair {k}: {msg}" for k, msg in bad] + [f"pairs {cfg.n} mismatches {len(bad)}"]
    doc = {
        "mesh": P.name,
        "pairs": cfg.n,
        "seed": cfg.seed,
        "depth": cfg.depth,
        "mismatches": [{"pair": k, "message": msg} for k, msg in bad],
    }
    _emit(cfg, doc, lines, out)
    if bad:
        raise OracleMismatch(f"{len(bad)} of {cfg.n} pairs disagree with the oracle")
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "distance": cmd_distance,
    "antipode": cmd_antipode,
    "zonemap": cmd_zonemap,
    "survey": cmd_survey,
    "verify-symbolic": cmd_verify_symbolic,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-tie", type=float, default=BAND, help="relative band for tied antipodes and segments")
    common.add_argument("--tol-single", type=float, default=SINGLE_TOL, help="antipode spread, relative to diameter")
    common.add_argument("--resolution", type=int, default=64)
    common.add_argument("--n", type=int, default=200)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--theta", type=float, default=math.pi / 2)
    common.add_argument("--out")
    common.add_argument("--format", dest="fmt", choices=("json", "svg"), default=None)
    parser = argparse.ArgumentParser(prog="antipodal", description="Antipodes on convex polyhedra.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", parents=[common], help="check an OFF mesh and print its invariants")
    p.add_argument("mesh")
    p = sub.add_parser("distance", parents=[common], help="intrinsic distance and all shortest paths")
    p.add_argument("mesh")
    p.add_argument("points", nargs=2, metavar="POINT")
    p = sub.add_parser("antipode", parents=[common], help="farthest points, radius and segments")
    p.add_argument("mesh")
    p.add_argument("points", nargs=1, metavar="POINT")
    p = sub.add_parser("zonemap", parents=[common], help="sample zone labels on faces")
    p.add_argument("mesh")
    p.add_argument("--face", type=int)
    p = sub.add_parser("survey", parents=[common], help="involution defect survey")
    p.add_argument("mesh")
    sub.add_parser("verify-symbolic", parents=[common], help="exact identity checks")
    p = sub.add_parser("oracle-check", parents=[common], help="compare shortest paths with the exhaustive oracle")
    p.add_argument("mesh")
    p.add_argument("--depth", type=int, default=6)
    return parser


def config_from_args(ns: argparse.Namespace) -> CommandConfig:
    fmt_default = "svg" if ns.command == "zonemap" else "text"
    return CommandConfig(
        command=ns.command,
        mesh=getattr(ns, "mesh", None),
        points=tuple(getattr(ns, "points", ()) or ()),
        out=ns.out,
        fmt=ns.fmt or fmt_default,
        resolution=ns.resolution,
        n=ns.n,
        seed=ns.seed,
        tol_tie=ns.tol_tie,
        tol_single=ns.tol_single,
        theta=ns.theta,
        face=getattr(ns, "face", None),
        depth=getattr(ns, "depth", 6),
    )


def run(cfg: CommandConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg.check()
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except AntipodalError as exc:
        err.write(f"error [{exc.code}]: {exc}\n")
        return 1


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
