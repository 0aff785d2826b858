"""Matplotlib figures for zone maps and surveys, written as PNG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import to_rgb  # noqa: E402
from matplotlib.patches import Polygon as PolygonPatch  # noqa: E402

from .mesh import Polyhedron  # noqa: E402
from .zonemap import ZoneMap, gamma_polylines, label_color  # noqa: E402

# no timestamps or version strings, so files are reproducible
_PNG_META = {"Software": None}


def plot_zone_map(P: Polyhedron, zm: ZoneMap, path) -> None:
    """Label raster of one face with the marching-squares outlines on top."""
    n = zm.resolution + 1
    img = np.ones((n, n, 3))
    for s in zm.samples:
        img[s.j, s.i] = to_rgb(label_color(s.label))
    h = zm.spacing
    x0, y0 = zm.origin
    extent = (x0 - h / 2, x0 + (n - 0.5) * h, y0 - h / 2, y0 + (n - 0.5) * h)
    fig, ax = plt.subplots(figsize=(6, 6), dpi=100)
    ax.imshow(img, origin="lower", extent=extent, interpolation="nearest")
    ax.add_patch(PolygonPatch(np.array(P.local2d[zm.face]), closed=True, fill=False, lw=1.5, ec="0.2"))
    for line in gamma_polylines(zm):
        ax.plot(line[:, 0], line[:, 1], color="k", lw=0.8)
    counts = zm.counts()
    ax.set_title(f"{P.name} face {zm.face}: {len(counts)} labels, res {zm.resolution}")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def plot_survey(rep, path) -> None:
    """Histogram of log10 involution defects, relative to the diameter."""
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    defects = np.array([d for d in rep.defects if d is not None], dtype=float)
    if defects.size:
        rel = np.maximum(defects / rep.diameter, 1e-17)
        ax.hist(np.log10(rel), bins=40, color="tab:blue")
    ax.axvline(-6, color="k", ls="--", lw=0.8)
    ax.set_xlabel("log10(defect / diameter)")
    ax.set_ylabel("samples")
    ax.set_title(f"{rep.mesh}: n={rep.n}, seed={rep.seed}, defined={rep.n_defined}")
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
