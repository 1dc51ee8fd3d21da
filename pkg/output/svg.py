"""
Static SVG renderings: embedded maps, loop ensembles over hexagon tilings,
and pivotal-point overlays. Output is deterministic (fixed hash salt, no
date stamp) so identical runs produce identical files.
"""

import io

import matplotlib
matplotlib.use("Agg")
import numpy as np
from matplotlib.collections import LineCollection, PolyCollection
from matplotlib.figure import Figure

from embedding.cardy import DELTA_CORNERS, EmbeddedMap
from lattice.domain import LatticeDomain, hexagon_corners
from percolation.coloring import Coloring
from percolation.loops import LoopEnsemble
from state.schema import AtomicMeasure

RED   = "#c8553d"
BLUE  = "#2d6a9f"
INK   = "#264653"

_RC = {"svg.hashsalt": "cardylab", "svg.fonttype": "none"}


def _figure(size: float = 6.0) -> tuple[Figure, object]:
    fig = Figure(figsize=(size, size))
    ax = fig.add_subplot(1, 1, 1)
    ax.set_aspect("equal")
    ax.set_axis_off()
    return fig, ax


def _to_svg(fig: Figure) -> str:
    buffer = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buffer, format="svg", metadata={"Date": None}, bbox_inches="tight")
    return buffer.getvalue()


def _vertex_colors(coloring: Coloring) -> list[str]:
    return [RED if r else BLUE for r in coloring.red]


def loop_segments(positions: np.ndarray, tri, loops: LoopEnsemble) -> list[np.ndarray]:
    """Each loop as a closed polyline through the midpoints of the edges it crosses."""
    paths = []
    for loop in loops:
        h = loop.half_edges
        mid = (positions[tri.origin[h]] + positions[tri.dest[h]]) / 2
        paths.append(np.vstack([mid, mid[:1]]))
    return paths


def render_embedded_map(embedded: EmbeddedMap, coloring: Coloring | None = None) -> str:
    """Edges of the map drawn between the Cardy positions of their endpoints inside Δ."""
    tri = embedded.marked.map
    positions = embedded.positions
    fig, ax = _figure()
    ax.add_collection(PolyCollection([DELTA_CORNERS], facecolors="none", edgecolors=INK, linewidths=1.0))
    ax.add_collection(LineCollection(positions[tri.edge_endpoints], colors="#8d99ae", linewidths=0.4))
    colors = _vertex_colors(coloring) if coloring is not None else INK
    ax.scatter(positions[:, 0], positions[:, 1], s=6, c=colors, zorder=3)
    ax.autoscale_view()
    return _to_svg(fig)


def render_loops(domain: LatticeDomain, coloring: Coloring, loops: LoopEnsemble | None = None, pivotal: AtomicMeasure | None = None) -> str:
    """Hexagon tiling colored by ω, optional loops Γ drawn on the dual, optional pivotal overlay."""
    positions = domain.positions
    fig, ax = _figure()
    hexes = hexagon_corners(positions, domain.delta)
    ax.add_collection(PolyCollection(hexes, facecolors=_vertex_colors(coloring), edgecolors="white", linewidths=0.2))
    if loops is not None:
        paths = loop_segments(positions, domain.triangulation, loops)
        ax.add_collection(LineCollection(paths, colors="black", linewidths=0.8))
    if pivotal is not None and len(pivotal):
        points = positions[np.asarray(pivotal.locations, dtype=np.int64)]
        ax.scatter(points[:, 0], points[:, 1], s=18, marker="o", facecolors="none", edgecolors="#ffb703", linewidths=1.2, zorder=4)
    ax.autoscale_view()
    return _to_svg(fig)


def render_pivotals(domain: LatticeDomain, coloring: Coloring, pivotal: AtomicMeasure) -> str:
    return render_loops(domain, coloring, None, pivotal)
