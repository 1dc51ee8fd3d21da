from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path

from maps.triangulation import Triangulation
from state.errors import ZeroInnerVertices
from state.schema import AtomicMeasure


def graph_distances(tri: Triangulation, sources: np.ndarray | None = None) -> np.ndarray:
    """Integer graph distances; all pairs when `sources` is None."""
    dist = shortest_path(tri.adjacency, method="D", unweighted=True, indices=sources)
    return dist.astype(np.int64)


@dataclass(frozen=True, eq=False)
class MetricMeasureData:
    """
    Scaled metric-measure data of a triangulation with n inner vertices:
        d^n = (3n/4)^{-1/4} · graph distance
        μ^n = (2n)^{-1} · counting measure on vertices
        ξ^n = ℓ^{-1} · counting measure on boundary vertices
    """

    graph_distance:   np.ndarray
    distance_scale:   float
    vertex_measure:   AtomicMeasure
    boundary_measure: AtomicMeasure

    @property
    def rescaled_metric(self) -> np.ndarray:
        return self.distance_scale * self.graph_distance

    def distance(self, u: int, v: int) -> float:
        return self.distance_scale * float(self.graph_distance[u, v])


def metric_measure_data(tri: Triangulation) -> MetricMeasureData:
    n = tri.n_inner
    if n == 0:
        raise ZeroInnerVertices(
            "rescaling (3n/4)^(-1/4) is undefined for n = 0; use graph_distances() for raw distances"
        )
    vertices = np.arange(tri.n_vertices)
    boundary = np.arange(tri.boundary_length)
    return MetricMeasureData(
        graph_distance=graph_distances(tri),
        distance_scale=(3.0 * n / 4.0) ** -0.25,
        vertex_measure=AtomicMeasure(vertices, np.full(tri.n_vertices, 1.0 / (2 * n)), {"kind": "mu_n", "n": n}),
        boundary_measure=AtomicMeasure(boundary, np.full(tri.boundary_length, 1.0 / tri.boundary_length), {"kind": "xi_n"}),
    )
