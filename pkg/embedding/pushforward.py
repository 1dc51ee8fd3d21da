from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from embedding.cardy import EmbeddedMap
from maps.metric import MetricMeasureData
from state.schema import AtomicMeasure


@dataclass(frozen=True, eq=False)
class PushforwardData:
    """
    Metric-measure data carried to Δ̄ by the Cardy embedding. The nearest-
    vertex resolver 𝔳 breaks ties by the smallest vertex id.
    """

    positions:        np.ndarray   # (V, 2) Cdy(v) in the plane
    mmd:              MetricMeasureData
    vertex_measure:   AtomicMeasure
    boundary_measure: AtomicMeasure

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.positions)

    def resolve(self, point) -> int:
        """𝔳(x): the vertex whose embedded position is nearest to x."""
        point = np.asarray(point, dtype=np.float64)
        distance, _ = self._tree.query(point)
        candidates = self._tree.query_ball_point(point, r=distance * (1 + 1e-12) + 1e-15)
        return int(min(candidates))

    def distance(self, x, y) -> float:
        """d^n_Δ(x, y) = d^n(𝔳(x), 𝔳(y))."""
        return self.mmd.distance(self.resolve(x), self.resolve(y))


def pushforward(embedded: EmbeddedMap, mmd: MetricMeasureData) -> PushforwardData:
    positions = embedded.positions
    if positions.shape[0] != mmd.graph_distance.shape[0]:
        raise ValueError("embedding and metric data come from different maps")
    mu, xi = mmd.vertex_measure, mmd.boundary_measure
    return PushforwardData(
        positions=positions,
        mmd=mmd,
        vertex_measure=AtomicMeasure(positions[mu.locations], mu.masses, {**mu.params, "pushed": "cardy"}),
        boundary_measure=AtomicMeasure(positions[xi.locations], xi.masses, {**xi.params, "pushed": "cardy"}),
    )
