from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Color(str, Enum):
    RED  = "red"
    BLUE = "blue"

    @property
    def opposite(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED


class BoundaryKind(str, Enum):
    MONOCHROMATIC_BLUE = "monochromatic_blue"
    MONOCHROMATIC_RED  = "monochromatic_red"
    ARC_PAIR           = "arc_pair"    # (e, e') blue, (e', e) red
    EXPLICIT           = "explicit"    # boundary colored like any other vertex


class PivotalMode(str, Enum):
    MAP     = "map"
    LATTICE = "lattice"
    FIELD   = "field"


class DynamicsMode(str, Enum):
    FULL   = "full"
    CUTOFF = "cutoff"


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """
    Finite sum of point masses.

    `locations` holds either vertex ids (shape (k,), int) or plane points
    (shape (k, 2), float). `params` records how the masses were produced
    (exponents, radii, normalizations) so outputs can echo them.
    """

    locations: np.ndarray
    masses:    np.ndarray
    params:    dict = field(default_factory=dict)

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=np.float64)
        if masses.shape[0] != np.asarray(self.locations).shape[0]:
            raise ValueError(
                f"AtomicMeasure: {len(self.locations)} locations but {masses.shape[0]} masses"
            )
        if np.any(masses < 0) or not np.all(np.isfinite(masses)):
            raise ValueError("AtomicMeasure: masses must be finite and nonnegative")
        object.__setattr__(self, "masses", masses)

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return int(self.masses.shape[0])

    def restricted(self, mask: np.ndarray) -> "AtomicMeasure":
        mask = np.asarray(mask, dtype=bool)
        return AtomicMeasure(self.locations[mask], self.masses[mask], dict(self.params))

    def scaled(self, factor: float) -> "AtomicMeasure":
        return AtomicMeasure(self.locations, self.masses * factor, dict(self.params))

    def per_vertex(self, n_vertices: int) -> np.ndarray:
        """Dense mass array indexed by vertex id (vertex-located measures only)."""
        locations = np.asarray(self.locations)
        if locations.ndim != 1:
            raise ValueError("per_vertex() needs a vertex-located measure")
        dense = np.zeros(n_vertices, dtype=np.float64)
        np.add.at(dense, locations.astype(np.int64), self.masses)
        return dense

    def to_json(self) -> dict:
        return {
            "locations": np.asarray(self.locations).tolist(),
            "masses":    self.masses.tolist(),
            "params":    self.params,
            "total":     self.total,
        }
