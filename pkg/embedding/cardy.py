"""
Cardy embedding by Monte Carlo over one shared percolation sample set.

Every sample is one Bernoulli-½ coloring; a single crossing_flags call
scores E_a, E_b and E_c at every vertex, so the three coordinates and all
vertices share common random numbers.
"""

from dataclasses import dataclass

import numpy as np

from maps.triangulation import MarkedTriangulation
from percolation.coloring import sample_percolation
from percolation.crossing import crossing_flags
from state.errors import NegativeInput
from utils.parallel import map_batches

# corners of Δ for (1,0,0), (0,1,0), (0,0,1)
DELTA_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])


@dataclass(frozen=True)
class BaryCoords:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return self.x, self.y, self.z

    def to_plane(self) -> np.ndarray:
        return np.array(self.as_tuple()) @ DELTA_CORNERS


def project_to_delta(x: float, y: float, z: float) -> BaryCoords:
    """(x, y, z)_Δ = (x+y+z)^{-1}(x, y, z), with (0, 0, 0) ↦ (1/3, 1/3, 1/3)."""
    if min(x, y, z) < 0:
        raise NegativeInput(f"projection needs nonnegative coordinates, got ({x}, {y}, {z})")
    total = x + y + z
    if total == 0:
        return BaryCoords(1 / 3, 1 / 3, 1 / 3)
    return BaryCoords(x / total, y / total, z / total)


def project_rows(triples: np.ndarray) -> np.ndarray:
    """Row-wise projection of a (k, 3) nonnegative array."""
    triples = np.asarray(triples, dtype=np.float64)
    if np.any(triples < 0):
        raise NegativeInput("projection needs nonnegative coordinates")
    total = triples.sum(axis=1, keepdims=True)
    out = np.full_like(triples, 1 / 3)
    nonzero = total[:, 0] > 0
    out[nonzero] = triples[nonzero] / total[nonzero]
    return out


def bary_to_plane(coords: np.ndarray) -> np.ndarray:
    return np.asarray(coords, dtype=np.float64).reshape(-1, 3) @ DELTA_CORNERS


def plane_to_bary(points: np.ndarray) -> np.ndarray:
    """Barycentric coordinates w.r.t. Δ of (k, 2) plane points (may be negative outside Δ)."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    s3 = np.sqrt(3.0)
    z = points[:, 1] * 2 / s3
    y = points[:, 0] - z / 2
    return np.column_stack([1 - y - z, y, z])


@dataclass(frozen=True, eq=False)
class EmbeddedMap:
    marked:      MarkedTriangulation
    frequencies: np.ndarray   # (V, 3) p̂_a, p̂_b, p̂_c
    samples:     int
    seed:        dict | None = None

    @property
    def coords(self) -> np.ndarray:
        """(V, 3) Cdy(v) in barycentric form."""
        return project_rows(self.frequencies)

    @property
    def standard_errors(self) -> np.ndarray:
        p = self.frequencies
        return np.sqrt(p * (1 - p) / self.samples)

    @property
    def positions(self) -> np.ndarray:
        """Cdy(v) as plane points of Δ."""
        return bary_to_plane(self.coords)

    def vertex(self, v: int) -> BaryCoords:
        return BaryCoords(*(float(x) for x in self.coords[v]))

    def sum_to_one_defect(self) -> float:
        """max_v |p̂_a + p̂_b + p̂_c − 1|."""
        return float(np.abs(self.frequencies.sum(axis=1) - 1).max())

    def to_json(self) -> dict:
        coords, se = self.coords, self.standard_errors
        return {
            "samples": self.samples,
            "marks":   [self.marked.a, self.marked.b, self.marked.c],
            "seed":    self.seed,
            "vertices": [
                {
                    "v": v,
                    "x": float(coords[v, 0]), "y": float(coords[v, 1]), "z": float(coords[v, 2]),
                    "se_x": float(se[v, 0]), "se_y": float(se[v, 1]), "se_z": float(se[v, 2]),
                }
                for v in range(coords.shape[0])
            ],
        }


def _count_batch(task: tuple[MarkedTriangulation, int, int]) -> np.ndarray:
    marked, seed, size = task
    rng = np.random.default_rng(seed)
    counts = np.zeros((marked.map.n_vertices, 3), dtype=np.int64)
    for _ in range(size):
        counts += crossing_flags(marked, sample_percolation(marked, None, rng)).as_array()
    return counts


def crossing_counts(
    marked: MarkedTriangulation,
    samples: int,
    rng: np.random.Generator,
    threads: int = 1,
    batch_size: int = 1000,
) -> np.ndarray:
    """
    (V, 3) hit counts over `samples` colorings. Batch seeds are drawn from
    `rng` up front, so the counts do not depend on `threads`.
    """
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    seeds = rng.integers(0, 2**63 - 1, size=len(sizes), dtype=np.int64)
    tasks = [(marked, int(s), n) for s, n in zip(seeds, sizes)]
    return np.sum(map_batches(_count_batch, tasks, threads), axis=0)


def cardy_embedding(
    marked: MarkedTriangulation,
    samples: int,
    rng: np.random.Generator,
    threads: int = 1,
    batch_size: int = 1000,
    seed: dict | None = None,
    verbose: bool = False,
) -> EmbeddedMap:
    counts = crossing_counts(marked, samples, rng, threads, batch_size)
    embedded = EmbeddedMap(marked, counts / samples, samples, seed)
    if verbose:
        print(
            f"[cardy_embedding] V={marked.map.n_vertices} N={samples} "
            f"sum-to-one defect={embedded.sum_to_one_defect():.4f}"
        )
    return embedded
