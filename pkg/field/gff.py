"""
Zero-boundary discrete Gaussian free field on a δ-polygon.

The field on inner vertices is N(0, c_T·L⁻¹) with L = D − A the graph
Laplacian restricted to inner vertices. On δT the Laplacian is
≈ −(3/2)δ²Δ and each vertex carries area δ²√3/2, so L⁻¹ is ≈ (2π√3)⁻¹
log(1/|x − y|) and c_T = 2π√3 gives Var h_r(z) ≈ log(1/r) + log C(z; D).

Inner vertices are numbered row by row, so L is banded with bandwidth of
one lattice row; samples are U⁻¹z with L = UᵀU from a banded Cholesky.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.sparse as sp
from matplotlib.path import Path
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded, solve_banded
from scipy.stats import linregress

from lattice.domain import LatticeDomain, plane_to_axial
from state.errors import SingularLaplacian, ValidationError
from utils.rationals import fraction_str

C_TRIANGULAR = 2 * np.pi * np.sqrt(3.0)


def interpolation_matrix(domain: LatticeDomain, points: np.ndarray) -> sp.csr_matrix:
    """
    (k, V) sparse matrix of piecewise-linear interpolation weights: row p
    holds the barycentric weights of point p in its lattice triangle.
    Points off the domain get an empty row.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    grid = domain.grid
    axial = plane_to_axial(points, domain.delta) - grid.origin
    base = np.floor(axial).astype(np.int64)
    fa, fb = (axial - base).T
    i, j = base.T
    shape = grid.vertex_at.shape
    ok = (i >= 0) & (j >= 0) & (i + 1 < shape[0]) & (j + 1 < shape[1])
    i, j = np.where(ok, i, 0), np.where(ok, j, 0)

    up = fa + fb <= 1
    # corners (i, j), (i+1, j), (i, j+1) below the diagonal; (i+1, j), (i+1, j+1), (i, j+1) above
    ci = np.column_stack([np.where(up, i, i + 1), i + 1, i])
    cj = np.column_stack([j, np.where(up, j, j + 1), j + 1])
    weights = np.column_stack([
        np.where(up, 1 - fa - fb, 1 - fb),
        np.where(up, fa, fa + fb - 1),
        np.where(up, fb, 1 - fa),
    ])
    vertex = grid.vertex_at[ci, cj]
    rows = np.repeat(np.arange(len(points)), 3).reshape(-1, 3)
    keep = ok[:, None] & (vertex >= 0)
    return sp.csr_matrix(
        (weights[keep], (rows[keep], vertex[keep])),
        shape=(len(points), domain.n_vertices),
    )


@dataclass(frozen=True, eq=False)
class FieldSample:
    """
    Field values at every vertex of `domain` (boundary entries 0), plus a
    constant `offset` added to every circle average, so h + c is exact
    even where the circle-average convention returns 0.
    """

    domain: LatticeDomain
    values: np.ndarray
    c_T:    float
    offset: float = 0.0
    params: dict = dataclass_field(default_factory=dict)

    def shifted(self, c: float) -> "FieldSample":
        return FieldSample(self.domain, self.values, self.c_T, self.offset + c, dict(self.params))

    @classmethod
    def zero(cls, domain: LatticeDomain, c_T: float = C_TRIANGULAR) -> "FieldSample":
        return cls(domain, np.zeros(domain.n_vertices), c_T)

    def interpolate(self, points) -> np.ndarray:
        """Piecewise-linear interpolation over the lattice triangles (0 off the domain)."""
        points = np.asarray(points, dtype=np.float64)
        out = interpolation_matrix(self.domain, points.reshape(-1, 2)) @ self.values.astype(np.float64)
        return out.reshape(points.shape[:-1])

    def to_json(self) -> dict:
        return {
            "delta":  fraction_str(self.domain.delta),
            "c_T":    self.c_T,
            "offset": self.offset,
            "params": self.params,
        }


class GffSampler:
    """Holds the banded Cholesky factor of L for repeated sampling on one domain."""

    def __init__(self, domain: LatticeDomain, c_T: float = C_TRIANGULAR, verbose: bool = False):
        if domain.n_inner < 1:
            raise ValidationError(f"{domain!r} has no inner vertex; the zero-boundary field is identically 0")
        self.domain = domain
        self.c_T    = float(c_T)
        ell = domain.boundary_length
        adj = domain.triangulation.adjacency.tocoo()
        degree = np.asarray(domain.triangulation.adjacency.sum(axis=1)).ravel()

        keep = (adj.row >= ell) & (adj.col >= ell) & (adj.row < adj.col)
        rows, cols = adj.row[keep] - ell, adj.col[keep] - ell
        n = domain.n_inner
        self.bandwidth = int((cols - rows).max()) if rows.size else 0

        # upper banded storage: ab[u + i - j, j] = L[i, j]
        u = self.bandwidth
        band = np.zeros((u + 1, n))
        band[u] = degree[ell:]
        np.add.at(band, (u + rows - cols, cols), -adj.data[keep])
        self._band = band
        try:
            self._factor = cholesky_banded(band, lower=False)
        except LinAlgError as exc:
            raise SingularLaplacian(f"Laplacian of {domain!r} is not positive definite: {exc}") from exc
        if verbose:
            print(f"[GffSampler] inner={n} bandwidth={u} c_T={self.c_T:.6f}")

    def sample(self, rng: np.random.Generator, params: dict | None = None) -> FieldSample:
        n = self.domain.n_inner
        z = rng.standard_normal(n)
        inner = solve_banded((0, self.bandwidth), self._factor, z) * np.sqrt(self.c_T)
        values = np.concatenate([np.zeros(self.domain.boundary_length), inner])
        return FieldSample(self.domain, values, self.c_T, 0.0, dict(params or {}))

    def covariance_column(self, v: int) -> np.ndarray:
        """c_T·L⁻¹ e_v over all vertices (boundary rows 0)."""
        ell = self.domain.boundary_length
        if v < ell:
            return np.zeros(self.domain.n_vertices)
        e = np.zeros(self.domain.n_inner)
        e[v - ell] = 1.0
        column = cho_solve_banded((self._factor, False), e) * self.c_T
        return np.concatenate([np.zeros(ell), column])

    def variance(self, weights: np.ndarray) -> float:
        """Var[⟨w, h⟩] = c_T·wᵀL⁻¹w for a weight vector over all vertices."""
        w = np.asarray(weights, dtype=np.float64)[self.domain.boundary_length:]
        return float(w @ cho_solve_banded((self._factor, False), w) * self.c_T)


def sample_gff(domain: LatticeDomain, rng: np.random.Generator, c_T: float = C_TRIANGULAR, sampler: GffSampler | None = None) -> FieldSample:
    sampler = sampler or GffSampler(domain, c_T)
    return sampler.sample(rng)


# ── circle averages ─────────────────────────────────────────────────────────
def circle_points(centers, r: float, points: int = 64) -> np.ndarray:
    """(k, points, 2) equally spaced points on the circles of radius r about (k, 2) centers."""
    angles = 2 * np.pi * np.arange(points) / points
    ring = r * np.column_stack([np.cos(angles), np.sin(angles)])
    return np.asarray(centers, dtype=np.float64).reshape(-1, 1, 2) + ring[None, :, :]


def _outline(domain: LatticeDomain) -> Path:
    poly = domain.boundary_polygon
    return Path(np.vstack([poly, poly[:1]]), closed=True)


def circle_averages(field: FieldSample, centers, r: float, points: int = 64) -> np.ndarray:
    """
    h_r at each centre: trapezoidal average of the interpolated field over
    the circle, 0 when the circle leaves the domain; plus the field offset.
    """
    ring = circle_points(centers, r, points)
    inside = _outline(field.domain).contains_points(ring.reshape(-1, 2)).reshape(ring.shape[:2])
    averages = field.interpolate(ring).mean(axis=1)
    return np.where(inside.all(axis=1), averages, 0.0) + field.offset


def circle_average(field: FieldSample, z, r: float, points: int = 64) -> float:
    return float(circle_averages(field, [z], r, points)[0])


def circle_weights(domain: LatticeDomain, z, r: float, points: int = 64) -> np.ndarray:
    """Vertex weights w with h_r(z) = ⟨w, h⟩; all zero when the circle leaves the domain."""
    ring = circle_points([z], r, points)[0]
    if not _outline(domain).contains_points(ring).all():
        return np.zeros(domain.n_vertices)
    return np.asarray(interpolation_matrix(domain, ring).mean(axis=0)).ravel()


def clipped_averages(field: FieldSample, centers, r: float, points: int = 64) -> np.ndarray:
    """Average over the part of each circle inside the domain (semicircles at straight boundary points)."""
    ring = circle_points(centers, r, points)
    inside = _outline(field.domain).contains_points(ring.reshape(-1, 2)).reshape(ring.shape[:2])
    values = np.where(inside, field.interpolate(ring), 0.0)
    counts = inside.sum(axis=1)
    averages = np.divide(values.sum(axis=1), counts, out=np.zeros(counts.shape), where=counts > 0)
    return averages + field.offset


# ── normalization ───────────────────────────────────────────────────────────
@dataclass(frozen=True)
class Calibration:
    c_T:        float
    slope:      float       # d Var[h_r(z)] / d log(1/r) at c_T = 1
    intercept:  float
    radii:      tuple
    variances:  tuple
    samples:    int
    seed:       dict | None = None

    def to_json(self) -> dict:
        return {
            "c_T":        self.c_T,
            "slope":      self.slope,
            "intercept":  self.intercept,
            "radii":      list(self.radii),
            "variances":  list(self.variances),
            "samples":    self.samples,
            "seed":       self.seed,
            "analytic":   C_TRIANGULAR,
        }


def calibrate_c_T(
    domain: LatticeDomain,
    radii,
    samples: int | None,
    rng: np.random.Generator | None,
    z=(0.0, 0.0),
    points: int = 64,
    seed: dict | None = None,
    verbose: bool = False,
) -> Calibration:
    """
    Regress Var[h_r(z)] on log(1/r) for the unnormalized field; c_T = 1/slope.
    With `samples=None` the variances are exact (wᵀL⁻¹w) and no rng is used.
    """
    radii = tuple(float(r) for r in radii)
    sampler = GffSampler(domain, 1.0)
    if samples is None:
        variances = np.array([sampler.variance(circle_weights(domain, z, r, points)) for r in radii])
        samples = 0
    else:
        draws = np.empty((samples, len(radii)))
        for k in range(samples):
            field = sampler.sample(rng)
            draws[k] = [circle_average(field, z, r, points) for r in radii]
        variances = draws.var(axis=0, ddof=1)
    fit = linregress(np.log(1 / np.array(radii)), variances)
    result = Calibration(1 / fit.slope, float(fit.slope), float(fit.intercept), radii, tuple(variances.tolist()), samples, seed)
    if verbose:
        print(f"[calibrate_c_T] slope={fit.slope:.5f} c_T={result.c_T:.4f} (analytic {C_TRIANGULAR:.4f})")
    return result
