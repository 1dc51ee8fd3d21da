from typing import Callable

import numpy as np
from matplotlib.path import Path

from lattice.shape_base import DomainShape


def _segment_distances(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed polyline through `vertices`."""
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    ab = b - a
    chunk = max(1, 1_000_000 // len(a))
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk]
        ap = p[:, None, :] - a[None, :, :]
        t = np.clip((ap * ab).sum(-1) / (ab * ab).sum(-1), 0.0, 1.0)
        closest = a[None, :, :] + t[..., None] * ab[None, :, :]
        out[start:start + chunk] = np.linalg.norm(p[:, None, :] - closest, axis=-1).min(axis=1)
    return out


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class DiskShape(DomainShape):
    def __init__(self, radius: float = 1.0, center: tuple[float, float] = (0.0, 0.0)):
        if radius <= 0:
            raise ValueError(f"disk radius must be positive, got {radius}")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=np.float64)

    def contains(self, points, margin=0.0):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.linalg.norm(points - self.center, axis=1) < self.radius - margin

    def bounding_box(self):
        cx, cy = self.center
        return cx - self.radius, cy - self.radius, cx + self.radius, cy + self.radius

    def outline(self, resolution: int = 256):
        t = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
        return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def describe(self):
        return {"type": "disk", "radius": self.radius, "center": self.center.tolist()}


class PolygonShape(DomainShape):
    """Simple polygon; vertices are reordered counterclockwise if given clockwise."""

    def __init__(self, vertices, name: str = "polygon"):
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[0] < 3 or vertices.shape[1] != 2:
            raise ValueError(f"polygon needs at least 3 (x, y) vertices, got shape {vertices.shape}")
        if signed_area(vertices) < 0:
            vertices = vertices[::-1].copy()
        self.vertices = vertices
        self.name     = name
        self._path    = Path(np.vstack([vertices, vertices[:1]]), closed=True)

    def contains(self, points, margin=0.0):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        inside = self._path.contains_points(points)
        if margin > 0 and inside.any():
            inside[inside] &= _segment_distances(points[inside], self.vertices) > margin
        return inside

    def distance_to_boundary(self, points) -> np.ndarray:
        return _segment_distances(np.atleast_2d(np.asarray(points, dtype=np.float64)), self.vertices)

    def bounding_box(self):
        lo, hi = self.vertices.min(axis=0), self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def outline(self):
        return self.vertices.copy()

    def describe(self):
        return {"type": self.name, "vertices": self.vertices.tolist()}


class CurveShape(PolygonShape):
    """Jordan curve t ∈ [0, 1) ↦ (x, y), approximated by a fine inscribed polygon."""

    def __init__(self, curve: Callable[[np.ndarray], np.ndarray], samples: int = 4096):
        t = np.linspace(0.0, 1.0, samples, endpoint=False)
        points = np.asarray(curve(t), dtype=np.float64)
        if points.shape == (2, samples):
            points = points.T
        super().__init__(points, name="curve")
        self.samples = samples

    def describe(self):
        return {"type": "curve", "samples": self.samples}


def equilateral_triangle(side: float = 1.0) -> PolygonShape:
    """Δ with corners (0,0), (side,0), (side/2, side·√3/2)."""
    return PolygonShape(
        [(0.0, 0.0), (side, 0.0), (side / 2, side * np.sqrt(3) / 2)], name="triangle"
    )


def rectangle(width: float, height: float) -> PolygonShape:
    return PolygonShape([(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)], name="rectangle")
