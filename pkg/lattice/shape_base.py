from abc import ABC, abstractmethod

import numpy as np


class DomainShape(ABC):
    """Abstract base class for the Jordan domains a lattice approximation is built from."""

    @abstractmethod
    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """
        Boolean mask of the (k, 2) points lying inside the domain at distance
        greater than `margin` from its boundary.
        """
        ...

    @abstractmethod
    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax)."""
        ...

    @abstractmethod
    def outline(self) -> np.ndarray:
        """Closed counterclockwise polyline (m, 2) used for rendering."""
        ...

    @abstractmethod
    def describe(self) -> dict:
        """JSON-ready description, echoed into result metadata."""
        ...
