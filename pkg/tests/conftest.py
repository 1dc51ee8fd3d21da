from fractions import Fraction

import numpy as np
import pytest

from lattice.domain import build_lattice_domain, rhombus_domain
from maps.decomposition import sample_uniform
from maps.triangulation import MarkedTriangulation, Triangulation


def is_simple(tri: Triangulation) -> bool:
    pairs = set(zip(tri.origin.tolist(), tri.dest.tolist()))
    return len(pairs) == tri.n_half_edges


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cone() -> Triangulation:
    """Triangle 0, 1, 2 with one inner vertex 3 joined to every corner."""
    return Triangulation.from_faces([(0, 1, 3), (1, 2, 3), (2, 0, 3)], boundary_length=3, n_vertices=4)


@pytest.fixture
def marked_cone(cone) -> MarkedTriangulation:
    return MarkedTriangulation(cone, 0, 1, 2)


@pytest.fixture
def small_map():
    """A fixed uniform map of the square with five inner vertices."""
    return sample_uniform(4, 5, np.random.default_rng(7))


@pytest.fixture
def rhombus():
    return rhombus_domain(6, Fraction(1, 6))


@pytest.fixture
def disk():
    return build_lattice_domain({"type": "disk", "radius": 1.0}, Fraction(1, 8))


@pytest.fixture
def triangle():
    return build_lattice_domain({"type": "triangle", "side": 1.0}, Fraction(1, 10))
