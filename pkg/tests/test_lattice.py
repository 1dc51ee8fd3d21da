from fractions import Fraction

import numpy as np
import pytest

from lattice.domain import (
    LatticeDomain,
    LatticePoint,
    Quad,
    as_fraction,
    boundary_arc_ids,
    build_lattice_domain,
    hexagon_cell,
    marked_domain,
    rhombus_domain,
)
from lattice.factory import create_shape
from lattice.shapes import DiskShape, PolygonShape, signed_area
from state.errors import EmptyApproximation, SamePosition, UnknownVertex


def test_as_fraction():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction(2) == Fraction(2)
    assert as_fraction(Fraction(1, 16)) == Fraction(1, 16)
    with pytest.raises(ValueError):
        as_fraction(0)


def test_lattice_point_positions():
    p = LatticePoint(1, 2)
    assert p.exact_position(Fraction(1, 2)) == (Fraction(1), Fraction(1, 2))
    x, y = p.position(0.5)
    assert x == pytest.approx(1.0)
    assert y == pytest.approx(np.sqrt(3) / 2)
    assert len(set(p.neighbors())) == 6


def test_rhombus_sizes():
    domain = rhombus_domain(4)
    assert domain.boundary_length == 16
    assert domain.n_inner == 9
    assert domain.vertex_id((0, 0)) == 0
    tri = domain.triangulation
    tri.validate()
    assert tri.n_faces - 1 == 2 * 4 * 4


def test_inner_vertices_have_full_neighbourhoods(disk):
    for v in range(disk.boundary_length, disk.n_vertices):
        assert None not in disk.lattice_neighbors(v)
    inner = disk.positions[disk.boundary_length:]
    assert np.all(np.linalg.norm(inner, axis=1) < 1.0)


def test_domain_triangulation_is_valid(disk, triangle):
    for domain in (disk, triangle):
        tri = domain.triangulation
        tri.validate()
        assert tri.n_inner == domain.n_inner
        assert 0 < domain.polygon_area


def test_boundary_is_counterclockwise(disk):
    assert signed_area(disk.boundary_polygon) > 0


def test_empty_approximation():
    with pytest.raises(EmptyApproximation):
        build_lattice_domain({"type": "disk", "radius": 0.1, "center": [0.5, 0.3]}, 1)


def test_unknown_vertex(rhombus):
    with pytest.raises(UnknownVertex):
        rhombus.vertex_id((100, 100))
    assert not rhombus.contains_point((100, 100))


def test_domain_json(triangle):
    back = LatticeDomain.from_json(triangle.to_json())
    assert back.delta == triangle.delta
    assert np.array_equal(back.inner, triangle.inner)
    assert np.array_equal(back.boundary, triangle.boundary)


def test_boundary_arcs():
    assert boundary_arc_ids(10, 8, 2).tolist() == [8, 9, 0, 1, 2]
    with pytest.raises(SamePosition):
        boundary_arc_ids(5, 1, 6)


def test_quad_sides_cover_the_boundary():
    domain = rhombus_domain(4)
    quad = Quad(domain, (0, 4, 8, 12))
    assert quad.side(1).tolist() == [0, 1, 2, 3, 4]
    assert quad.side(4).tolist() == [12, 13, 14, 15, 0]
    covered = set()
    for k in range(1, 5):
        covered.update(quad.side(k).tolist())
    assert covered == set(range(16))
    with pytest.raises(ValueError):
        Quad(domain, (0, 8, 4, 12))


def test_hexagon_cell_area(rhombus):
    cell = hexagon_cell(rhombus, LatticePoint(2, 2))
    assert signed_area(cell) == pytest.approx(rhombus.hexagon_area)


def test_marked_domain(triangle):
    marks = [(0.5, 0.0), (0.75, np.sqrt(3) / 4), (0.25, np.sqrt(3) / 4)]
    marked = marked_domain(triangle, marks)
    assert marked.map is triangle.triangulation
    assert len({marked.a, marked.b, marked.c}) == 3


def test_shape_factory():
    assert isinstance(create_shape({"type": "disk"}), DiskShape)
    assert isinstance(create_shape([(0, 0), (1, 0), (0, 1)]), PolygonShape)
    square = create_shape({"type": "square", "side": 2.0})
    assert square.contains(np.array([[1.0, 1.0]]))[0]
    assert not square.contains(np.array([[1.0, 1.95]]), margin=0.1)[0]
    with pytest.raises(ValueError, match="Unknown domain type"):
        create_shape({"type": "star"})


@pytest.mark.parametrize("q", [3, 5, 8, 13, 20])
def test_disk_triangulations(q):
    domain = build_lattice_domain({"type": "disk", "radius": 1.0}, Fraction(1, q))
    tri = domain.triangulation
    tri.validate()
    # Euler: a triangulated ℓ-gon with n inner vertices has 2n + ℓ - 2 triangles
    assert tri.n_faces - 1 == 2 * domain.n_inner + domain.boundary_length - 2


def _flood_fill(radius: float, delta: Fraction) -> set[tuple[int, int]]:
    """Lattice points strictly inside the disk that connect to the origin."""
    h = float(delta)

    def inside(i, j):
        return np.hypot(h * (i + j / 2), h * j * np.sqrt(3) / 2) < radius - 1e-9

    seen = {(0, 0)}
    todo = [(0, 0)]
    while todo:
        i, j = todo.pop()
        for p in LatticePoint(i, j).neighbors():
            key = (p.i, p.j)
            if key not in seen and inside(*key):
                seen.add(key)
                todo.append(key)
    return seen


@pytest.mark.parametrize("q", [7, 10, 13, 20])
def test_disk_matches_flood_fill(q):
    domain = build_lattice_domain({"type": "disk", "radius": 1.0}, Fraction(1, q))
    assert {tuple(p) for p in domain.inner.tolist()} == _flood_fill(1.0, Fraction(1, q))


def test_finer_mesh_keeps_more_points():
    counts = [build_lattice_domain({"type": "disk", "radius": 1.0}, Fraction(1, q)).n_inner for q in (5, 10, 20)]
    assert counts == sorted(counts)


def test_approximation_is_a_fixed_point(disk, triangle):
    for domain in (disk, triangle):
        again = build_lattice_domain(PolygonShape(domain.boundary_polygon), domain.delta)
        assert np.array_equal(again.inner, domain.inner)
        assert np.array_equal(again.boundary, domain.boundary)


def test_construction_is_deterministic():
    spec = {"type": "triangle", "side": 1.0}
    one = build_lattice_domain(spec, Fraction(1, 12))
    two = build_lattice_domain(spec, Fraction(1, 12))
    assert one.to_json() == two.to_json()
    assert np.array_equal(one.positions, two.positions)
    for v in range(one.n_vertices):
        assert two.vertex_id(one.point(v)) == v


def _shared_corners(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.sum(np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2) < 1e-9))


def test_neighbouring_hexagons_share_one_edge(disk):
    v = disk.vertex_id((0, 0))
    cell = hexagon_cell(disk, disk.point(v))
    neighbours = [hexagon_cell(disk, disk.point(w)) for w in disk.lattice_neighbors(v)]
    assert [_shared_corners(cell, other) for other in neighbours] == [2] * 6
    # the six neighbours close up around the cell: every corner is met by exactly two of them
    for corner in cell:
        assert sum(_shared_corners(corner[None, :], other) for other in neighbours) == 2
    far = hexagon_cell(disk, LatticePoint(2, 0))
    assert _shared_corners(cell, far) == 0
