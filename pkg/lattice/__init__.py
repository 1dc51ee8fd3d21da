from lattice.shape_base import DomainShape
from lattice.shapes     import CurveShape, DiskShape, PolygonShape, equilateral_triangle, rectangle
from lattice.factory    import create_shape
from lattice.domain     import (
    DIRECTIONS,
    LatticeDomain,
    LatticePoint,
    Quad,
    SiteGrid,
    boundary_arc,
    build_lattice_domain,
    hexagon_cell,
    lattice_polygon,
    marked_domain,
    rhombus_domain,
)
