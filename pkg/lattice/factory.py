from lattice.shape_base import DomainShape


def create_shape(spec) -> DomainShape:
    """
    Factory that returns the DomainShape described by `spec`: a dict with a
    "type" key, a bare list of polygon vertices, or an existing DomainShape.
    """
    if isinstance(spec, DomainShape):
        return spec
    if isinstance(spec, (list, tuple)):
        from lattice.shapes import PolygonShape
        return PolygonShape(spec)

    shape_type = str(spec.get("type", "disk")).lower()

    if shape_type == "disk":
        from lattice.shapes import DiskShape
        return DiskShape(
            radius=spec.get("radius", 1.0),
            center=tuple(spec.get("center", (0.0, 0.0))),
        )

    elif shape_type == "triangle":
        from lattice.shapes import equilateral_triangle
        return equilateral_triangle(spec.get("side", 1.0))

    elif shape_type in ("rectangle", "square"):
        from lattice.shapes import rectangle
        width = spec.get("width", spec.get("side", 1.0))
        return rectangle(width, spec.get("height", width))

    elif shape_type == "polygon":
        from lattice.shapes import PolygonShape
        return PolygonShape(spec["vertices"])

    else:
        raise ValueError(
            f"Unknown domain type: '{shape_type}'. Valid options: disk, triangle, rectangle, square, polygon"
        )
