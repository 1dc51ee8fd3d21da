from percolation.coloring  import BoundaryCondition, Coloring, as_triangulation, monochromatic_clusters, sample_percolation
from percolation.loops     import Loop, LoopEnsemble, coloring_from_loops, loop_ensemble, vertex_weights
from percolation.interface import InterfacePath, interface
from percolation.crossing  import (
    CrossingFlags,
    boundary_crossing_probability,
    crossing_flags,
    event_mask,
    quad_crossing,
    rhombus_quad,
)
from percolation.oracle    import (
    brute_force_probability,
    exact_crossing_counts,
    exact_crossing_probabilities,
    path_search_event,
)
