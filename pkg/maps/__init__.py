from maps.triangulation import MarkedTriangulation, Triangulation, edge_arc
from maps.counting      import closed_form_count, count_triangulations
from maps.decomposition import build_map, enumerate_triangulations, sample_uniform
from maps.boltzmann     import BoltzmannSampler, sample_boltzmann, sample_marked_edges
from maps.metric        import MetricMeasureData, graph_distances, metric_measure_data
