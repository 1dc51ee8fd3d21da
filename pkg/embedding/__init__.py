from embedding.cardy       import BaryCoords, EmbeddedMap, cardy_embedding, crossing_counts, project_to_delta
from embedding.pushforward import PushforwardData, pushforward
from embedding.schwarz     import SchwarzChristoffelMap, cardy_rectangle_crossing, riemann_to_delta
