from utils.seeds     import make_rng, seed_record, seed_split
from utils.rationals import fraction_str, parse_fraction, parse_fraction_list
from utils.parallel  import map_batches, resolve_threads
