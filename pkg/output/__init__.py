from output.mapping  import CSV_COLUMNS, DEFAULT_SVG, LIBRARY_VERSION, SCHEMA_VERSION
from output.envelope import ResultEnvelope, ResultWriter, csv_text, dumps, pack_fields, read_fields, unpack_fields
from output.svg      import loop_segments, render_embedded_map, render_loops, render_pivotals
