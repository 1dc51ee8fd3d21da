# CSV column mapping per command.
# Edit these to change the column order of the files a command writes; every
# row a command produces is a dict keyed by these names.
#
# Format: command → columns

LIBRARY_VERSION = "0.1.0"
SCHEMA_VERSION  = "1"

CSV_COLUMNS = {
    # one row per (map, vertex): the three crossing indicators summed over samples
    "crossing":     ["map", "v", "hits_a", "hits_b", "hits_c", "samples"],

    # one row per δ: α̂₄(δ, r) with its binomial standard error
    "four-arm":     ["delta", "r", "samples", "hits", "p", "se"],

    # one row per ε-pivotal vertex
    "pivotals":     ["v", "x", "y", "mass"],

    # one row per vertex of a GMC measure
    "gmc":          ["v", "x", "y", "mass"],

    # per-vertex embedding, mirrors embed.json
    "embed":        ["v", "x", "y", "z", "se_x", "se_y", "se_z"],

    # one row per grid atom of an occupation measure
    "occupation":   ["x", "y", "mass"],

    # one row per δ of the verify-cardy sweep
    "verify-cardy": ["delta", "n_vertices", "sup_error", "mc_budget", "sum_to_one_defect", "defect_budget"],
}

# SVG files are optional; these are the file names a command uses when
# --svg is given without a path.
DEFAULT_SVG = {
    "embed":        "embed.svg",
    "crossing":     "loops.svg",
    "pivotals":     "pivotals.svg",
}
