from field.gff import (
    C_TRIANGULAR,
    Calibration,
    FieldSample,
    GffSampler,
    calibrate_c_T,
    circle_average,
    circle_averages,
    circle_weights,
    interpolation_matrix,
    sample_gff,
)
from field.gmc import ALPHA, GAMMA, boundary_measure, clock_rates, gmc_measure
