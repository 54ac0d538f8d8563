"""Noise performance of the constrained LASSO and minimum conic singular
values for isotropically random orthogonal measurement matrices, next to
Gaussian and partial DCT / Hadamard ensembles."""

from .ensembles import (
    Ensemble,
    MeasurementMatrix,
    RandomSource,
    Scaling,
    gen_gaussian,
    gen_iro,
    gen_noise,
    gen_partial_dct,
    gen_partial_hadamard,
    generate,
)
from .errors import DimensionError, IroLassoError, NumericalError, RegimeError, SpecError
from .geometry import (
    SparseSignal,
    WidthEstimate,
    descent_cone_member,
    estimate_width_mc,
    project_tangent_cone,
    random_sparse_signal,
    width_closed_form_sparse,
    width_log_bound,
)
from .mcsv import empirical_mcsv, mcsv_gap_report
from .predictions import (
    ProblemDims,
    ao_saddle_numeric,
    mcsv_ao_numeric,
    mcsv_bound_gaussian,
    mcsv_bound_iro,
    nse_gaussian,
    nse_iro,
)
from .solver import SolveConfig, SolveResult, nse, project_l1_ball, solve_classo

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "Ensemble",
    "IroLassoError",
    "MeasurementMatrix",
    "NumericalError",
    "ProblemDims",
    "RandomSource",
    "RegimeError",
    "Scaling",
    "SolveConfig",
    "SolveResult",
    "SparseSignal",
    "SpecError",
    "WidthEstimate",
    "ao_saddle_numeric",
    "descent_cone_member",
    "empirical_mcsv",
    "estimate_width_mc",
    "gen_gaussian",
    "gen_iro",
    "gen_noise",
    "gen_partial_dct",
    "gen_partial_hadamard",
    "generate",
    "mcsv_ao_numeric",
    "mcsv_bound_gaussian",
    "mcsv_bound_iro",
    "mcsv_gap_report",
    "nse",
    "nse_gaussian",
    "nse_iro",
    "project_l1_ball",
    "project_tangent_cone",
    "random_sparse_signal",
    "solve_classo",
    "width_closed_form_sparse",
    "width_log_bound",
]
