"""Exact-arithmetic toolkit for 3x+1 orbit computation and measurement.

Everything numeric is exact (python ints, Fraction) unless a function says
otherwise; float enters only in guarded log-space comparisons and reported
fractions. See the README for the command line surface.
"""

from .closed_form import (
    closed_form_iterate,
    closed_form_sweep,
    iterate_sequence,
    parity_ones,
    parity_vector,
    r_bounds_sweep,
    r_k,
    r_sequence,
    split_identity_sweep,
    verify_split_identity,
)
from .constants import CONSTANTS, MathConstants
from .density import (
    COL_VARIANT,
    FAMILIES,
    MAIN_T,
    PARITY_BAND,
    PARITY_WINDOW,
    REFORM_LAMBDA,
    RKM_BOUND,
    SYRACUSE_VARIANT,
    CumulativeRow,
    DensityReport,
    FitUndefinedError,
    HoeffdingCheck,
    PredicateSpec,
    ProfileRow,
    ShellRow,
    StarFit,
    fit_star_density,
    hoeffding_check,
    measure_density,
    member,
    reform_profile,
)
from .maps import (
    DEFAULT_BUDGET,
    GeneralizedMap,
    OrbitRecord,
    TMinResult,
    col_step,
    generalized_step,
    nu2,
    orbit,
    syracuse_step,
    t_min,
    t_step,
    tau,
)
from .step_tables import (
    AffineStep,
    BenchReport,
    CensusResult,
    StepTable,
    advance_array,
    batch_advance,
    bench_throughput,
    build_table,
    census_on_interval,
    get_table,
    load_table,
    parity_census,
    save_table,
)
from .stopping import (
    TauCheckpoint,
    TauHistogram,
    TauSummary,
    compute_tau_range,
    tau_average,
    tau_exceedance_density,
    tau_ratio_histogram,
    tau_sieve,
    tmin_threshold_density,
)

__version__ = "0.1.0"

__all__ = [
    "AffineStep",
    "BenchReport",
    "CensusResult",
    "COL_VARIANT",
    "CONSTANTS",
    "CumulativeRow",
    "DEFAULT_BUDGET",
    "DensityReport",
    "FAMILIES",
    "FitUndefinedError",
    "GeneralizedMap",
    "HoeffdingCheck",
    "MAIN_T",
    "MathConstants",
    "OrbitRecord",
    "PARITY_BAND",
    "PARITY_WINDOW",
    "PredicateSpec",
    "ProfileRow",
    "REFORM_LAMBDA",
    "RKM_BOUND",
    "ShellRow",
    "StarFit",
    "StepTable",
    "SYRACUSE_VARIANT",
    "TauCheckpoint",
    "TauHistogram",
    "TauSummary",
    "TMinResult",
    "advance_array",
    "batch_advance",
    "bench_throughput",
    "build_table",
    "census_on_interval",
    "closed_form_iterate",
    "closed_form_sweep",
    "col_step",
    "compute_tau_range",
    "fit_star_density",
    "generalized_step",
    "get_table",
    "hoeffding_check",
    "iterate_sequence",
    "load_table",
    "measure_density",
    "member",
    "nu2",
    "orbit",
    "parity_census",
    "parity_ones",
    "parity_vector",
    "r_bounds_sweep",
    "r_k",
    "r_sequence",
    "reform_profile",
    "save_table",
    "split_identity_sweep",
    "syracuse_step",
    "t_min",
    "t_step",
    "tau",
    "tau_average",
    "tau_exceedance_density",
    "tau_ratio_histogram",
    "tau_sieve",
    "tmin_threshold_density",
    "verify_split_identity",
]
