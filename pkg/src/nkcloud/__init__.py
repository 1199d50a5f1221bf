"""NK fitness landscapes, offspring fitness clouds, and bottleneck levels.

Construct random epistatic landscapes, exhaustively map how local-search
heuristics transform fitness in one step (fitness clouds) and in the long
run (limit clouds), estimate where each heuristic's progress stalls, and
compare the measured clouds against closed-form mean-offspring curves.
"""

from .analytic import (
    correlation_coefficient,
    expected_max_normals,
    fit_cloud_line,
    hamming_mean,
    mhc_mean,
    nhc_expected_offspring,
    sa_expected_offspring,
    sigma_k,
)
from .binning import DEFAULT_BIN_WIDTH, bin_center, bin_fitness, bin_indices, n_bins
from .cloud import (
    BetaEstimate,
    CloudBin,
    CloudSummary,
    DEFAULT_LIMIT_GENERATIONS,
    LOW_CONFIDENCE_MIN_COUNT,
    build_fitness_cloud,
    build_hamming_cloud,
    build_limit_cloud,
    build_limit_cloud_snapshots,
    beta_report_dict,
    estimate_beta,
    estimate_beta_star,
    write_beta_report,
    write_cloud_csv,
    write_raw_points_csv,
)
from .errors import CapacityError, DataError, ParameterError, QuadratureError
from .heuristics import (
    CoolingSchedule,
    HeuristicKind,
    HeuristicSpec,
    NeutralPartition,
    TEMPERATURE_FLOOR,
    Trajectory,
    build_neutral_partition,
    hamming_neighbors,
    mhc_step,
    mhc_successor_table,
    nhc_step,
    nop_step,
    random_walk_step,
    run_heuristic,
    sa_step,
    temperature_at,
    write_trajectory_csv,
)
from .landscape import (
    ENUMERATION_MAX_N,
    Genotype,
    LANDSCAPE_FORMAT_VERSION,
    NkLandscape,
    generate_landscape,
    load_landscape,
    save_landscape,
)

__version__ = "0.1.0"

__all__ = [
    "BetaEstimate",
    "CapacityError",
    "CloudBin",
    "CloudSummary",
    "CoolingSchedule",
    "DataError",
    "DEFAULT_BIN_WIDTH",
    "DEFAULT_LIMIT_GENERATIONS",
    "ENUMERATION_MAX_N",
    "Genotype",
    "HeuristicKind",
    "HeuristicSpec",
    "LANDSCAPE_FORMAT_VERSION",
    "LOW_CONFIDENCE_MIN_COUNT",
    "NeutralPartition",
    "NkLandscape",
    "ParameterError",
    "QuadratureError",
    "TEMPERATURE_FLOOR",
    "Trajectory",
    "bin_center",
    "bin_fitness",
    "bin_indices",
    "build_fitness_cloud",
    "build_hamming_cloud",
    "build_limit_cloud",
    "build_limit_cloud_snapshots",
    "build_neutral_partition",
    "correlation_coefficient",
    "beta_report_dict",
    "estimate_beta",
    "estimate_beta_star",
    "expected_max_normals",
    "fit_cloud_line",
    "generate_landscape",
    "hamming_mean",
    "hamming_neighbors",
    "load_landscape",
    "mhc_mean",
    "mhc_step",
    "mhc_successor_table",
    "n_bins",
    "nhc_expected_offspring",
    "nhc_step",
    "nop_step",
    "random_walk_step",
    "run_heuristic",
    "sa_expected_offspring",
    "sa_step",
    "save_landscape",
    "sigma_k",
    "temperature_at",
    "write_beta_report",
    "write_cloud_csv",
    "write_raw_points_csv",
    "write_trajectory_csv",
]
