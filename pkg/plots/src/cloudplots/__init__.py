"""Figure rendering for fitness-cloud CSV files and battery reports.

This package consumes the file formats written by the ``nkcloud``
command-line tool (per-bin cloud CSVs, raw scatter CSVs, predicted-curve
CSVs, bottleneck reports, and the consolidated battery report) and
renders them as figures.  It never recomputes a statistic: what is
plotted is exactly what the files contain.
"""

from .errors import DataError, ParameterError
from .reading import (
    AnalyticCurve,
    BetaReport,
    CloudTable,
    read_analytic_csv,
    read_beta_report,
    read_cloud_csv,
    read_raw_points_csv,
    read_table1_report,
    sibling_beta_path,
)
from .render import (
    PlotSpec,
    downsample,
    draw_cloud,
    format_beta,
    render_cloud,
    render_snapshot_grid,
    render_table1,
    table1_markdown,
)

__all__ = [
    "AnalyticCurve",
    "BetaReport",
    "CloudTable",
    "DataError",
    "ParameterError",
    "PlotSpec",
    "downsample",
    "draw_cloud",
    "format_beta",
    "read_analytic_csv",
    "read_beta_report",
    "read_cloud_csv",
    "read_raw_points_csv",
    "read_table1_report",
    "render_cloud",
    "render_snapshot_grid",
    "render_table1",
    "sibling_beta_path",
    "table1_markdown",
]

__version__ = "0.1.0"
