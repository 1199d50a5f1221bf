"""Command-line front ends: cloud CSVs and reports in, figure files out.

Three scripts share this module: ``plot-cloud`` for a single offspring
cloud, ``plot-limit-cloud`` for one or more limit clouds (a multi-panel
grid when several are given), and ``plot-table1`` for the consolidated
battery report.  Exit codes match the producing tool: 0 success, 2 bad
parameters, 4 unusable data, 5 file I/O.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DataError, ParameterError
from .reading import read_table1_report, sibling_beta_path
from .render import PlotSpec, render_cloud, render_snapshot_grid, render_table1


def _resolve_beta(cloud: Path, explicit, suppress: bool):
    """Pick the beta report: the explicit path wins, otherwise the sibling
    ``*_beta.json`` next to the cloud CSV unless markers are disabled."""
    if suppress:
        return None
    if explicit:
        return Path(explicit)
    return sibling_beta_path(cloud)


def _output_path(args, default: Path) -> Path:
    return Path(args.out) if args.out else default


def cmd_cloud(args) -> int:
    cloud = Path(args.cloud)
    spec = PlotSpec(
        cloud=cloud,
        output=_output_path(args, cloud.with_suffix(".png")),
        beta=_resolve_beta(cloud, args.beta, args.no_beta),
        analytic=Path(args.analytic) if args.analytic else None,
        raw_points=Path(args.raw_points) if args.raw_points else None,
        title=args.title,
    )
    out = render_cloud(spec)
    print(f"cloud figure -> {out}")
    return 0


def cmd_limit_cloud(args) -> int:
    clouds = [Path(c) for c in args.clouds]
    if args.labels:
        labels = [s.strip() for s in args.labels.split(",")]
        if len(labels) != len(clouds):
            raise ParameterError(
                f"{len(labels)} labels for {len(clouds)} cloud files")
    else:
        labels = [c.stem for c in clouds]
    betas = [_resolve_beta(c, None, args.no_beta) for c in clouds]
    if args.beta:
        if len(args.beta) != len(clouds):
            raise ParameterError(
                f"{len(args.beta)} beta reports for {len(clouds)} cloud files")
        betas = [Path(b) for b in args.beta]

    if len(clouds) == 1:
        spec = PlotSpec(cloud=clouds[0],
                        output=_output_path(args, clouds[0].with_suffix(".png")),
                        beta=betas[0], title=args.title or labels[0],
                        ylabel="limit fitness")
        out = render_cloud(spec)
    else:
        default = clouds[0].with_name("limit_cloud_grid.png")
        out = render_snapshot_grid(list(zip(labels, clouds, betas)),
                                   _output_path(args, default),
                                   title=args.title)
    print(f"limit-cloud figure -> {out}")
    return 0


def cmd_table1(args) -> int:
    report_path = Path(args.report)
    report = read_table1_report(report_path)
    image = Path(args.out) if args.out else report_path.with_suffix(".png")
    markdown = Path(args.markdown) if args.markdown else None
    out = render_table1(report, image, markdown)
    print(f"table figure -> {out}")
    if markdown is not None:
        print(f"table markdown -> {markdown}")
    return 0


def _cloud_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-cloud",
        description="Render one offspring cloud CSV as a figure")
    parser.add_argument("--cloud", required=True, help="cloud CSV to render")
    parser.add_argument("--beta", help="beta report JSON for markers "
                        "(default: sibling *_beta.json when present)")
    parser.add_argument("--no-beta", action="store_true",
                        help="skip bottleneck markers entirely")
    parser.add_argument("--analytic", help="predicted-curve CSV overlay")
    parser.add_argument("--raw-points", help="raw scatter CSV overlay")
    parser.add_argument("--title", help="figure title")
    parser.add_argument("--out", help="output image path (default: "
                        "cloud path with .png)")
    parser.set_defaults(func=cmd_cloud)
    return parser


def _limit_cloud_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-limit-cloud",
        description="Render limit-cloud CSVs; several files become a "
                    "snapshot grid")
    parser.add_argument("--clouds", nargs="+", required=True,
                        help="limit-cloud CSV files, in panel order")
    parser.add_argument("--labels", help="comma-separated panel labels "
                        "(default: file stems)")
    parser.add_argument("--beta", nargs="*",
                        help="beta report JSONs, one per cloud "
                        "(default: sibling *_beta.json when present)")
    parser.add_argument("--no-beta", action="store_true",
                        help="skip bottleneck markers entirely")
    parser.add_argument("--title", help="figure title")
    parser.add_argument("--out", help="output image path")
    parser.set_defaults(func=cmd_limit_cloud)
    return parser


def _table1_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-table1",
        description="Render a consolidated battery report as a table")
    parser.add_argument("--report", required=True,
                        help="table1_report.json to render")
    parser.add_argument("--out", help="output image path (default: report "
                        "path with .png)")
    parser.add_argument("--markdown", help="also write a Markdown table here")
    parser.set_defaults(func=cmd_table1)
    return parser


def _run(parser: argparse.ArgumentParser, argv) -> int:
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


def main_cloud(argv=None) -> int:
    return _run(_cloud_parser(), argv)


def main_limit_cloud(argv=None) -> int:
    return _run(_limit_cloud_parser(), argv)


def main_table1(argv=None) -> int:
    return _run(_table1_parser(), argv)


def entry_cloud() -> None:
    sys.exit(main_cloud())


def entry_limit_cloud() -> None:
    sys.exit(main_limit_cloud())


def entry_table1() -> None:
    sys.exit(main_table1())


if __name__ == "__main__":
    sys.exit(main_cloud())
