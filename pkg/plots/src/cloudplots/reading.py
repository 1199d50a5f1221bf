"""Readers for the cloud CSV and report formats.

Each reader parses one of the file formats emitted by the ``nkcloud``
command-line tool and hands the columns over unchanged.  Nothing here
recomputes a statistic: every plotted series is taken verbatim from the
file, so a rendered figure is a faithful view of its inputs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

CLOUD_COLUMNS = ("bin_center", "f_min", "f_max", "f_mean", "f_std",
                 "count", "low_confidence")
RAW_COLUMNS = ("parent_fitness", "offspring_fitness")
ANALYTIC_COLUMNS = ("f", "predicted_mean", "heuristic", "n", "k", "temperature")
BETA_KEYS = ("beta", "beta_star", "method", "accuracy")
TABLE1_KEYS = ("n", "k", "seeds", "max_fitness", "rows")
ROW_KEYS = ("label", "beta", "beta_star", "per_seed")


@dataclass(frozen=True)
class CloudTable:
    """Per-bin cloud statistics, column for column as stored in the CSV."""

    center: np.ndarray
    f_min: np.ndarray
    f_max: np.ndarray
    f_mean: np.ndarray
    f_std: np.ndarray
    count: np.ndarray
    low_confidence: np.ndarray
    predicted: np.ndarray | None = None


@dataclass(frozen=True)
class AnalyticCurve:
    """A predicted mean-offspring curve over a parent-fitness grid."""

    f: np.ndarray
    predicted: np.ndarray
    heuristic: str
    n: int
    k: int
    temperature: float | None


@dataclass(frozen=True)
class BetaReport:
    """Bottleneck estimates as stored in a ``*_beta.json`` file."""

    beta: float | tuple[float, float] | None
    beta_star: float | None
    method: str
    accuracy: float
    heuristic: dict
    generations: int | None


def _check_header(fieldnames, required, path) -> None:
    missing = [c for c in required if fieldnames is None or c not in fieldnames]
    if missing:
        raise DataError(f"{path}: missing columns: {', '.join(missing)}")


def _cell(row: dict, column: str, path, line: int) -> float:
    try:
        return float(row[column])
    except (TypeError, ValueError):
        raise DataError(
            f"{path}: line {line}: column {column!r} is not a number: "
            f"{row[column]!r}")


def read_cloud_csv(path) -> CloudTable:
    """Parse a per-bin cloud CSV, refusing files with missing columns."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, CLOUD_COLUMNS, path)
        has_predicted = "predicted_mean" in reader.fieldnames
        columns = {c: [] for c in CLOUD_COLUMNS}
        predicted = []
        for line, row in enumerate(reader, start=2):
            for c in ("bin_center", "f_min", "f_max", "f_mean", "f_std"):
                columns[c].append(_cell(row, c, path, line))
            columns["count"].append(int(_cell(row, "count", path, line)))
            columns["low_confidence"].append(
                int(_cell(row, "low_confidence", path, line)) != 0)
            if has_predicted:
                cell = row["predicted_mean"]
                predicted.append(np.nan if cell in (None, "")
                                 else _cell(row, "predicted_mean", path, line))
    if not columns["bin_center"]:
        raise DataError(f"{path}: no data rows")
    return CloudTable(
        center=np.array(columns["bin_center"]),
        f_min=np.array(columns["f_min"]),
        f_max=np.array(columns["f_max"]),
        f_mean=np.array(columns["f_mean"]),
        f_std=np.array(columns["f_std"]),
        count=np.array(columns["count"], dtype=np.int64),
        low_confidence=np.array(columns["low_confidence"], dtype=bool),
        predicted=np.array(predicted) if has_predicted else None,
    )


def read_raw_points_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a raw scatter CSV into (parent, offspring) fitness arrays."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        _check_header(header, RAW_COLUMNS, path)
        body = fh.read()
        if not body.strip():
            raise DataError(f"{path}: no data rows")
        try:
            data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        except ValueError as exc:
            raise DataError(f"{path}: unreadable point data: {exc}")
    if data.shape[1] != len(header):
        raise DataError(f"{path}: rows do not match the header width")
    parent = data[:, header.index("parent_fitness")]
    offspring = data[:, header.index("offspring_fitness")]
    return parent, offspring


def read_analytic_csv(path) -> AnalyticCurve:
    """Parse a predicted-curve CSV written by the analytic command."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, ANALYTIC_COLUMNS, path)
        grid, values = [], []
        first = None
        for line, row in enumerate(reader, start=2):
            grid.append(_cell(row, "f", path, line))
            values.append(_cell(row, "predicted_mean", path, line))
            if first is None:
                first = row
    if first is None:
        raise DataError(f"{path}: no data rows")
    temp = first["temperature"]
    return AnalyticCurve(
        f=np.array(grid),
        predicted=np.array(values),
        heuristic=first["heuristic"],
        n=int(first["n"]),
        k=int(first["k"]),
        temperature=None if temp in (None, "") else float(temp),
    )


def _load_json(path) -> dict:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON: {exc}")
    if not isinstance(payload, dict):
        raise DataError(f"{path}: expected a JSON object")
    return payload


def read_beta_report(path) -> BetaReport:
    """Parse a bottleneck report, accepting point, interval or absent beta."""
    payload = _load_json(path)
    missing = [k for k in BETA_KEYS if k not in payload]
    if missing:
        raise DataError(f"{path}: missing keys: {', '.join(missing)}")
    beta = payload["beta"]
    if isinstance(beta, list):
        if len(beta) != 2:
            raise DataError(f"{path}: interval beta must have two endpoints")
        beta = (float(beta[0]), float(beta[1]))
    elif beta is not None:
        beta = float(beta)
    star = payload["beta_star"]
    return BetaReport(
        beta=beta,
        beta_star=None if star is None else float(star),
        method=str(payload["method"]),
        accuracy=float(payload["accuracy"]),
        heuristic=payload.get("heuristic") or {},
        generations=payload.get("generations"),
    )


def read_table1_report(path) -> dict:
    """Parse a consolidated battery report, refusing empty or partial ones."""
    payload = _load_json(path)
    missing = [k for k in TABLE1_KEYS if k not in payload]
    if missing:
        raise DataError(f"{path}: missing keys: {', '.join(missing)}")
    rows = payload["rows"]
    if not isinstance(rows, list) or not rows:
        raise DataError(f"{path}: report has no rows to render")
    for i, row in enumerate(rows):
        bad = [k for k in ROW_KEYS if not isinstance(row, dict) or k not in row]
        if bad:
            raise DataError(f"{path}: row {i} is missing keys: {', '.join(bad)}")
    return payload


def sibling_beta_path(cloud_path) -> Path | None:
    """Map ``X_cloud.csv`` to ``X_beta.json`` when that file exists."""
    cloud_path = Path(cloud_path)
    if not cloud_path.name.endswith("_cloud.csv"):
        return None
    candidate = cloud_path.with_name(
        cloud_path.name[:-len("_cloud.csv")] + "_beta.json")
    return candidate if candidate.exists() else None
