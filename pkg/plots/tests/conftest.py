"""Shared fixtures: real input files produced by the nkcloud tool.

The producing tool is driven through its command line only, so these
tests exercise exactly the interchange formats a user would hand to the
plot scripts.  The figure-acceptance test prefers the full-size battery
artifacts in ``acceptance_out/`` when a prior run left them behind and
falls back to the small instances generated here.
"""

import subprocess
import sys
from pathlib import Path

import pytest

ACCEPTANCE_LINES: list[str] = []
ACCEPTANCE_OUT = Path(__file__).resolve().parents[2] / "acceptance_out"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria (figures)")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def record(num: int, ok: bool, detail: str) -> None:
    line = f"[criterion {num}] {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    report = ACCEPTANCE_OUT / "acceptance_report.txt"
    if report.exists():
        kept = [l for l in report.read_text().splitlines()
                if not l.startswith(f"[criterion {num}]")]
        report.write_text("\n".join(kept + [line]) + "\n")
    print(line)


@pytest.fixture
def record_criterion():
    return record


def run_tool(*args) -> None:
    proc = subprocess.run([sys.executable, "-m", "nkcloud.cli", *map(str, args)],
                         capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"nkcloud {' '.join(map(str, args))} failed "
                           f"({proc.returncode}): {proc.stderr}")


@pytest.fixture(scope="session")
def cli_fixtures(tmp_path_factory):
    """Small-instance input files covering every consumed format."""
    d = tmp_path_factory.mktemp("cloud_data")
    land = d / "land.json"
    run_tool("gen", "--n", 10, "--k", 4, "--seed", 3, "--out", land)
    run_tool("limit-cloud", "--landscape", land, "--heuristic", "mhc",
             "--out-dir", d)
    run_tool("limit-cloud", "--landscape", land, "--heuristic", "sa",
             "--temp", 0.1, "--out-dir", d)
    run_tool("limit-cloud", "--landscape", land, "--heuristic", "mhc",
             "--generations", 0, "--prefix", "identity", "--out-dir", d)
    run_tool("limit-cloud", "--landscape", land, "--heuristic", "sa-cooling",
             "--snapshots", "5,15,30,50", "--out-dir", d)
    # The cloud runs come last: they rewrite the offspring-cloud CSVs that
    # limit-cloud also emits, adding the predicted column and raw points.
    run_tool("cloud", "--landscape", land, "--heuristic", "mhc",
             "--analytic", "--raw-points", "--out-dir", d)
    run_tool("cloud", "--landscape", land, "--heuristic", "sa",
             "--temp", 0.1, "--out-dir", d)
    run_tool("analytic", "--heuristic", "mhc", "--n", 10, "--k", 4,
             "--points", 101, "--out", d / "analytic_mhc.csv")
    run_tool("reproduce-table1", "--n", 8, "--k", 3, "--seeds", "1",
             "--out-dir", d)
    return {
        "dir": d,
        "fc": d / "mhc_cloud.csv",
        "fc_beta": d / "mhc_beta.json",
        "fc_raw": d / "mhc_raw.csv",
        "sa_fc": d / "sa_T0.1_cloud.csv",
        "limit": d / "mhc_limit_cloud.csv",
        "limit_beta": d / "mhc_limit_beta.json",
        "sa_limit": d / "sa_T0.1_limit_cloud.csv",
        "identity": d / "identity_limit_cloud.csv",
        "snapshots": [d / f"sa_cooling_limit{g}_cloud.csv"
                      for g in (5, 15, 30, 50)],
        "analytic": d / "analytic_mhc.csv",
        "table1": d / "table1_report.json",
    }


@pytest.fixture(scope="session")
def figure_inputs(cli_fixtures):
    """Battery artifacts when available, generated small files otherwise."""
    needed = {
        "fc": "mhc_cloud.csv",
        "fc_beta": "mhc_beta.json",
        "limit": "mhc_limit_cloud.csv",
        "limit_beta": "mhc_limit_beta.json",
        "sa_fc": "sa_T0.1_cloud.csv",
        "sa_limit": "sa_T0.1_limit_cloud.csv",
        "identity": "mhc_limit0_cloud.csv",
        "table1": "table1_report.json",
    }
    snapshot_names = [f"sa_cooling_limit{g}_cloud.csv"
                      for g in (50, 1000, 1900, 2450)]
    have_all = ACCEPTANCE_OUT.is_dir() and all(
        (ACCEPTANCE_OUT / name).exists()
        for name in list(needed.values()) + snapshot_names)
    if have_all:
        inputs = {key: ACCEPTANCE_OUT / name for key, name in needed.items()}
        inputs["snapshots"] = [ACCEPTANCE_OUT / n for n in snapshot_names]
        inputs["source"] = "battery artifacts"
        return inputs
    inputs = dict(cli_fixtures)
    inputs["source"] = "generated small instances"
    return inputs
