"""Scenario grid: experiment analogs, runs, summaries and reports."""

from sdds_lab.harness.grid import read_result, run_grid
from sdds_lab.harness.report import parse_csv_report, report
from sdds_lab.harness.runner import run_scenario
from sdds_lab.harness.scenarios import DESIGN_FEATURE_TABLE, build_scenarios

__all__ = [
    "DESIGN_FEATURE_TABLE",
    "build_scenarios",
    "parse_csv_report",
    "read_result",
    "report",
    "run_grid",
    "run_scenario",
]
