#!/usr/bin/env python3
"""Regenerate the golden CSVs that the acceptance suite compares against.

Only needed after an intentional change to the numerics or the CSV format;
the acceptance test then re-derives these files and requires byte
equality.
"""

from __future__ import annotations

import sys
from pathlib import Path

from geoscatter.experiment import emit_csv, load_scenario, run_sweep, scenario_comment_lines

ROOT = Path(__file__).resolve().parents[1]

GOLDEN_SCENARIOS = [
    "fig2a_central_theta000",
    "fig2a_central_theta060",
    "fig2a_central_theta120",
    "fig2a_central_theta180",
]


def main() -> int:
    outdir = ROOT / "tests" / "golden"
    outdir.mkdir(parents=True, exist_ok=True)
    for name in GOLDEN_SCENARIOS:
        scenario = load_scenario(ROOT / "scenarios" / f"{name}.json")
        rows = run_sweep(scenario)
        emit_csv(rows, outdir / f"{name}.csv", comments=scenario_comment_lines(scenario))
        print(f"refreshed {name}.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
