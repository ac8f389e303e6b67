#!/usr/bin/env python3
"""Run every shipped scenario and write CSVs plus plot scripts to results/.

Usage: python3 scripts/regenerate_figures.py [outdir]
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

from geoscatter.experiment import (
    emit_csv,
    emit_plot_script,
    load_scenario,
    run_sweep,
    scenario_comment_lines,
)

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results"
    outdir.mkdir(parents=True, exist_ok=True)
    for path in sorted((ROOT / "scenarios").glob("*.json")):
        scenario = load_scenario(path)
        t0 = time.perf_counter()
        rows = run_sweep(scenario)
        csv_path = outdir / f"{scenario.name}.csv"
        emit_csv(rows, csv_path, comments=scenario_comment_lines(scenario))
        emit_plot_script(rows, outdir / f"{scenario.name}_plot.py", csv_name=csv_path.name)
        print(f"{scenario.name}: {len(rows)} rows in {time.perf_counter() - t0:.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
