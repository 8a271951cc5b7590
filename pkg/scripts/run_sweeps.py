"""Run the full sweep battery (planning time, distance, messages, completion
profile, embedding-search time) and drop plot-ready CSVs into results/."""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from shapeform.sweeps import SweepParams, run_sweep

KINDS = ("planning_time", "distance", "messages", "completion_profile", "mcs_time")


def main():
    runs = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    out = ROOT / "results"
    out.mkdir(exist_ok=True)
    params = SweepParams(runs=runs, seed=0)
    for kind in KINDS:
        print(f"sweep {kind} ({runs} runs per point) ...")
        report = run_sweep(kind, params)
        path = out / f"{kind}.csv"
        report.write(path)
        if report.failures:
            print(f"  {len(report.failures)} failed runs recorded")
        print(f"  wrote {path}")


if __name__ == "__main__":
    main()
