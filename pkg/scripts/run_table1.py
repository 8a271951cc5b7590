"""Fixed-size reproduction sweep: plan 100-module scenarios whose initial
configurations all share one size, and report disconnection statistics."""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from shapeform.sweeps import SweepParams, run_sweep


def main():
    runs = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    params = SweepParams(runs=runs, seed=0)
    print(f"equal-config-size sweep, {runs} runs per size ...")
    report = run_sweep("table1", params)
    print(f"{'size':>6} {'plan ms (avg/std)':>22} {'disconnections (avg/std)':>28}")
    for size, t_mean, t_std, d_mean, d_std in report.rows:
        print(f"{size:>6} {t_mean * 1000:>12.2f} / {t_std * 1000:<8.2f}"
              f"{d_mean:>14.2f} / {d_std:<8.2f}")
    out = ROOT / "results"
    out.mkdir(exist_ok=True)
    report.write(out / "table1.csv")
    print(f"wrote {out / 'table1.csv'}")


if __name__ == "__main__":
    main()
