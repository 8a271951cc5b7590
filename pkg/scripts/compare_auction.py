"""Planner vs auction baseline on identical singleton-only scenarios."""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from shapeform.sweeps import SweepParams, run_sweep


def main():
    runs = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    params = SweepParams(points=(25, 50, 100), runs=runs, seed=0)
    print(f"auction comparison, {runs} singleton-only runs per point ...")
    report = run_sweep("auction_compare", params)
    header = f"{'n':>4} {'algorithm':>16} {'plan ms':>10} {'distance':>10} {'broadcasts':>11}"
    print(header)
    for n, algo, t_mean, _, d_mean, _, b_mean, _ in report.rows:
        print(f"{n:>4} {algo:>16} {t_mean * 1000:>10.2f} {d_mean:>10.2f} {b_mean:>11.1f}")
    out = ROOT / "results"
    out.mkdir(exist_ok=True)
    report.write(out / "auction_compare.csv")
    print(f"wrote {out / 'auction_compare.csv'}")


if __name__ == "__main__":
    main()
