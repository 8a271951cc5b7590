"""Command-line interface: generate scenarios, run plans, sweep experiments."""

from __future__ import annotations

import dataclasses
import os
from pathlib import Path

import click

from .generate import GenParams, generate_scenario
from .model import AlgoParams
from .scenario_io import export_event_log, load_scenario, save_result, save_scenario
from .simulate import run_scenario
from .sweeps import SWEEP_KINDS, SweepParams, run_cases, run_sweep

OUT_DIR_ENV = "SHAPEFORM_OUT_DIR"


def _out_path(out: str | None, default_name: str) -> Path:
    if out:
        return Path(out)
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / default_name


def _parse_points(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


@click.group()
def main() -> None:
    """Configuration-formation planner and experiment harness."""


@main.command()
@click.option("--spots", "n_spots", type=int, required=True, help="Spots in the target.")
@click.option("--modules", "n_modules", type=int, default=None,
              help="Module count (defaults to --spots).")
@click.option("--seed", type=int, default=0)
@click.option("--equal-config-size", type=int, default=None,
              help="All initial configurations take this size (reproduction mode).")
@click.option("--singletons-only", is_flag=True, default=False)
@click.option("--dmax", type=int, default=3, help="Eviction recursion bound.")
@click.option("--max-embeddings", type=int, default=20)
@click.option("--out", type=str, default=None)
def generate(n_spots, n_modules, seed, equal_config_size, singletons_only,
             dmax, max_embeddings, out):
    """Generate a random scenario file."""
    params = GenParams(n_spots=n_spots, n_modules=n_modules, seed=seed,
                       equal_config_size=equal_config_size,
                       singletons_only=singletons_only,
                       algo_params=AlgoParams(max_eviction_depth=dmax,
                                              max_embeddings=max_embeddings))
    scenario = generate_scenario(params)
    path = _out_path(out, f"scenario_{n_spots}_{seed}.json")
    save_scenario(scenario, path)
    click.echo(f"wrote {path} ({len(scenario.modules)} modules, "
               f"{len(scenario.configurations)} configurations, "
               f"{len(scenario.target.spots)} spots)")


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True))
@click.option("--dmax", type=int, default=None, help="Override eviction bound.")
@click.option("--max-embeddings", type=int, default=None)
@click.option("--out", type=str, default=None)
@click.option("--events", type=str, default=None, help="Also export the event log here.")
def run(scenario_path, dmax, max_embeddings, out, events):
    """Plan and act one scenario, saving the result as JSON."""
    scenario = load_scenario(scenario_path)
    algo = scenario.algo_params
    if dmax is not None:
        algo = dataclasses.replace(algo, max_eviction_depth=dmax)
    if max_embeddings is not None:
        algo = dataclasses.replace(algo, max_embeddings=max_embeddings)
    scenario = dataclasses.replace(scenario, algo_params=algo)
    result = run_scenario(scenario)
    path = _out_path(out, Path(scenario_path).stem + "_result.json")
    save_result(result, path)
    if events:
        export_event_log(result, events)
    m = result.metrics
    click.echo(f"complete={result.complete} spots={len(result.allocation)} "
               f"planning={m.planning_wall_time * 1000:.1f}ms "
               f"broadcasts={m.broadcast_count} distance={m.total_distance:.2f} "
               f"disconnections={m.disconnection_count} utility={m.total_utility:.3f}")
    click.echo(f"wrote {path}")


@main.command()
@click.argument("kind", type=click.Choice(SWEEP_KINDS))
@click.option("--points", type=str, default="10,25,50,100",
              help="Comma-separated sweep points (module counts).")
@click.option("--sizes", type=str, default="10,20,25,50",
              help="Comma-separated configuration sizes (table1 mode).")
@click.option("--spots", "n_spots", type=int, default=100,
              help="Spot count for table1 mode.")
@click.option("--runs", type=int, default=50)
@click.option("--seed", type=int, default=0)
@click.option("--dmax", type=int, default=3)
@click.option("--max-embeddings", type=int, default=20)
@click.option("--out", type=str, default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
def sweep(kind, points, sizes, n_spots, runs, seed, dmax, max_embeddings, out, fmt):
    """Run one experiment sweep and write a report."""
    params = SweepParams(points=_parse_points(points), runs=runs, seed=seed,
                         table_sizes=_parse_points(sizes), table_spots=n_spots,
                         algo_params=AlgoParams(max_eviction_depth=dmax,
                                                max_embeddings=max_embeddings))
    report = run_sweep(kind, params)
    path = _out_path(out, f"sweep_{kind}.{fmt}")
    report.write(path, fmt)
    click.echo(report.to_csv().rstrip())
    if report.failures:
        click.echo(f"{len(report.failures)} failed runs recorded")
    click.echo(f"wrote {path}")


@main.command()
@click.argument("case_dir", type=click.Path(exists=True), default="cases")
@click.option("--out", type=str, default=None)
def cases(case_dir, out):
    """Run the bundled formation cases and check recorded expectations."""
    report = run_cases(case_dir)
    for row in report.rows:
        click.echo(f"{row['case']}: planning={row['planning_time_s'] * 1000:.1f}ms "
                   f"disconnections={row['disconnections']} "
                   f"complete={row['complete']} ok={row['ok']}")
    path = _out_path(out, "cases_report.json")
    Path(path).write_text(report.to_json())
    click.echo(f"wrote {path}")
    if not report.all_ok:
        raise SystemExit(1)


@main.command("compare-auction")
@click.option("--points", type=str, default="25,50,100")
@click.option("--runs", type=int, default=50)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=str, default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
def compare_auction(points, runs, seed, out, fmt):
    """Side-by-side planner vs auction sweep on singleton-only scenarios."""
    params = SweepParams(points=_parse_points(points), runs=runs, seed=seed)
    report = run_sweep("auction_compare", params)
    path = _out_path(out, f"auction_compare.{fmt}")
    report.write(path, fmt)
    click.echo(report.to_csv().rstrip())
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
