"""Experiment orchestration: sweeps over the scenario axes, and the CLI.

A sweep runs one simulation per (stop spacing, fleet size, request rate,
seed) cell, collects one metrics row per cell and optionally one event-log
file per cell.  Cells are independent and run in a process pool; results are
sorted by cell key before writing so concurrent and sequential executions
produce identical files.  Seeds are shared across cells (cell seed = base
seed + seed index) so that cells differing only in spacing or fleet face the
same demand realization.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from stopsim.config import ScenarioConfig, format_config, parse_config
from stopsim.engine import export_event_log, run_simulation
from stopsim.metrics import METRICS_HEADER, format_metrics_row, metrics_row

JOBS_ENV_VAR = "STOPSIM_JOBS"
METRICS_FILENAME = "metrics.csv"
CONFIG_ECHO_FILENAME = "resolved_config.txt"
EVENTS_DIRNAME = "events"


@dataclass(frozen=True)
class SweepCell:
    spacing: float
    fleet: int
    rate: float
    seed_index: int

    def label(self) -> str:
        rate = int(self.rate) if float(self.rate).is_integer() else self.rate
        spacing = int(self.spacing) if float(self.spacing).is_integer() else self.spacing
        return f"spacing{spacing}_fleet{self.fleet}_rate{rate}_seed{self.seed_index}"


def sweep_cells(config: ScenarioConfig, seeds: int | None = None) -> list[SweepCell]:
    """Cartesian product of the sweep axes times the per-cell seeds."""
    n_seeds = config.seeds_per_cell if seeds is None else seeds
    if n_seeds < 1:
        raise ValueError(f"seed count must be at least 1, got {n_seeds}")
    return [
        SweepCell(spacing, fleet, rate, s)
        for spacing, fleet, rate, s in product(
            config.sweep_spacings_m,
            config.sweep_fleets,
            config.sweep_rates_per_h_km2,
            range(n_seeds),
        )
    ]


def run_cell(config: ScenarioConfig, cell: SweepCell, events_path=None) -> dict:
    """Simulate one cell and return its metrics row."""
    scenario = config.cell(cell.spacing, cell.fleet, cell.rate, config.seed + cell.seed_index)
    output = run_simulation(scenario)
    if events_path is not None:
        export_event_log(output, events_path)
    return metrics_row(output)


def _cell_worker(args):
    config, cell, events_path = args
    try:
        return cell, run_cell(config, cell, events_path), None
    except Exception as exc:  # surfaced with cell coordinates by the caller
        return cell, None, f"{type(exc).__name__}: {exc}"


def run_sweep(
    config: ScenarioConfig,
    out_dir,
    seeds: int | None = None,
    emit_events: bool = False,
    jobs: int | None = None,
) -> list[dict]:
    """Run every sweep cell, write outputs into ``out_dir``, return the rows.

    Raises ``RuntimeError`` naming each failed cell if any cell fails; the
    rows of successful cells are still written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    events_dir = out_dir / EVENTS_DIRNAME
    if emit_events:
        events_dir.mkdir(exist_ok=True)
    cells = sweep_cells(config, seeds)
    tasks = [
        (
            config,
            cell,
            (events_dir / f"{cell.label()}.csv") if emit_events else None,
        )
        for cell in cells
    ]
    if jobs is None:
        jobs = int(os.environ.get(JOBS_ENV_VAR, 0)) or (os.cpu_count() or 1)
    jobs = max(1, min(jobs, len(tasks)))

    results: dict[SweepCell, dict] = {}
    failures: list[str] = []
    if jobs == 1:
        outcomes = map(_cell_worker, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        outcomes = pool.map(_cell_worker, tasks)
    for cell, row, error in outcomes:
        if error is not None:
            failures.append(f"cell {cell.label()}: {error}")
        else:
            results[cell] = row
    if jobs > 1:
        pool.shutdown()

    rows = [results[cell] for cell in sorted(results, key=lambda c: (c.spacing, c.fleet, c.rate, c.seed_index))]
    emit_outputs(rows, out_dir, config)
    if failures:
        raise RuntimeError("sweep cells failed:\n" + "\n".join(failures))
    return rows


def emit_outputs(rows, out_dir, config: ScenarioConfig) -> None:
    """Write the metrics file and the resolved-config echo atomically."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / METRICS_FILENAME
    tmp = metrics_path.with_suffix(".csv.tmp")
    with open(tmp, "w") as fh:
        fh.write(METRICS_HEADER + "\n")
        for row in rows:
            fh.write(format_metrics_row(row) + "\n")
    os.replace(tmp, metrics_path)
    echo_path = out_dir / CONFIG_ECHO_FILENAME
    tmp = echo_path.with_suffix(".txt.tmp")
    tmp.write_text(format_config(config))
    os.replace(tmp, echo_path)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stopsim",
        description="Ride-pooling fleet simulator with demand consolidated onto a stop lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured sweep and write metrics")
    run_p.add_argument("--config", required=True, help="scenario file (key = value lines)")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--seeds", type=int, default=None, help="seeds per cell (overrides the config)")
    run_p.add_argument("--emit-events", action="store_true", help="write one event log per cell")
    run_p.add_argument(
        "--jobs",
        type=int,
        default=None,
        help=f"worker processes (default: ${JOBS_ENV_VAR} or the CPU count)",
    )

    val_p = sub.add_parser("validate", help="parse a scenario file and echo the resolved config")
    val_p.add_argument("--config", required=True, help="scenario file to check")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        try:
            config = parse_config(args.config)
        except Exception as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return 2
        print(format_config(config), end="")
        return 0
    if args.command == "run":
        try:
            config = parse_config(args.config)
        except Exception as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return 2
        try:
            rows = run_sweep(
                config,
                args.out,
                seeds=args.seeds,
                emit_events=args.emit_events,
                jobs=args.jobs,
            )
        except RuntimeError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        print(f"wrote {len(rows)} rows to {Path(args.out) / METRICS_FILENAME}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
