"""Command line: render the figure set from exported sweep files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from stopsim_figures.figures import FIGURE_IDS, FIGURES
from stopsim_figures.loading import SchemaError, list_event_logs, load_metrics


def render_figures(metrics_path, events_dir, out_dir, figs=None) -> list[Path]:
    """Render the requested figures (all by default); returns the saved paths."""
    wanted = list(figs) if figs else FIGURE_IDS
    unknown = [f for f in wanted if f not in FIGURE_IDS]
    if unknown:
        raise ValueError(f"unknown figure ids {unknown}; available: {FIGURE_IDS}")
    metrics = load_metrics(metrics_path)
    event_index = list_event_logs(events_dir) if events_dir else list_event_logs(".")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in FIGURES:
        if spec.figure_id not in wanted:
            continue
        fig = spec.build(metrics, event_index)
        path = out_dir / f"{spec.figure_id}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stopsim-figs",
        description="Render figures from stopsim metrics and event-log files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render the figure set")
    plot.add_argument("--metrics", required=True, help="metrics.csv from a sweep")
    plot.add_argument("--events", default=None, help="directory of per-cell event logs")
    plot.add_argument("--out", required=True, help="output directory for images")
    plot.add_argument(
        "--figs",
        default=None,
        help=f"comma-separated subset of {','.join(FIGURE_IDS)}",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    figs = [f.strip() for f in args.figs.split(",")] if args.figs else None
    try:
        written = render_figures(args.metrics, args.events, args.out, figs)
    except (SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
